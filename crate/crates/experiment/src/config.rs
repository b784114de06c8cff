//! Scenario configuration. Powers are given in dBm and converted to Watts
//! only when a design is built.

use irs_covert::channel::{FadingParams, Geometry, Point};
use irs_covert::design::CovertParams;
use irs_covert::robust::KlCase;
use irs_covert::units::dbm_to_watts;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Perfect,
    Discrete,
    NoIrs,
    RobustKl01,
    RobustKl10,
    /// Robust routine with a point ellipsoid, validated against the configured errors.
    NominalKl01,
    NominalKl10,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Perfect => "perfect",
            Method::Discrete => "discrete",
            Method::NoIrs => "no_irs",
            Method::RobustKl01 => "robust_kl01",
            Method::RobustKl10 => "robust_kl10",
            Method::NominalKl01 => "nominal_kl01",
            Method::NominalKl10 => "nominal_kl10",
        }
    }

    /// Divergence direction for the imperfect-knowledge methods.
    pub fn kl_case(self) -> Option<KlCase> {
        match self {
            Method::RobustKl01 | Method::NominalKl01 => Some(KlCase::Kl01),
            Method::RobustKl10 | Method::NominalKl10 => Some(KlCase::Kl10),
            _ => None,
        }
    }

    pub fn is_robust_family(self) -> bool {
        self.kl_case().is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layout {
    pub alice: Point,
    pub bob: Point,
    pub willie: Point,
    pub irs: Point,
}

impl Default for Layout {
    fn default() -> Self {
        let g = Geometry::reference();
        Self {
            alice: g.alice,
            bob: g.bob,
            willie: g.willie,
            irs: g.irs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub convergence_eps: f64,
    pub max_outer_iters: usize,
    pub rand_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let p = CovertParams::new(1.0);
        Self {
            convergence_eps: p.convergence_eps,
            max_outer_iters: p.max_outer_iters,
            rand_samples: p.rand_samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub layout: Layout,
    pub fading: FadingParams,
    /// Transmit antenna counts to sweep.
    pub n_tx: Vec<usize>,
    pub n_irs: usize,
    /// Phase-codebook resolution of the discrete design.
    pub phase_bits: u32,
    pub noise_dbm: f64,
    pub p_total_dbm: Vec<f64>,
    pub epsilon: Vec<f64>,
    pub v_w: Vec<f64>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    /// Perturbed warden channels drawn per robust-family trial; 0 skips validation.
    pub kl_samples: usize,
    pub solver: SolverConfig,
    pub output_path: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            layout: Layout::default(),
            fading: FadingParams::reference(),
            n_tx: vec![4],
            n_irs: 4,
            phase_bits: 1,
            noise_dbm: -80.0,
            p_total_dbm: vec![-20.0, -15.0, -10.0, -5.0, 0.0],
            epsilon: vec![0.1],
            v_w: vec![2e-4],
            methods: vec![Method::Perfect, Method::Discrete, Method::NoIrs],
            trials: 50,
            master_seed: 2021,
            kl_samples: 1000,
            solver: SolverConfig::default(),
            output_path: None,
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        for (name, empty) in [
            ("n_tx", self.n_tx.is_empty()),
            ("p_total_dbm", self.p_total_dbm.is_empty()),
            ("methods", self.methods.is_empty()),
        ] {
            if empty {
                return bad(format!("{name} must not be empty"));
            }
        }
        if self.methods.iter().any(|m| m.is_robust_family()) && (self.epsilon.is_empty() || self.v_w.is_empty()) {
            return bad("robust methods need nonempty epsilon and v_w lists".into());
        }
        if self.n_tx.contains(&0) || self.n_irs == 0 {
            return bad("antenna and element counts must be positive".into());
        }
        if !(1..=24).contains(&self.phase_bits) {
            return bad(format!("phase_bits must be in 1..=24, got {}", self.phase_bits));
        }
        if self.p_total_dbm.iter().chain([&self.noise_dbm]).any(|v| !v.is_finite()) {
            return bad("powers must be finite".into());
        }
        if self.epsilon.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
            return bad("epsilon values must be positive".into());
        }
        if self.v_w.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
            return bad("v_w values must be nonnegative".into());
        }
        for n in &self.n_tx {
            self.geometry(*n)
                .validate()
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        self.fading.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.params(self.p_total_dbm[0])
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }

    pub fn geometry(&self, n_tx: usize) -> Geometry {
        Geometry {
            alice: self.layout.alice,
            bob: self.layout.bob,
            willie: self.layout.willie,
            irs: self.layout.irs,
            n_tx,
            n_irs: self.n_irs,
        }
    }

    pub fn params(&self, p_total_dbm: f64) -> CovertParams {
        let noise = dbm_to_watts(self.noise_dbm);
        CovertParams {
            p_total: dbm_to_watts(p_total_dbm),
            sigma_b2: noise,
            sigma_w2: noise,
            convergence_eps: self.solver.convergence_eps,
            max_outer_iters: self.solver.max_outer_iters,
            rand_samples: self.solver.rand_samples,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid_and_round_trips() {
        let c = ScenarioConfig::default();
        c.validate().unwrap();
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ScenarioConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(c, back);
        let params = c.params(-10.0);
        assert!((params.p_total - 1e-4).abs() < 1e-18);
        assert!((params.sigma_b2 - 1e-11).abs() < 1e-24);
    }

    #[test]
    fn partial_json_uses_defaults() {
        let c: ScenarioConfig = serde_json::from_str(r#"{"trials": 3, "methods": ["robust_kl10"]}"#).unwrap();
        assert_eq!(c.trials, 3);
        assert_eq!(c.methods, vec![Method::RobustKl10]);
        assert_eq!(c.n_irs, 4);
        let c: ScenarioConfig = serde_json::from_str(r#"{"fading": {"rician_k": 10.0}}"#).unwrap();
        assert_eq!(c.fading.rician_k, 10.0);
        assert_eq!(c.fading.zeta0_db, FadingParams::reference().zeta0_db);
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut c = ScenarioConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c.trials = 1;
        c.p_total_dbm.clear();
        assert!(c.validate().is_err());
        let c = ScenarioConfig {
            methods: vec![Method::RobustKl01],
            epsilon: vec![],
            ..Default::default()
        };
        assert!(c.validate().is_err());
        assert!(serde_json::from_str::<ScenarioConfig>(r#"{"bogus": 1}"#).is_err());
    }
}

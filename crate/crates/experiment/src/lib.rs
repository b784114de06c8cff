//! Experiment harness for the covert beamforming designs: scenario configs,
//! seeded sweeps with CSV output, and quick oracle validation.

pub mod config;
pub mod sweep;
pub mod validate;

use config::{Method, ScenarioConfig};

/// Which designs a subcommand runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Perfect,
    Discrete,
    Robust,
    /// Robust designs reported through the warden's detection statistics only.
    Detect,
    /// Methods exactly as configured.
    Sweep,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Perfect => "perfect",
            Mode::Discrete => "discrete",
            Mode::Robust => "robust",
            Mode::Detect => "detect",
            Mode::Sweep => "sweep",
        }
    }

    /// Restricts `config` to the methods of this mode.
    pub fn apply(self, mut config: ScenarioConfig) -> ScenarioConfig {
        let robust: Vec<Method> = config.methods.iter().copied().filter(|m| m.is_robust_family()).collect();
        match self {
            Mode::Perfect => config.methods = vec![Method::Perfect],
            Mode::Discrete => config.methods = vec![Method::Discrete],
            Mode::Robust => {
                config.methods = if robust.is_empty() {
                    vec![Method::RobustKl01, Method::RobustKl10]
                } else {
                    robust
                }
            }
            Mode::Detect => {
                config.methods = if robust.is_empty() { vec![Method::RobustKl01] } else { robust };
                config.kl_samples = 0;
            }
            Mode::Sweep => {}
        }
        config
    }
}

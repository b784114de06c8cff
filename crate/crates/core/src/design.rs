//! Types shared by the perfect, discrete and robust designs.

use crate::channel::ChannelSet;
use crate::complex_serde;
use crate::detection::DetectionError;
use crate::numerics::{null_projector, ComplexVector, NumericsError};
use crate::sdp::{SdpError, SdpStatus};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovertParams {
    /// Transmit power budget in Watts.
    pub p_total: f64,
    pub sigma_b2: f64,
    pub sigma_w2: f64,
    pub convergence_eps: f64,
    pub max_outer_iters: usize,
    /// Gaussian randomization draws per reflect-beamformer step.
    pub rand_samples: usize,
}

impl CovertParams {
    /// Defaults: −80 dBm noise at both receivers, ε-stop 1e-4, 50 outer iterations, 200 draws.
    pub fn new(p_total: f64) -> Self {
        Self {
            p_total,
            sigma_b2: 1e-11,
            sigma_w2: 1e-11,
            convergence_eps: 1e-4,
            max_outer_iters: 50,
            rand_samples: 200,
        }
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        let positive = [self.p_total, self.sigma_b2, self.sigma_w2, self.convergence_eps];
        if positive.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(DesignError::InvalidParams(
                "powers, noise variances and convergence tolerance must be positive".into(),
            ));
        }
        if self.max_outer_iters == 0 || self.rand_samples == 0 {
            return Err(DesignError::InvalidParams(
                "iteration and sample counts must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeamformerSolution {
    #[serde(with = "complex_serde::vector")]
    pub w_b: ComplexVector,
    /// Reflect coefficients; all zeros for the no-IRS baseline.
    #[serde(with = "complex_serde::vector")]
    pub q: ComplexVector,
    /// Codebook indices when the design is discrete.
    pub phase_indices: Option<Vec<usize>>,
    pub rate_bits: f64,
    /// Rate after each completed outer iteration.
    pub objective_trace: Vec<f64>,
    /// Warden leakage `|t_w w_b|²` after each outer iteration.
    pub covert_residual_trace: Vec<f64>,
    pub iterations: usize,
    pub baseline: bool,
}

impl BeamformerSolution {
    pub fn bob_gain(&self, ch: &ChannelSet) -> f64 {
        ch.bob().gain(&self.w_b, &self.q)
    }

    pub fn willie_gain(&self, ch: &ChannelSet) -> f64 {
        ch.willie().gain(&self.w_b, &self.q)
    }
}

/// `log₂(1 + gain/σ²)`.
pub fn rate_bits(gain: f64, sigma2: f64) -> f64 {
    (gain.max(0.0) / sigma2).ln_1p() / std::f64::consts::LN_2
}

/// Largest `|c_b^H w|²` over `‖w‖² ≤ P`, `c_w^H w = 0`: `P ‖P⊥(c_w) c_b‖²`.
pub fn null_space_gain(c_b: &ComplexVector, c_w: &ComplexVector, p_total: f64) -> f64 {
    p_total * (null_projector(c_w).as_matrix() * c_b).norm_squared()
}

/// Beamformer attaining [`null_space_gain`].
pub fn null_space_beamformer(c_b: &ComplexVector, c_w: &ComplexVector, p_total: f64) -> ComplexVector {
    let v = null_projector(c_w).as_matrix() * c_b;
    let n = v.norm();
    // Round-off residue of a channel parallel to the warden's.
    if n <= 1e-12 * c_b.norm() {
        return ComplexVector::zeros(c_b.len());
    }
    v * Complex64::new(p_total.sqrt() / n, 0.0)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sdp(#[from] SdpError),
    #[error("{stage}: SDP solver stopped with status {status:?}")]
    SolverStatus { stage: &'static str, status: SdpStatus },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Detection(#[from] DetectionError),
    #[error("objective decreased from {previous} to {current} at iteration {iteration}")]
    NonMonotone {
        iteration: usize,
        previous: f64,
        current: f64,
    },
    #[error(
        "robust covertness infeasible for interval [{a_bar}, {b_bar}] with uncertainty size {v_w}"
    )]
    RobustInfeasible { a_bar: f64, b_bar: f64, v_w: f64 },
}

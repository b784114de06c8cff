//! Warden-side analytics for a radiometer test on `|y_w|²`.
//!
//! Under each hypothesis the received power is exponential with mean `λ₀`
//! (noise only) or `λ₁` (signal plus noise). All divergences are in nats.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Below this relative separation `λ₁` and `λ₀` are treated as equal.
pub const EQUAL_POWER_TOL: f64 = 1e-12;
const SERIES_CUTOFF: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DetectionError {
    #[error("received powers must be positive and finite (lambda0 = {lambda0}, lambda1 = {lambda1})")]
    InvalidPower { lambda0: f64, lambda1: f64 },
    #[error("signal-plus-noise power {lambda1} is below the noise power {lambda0}")]
    SignalBelowNoise { lambda0: f64, lambda1: f64 },
    #[error("covertness level must be nonnegative and finite, got {0}")]
    InvalidEpsilon(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceptionStats {
    pub lambda0: f64,
    pub lambda1: f64,
}

impl ReceptionStats {
    /// Validates `λ₀ > 0` and `λ₁ ≥ λ₀`; a deficit within round-off is clamped.
    pub fn new(lambda0: f64, lambda1: f64) -> Result<Self, DetectionError> {
        if !(lambda0 > 0.0 && lambda1 > 0.0) || !lambda0.is_finite() || !lambda1.is_finite() {
            return Err(DetectionError::InvalidPower { lambda0, lambda1 });
        }
        if lambda1 < lambda0 {
            if lambda0 - lambda1 > EQUAL_POWER_TOL * lambda0 {
                return Err(DetectionError::SignalBelowNoise { lambda0, lambda1 });
            }
            return Ok(Self {
                lambda0,
                lambda1: lambda0,
            });
        }
        Ok(Self { lambda0, lambda1 })
    }

    /// Noise power plus the power the warden collects from the transmission.
    pub fn from_leakage(noise: f64, leaked_power: f64) -> Result<Self, DetectionError> {
        Self::new(noise, noise + leaked_power.max(0.0))
    }

    /// `λ₁/λ₀ − 1`.
    fn excess(&self) -> f64 {
        (self.lambda1 - self.lambda0) / self.lambda0
    }
}

/// `ln(1+x) + 1/(1+x) − 1`, accurate for small `x`.
fn kl_forward(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        // Σ_{k≥2} (−1)^k (k−1)/k x^k
        let mut acc = 0.0;
        let mut p = x * x;
        for k in 2..=8 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * (k as f64 - 1.0) / k as f64 * p;
            p *= x;
        }
        acc
    } else {
        x.ln_1p() - x / (1.0 + x)
    }
}

/// `x − ln(1+x)`, accurate for small `x`.
fn kl_backward(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let mut acc = 0.0;
        let mut p = x * x;
        for k in 2..=8 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * p / k as f64;
            p *= x;
        }
        acc
    } else {
        x - x.ln_1p()
    }
}

/// `f(x) = ln x + 1/x − 1`, the divergence `D(p₀‖p₁)` as a function of `λ₁/λ₀`.
pub fn kl_ratio_function(x: f64) -> f64 {
    kl_forward(x - 1.0)
}

/// `(D(p₀‖p₁), D(p₁‖p₀))` with `D(p₀‖p₁) = ln(λ₁/λ₀) + λ₀/λ₁ − 1`.
pub fn kl_divergences(s: &ReceptionStats) -> (f64, f64) {
    let x = s.excess();
    (kl_forward(x).max(0.0), kl_backward(x).max(0.0))
}

/// Likelihood-ratio threshold `φ* = λ₀λ₁/(λ₁−λ₀) · ln(λ₁/λ₀)`, where the two
/// exponential densities cross; equals `λ₀` in the equal-power limit.
pub fn optimal_threshold(s: &ReceptionStats) -> f64 {
    let x = s.excess();
    if x.abs() <= EQUAL_POWER_TOL {
        return s.lambda0;
    }
    s.lambda0 * (1.0 + x) * x.ln_1p() / x
}

/// `(P(D₁|H₀), P(D₀|H₁))` at the optimal threshold.
pub fn detection_probabilities(s: &ReceptionStats) -> (f64, f64) {
    let phi = optimal_threshold(s);
    let p_fa = (-phi / s.lambda0).exp();
    let p_md = -(-phi / s.lambda1).exp_m1();
    (p_fa.clamp(0.0, 1.0), p_md.clamp(0.0, 1.0))
}

/// Total-variation bound `min(√(D/2), 1)`.
pub fn pinsker_bound(kl: f64) -> f64 {
    (kl.max(0.0) / 2.0).sqrt().min(1.0)
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) and f(hi) have opposite signs.
    let lo_sign = f(lo) > 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() <= f(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Roots `ā < 1 < b̄` of `ln x + 1/x − 1 = 2ε²`.
///
/// A design is `ε`-covert in the `D(p₀‖p₁)` sense iff `λ₁/λ₀ ∈ [ā, b̄]`.
pub fn covert_interval(epsilon: f64) -> Result<(f64, f64), DetectionError> {
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(DetectionError::InvalidEpsilon(epsilon));
    }
    if epsilon == 0.0 {
        return Ok((1.0, 1.0));
    }
    let target = 2.0 * epsilon * epsilon;
    let g = |x: f64| kl_ratio_function(x) - target;
    let a = bisect(g, 1e-9, 1.0);
    let mut hi = 2.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let b = bisect(g, 1.0, hi);
    Ok((a, b))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub lambda0: f64,
    pub lambda1: f64,
    pub threshold: f64,
    pub p_fa: f64,
    pub p_md: f64,
    pub kl_01: f64,
    pub kl_10: f64,
    pub xi: f64,
}

impl DetectionReport {
    pub const CSV_HEADER: &'static str = "lambda0,lambda1,threshold,p_fa,p_md,kl_01,kl_10,xi";

    pub fn new(s: &ReceptionStats) -> Self {
        let (kl_01, kl_10) = kl_divergences(s);
        let (p_fa, p_md) = detection_probabilities(s);
        Self {
            lambda0: s.lambda0,
            lambda1: s.lambda1,
            threshold: optimal_threshold(s),
            p_fa,
            p_md,
            kl_01,
            kl_10,
            xi: p_fa + p_md,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.lambda0, self.lambda1, self.threshold, self.p_fa, self.p_md, self.kl_01, self.kl_10, self.xi
        )
    }
}

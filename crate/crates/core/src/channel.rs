//! Geometry-driven channel generation for the five links of the system:
//! Alice→Bob, Alice→Willie (Rayleigh), Alice→IRS, IRS→Bob and IRS→Willie
//! (Rician with steering-vector line of sight).

use crate::complex_serde;
use crate::numerics::{conj, ComplexMatrix, ComplexVector};
use crate::units::db_to_linear;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use thiserror::Error;

/// Antenna spacing over wavelength.
pub const SPACING_OVER_WAVELENGTH: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("link distance must be positive, got {0}")]
    NonPositiveDistance(f64),
    #[error("transmitter and receiver coincide at ({x}, {y})")]
    CoincidentPoints { x: f64, y: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub alice: Point,
    pub bob: Point,
    pub willie: Point,
    pub irs: Point,
    pub n_tx: usize,
    pub n_irs: usize,
}

impl Geometry {
    /// Reference layout: Alice (0,3), Bob (8,0), Willie (5,0), IRS (10,3), N = M = 4.
    pub fn reference() -> Self {
        Self {
            alice: Point::new(0.0, 3.0),
            bob: Point::new(8.0, 0.0),
            willie: Point::new(5.0, 0.0),
            irs: Point::new(10.0, 3.0),
            n_tx: 4,
            n_irs: 4,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.n_tx == 0 || self.n_irs == 0 {
            return Err(ChannelError::InvalidParameter(format!(
                "antenna counts must be positive (N = {}, M = {})",
                self.n_tx, self.n_irs
            )));
        }
        let pts = [self.alice, self.bob, self.willie, self.irs];
        for (i, a) in pts.iter().enumerate() {
            for b in &pts[i + 1..] {
                if a.distance(b) <= 0.0 {
                    return Err(ChannelError::CoincidentPoints { x: a.x, y: a.y });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossExponents {
    pub aw: f64,
    pub ab: f64,
    pub iw: f64,
    pub ib: f64,
    pub ai: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FadingParams {
    pub zeta0_db: f64,
    pub alpha: PathLossExponents,
    /// Rician factor shared by the IRS-related links.
    pub rician_k: f64,
}

impl Default for FadingParams {
    fn default() -> Self {
        Self::reference()
    }
}

impl FadingParams {
    pub fn reference() -> Self {
        Self {
            zeta0_db: -30.0,
            alpha: PathLossExponents {
                aw: 3.0,
                ab: 3.0,
                iw: 3.0,
                ib: 3.0,
                ai: 2.2,
            },
            rician_k: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        let a = self.alpha;
        if [a.aw, a.ab, a.iw, a.ib, a.ai].iter().any(|&x| !(x > 0.0)) {
            return Err(ChannelError::InvalidParameter("path-loss exponents must be positive".into()));
        }
        if !(self.rician_k >= 0.0) {
            return Err(ChannelError::InvalidParameter(format!(
                "Rician factor must be nonnegative, got {}",
                self.rician_k
            )));
        }
        Ok(())
    }
}

/// Amplitude gain `√(ζ₀ d^{-α})` with a 1 m reference distance.
pub fn path_loss(d: f64, alpha: f64, zeta0_db: f64) -> Result<f64, ChannelError> {
    if !(d > 0.0) {
        return Err(ChannelError::NonPositiveDistance(d));
    }
    Ok((db_to_linear(zeta0_db) * d.powf(-alpha)).sqrt())
}

/// Uniform linear array response; entry `k` is `exp(-j 2π (d/λ) k sin φ)`.
pub fn steering_vector(n: usize, phi: f64) -> ComplexVector {
    let step = -2.0 * PI * SPACING_OVER_WAVELENGTH * phi.sin();
    ComplexVector::from_fn(n, |k, _| Complex64::from_polar(1.0, step * k as f64))
}

/// Departure and arrival angles `(φ_t, π − φ_t)`, with a four-quadrant arctangent.
pub fn angles(tx: Point, rx: Point) -> Result<(f64, f64), ChannelError> {
    if tx.distance(&rx) == 0.0 {
        return Err(ChannelError::CoincidentPoints { x: tx.x, y: tx.y });
    }
    let phi_t = (rx.y - tx.y).atan2(rx.x - tx.x);
    Ok((phi_t, PI - phi_t))
}

/// One realization of every link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    #[serde(with = "complex_serde::vector")]
    pub h_ab: ComplexVector,
    #[serde(with = "complex_serde::vector")]
    pub h_aw: ComplexVector,
    #[serde(with = "complex_serde::vector")]
    pub h_ib: ComplexVector,
    #[serde(with = "complex_serde::vector")]
    pub h_iw: ComplexVector,
    #[serde(with = "complex_serde::matrix")]
    pub h_ai: ComplexMatrix,
}

/// A receiver's view of the channel: direct link from Alice plus the IRS path.
#[derive(Debug, Clone, Copy)]
pub struct Link<'a> {
    pub direct: &'a ComplexVector,
    pub reflected: &'a ComplexVector,
    pub h_ai: &'a ComplexMatrix,
}

impl Link<'_> {
    /// Composite channel `c` with received amplitude `c^H w`:
    /// `c = H_AI^H (conj(q) ∘ h_I) + h_A`.
    pub fn composite(&self, q: &ComplexVector) -> ComplexVector {
        let weighted = conj(q).component_mul(self.reflected);
        self.h_ai.adjoint() * weighted + self.direct
    }

    /// Per-element cascade `Φ = diag(h_I^H) H_AI w` and direct term `h_A^H w`,
    /// so that the received amplitude is `Σ_m q_m Φ_m + c`.
    pub fn cascade(&self, w: &ComplexVector) -> (ComplexVector, Complex64) {
        let hw = self.h_ai * w;
        let phi = conj(self.reflected).component_mul(&hw);
        (phi, self.direct.dotc(w))
    }

    /// Received amplitude `t w` for reflect vector `q`.
    pub fn amplitude(&self, w: &ComplexVector, q: &ComplexVector) -> Complex64 {
        self.composite(q).dotc(w)
    }

    /// Received signal power `|t w|²`.
    pub fn gain(&self, w: &ComplexVector, q: &ComplexVector) -> f64 {
        self.amplitude(w, q).norm_sqr()
    }
}

impl ChannelSet {
    pub fn n_tx(&self) -> usize {
        self.h_ab.len()
    }

    pub fn n_irs(&self) -> usize {
        self.h_ib.len()
    }

    pub fn bob(&self) -> Link<'_> {
        Link {
            direct: &self.h_ab,
            reflected: &self.h_ib,
            h_ai: &self.h_ai,
        }
    }

    pub fn willie(&self) -> Link<'_> {
        Link {
            direct: &self.h_aw,
            reflected: &self.h_iw,
            h_ai: &self.h_ai,
        }
    }

    pub fn is_finite(&self) -> bool {
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        self.h_ab.iter().all(finite)
            && self.h_aw.iter().all(finite)
            && self.h_ib.iter().all(finite)
            && self.h_iw.iter().all(finite)
            && self.h_ai.iter().all(finite)
    }
}

/// `CN(0, 1)` draw.
pub fn complex_normal<R: rand::Rng>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}

fn rayleigh_vector(rng: &mut ChaCha20Rng, n: usize) -> ComplexVector {
    ComplexVector::from_fn(n, |_, _| complex_normal(rng))
}

fn rician_mix(los: ComplexMatrix, nlos: ComplexMatrix, k: f64) -> ComplexMatrix {
    if k.is_infinite() {
        return los;
    }
    let a = (k / (1.0 + k)).sqrt();
    let b = (1.0 / (1.0 + k)).sqrt();
    los * Complex64::new(a, 0.0) + nlos * Complex64::new(b, 0.0)
}

fn column(m: ComplexMatrix) -> ComplexVector {
    m.column(0).into_owned()
}

/// Draws all five links. Deterministic per `seed`; the draw order is
/// `h_AB, h_AW, H_AI, h_IB, h_IW`.
pub fn sample_channels(geom: &Geometry, fading: &FadingParams, seed: u64) -> Result<ChannelSet, ChannelError> {
    geom.validate()?;
    fading.validate()?;
    let (n, m) = (geom.n_tx, geom.n_irs);
    let a = fading.alpha;
    let z0 = fading.zeta0_db;
    let pl_ab = path_loss(geom.alice.distance(&geom.bob), a.ab, z0)?;
    let pl_aw = path_loss(geom.alice.distance(&geom.willie), a.aw, z0)?;
    let pl_ai = path_loss(geom.alice.distance(&geom.irs), a.ai, z0)?;
    let pl_ib = path_loss(geom.irs.distance(&geom.bob), a.ib, z0)?;
    let pl_iw = path_loss(geom.irs.distance(&geom.willie), a.iw, z0)?;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let h_ab = rayleigh_vector(&mut rng, n) * Complex64::new(pl_ab, 0.0);
    let h_aw = rayleigh_vector(&mut rng, n) * Complex64::new(pl_aw, 0.0);

    let (phi_t, phi_r) = angles(geom.alice, geom.irs)?;
    let los_ai = steering_vector(m, phi_r) * steering_vector(n, phi_t).adjoint();
    let nlos_ai = ComplexMatrix::from_fn(m, n, |_, _| complex_normal(&mut rng));
    let h_ai = rician_mix(los_ai, nlos_ai, fading.rician_k) * Complex64::new(pl_ai, 0.0);

    let irs_link = |rng: &mut ChaCha20Rng, rx: Point, pl: f64| -> Result<ComplexVector, ChannelError> {
        let (phi, _) = angles(geom.irs, rx)?;
        let los = ComplexMatrix::from_column_slice(m, 1, steering_vector(m, phi).as_slice());
        let nlos = ComplexMatrix::from_fn(m, 1, |_, _| complex_normal(rng));
        Ok(column(rician_mix(los, nlos, fading.rician_k)) * Complex64::new(pl, 0.0))
    };
    let h_ib = irs_link(&mut rng, geom.bob, pl_ib)?;
    let h_iw = irs_link(&mut rng, geom.willie, pl_iw)?;

    Ok(ChannelSet {
        h_ab,
        h_aw,
        h_ib,
        h_iw,
        h_ai,
    })
}

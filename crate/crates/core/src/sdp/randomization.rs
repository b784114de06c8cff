use crate::numerics::{hermitian_eig, ComplexVector, HermitianMatrix, PSD_TOL};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RandomizationError {
    #[error("no feasible candidate among {samples} samples")]
    NoFeasibleCandidate {
        samples: usize,
        /// Highest-objective raw draw, kept for diagnostics.
        best_infeasible: Option<ComplexVector>,
    },
    #[error("sample count must be at least one")]
    NoSamples,
}

/// Draws `z ~ CN(0, W)`, maps each draw through `project` and keeps the
/// feasible candidate with the largest `objective`.
///
/// Each draw is rescaled so that `‖z‖² = Tr(W)`; for rank-one `W = w w^H`
/// every draw is then a unit-modulus multiple of `w`. `project` returns
/// `None` for draws it cannot make feasible.
pub fn gaussian_randomization<P, F>(
    w: &HermitianMatrix,
    samples: usize,
    seed: u64,
    mut project: P,
    mut objective: F,
) -> Result<ComplexVector, RandomizationError>
where
    P: FnMut(&ComplexVector) -> Option<ComplexVector>,
    F: FnMut(&ComplexVector) -> f64,
{
    if samples == 0 {
        return Err(RandomizationError::NoSamples);
    }
    let n = w.dim();
    let eig = hermitian_eig(w);
    let floor = PSD_TOL * eig.values[0].max(0.0);
    let mut factor = eig.vectors.clone();
    for (j, &l) in eig.values.iter().enumerate() {
        let s = if l > floor { l.sqrt() } else { 0.0 };
        factor.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    let target = w.trace().max(0.0).sqrt();
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let half = std::f64::consts::FRAC_1_SQRT_2;

    let mut best: Option<(f64, ComplexVector)> = None;
    let mut best_infeasible: Option<(f64, ComplexVector)> = None;
    for _ in 0..samples {
        let r = ComplexVector::from_fn(n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * half, im * half)
        });
        let mut z = &factor * r;
        let norm = z.norm();
        if norm > 0.0 {
            z *= Complex64::new(target / norm, 0.0);
        }
        match project(&z) {
            Some(candidate) => {
                let value = objective(&candidate);
                if best.as_ref().is_none_or(|(b, _)| value > *b) {
                    best = Some((value, candidate));
                }
            }
            None => {
                let value = objective(&z);
                if best_infeasible.as_ref().is_none_or(|(b, _)| value > *b) {
                    best_infeasible = Some((value, z));
                }
            }
        }
    }
    best.map(|(_, v)| v).ok_or(RandomizationError::NoFeasibleCandidate {
        samples,
        best_infeasible: best_infeasible.map(|(_, v)| v),
    })
}

/// Projects every entry onto the unit circle; zero entries map to 1.
pub fn unit_modulus(v: &ComplexVector) -> ComplexVector {
    v.map(|z| {
        let r = z.norm();
        if r > 0.0 {
            z / r
        } else {
            Complex64::new(1.0, 0.0)
        }
    })
}

//! Joint design under perfect knowledge of the warden's channels.
//!
//! Alternates between the transmit beamformer (semidefinite relaxation
//! followed by a rank-one projection) and the reflect beamformer
//! (semidefinite relaxation with Gaussian randomization). Leakage to the
//! warden is driven to zero, so the warden's observations are identically
//! distributed under both hypotheses.
//!
//! Composite channels are stored as columns: the amplitude at a receiver is
//! `c^H w` with `c = H_AI^H (conj(q) ∘ h_I) + h_A`.

use crate::channel::{ChannelSet, Link};
use crate::design::{null_space_beamformer, null_space_gain, rate_bits, BeamformerSolution, CovertParams, DesignError};
use crate::numerics::{psd_sqrt, rank_one_extract, ComplexVector, HermitianMatrix};
use crate::sdp::{
    gaussian_randomization, solve, unit_modulus, Constraint, Relation, SdpProblem, SdpSettings, SdpSolution,
    SdpStatus,
};
use crate::seeding::derive_seed;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Solutions stopped at the iteration limit are still used when their
/// constraint residual is below this.
const ACCEPT_INFEASIBILITY: f64 = 1e-6;
const REFINE_GRID: usize = 64;
const REFINE_SWEEPS: usize = 20;

/// Composite Bob and Willie channels for a fixed reflect vector.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannels {
    pub t_b: ComplexVector,
    pub t_w: ComplexVector,
}

impl EffectiveChannels {
    pub fn new(ch: &ChannelSet, q: &ComplexVector) -> Self {
        Self {
            t_b: ch.bob().composite(q),
            t_w: ch.willie().composite(q),
        }
    }
}

pub(crate) fn accept(sol: SdpSolution, stage: &'static str) -> Result<SdpSolution, DesignError> {
    match sol.status {
        SdpStatus::Optimal => Ok(sol),
        SdpStatus::MaxIterations if sol.primal_infeasibility <= ACCEPT_INFEASIBILITY => Ok(sol),
        status => Err(DesignError::SolverStatus { stage, status }),
    }
}

/// Rank-one projection `W̄ = W^{1/2} P W^{1/2}`, with `P` the projector onto
/// `W^{1/2} t_b`.
///
/// `t_b^H W̄ t_b = t_b^H W t_b`, `Tr(W̄) ≤ Tr(W)` and `t^H W̄ t ≤ t^H W t` for
/// every `t`. Returns zero when `W^{1/2} t_b = 0`.
pub fn project_rank_one(w: &HermitianMatrix, t_b: &ComplexVector) -> Result<HermitianMatrix, DesignError> {
    let root = psd_sqrt(w)?;
    let u = root.as_matrix() * t_b;
    let norm2 = u.norm_squared();
    if norm2 == 0.0 {
        return Ok(HermitianMatrix::zeros(w.dim()));
    }
    let v = root.as_matrix() * &u;
    Ok(HermitianMatrix::outer(&v).scale(1.0 / norm2))
}

/// Intermediate results of the transmit-beamformer step.
#[derive(Debug, Clone)]
pub struct TransmitDesign {
    /// Optimal relaxed matrix, normalized to unit power.
    pub relaxed: HermitianMatrix,
    /// Rank-one projection of `relaxed`, normalized to unit power.
    pub projected: HermitianMatrix,
    pub w_b: ComplexVector,
}

/// Maximizes `|t_b^H w|²` subject to `‖w‖² ≤ P` and `t_w^H w = 0` through the
/// relaxation `max Tr(t_b t_b^H W)`, `Tr(W) ≤ P`, `Tr(t_w t_w^H W) = 0`.
pub fn design_transmit(t_b: &ComplexVector, t_w: &ComplexVector, p_total: f64) -> Result<TransmitDesign, DesignError> {
    let n = t_b.len();
    let b_norm2 = t_b.norm_squared();
    if b_norm2 == 0.0 {
        return Ok(TransmitDesign {
            relaxed: HermitianMatrix::zeros(n),
            projected: HermitianMatrix::zeros(n),
            w_b: ComplexVector::zeros(n),
        });
    }
    // Work with unit power and unit-norm channels for conditioning.
    let tb = t_b.unscale(b_norm2.sqrt());
    let mut problem = SdpProblem::new(vec![n]);
    problem.set_objective(0, HermitianMatrix::outer(&tb));
    problem.add_constraint(Constraint::single(0, HermitianMatrix::identity(n), Relation::Le, 1.0));
    let w_norm = t_w.norm();
    if w_norm > 0.0 {
        let tw = t_w.unscale(w_norm);
        problem.add_constraint(Constraint::single(0, HermitianMatrix::outer(&tw), Relation::Eq, 0.0));
    }
    let sol = accept(solve(&problem, &SdpSettings::default())?, "transmit beamformer")?;
    let relaxed = sol.primal_blocks[0].clone();
    let projected = project_rank_one(&relaxed, &tb)?;
    let w_b = rank_one_extract(&projected) * Complex64::new(p_total.sqrt(), 0.0);
    Ok(TransmitDesign {
        relaxed,
        projected,
        w_b,
    })
}

/// Transmit beamformer for a fixed reflect vector.
pub fn solve_w_given_q(ch: &ChannelSet, q: &ComplexVector, params: &CovertParams) -> Result<ComplexVector, DesignError> {
    let eff = EffectiveChannels::new(ch, q);
    Ok(design_transmit(&eff.t_b, &eff.t_w, params.p_total)?.w_b)
}

/// Stacked cascade `a = [Φ; c]` such that the amplitude is `q̄^H a` with `q̄ = [conj(q); 1]`.
pub fn reflect_vector(link: &Link<'_>, w: &ComplexVector) -> ComplexVector {
    let (phi, c) = link.cascade(w);
    let m = phi.len();
    ComplexVector::from_fn(m + 1, |i, _| if i < m { phi[i] } else { c })
}

/// Quadratic form `(G, h)` with `|t w|² = q̄^H G q̄ + h` for unit-modulus `q̄`:
/// `G = [[ΦΦ^H, Φc*], [cΦ^H, 0]]`, `h = |c|²`.
pub fn reflect_quadratic(link: &Link<'_>, w: &ComplexVector) -> (HermitianMatrix, f64) {
    let a = reflect_vector(link, w);
    let m = a.len() - 1;
    let h = a[m].norm_sqr();
    let mut g = (&a * a.adjoint()).clone();
    g[(m, m)] = Complex64::new(0.0, 0.0);
    (HermitianMatrix::symmetrize(g), h)
}

/// `q̄ = [conj(q); 1]`.
pub fn lift_reflect(q: &ComplexVector) -> ComplexVector {
    let m = q.len();
    ComplexVector::from_fn(m + 1, |i, _| if i < m { q[i].conj() } else { Complex64::new(1.0, 0.0) })
}

/// Inverse of [`lift_reflect`] after fixing the global phase so the last entry is 1.
pub fn unlift_reflect(x: &ComplexVector) -> ComplexVector {
    let m = x.len() - 1;
    let last = x[m];
    let rot = if last.norm() > 0.0 {
        last.conj() / last.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    ComplexVector::from_fn(m, |i, _| (x[i] * rot).conj())
}

/// Bob's gain after re-solving the transmit beamformer for reflect vector `q`.
pub fn covert_gain(ch: &ChannelSet, q: &ComplexVector, p_total: f64) -> f64 {
    let eff = EffectiveChannels::new(ch, q);
    null_space_gain(&eff.t_b, &eff.t_w, p_total)
}

/// Coordinate ascent of [`covert_gain`] over individual phases, on a coarse
/// grid followed by a local fine grid. Never decreases the gain.
pub fn refine_phases(ch: &ChannelSet, q: &ComplexVector, p_total: f64) -> ComplexVector {
    let mut q = unit_modulus(q);
    let mut best = covert_gain(ch, &q, p_total);
    let step = 2.0 * PI / REFINE_GRID as f64;
    for _ in 0..REFINE_SWEEPS {
        let start = best;
        for m in 0..q.len() {
            let current = q[m].arg();
            let coarse = (0..REFINE_GRID).map(|k| k as f64 * step);
            let mut best_theta = current;
            let mut trial = q.clone();
            for theta in coarse {
                trial[m] = Complex64::from_polar(1.0, theta);
                let g = covert_gain(ch, &trial, p_total);
                if g > best {
                    best = g;
                    best_theta = theta;
                }
            }
            let centre = best_theta;
            for k in 0..=REFINE_GRID {
                let theta = centre + step * (k as f64 / REFINE_GRID as f64 * 2.0 - 1.0);
                trial[m] = Complex64::from_polar(1.0, theta);
                let g = covert_gain(ch, &trial, p_total);
                if g > best {
                    best = g;
                    best_theta = theta;
                }
            }
            q[m] = Complex64::from_polar(1.0, best_theta);
        }
        if best - start <= 1e-12 * best.max(f64::MIN_POSITIVE) {
            break;
        }
    }
    q
}

/// Relaxed reflect-beamformer problem: maximize Bob's gain over `Q̄ ⪰ 0` with
/// unit diagonal and zero leakage `Tr(a_w a_w^H Q̄) = 0`.
pub fn reflect_relaxation(ch: &ChannelSet, w: &ComplexVector) -> Result<SdpSolution, DesignError> {
    let a_b = reflect_vector(&ch.bob(), w);
    let a_w = reflect_vector(&ch.willie(), w);
    let dim = a_b.len();
    let mut problem = SdpProblem::new(vec![dim]);
    let b_norm = a_b.norm();
    let objective = if b_norm > 0.0 {
        HermitianMatrix::outer(&a_b.unscale(b_norm))
    } else {
        HermitianMatrix::zeros(dim)
    };
    problem.set_objective(0, objective);
    for m in 0..dim {
        let mut e = vec![0.0; dim];
        e[m] = 1.0;
        problem.add_constraint(Constraint::single(0, HermitianMatrix::from_real_diagonal(&e), Relation::Eq, 1.0));
    }
    let w_norm = a_w.norm();
    if w_norm > 0.0 {
        problem.add_constraint(Constraint::single(
            0,
            HermitianMatrix::outer(&a_w.unscale(w_norm)),
            Relation::Eq,
            0.0,
        ));
    }
    Ok(solve(&problem, &SdpSettings::default())?)
}

/// Reflect beamformer for a fixed transmit beamformer.
///
/// Candidates from the relaxation (principal component and randomized
/// draws, projected to unit modulus) are scored by the gain reachable after
/// re-solving the transmit beamformer, then locally refined. The previous
/// reflect vector is always a candidate, so the score never decreases.
pub fn solve_q_given_w(
    ch: &ChannelSet,
    w: &ComplexVector,
    q_prev: &ComplexVector,
    params: &CovertParams,
    seed: u64,
) -> Result<ComplexVector, DesignError> {
    let p = params.p_total;
    let score = |q: &ComplexVector| covert_gain(ch, q, p);
    let mut best_q = unit_modulus(q_prev);
    let mut best = score(&best_q);

    let relaxed = reflect_relaxation(ch, w)?;
    if matches!(relaxed.status, SdpStatus::Optimal | SdpStatus::MaxIterations) {
        let qbar = &relaxed.primal_blocks[0];
        let principal = unlift_reflect(&unit_modulus(&rank_one_extract(qbar)));
        let g = score(&principal);
        if g > best {
            best = g;
            best_q = principal;
        }
        let project = |x: &ComplexVector| Some(unlift_reflect(&unit_modulus(x)));
        if let Ok(sampled) = gaussian_randomization(qbar, params.rand_samples, seed, project, |q| score(q)) {
            let g = score(&sampled);
            if g > best {
                best_q = sampled;
            }
        }
    }
    Ok(refine_phases(ch, &best_q, p))
}

/// Alternating optimization of `(w_b, q)`.
///
/// Starts from maximum-ratio transmission `w = √P h_AB/‖h_AB‖` and `q = 1`.
/// That starting point leaks to the warden, so its rate is not part of the
/// trace; the stopping rule compares consecutive covert iterates.
pub fn alternate_optimize(ch: &ChannelSet, params: &CovertParams, seed: u64) -> Result<BeamformerSolution, DesignError> {
    params.validate()?;
    let m = ch.n_irs();
    let q0 = ComplexVector::from_element(m, Complex64::new(1.0, 0.0));
    optimize_from(ch, params, seed, q0)
}

pub(crate) fn optimize_from(
    ch: &ChannelSet,
    params: &CovertParams,
    seed: u64,
    q0: ComplexVector,
) -> Result<BeamformerSolution, DesignError> {
    let mut q = q0;
    let mut trace: Vec<f64> = Vec::new();
    let mut residuals = Vec::new();
    let mut best: Option<(ComplexVector, ComplexVector)> = None;
    for k in 1..=params.max_outer_iters {
        let w = solve_w_given_q(ch, &q, params)?;
        let rate = rate_bits(ch.bob().gain(&w, &q), params.sigma_b2);
        if let Some(&prev) = trace.last() {
            if rate < prev {
                // A relaxation solved slightly less accurately than the last
                // one; keep the better iterate and stop.
                break;
            }
        }
        trace.push(rate);
        residuals.push(ch.willie().gain(&w, &q));
        best = Some((w.clone(), q.clone()));
        let converged = match trace.len() {
            1 => rate == 0.0,
            n => rate == 0.0 || (rate - trace[n - 2]) / rate < params.convergence_eps,
        };
        if converged {
            break;
        }
        q = solve_q_given_w(ch, &w, &q, params, derive_seed(seed, &[k as u64]))?;
    }
    let (w_b, q) = best.expect("at least one outer iteration runs");
    let rate = rate_bits(ch.bob().gain(&w_b, &q), params.sigma_b2);
    Ok(BeamformerSolution {
        iterations: trace.len(),
        w_b,
        q,
        phase_indices: None,
        rate_bits: rate,
        objective_trace: trace,
        covert_residual_trace: residuals,
        baseline: false,
    })
}

/// Design without the IRS: `w = √P P⊥(h_AW) h_AB / ‖P⊥(h_AW) h_AB‖`.
pub fn no_irs_baseline(ch: &ChannelSet, params: &CovertParams) -> BeamformerSolution {
    let w_b = null_space_beamformer(&ch.h_ab, &ch.h_aw, params.p_total);
    let q = ComplexVector::zeros(ch.n_irs());
    let rate = rate_bits(ch.bob().gain(&w_b, &q), params.sigma_b2);
    let leakage = ch.willie().gain(&w_b, &q);
    BeamformerSolution {
        w_b,
        q,
        phase_indices: None,
        rate_bits: rate,
        objective_trace: vec![rate],
        covert_residual_trace: vec![leakage],
        iterations: 1,
        baseline: true,
    }
}

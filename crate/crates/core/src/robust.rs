//! Robust design when the warden's channels are known only up to
//! ellipsoidal errors `Δh^H C Δh ≤ v`.
//!
//! With `x = [Δh_IW; Δh_AW]` the conjugated warden amplitude is
//! `w^H T [x; 1]` with `T = [H_AI^H Q^H, I_N, t̂_w]`, where `t̂_w` is the
//! nominal composite warden channel. Both errors are covered by the stacked
//! ellipsoid `x^H blkdiag(C_IW, C_AW) x ≤ v_IW + v_AW`, and the S-lemma turns
//! the two-sided covertness requirement
//! `σ_w²(ā − 1) ≤ |t_w w|² ≤ σ_w²(b̄ − 1)` over that set into two LMIs.

use crate::channel::{complex_normal, ChannelSet};
use crate::design::{rate_bits, BeamformerSolution, CovertParams, DesignError};
use crate::detection::{covert_interval, kl_divergences, DetectionReport, ReceptionStats};
use crate::numerics::{
    hermitian_eig, rank_one_extract, ComplexMatrix, ComplexVector, HermitianMatrix, NumericsError,
};
use crate::perfect::{accept, reflect_vector, unlift_reflect};
use crate::sdp::{
    gaussian_randomization, solve, unit_modulus, Constraint, Lmi, LmiTerm, Relation, SdpProblem, SdpSettings,
    SdpStatus,
};
use crate::seeding::derive_seed;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

/// Relative safety margin applied when scaling candidates onto the robust boundary.
const SCALE_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KlCase {
    /// `D(p₀‖p₁) ≤ 2ε²`.
    Kl01,
    /// `D(p₁‖p₀) ≤ 2ε²`.
    Kl10,
}

impl KlCase {
    pub fn name(self) -> &'static str {
        match self {
            KlCase::Kl01 => "kl01",
            KlCase::Kl10 => "kl10",
        }
    }

    /// The divergence this case constrains.
    pub fn divergence(self, s: &ReceptionStats) -> f64 {
        let (k01, k10) = kl_divergences(s);
        match self {
            KlCase::Kl01 => k01,
            KlCase::Kl10 => k10,
        }
    }
}

/// Uncertainty sets for the warden's channels; the nominal channels are the
/// `h_aw`/`h_iw` fields of the [`ChannelSet`] passed alongside.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidModel {
    pub c_aw: HermitianMatrix,
    pub c_iw: HermitianMatrix,
    pub v_aw: f64,
    pub v_iw: f64,
}

impl EllipsoidModel {
    /// Balls (identity shapes) splitting `v_w` equally between the two links.
    pub fn balls(n_tx: usize, n_irs: usize, v_w: f64) -> Self {
        Self {
            c_aw: HermitianMatrix::identity(n_tx),
            c_iw: HermitianMatrix::identity(n_irs),
            v_aw: 0.5 * v_w,
            v_iw: 0.5 * v_w,
        }
    }

    pub fn v_w(&self) -> f64 {
        self.v_aw + self.v_iw
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        if !(self.v_aw >= 0.0 && self.v_iw >= 0.0) {
            return Err(DesignError::InvalidParams("uncertainty sizes must be nonnegative".into()));
        }
        for c in [&self.c_aw, &self.c_iw] {
            let min = *hermitian_eig(c).values.last().unwrap();
            if !(min > 0.0) {
                return Err(DesignError::Numerics(NumericsError::NotPsd { min_eigenvalue: min }));
            }
        }
        Ok(())
    }

    /// `blkdiag(C_IW, C_AW)`.
    pub fn stacked_shape(&self) -> HermitianMatrix {
        let (m, n) = (self.c_iw.dim(), self.c_aw.dim());
        let mut out = ComplexMatrix::zeros(m + n, m + n);
        out.view_mut((0, 0), (m, m)).copy_from(self.c_iw.as_matrix());
        out.view_mut((m, m), (n, n)).copy_from(self.c_aw.as_matrix());
        HermitianMatrix::symmetrize(out)
    }
}

fn inverse_sqrt(c: &HermitianMatrix) -> HermitianMatrix {
    let eig = hermitian_eig(c);
    let mut scaled = eig.vectors.clone();
    for (j, &l) in eig.values.iter().enumerate() {
        let s = 1.0 / l.sqrt();
        scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
    }
    HermitianMatrix::symmetrize(scaled * eig.vectors.adjoint())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RobustParams {
    pub base: CovertParams,
    pub epsilon: f64,
    pub kl_case: KlCase,
    /// Roots of `ln x + 1/x − 1 = 2ε²`.
    pub a_bar: f64,
    pub b_bar: f64,
}

impl RobustParams {
    pub fn new(base: CovertParams, epsilon: f64, kl_case: KlCase) -> Result<Self, DesignError> {
        if !(epsilon > 0.0) {
            return Err(DesignError::InvalidParams(format!("epsilon must be positive, got {epsilon}")));
        }
        let (a_bar, b_bar) = covert_interval(epsilon)?;
        Ok(Self {
            base,
            epsilon,
            kl_case,
            a_bar,
            b_bar,
        })
    }

    /// Admissible range of `λ₁/λ₀`. For `D(p₁‖p₀)` the roots apply to
    /// `λ₀/λ₁`, so the range is `[1/b̄, 1/ā]`.
    pub fn ratio_interval(&self) -> (f64, f64) {
        match self.kl_case {
            KlCase::Kl01 => (self.a_bar, self.b_bar),
            KlCase::Kl10 => (1.0 / self.b_bar, 1.0 / self.a_bar),
        }
    }

    /// Admissible range of the leaked power `|t_w w|²`.
    pub fn leakage_interval(&self) -> (f64, f64) {
        let (lo, hi) = self.ratio_interval();
        let s = self.base.sigma_w2;
        (s * (lo - 1.0), s * (hi - 1.0))
    }

    pub fn budget(&self) -> f64 {
        2.0 * self.epsilon * self.epsilon
    }
}

/// `T = [H_AI^H Q^H, I_N, t̂_w]`, size `N × (M + N + 1)`.
pub fn uncertainty_map(ch: &ChannelSet, q: &ComplexVector) -> ComplexMatrix {
    let (n, m) = (ch.n_tx(), ch.n_irs());
    let mut t = ComplexMatrix::zeros(n, m + n + 1);
    let b_h = ch.h_ai.adjoint() * crate::numerics::diag(&q.map(|z| z.conj()));
    t.view_mut((0, 0), (n, m)).copy_from(&b_h);
    t.view_mut((0, m), (n, n)).fill_with_identity();
    t.set_column(m + n, &ch.willie().composite(q));
    t
}

/// The two S-lemma matrices at fixed multipliers:
///
/// ```text
/// lower = T^H W T + η₁ [[C, 0], [0, −v]] − σ²(ā − 1) e e^T
/// upper = −T^H W T + η₂ [[C, 0], [0, −v]] + σ²(b̄ − 1) e e^T
/// ```
///
/// with `e` the last unit vector. PSD `lower` (resp. `upper`) certifies
/// `z^H T^H W T z ≥ σ²(ā − 1)` (resp. `≤ σ²(b̄ − 1)`) for every `z = [x; 1]`
/// with `x^H C x ≤ v`.
#[allow(clippy::too_many_arguments)]
pub fn build_lmis(
    w: &HermitianMatrix,
    t_map: &ComplexMatrix,
    c_w: &HermitianMatrix,
    v_w: f64,
    a_bar: f64,
    b_bar: f64,
    sigma_w2: f64,
    eta1: f64,
    eta2: f64,
) -> Result<(HermitianMatrix, HermitianMatrix), DesignError> {
    let k = c_w.dim();
    if t_map.nrows() != w.dim() || t_map.ncols() != k + 1 {
        return Err(DesignError::InvalidParams(format!(
            "map is {}x{}, expected {}x{}",
            t_map.nrows(),
            t_map.ncols(),
            w.dim(),
            k + 1
        )));
    }
    let quad = w.congruence(t_map);
    let mut shape = ComplexMatrix::zeros(k + 1, k + 1);
    shape.view_mut((0, 0), (k, k)).copy_from(c_w.as_matrix());
    shape[(k, k)] = Complex64::new(-v_w, 0.0);
    let shape = HermitianMatrix::symmetrize(shape);
    let mut corner = vec![0.0; k + 1];
    corner[k] = 1.0;
    let e = HermitianMatrix::from_real_diagonal(&corner);
    let lower = quad
        .add(&shape.scale(eta1))
        .sub(&e.scale(sigma_w2 * (a_bar - 1.0)));
    let upper = quad
        .scale(-1.0)
        .add(&shape.scale(eta2))
        .add(&e.scale(sigma_w2 * (b_bar - 1.0)));
    Ok((lower, upper))
}

/// Closed-form range of the leaked power over the stacked ellipsoid:
/// `(max(0, |t̂w| − r)², (|t̂w| + r)²)` with `r = √v ‖C^{-1/2} [Q H_AI w; w]‖`.
pub fn leakage_range(ch: &ChannelSet, q: &ComplexVector, w: &ComplexVector, model: &EllipsoidModel) -> (f64, f64) {
    let nominal = ch.willie().amplitude(w, q).norm();
    let r = uncertainty_radius(ch, q, w, model);
    ((nominal - r).max(0.0).powi(2), (nominal + r).powi(2))
}

fn uncertainty_radius(ch: &ChannelSet, q: &ComplexVector, w: &ComplexVector, model: &EllipsoidModel) -> f64 {
    let v = model.v_w();
    if v == 0.0 {
        return 0.0;
    }
    let bw = q.component_mul(&(&ch.h_ai * w));
    let m = bw.len();
    let a = ComplexVector::from_fn(m + w.len(), |i, _| if i < m { bw[i] } else { w[i - m] });
    let l = inverse_sqrt(&model.stacked_shape());
    v.sqrt() * (l.as_matrix() * a).norm()
}

/// Scales `w` onto the robust feasible set (power and worst-case leakage),
/// or `None` if the lower leakage bound cannot be met.
fn robust_scale(
    ch: &ChannelSet,
    q: &ComplexVector,
    w: &ComplexVector,
    model: &EllipsoidModel,
    rp: &RobustParams,
) -> Option<ComplexVector> {
    let (lo, hi) = rp.leakage_interval();
    let norm = w.norm();
    if norm == 0.0 {
        return (lo <= 0.0).then(|| w.clone());
    }
    let (_, worst) = leakage_range(ch, q, w, model);
    let mut s = (rp.base.p_total.sqrt() / norm).min(1.0);
    if worst > 0.0 {
        s = s.min((1.0 - SCALE_MARGIN) * (hi.max(0.0) / worst).sqrt());
    }
    let scaled = w * Complex64::new(s, 0.0);
    let (least, _) = leakage_range(ch, q, &scaled, model);
    (least >= lo).then_some(scaled)
}

/// Robust transmit beamformer for a fixed reflect vector.
///
/// Solves the relaxation over `W ⪰ 0` and multipliers `η₁, η₂ ≥ 0` with the
/// LMIs of [`build_lmis`] (expressed in whitened error coordinates), then
/// recovers a vector from the principal component and randomized draws,
/// each scaled onto the robust feasible set.
pub fn solve_robust_w(
    ch: &ChannelSet,
    q: &ComplexVector,
    model: &EllipsoidModel,
    rp: &RobustParams,
    seed: u64,
) -> Result<ComplexVector, DesignError> {
    let n = ch.n_tx();
    let (lo, hi) = rp.leakage_interval();
    let infeasible = || DesignError::RobustInfeasible {
        a_bar: rp.a_bar,
        b_bar: rp.b_bar,
        v_w: model.v_w(),
    };
    if hi <= 0.0 {
        return Err(infeasible());
    }
    let t_b = ch.bob().composite(q);
    let b_norm2 = t_b.norm_squared();
    if b_norm2 == 0.0 {
        return Ok(ComplexVector::zeros(n));
    }
    let objective = HermitianMatrix::outer(&t_b.unscale(b_norm2.sqrt()));
    let t_hat = ch.willie().composite(q);
    let v = model.v_w();

    let (problem, w_scale) = if v == 0.0 {
        // Nominal two-sided constraint on |t̂ w|².
        let p = rp.base.p_total;
        let mut problem = SdpProblem::new(vec![n]);
        problem.set_objective(0, objective);
        problem.add_constraint(Constraint::single(0, HermitianMatrix::identity(n), Relation::Le, 1.0));
        let t_norm2 = t_hat.norm_squared();
        if t_norm2 > 0.0 {
            let coeff = HermitianMatrix::outer(&t_hat.unscale(t_norm2.sqrt()));
            problem.add_constraint(Constraint::single(0, coeff.clone(), Relation::Le, hi / (p * t_norm2)));
            if lo > 0.0 {
                problem.add_constraint(Constraint::single(0, coeff, Relation::Ge, lo / (p * t_norm2)));
            }
        }
        (problem, p)
    } else {
        // Whitened coordinates x = √v C^{-1/2} u with ‖u‖ ≤ 1, and W scaled by
        // κ_U / g so that the LMIs have O(1) entries.
        let k = ch.n_irs() + n;
        let t = uncertainty_map(ch, q);
        let l = inverse_sqrt(&model.stacked_shape());
        let mut whitened = t.clone();
        let tx = t.view((0, 0), (n, k)) * l.as_matrix() * Complex64::new(v.sqrt(), 0.0);
        whitened.view_mut((0, 0), (n, k)).copy_from(&tx);
        let g = hermitian_eig(&HermitianMatrix::symmetrize(&whitened * whitened.adjoint())).values[0];
        let map = whitened.unscale(g.sqrt());
        let w_scale = hi / g;

        let mut j = vec![1.0; k + 1];
        j[k] = -1.0;
        let j = HermitianMatrix::from_real_diagonal(&j);
        let mut corner = vec![0.0; k + 1];
        corner[k] = 1.0;
        let e = HermitianMatrix::from_real_diagonal(&corner);

        let mut problem = SdpProblem::new(vec![n, 1, 1]);
        problem.set_objective(0, objective);
        problem.add_constraint(Constraint::single(
            0,
            HermitianMatrix::identity(n),
            Relation::Le,
            rp.base.p_total / w_scale,
        ));
        problem.add_lmi(Lmi {
            constant: e.scale(-lo / hi),
            terms: vec![
                LmiTerm::Congruence {
                    block: 0,
                    map: map.clone(),
                    scale: 1.0,
                },
                LmiTerm::Scalar {
                    block: 1,
                    matrix: j.clone(),
                },
            ],
        });
        problem.add_lmi(Lmi {
            constant: e,
            terms: vec![
                LmiTerm::Congruence {
                    block: 0,
                    map,
                    scale: -1.0,
                },
                LmiTerm::Scalar { block: 2, matrix: j },
            ],
        });
        (problem, w_scale)
    };

    let sol = solve(&problem, &SdpSettings::default())?;
    if sol.status == SdpStatus::Infeasible {
        return Err(infeasible());
    }
    let sol = accept(sol, "robust transmit beamformer")?;
    let relaxed = sol.primal_blocks[0].scale(w_scale);

    let gain = |w: &ComplexVector| ch.bob().gain(w, q);
    let mut best: Option<(f64, ComplexVector)> = None;
    let mut consider = |w: ComplexVector| {
        let g = gain(&w);
        if best.as_ref().is_none_or(|(b, _)| g > *b) {
            best = Some((g, w));
        }
    };
    if let Some(w) = robust_scale(ch, q, &rank_one_extract(&relaxed), model, rp) {
        consider(w);
    }
    let project = |w: &ComplexVector| robust_scale(ch, q, w, model, rp);
    if let Ok(w) = gaussian_randomization(&relaxed, rp.base.rand_samples, seed, project, gain) {
        consider(w);
    }
    best.map(|(_, w)| w).ok_or_else(infeasible)
}

/// Robust reflect beamformer for a fixed transmit beamformer.
///
/// Relaxation over `Q̄` with unit diagonal and the nominal leakage
/// constrained to the covert interval, with the upper end tightened by the
/// uncertainty radius at the current point so that extracted candidates
/// remain robust. Candidates failing the closed-form robust check are
/// discarded; the previous reflect vector is kept if nothing improves.
pub fn solve_robust_q(
    ch: &ChannelSet,
    w: &ComplexVector,
    q_prev: &ComplexVector,
    model: &EllipsoidModel,
    rp: &RobustParams,
    seed: u64,
) -> Result<ComplexVector, DesignError> {
    let (lo, hi) = rp.leakage_interval();
    let gain = |q: &ComplexVector| ch.bob().gain(w, q);
    let feasible = |q: &ComplexVector| {
        let (least, worst) = leakage_range(ch, q, w, model);
        worst <= hi && least >= lo
    };
    let mut best_q = q_prev.clone();
    let mut best = gain(q_prev);

    let radius = uncertainty_radius(ch, q_prev, w, model);
    let margin = hi.sqrt() - radius;
    if margin <= 0.0 {
        return Ok(best_q);
    }
    let a_b = reflect_vector(&ch.bob(), w);
    let a_w = reflect_vector(&ch.willie(), w);
    let dim = a_b.len();
    let b_norm = a_b.norm();
    if b_norm == 0.0 {
        return Ok(best_q);
    }
    let mut problem = SdpProblem::new(vec![dim]);
    problem.set_objective(0, HermitianMatrix::outer(&a_b.unscale(b_norm)));
    for m in 0..dim {
        let mut e = vec![0.0; dim];
        e[m] = 1.0;
        problem.add_constraint(Constraint::single(0, HermitianMatrix::from_real_diagonal(&e), Relation::Eq, 1.0));
    }
    let w_norm2 = a_w.norm_squared();
    if w_norm2 > 0.0 {
        let coeff = HermitianMatrix::outer(&a_w.unscale(w_norm2.sqrt()));
        problem.add_constraint(Constraint::single(0, coeff.clone(), Relation::Le, margin * margin / w_norm2));
        if lo > 0.0 {
            problem.add_constraint(Constraint::single(0, coeff, Relation::Ge, lo / w_norm2));
        }
    }
    let sol = solve(&problem, &SdpSettings::default())?;
    if !matches!(sol.status, SdpStatus::Optimal | SdpStatus::MaxIterations) {
        return Ok(best_q);
    }
    let qbar = &sol.primal_blocks[0];
    let principal = unlift_reflect(&unit_modulus(&rank_one_extract(qbar)));
    if feasible(&principal) && gain(&principal) > best {
        best = gain(&principal);
        best_q = principal;
    }
    let project = |x: &ComplexVector| {
        let q = unlift_reflect(&unit_modulus(x));
        feasible(&q).then_some(q)
    };
    // Infeasible draws are scored in lifted form.
    let score = |x: &ComplexVector| {
        if x.len() == dim {
            gain(&unlift_reflect(&unit_modulus(x)))
        } else {
            gain(x)
        }
    };
    if let Ok(q) = gaussian_randomization(qbar, rp.base.rand_samples, seed, project, score) {
        if gain(&q) > best {
            best_q = q;
        }
    }
    Ok(best_q)
}

#[derive(Debug, Clone)]
pub struct RobustSolution {
    pub solution: BeamformerSolution,
    /// Detection analytics at the nominal warden channel.
    pub report: DetectionReport,
}

/// Nominal-channel detection report for a design.
pub fn nominal_report(
    ch: &ChannelSet,
    w: &ComplexVector,
    q: &ComplexVector,
    sigma_w2: f64,
) -> Result<DetectionReport, DesignError> {
    let stats = ReceptionStats::from_leakage(sigma_w2, ch.willie().gain(w, q))?;
    Ok(DetectionReport::new(&stats))
}

/// Alternating robust design. Same initialization and stopping
/// rule as the perfect-knowledge design.
pub fn robust_alternate(
    ch: &ChannelSet,
    model: &EllipsoidModel,
    rp: &RobustParams,
    seed: u64,
) -> Result<RobustSolution, DesignError> {
    rp.base.validate()?;
    model.validate()?;
    let params = &rp.base;
    let mut q = ComplexVector::from_element(ch.n_irs(), Complex64::new(1.0, 0.0));
    let mut trace: Vec<f64> = Vec::new();
    let mut residuals = Vec::new();
    let mut best: Option<(ComplexVector, ComplexVector)> = None;
    for k in 1..=params.max_outer_iters {
        let w = solve_robust_w(ch, &q, model, rp, derive_seed(seed, &[k as u64, 0]))?;
        let rate = rate_bits(ch.bob().gain(&w, &q), params.sigma_b2);
        if let Some(&prev) = trace.last() {
            if rate < prev {
                break;
            }
        }
        trace.push(rate);
        residuals.push(ch.willie().gain(&w, &q));
        best = Some((w.clone(), q.clone()));
        if let [.., a, b] = trace[..] {
            if b == 0.0 || (b - a) / b < params.convergence_eps {
                break;
            }
        } else if rate == 0.0 {
            break;
        }
        q = solve_robust_q(ch, &w, &q, model, rp, derive_seed(seed, &[k as u64, 1]))?;
    }
    let (w_b, q) = best.expect("at least one outer iteration runs");
    let report = nominal_report(ch, &w_b, &q, params.sigma_w2)?;
    let rate = rate_bits(ch.bob().gain(&w_b, &q), params.sigma_b2);
    Ok(RobustSolution {
        solution: BeamformerSolution {
            iterations: trace.len(),
            w_b,
            q,
            phase_indices: None,
            rate_bits: rate,
            objective_trace: trace,
            covert_residual_trace: residuals,
            baseline: false,
        },
        report,
    })
}

/// Sampled divergence over the uncertainty sets.
#[derive(Debug, Clone, PartialEq)]
pub struct WorstCaseKl {
    pub max_kl: f64,
    pub violation_fraction: f64,
    /// Sorted sampled divergences; the empirical CDF at `values[i]` is `(i + 1) / len`.
    pub values: Vec<f64>,
}

impl WorstCaseKl {
    pub fn cdf(&self) -> Vec<(f64, f64)> {
        let n = self.values.len() as f64;
        self.values
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i + 1) as f64 / n))
            .collect()
    }
}

/// Uniform draw from `{Δ : Δ^H C Δ ≤ v}`; on the boundary when `boundary`.
pub fn sample_ellipsoid<R: Rng>(rng: &mut R, c: &HermitianMatrix, v: f64, boundary: bool) -> ComplexVector {
    let n = c.dim();
    if v == 0.0 {
        return ComplexVector::zeros(n);
    }
    let g = ComplexVector::from_fn(n, |_, _| complex_normal(rng));
    let norm = g.norm();
    let dir = if norm > 0.0 { g.unscale(norm) } else { ComplexVector::zeros(n) };
    let radius = if boundary {
        1.0
    } else {
        rng.random::<f64>().powf(1.0 / (2 * n) as f64)
    };
    inverse_sqrt(c).as_matrix() * dir * Complex64::new(radius * v.sqrt(), 0.0)
}

/// Evaluates the constrained divergence at `samples` perturbed warden
/// channels, drawing `Δh_AW` and `Δh_IW` from their own ellipsoids. Even
/// draws lie on the ellipsoid boundaries. The first draw is the nominal
/// channel.
#[allow(clippy::too_many_arguments)]
pub fn worst_case_kl(
    ch: &ChannelSet,
    w: &ComplexVector,
    q: &ComplexVector,
    model: &EllipsoidModel,
    kl_case: KlCase,
    epsilon: f64,
    sigma_w2: f64,
    samples: usize,
    seed: u64,
) -> Result<WorstCaseKl, DesignError> {
    let budget = 2.0 * epsilon * epsilon;
    let mut values = Vec::with_capacity(samples.max(1));
    for i in 0..samples.max(1) {
        let mut perturbed = ch.clone();
        if i > 0 {
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, &[i as u64]));
            let boundary = i % 2 == 0;
            perturbed.h_aw += sample_ellipsoid(&mut rng, &model.c_aw, model.v_aw, boundary);
            perturbed.h_iw += sample_ellipsoid(&mut rng, &model.c_iw, model.v_iw, boundary);
        }
        let stats = ReceptionStats::from_leakage(sigma_w2, perturbed.willie().gain(w, q))?;
        values.push(kl_case.divergence(&stats));
    }
    let violations = values.iter().filter(|&&k| k > budget).count();
    let fraction = violations as f64 / values.len() as f64;
    values.sort_by(f64::total_cmp);
    Ok(WorstCaseKl {
        max_kl: *values.last().unwrap(),
        violation_fraction: fraction,
        values,
    })
}

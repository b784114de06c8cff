//! Infeasible-start primal-dual interior-point method for
//!
//! ```text
//! minimize ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0
//! ```
//!
//! over a product of real symmetric blocks. Search directions use the HKM
//! scaling with a Mehrotra predictor-corrector; step lengths follow the
//! fraction-to-boundary rule.

use super::{SdpSettings, SdpStatus};
use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

const STEP_FRACTION: f64 = 0.98;
const STALL_LIMIT: usize = 10;
const CERTIFICATE_TOL: f64 = 1e-8;

type Blocks = Vec<DMatrix<f64>>;

pub(crate) struct RealProblem {
    pub dims: Vec<usize>,
    pub c: Vec<Option<DMatrix<f64>>>,
    /// Each row is a list of `(block, symmetric coefficient)` pairs.
    pub rows: Vec<Vec<(usize, DMatrix<f64>)>>,
    pub b: Vec<f64>,
}

pub(crate) struct RealOutcome {
    pub status: SdpStatus,
    pub x: Blocks,
    pub iterations: usize,
    pub gap: f64,
    pub gap_history: Vec<f64>,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

fn dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn blocks_dot(a: &Blocks, b: &Blocks) -> f64 {
    a.iter().zip(b).map(|(x, y)| dot(x, y)).sum()
}

fn blocks_norm(a: &Blocks) -> f64 {
    a.iter().map(|m| m.norm_squared()).sum::<f64>().sqrt()
}

fn symmetrize(m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    (m + t) * 0.5
}

/// Row-scaled copy of the problem with the objective scaled to unit norm.
struct Scaled {
    dims: Vec<usize>,
    c: Blocks,
    rows: Vec<Vec<(usize, DMatrix<f64>)>>,
    b: DVector<f64>,
    c_scale: f64,
    /// Rows touching each block, with the position of the block inside the row.
    by_block: Vec<Vec<(usize, usize)>>,
}

impl Scaled {
    fn new(p: &RealProblem) -> Self {
        let mut c: Blocks = p
            .dims
            .iter()
            .zip(&p.c)
            .map(|(&d, c)| c.clone().unwrap_or_else(|| DMatrix::zeros(d, d)))
            .collect();
        let c_norm = blocks_norm(&c);
        let c_scale = if c_norm > 0.0 { c_norm } else { 1.0 };
        for m in &mut c {
            *m /= c_scale;
        }
        let mut rows = Vec::with_capacity(p.rows.len());
        let mut b = DVector::zeros(p.rows.len());
        for (i, row) in p.rows.iter().enumerate() {
            let norm = row.iter().map(|(_, a)| a.norm_squared()).sum::<f64>().sqrt();
            let s = if norm > 0.0 { norm } else { 1.0 };
            rows.push(row.iter().map(|(k, a)| (*k, a / s)).collect::<Vec<_>>());
            b[i] = p.b[i] / s;
        }
        let mut by_block = vec![Vec::new(); p.dims.len()];
        for (i, row) in rows.iter().enumerate() {
            for (pos, (k, _)) in row.iter().enumerate() {
                by_block[*k].push((i, pos));
            }
        }
        Self {
            dims: p.dims.clone(),
            c,
            rows,
            b,
            c_scale,
            by_block,
        }
    }

    fn m(&self) -> usize {
        self.rows.len()
    }

    fn apply(&self, x: &Blocks) -> DVector<f64> {
        DVector::from_iterator(
            self.m(),
            self.rows.iter().map(|row| row.iter().map(|(k, a)| dot(a, &x[*k])).sum()),
        )
    }

    fn adjoint(&self, y: &DVector<f64>) -> Blocks {
        let mut out: Blocks = self.dims.iter().map(|&d| DMatrix::zeros(d, d)).collect();
        for (i, row) in self.rows.iter().enumerate() {
            for (k, a) in row {
                out[*k] += a * y[i];
            }
        }
        out
    }
}

struct Iterate {
    x: Blocks,
    y: DVector<f64>,
    s: Blocks,
}

fn max_step(x: &DMatrix<f64>, dx: &DMatrix<f64>) -> f64 {
    let n = x.nrows();
    let min_eig = match Cholesky::<f64, Dyn>::new(x.clone()) {
        Some(chol) => {
            let l = chol.l();
            let linv = l.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(n, n));
            let m = symmetrize(&linv * dx * linv.transpose());
            SymmetricEigen::new(m).eigenvalues.min()
        }
        None => {
            let e = SymmetricEigen::new(x.clone());
            let inv_sqrt = DMatrix::from_diagonal(&e.eigenvalues.map(|v| 1.0 / v.max(1e-300).sqrt()));
            let t = &e.eigenvectors * inv_sqrt * e.eigenvectors.transpose();
            SymmetricEigen::new(symmetrize(&t * dx * &t)).eigenvalues.min()
        }
    };
    if min_eig >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / min_eig
    }
}

fn step_length(x: &Blocks, dx: &Blocks) -> f64 {
    let a = x
        .iter()
        .zip(dx)
        .map(|(x, dx)| max_step(x, dx))
        .fold(f64::INFINITY, f64::min);
    (STEP_FRACTION * a).min(1.0)
}

fn inverse_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    match Cholesky::<f64, Dyn>::new(m.clone()) {
        Some(c) => symmetrize(c.inverse()),
        None => symmetrize(m.clone().pseudo_inverse(1e-300).unwrap_or_else(|_| m.clone())),
    }
}

fn solve_schur(m: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    if let Some(c) = Cholesky::<f64, Dyn>::new(m.clone()) {
        return c.solve(rhs);
    }
    let diag_max = m.diagonal().iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
    let mut reg = m.clone();
    for i in 0..reg.nrows() {
        reg[(i, i)] += 1e-12 * diag_max;
    }
    if let Some(c) = Cholesky::<f64, Dyn>::new(reg) {
        return c.solve(rhs);
    }
    m.clone().lu().solve(rhs).unwrap_or_else(|| DVector::zeros(rhs.len()))
}

struct Direction {
    dx: Blocks,
    dy: DVector<f64>,
    ds: Blocks,
}

/// HKM direction for `X S + ΔX S + X ΔS = K` linearized as `ΔX = (K − X ΔS) S⁻¹`.
fn direction(
    p: &Scaled,
    it: &Iterate,
    s_inv: &Blocks,
    schur: &DMatrix<f64>,
    rp: &DVector<f64>,
    rd: &Blocks,
    k: &Blocks,
) -> Direction {
    // Base term K S⁻¹ − X R_d S⁻¹.
    let base: Blocks = (0..p.dims.len())
        .map(|j| &k[j] * &s_inv[j] - &it.x[j] * &rd[j] * &s_inv[j])
        .collect();
    let base_sym: Blocks = base.iter().map(|m| symmetrize(m.clone())).collect();
    let rhs = rp - p.apply(&base_sym);
    let dy = solve_schur(schur, &rhs);
    let aty = p.adjoint(&dy);
    let ds: Blocks = rd.iter().zip(&aty).map(|(r, a)| symmetrize(r - a)).collect();
    let dx: Blocks = (0..p.dims.len())
        .map(|j| symmetrize(&k[j] * &s_inv[j] - &it.x[j] * &ds[j] * &s_inv[j]))
        .collect();
    Direction { dx, dy, ds }
}

fn schur_matrix(p: &Scaled, x: &Blocks, s_inv: &Blocks) -> DMatrix<f64> {
    let m = p.m();
    let mut out = DMatrix::zeros(m, m);
    for (blk, rows) in p.by_block.iter().enumerate() {
        for &(i, pos_i) in rows {
            let a_i = &p.rows[i][pos_i].1;
            let g = &x[blk] * a_i * &s_inv[blk];
            for &(j, pos_j) in rows {
                if j < i {
                    continue;
                }
                let v = dot(&p.rows[j][pos_j].1, &g);
                out[(i, j)] += v;
                if i != j {
                    out[(j, i)] += v;
                }
            }
        }
    }
    out
}

fn unscaled_outcome(
    p: &Scaled,
    status: SdpStatus,
    it: &Iterate,
    iterations: usize,
    gap_history: Vec<f64>,
    pinf: f64,
    dinf: f64,
) -> RealOutcome {
    RealOutcome {
        status,
        x: it.x.clone(),
        iterations,
        gap: blocks_dot(&it.x, &it.s) * p.c_scale,
        gap_history,
        primal_infeasibility: pinf,
        dual_infeasibility: dinf,
    }
}

pub(crate) fn solve_real(problem: &RealProblem, settings: &SdpSettings) -> RealOutcome {
    let p = Scaled::new(problem);
    let n_total: usize = p.dims.iter().sum();
    let m = p.m();

    let b_max = p.b.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let x0 = (n_total as f64).sqrt().max(10.0) * (1.0 + b_max);
    let s0 = (n_total as f64).sqrt().max(10.0);
    let mut it = Iterate {
        x: p.dims.iter().map(|&d| DMatrix::identity(d, d) * x0).collect(),
        y: DVector::zeros(m),
        s: p.dims.iter().map(|&d| DMatrix::identity(d, d) * s0).collect(),
    };

    let b_norm = p.b.norm();
    let c_norm = blocks_norm(&p.c);
    let mut gap_history = Vec::new();
    let mut best: Option<(f64, Iterate, f64, f64)> = None;
    let mut stall = 0;

    for iter in 0..settings.max_iter {
        let ax = p.apply(&it.x);
        let rp = &p.b - &ax;
        let aty = p.adjoint(&it.y);
        let rd: Blocks = (0..p.dims.len()).map(|j| &p.c[j] - &aty[j] - &it.s[j]).collect();
        let pobj = blocks_dot(&p.c, &it.x);
        let dobj = p.b.dot(&it.y);
        let xs = blocks_dot(&it.x, &it.s);
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = blocks_norm(&rd) / (1.0 + c_norm);
        let rel_gap = xs.abs() / (1.0 + pobj.abs() + dobj.abs());

        if iter > 0 {
            gap_history.push(xs * p.c_scale);
        }
        if rel_gap <= settings.gap_tol && pinf <= settings.feas_tol && dinf <= settings.feas_tol {
            return unscaled_outcome(&p, SdpStatus::Optimal, &it, iter, gap_history, pinf, dinf);
        }

        // Certificates of infeasibility: a dual ray (A^T y + S = 0, b^T y > 0)
        // or a primal ray (A X = 0, ⟨C, X⟩ < 0).
        if dobj > 0.0 {
            let ray: Blocks = aty.iter().zip(&it.s).map(|(a, s)| a + s).collect();
            if blocks_norm(&ray) <= CERTIFICATE_TOL * dobj {
                return unscaled_outcome(&p, SdpStatus::Infeasible, &it, iter, gap_history, pinf, dinf);
            }
        }
        if pobj < 0.0 && ax.norm() <= CERTIFICATE_TOL * pobj.abs() {
            return unscaled_outcome(&p, SdpStatus::Unbounded, &it, iter, gap_history, pinf, dinf);
        }

        let merit = rel_gap.max(pinf).max(dinf);
        match &best {
            Some((bm, ..)) if merit >= *bm => {
                stall += 1;
            }
            _ => {
                stall = 0;
                best = Some((
                    merit,
                    Iterate {
                        x: it.x.clone(),
                        y: it.y.clone(),
                        s: it.s.clone(),
                    },
                    pinf,
                    dinf,
                ));
            }
        }
        if stall >= STALL_LIMIT {
            break;
        }

        let s_inv: Blocks = it.s.iter().map(inverse_spd).collect();
        let schur = schur_matrix(&p, &it.x, &s_inv);
        let mu = xs / n_total as f64;

        // Predictor.
        let k_aff: Blocks = it.x.iter().zip(&it.s).map(|(x, s)| -(x * s)).collect();
        let aff = direction(&p, &it, &s_inv, &schur, &rp, &rd, &k_aff);
        let ap = step_length(&it.x, &aff.dx);
        let ad = step_length(&it.s, &aff.ds);
        let mu_aff = (0..p.dims.len())
            .map(|j| dot(&(&it.x[j] + &aff.dx[j] * ap), &(&it.s[j] + &aff.ds[j] * ad)))
            .sum::<f64>()
            / n_total as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // Corrector.
        let k: Blocks = (0..p.dims.len())
            .map(|j| {
                let d = p.dims[j];
                DMatrix::identity(d, d) * (sigma * mu) - &it.x[j] * &it.s[j] - &aff.dx[j] * &aff.ds[j]
            })
            .collect();
        let dir = direction(&p, &it, &s_inv, &schur, &rp, &rd, &k);
        let ap = step_length(&it.x, &dir.dx);
        let ad = step_length(&it.s, &dir.ds);
        for j in 0..p.dims.len() {
            it.x[j] = symmetrize(&it.x[j] + &dir.dx[j] * ap);
            it.s[j] = symmetrize(&it.s[j] + &dir.ds[j] * ad);
        }
        it.y += &dir.dy * ad;
    }

    let (_, best_it, pinf, dinf) = best.unwrap_or((f64::INFINITY, it, f64::INFINITY, f64::INFINITY));
    let iterations = gap_history.len();
    unscaled_outcome(&p, SdpStatus::MaxIterations, &best_it, iterations, gap_history, pinf, dinf)
}

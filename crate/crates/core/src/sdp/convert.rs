//! Complex problem → real symmetric standard form, and back.
//!
//! Presolve: an equality `Tr(A X_j) = 0` with PSD `A` forces the range of
//! `X_j` into the null space of `A`. Such constraints have no strictly
//! feasible point, so they are eliminated by substituting `X_j = U Y U^H`
//! with `U` an orthonormal null-space basis (facial reduction).
//!
//! Complex blocks of dimension `r > 1` are embedded as real `2r × 2r`
//! blocks `[[Re, -Im], [Im, Re]]`; `Tr(A X) = ½ Tr(Â X̂)`. Dimension-one
//! blocks stay real scalars. Inequalities receive 1×1 slack blocks and each
//! LMI receives a slack block `S` tied to the affine map by one real
//! equation per element of a Hermitian basis.

use super::solver::{RealOutcome, RealProblem};
use super::{LmiTerm, Relation, SdpProblem, SdpSolution, SdpStatus};
use crate::numerics::{from_real_embedding, hermitian_eig, real_embedding, ComplexMatrix, HermitianMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;

const NULL_TOL: f64 = 1e-9;
const CONSTANT_TOL: f64 = 1e-12;

pub(super) struct Reduction {
    /// Orthonormal basis of the face for each block; `None` keeps the block whole.
    bases: Vec<Option<ComplexMatrix>>,
    removed: Vec<bool>,
    pub trivially_infeasible: bool,
}

fn reduced_dim(basis: &Option<ComplexMatrix>, dim: usize) -> usize {
    basis.as_ref().map_or(dim, |u| u.ncols())
}

fn restrict(basis: &Option<ComplexMatrix>, a: &HermitianMatrix) -> HermitianMatrix {
    match basis {
        None => a.clone(),
        Some(u) => a.congruence(u),
    }
}

fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Real coefficient for a block of reduced complex dimension `r`.
fn embed(a: &ComplexMatrix) -> DMatrix<f64> {
    if a.nrows() == 1 {
        DMatrix::from_element(1, 1, a[(0, 0)].re)
    } else {
        real_embedding(a) * 0.5
    }
}

fn real_dim(r: usize) -> usize {
    if r == 1 {
        1
    } else {
        2 * r
    }
}

fn hermitian_basis(m: usize) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(m * m);
    for p in 0..m {
        let mut e = ComplexMatrix::zeros(m, m);
        e[(p, p)] = Complex64::new(1.0, 0.0);
        out.push(e);
    }
    for p in 0..m {
        for q in (p + 1)..m {
            let mut re = ComplexMatrix::zeros(m, m);
            re[(p, q)] = Complex64::new(0.5, 0.0);
            re[(q, p)] = Complex64::new(0.5, 0.0);
            out.push(re);
            let mut im = ComplexMatrix::zeros(m, m);
            im[(p, q)] = Complex64::new(0.0, 0.5);
            im[(q, p)] = Complex64::new(0.0, -0.5);
            out.push(im);
        }
    }
    out
}

impl Reduction {
    pub fn new(problem: &SdpProblem) -> Self {
        let mut bases: Vec<Option<ComplexMatrix>> = vec![None; problem.block_dims.len()];
        let mut removed = vec![false; problem.constraints.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for (i, con) in problem.constraints.iter().enumerate() {
                if removed[i] || con.relation != Relation::Eq || con.bound != 0.0 {
                    continue;
                }
                let live: Vec<_> = con
                    .terms
                    .iter()
                    .filter(|t| reduced_dim(&bases[t.block], problem.block_dims[t.block]) > 0)
                    .collect();
                let blocks: Vec<usize> = {
                    let mut b: Vec<usize> = live.iter().map(|t| t.block).collect();
                    b.dedup();
                    b
                };
                if blocks.len() != 1 || live.iter().any(|t| t.block != blocks[0]) {
                    continue;
                }
                let j = blocks[0];
                let mut coeff = restrict(&bases[j], &live[0].coeff);
                for t in &live[1..] {
                    coeff = coeff.add(&restrict(&bases[j], &t.coeff));
                }
                let eig = hermitian_eig(&coeff);
                let scale = eig.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
                if scale == 0.0 {
                    removed[i] = true;
                    changed = true;
                    continue;
                }
                if *eig.values.last().unwrap() < -NULL_TOL * scale {
                    continue;
                }
                let keep: Vec<usize> = (0..eig.values.len())
                    .filter(|&k| eig.values[k] <= NULL_TOL * scale)
                    .collect();
                let mut v = ComplexMatrix::zeros(eig.values.len(), keep.len());
                for (dst, &src) in keep.iter().enumerate() {
                    v.set_column(dst, &eig.vectors.column(src));
                }
                bases[j] = Some(match &bases[j] {
                    None => v,
                    Some(u) => u * v,
                });
                removed[i] = true;
                changed = true;
            }
        }

        let mut out = Self {
            bases,
            removed,
            trivially_infeasible: false,
        };
        // Constraints whose every term lives on eliminated blocks are constants.
        for (i, con) in problem.constraints.iter().enumerate() {
            if out.removed[i] {
                continue;
            }
            let lhs_scale = con
                .terms
                .iter()
                .filter(|t| out.dim(problem, t.block) > 0)
                .map(|t| max_abs(restrict(&out.bases[t.block], &t.coeff).as_matrix()))
                .fold(0.0_f64, f64::max);
            if lhs_scale > 0.0 {
                continue;
            }
            let b = con.bound;
            let ok = match con.relation {
                Relation::Eq => b.abs() <= CONSTANT_TOL,
                Relation::Le => b >= -CONSTANT_TOL,
                Relation::Ge => b <= CONSTANT_TOL,
            };
            if !ok {
                out.trivially_infeasible = true;
            }
            out.removed[i] = true;
        }
        out
    }

    fn dim(&self, problem: &SdpProblem, block: usize) -> usize {
        reduced_dim(&self.bases[block], problem.block_dims[block])
    }

    pub fn real_problem(&self, problem: &SdpProblem) -> RealProblemWithMap {
        let n_blocks = problem.block_dims.len();
        let mut dims = Vec::new();
        let mut block_index = vec![None; n_blocks];
        for (j, slot) in block_index.iter_mut().enumerate() {
            let r = self.dim(problem, j);
            if r > 0 {
                *slot = Some(dims.len());
                dims.push(real_dim(r));
            }
        }
        let mut c: Vec<Option<DMatrix<f64>>> = vec![None; dims.len()];
        for (j, cj) in problem.objective.iter().enumerate() {
            if let (Some(cj), Some(k)) = (cj, block_index[j]) {
                c[k] = Some(-embed(restrict(&self.bases[j], cj).as_matrix()));
            }
        }

        let mut rows: Vec<Vec<(usize, DMatrix<f64>)>> = Vec::new();
        let mut b = Vec::new();
        for (i, con) in problem.constraints.iter().enumerate() {
            if self.removed[i] {
                continue;
            }
            let mut entries = Vec::new();
            for t in &con.terms {
                if let Some(k) = block_index[t.block] {
                    add_entry(&mut entries, k, embed(restrict(&self.bases[t.block], &t.coeff).as_matrix()));
                }
            }
            let slack_sign = match con.relation {
                Relation::Eq => None,
                Relation::Le => Some(1.0),
                Relation::Ge => Some(-1.0),
            };
            if let Some(sign) = slack_sign {
                let k = dims.len();
                dims.push(1);
                c.push(None);
                entries.push((k, DMatrix::from_element(1, 1, sign)));
            }
            rows.push(entries);
            b.push(con.bound);
        }

        for lmi in &problem.lmis {
            let m = lmi.constant.dim();
            let s_index = dims.len();
            dims.push(real_dim(m));
            c.push(None);
            let maps: Vec<Option<(usize, ComplexMatrix, f64)>> = lmi
                .terms
                .iter()
                .map(|t| match t {
                    LmiTerm::Congruence { block, map, scale } => block_index[*block].map(|k| {
                        let reduced = match &self.bases[*block] {
                            None => map.clone(),
                            Some(u) => u.adjoint() * map,
                        };
                        (k, reduced, *scale)
                    }),
                    LmiTerm::Scalar { .. } => None,
                })
                .collect();
            for basis in hermitian_basis(m) {
                let mut entries = Vec::new();
                entries.push((s_index, embed(&(-&basis))));
                for (term, reduced) in lmi.terms.iter().zip(&maps) {
                    match (term, reduced) {
                        (LmiTerm::Congruence { .. }, Some((k, t, scale))) => {
                            let coeff = t * &basis * t.adjoint() * Complex64::new(*scale, 0.0);
                            let coeff = HermitianMatrix::symmetrize(coeff);
                            if max_abs(coeff.as_matrix()) > 0.0 {
                                add_entry(&mut entries, *k, embed(coeff.as_matrix()));
                            }
                        }
                        (LmiTerm::Scalar { block, matrix }, _) => {
                            if let Some(k) = block_index[*block] {
                                let v = HermitianMatrix::symmetrize(basis.clone()).trace_product(matrix);
                                if v != 0.0 {
                                    add_entry(&mut entries, k, DMatrix::from_element(1, 1, v));
                                }
                            }
                        }
                        _ => {}
                    }
                }
                let f0 = HermitianMatrix::symmetrize(basis).trace_product(&lmi.constant);
                rows.push(entries);
                b.push(-f0);
            }
        }

        RealProblemWithMap {
            problem: RealProblem { dims, c, rows, b },
            block_index,
        }
    }

    pub fn lift(&self, problem: &SdpProblem, map: &RealProblemWithMap, out: RealOutcome) -> SdpSolution {
        let blocks: Vec<HermitianMatrix> = (0..problem.block_dims.len())
            .map(|j| {
                let d = problem.block_dims[j];
                match map.block_index[j] {
                    None => HermitianMatrix::zeros(d),
                    Some(k) => {
                        let xr = &out.x[k];
                        let y = if xr.nrows() == 1 {
                            HermitianMatrix::from_real_diagonal(&[xr[(0, 0)]])
                        } else {
                            from_real_embedding(xr)
                        };
                        match &self.bases[j] {
                            None => y,
                            Some(u) => HermitianMatrix::symmetrize(u * y.as_matrix() * u.adjoint()),
                        }
                    }
                }
            })
            .collect();
        SdpSolution {
            status: out.status,
            objective_value: problem.objective_at(&blocks),
            primal_blocks: blocks,
            duality_gap: out.gap,
            iterations: out.iterations,
            gap_history: out.gap_history,
            primal_infeasibility: out.primal_infeasibility,
            dual_infeasibility: out.dual_infeasibility,
        }
    }

    pub fn constant_solution(&self, problem: &SdpProblem, status: SdpStatus) -> SdpSolution {
        let blocks: Vec<HermitianMatrix> = problem.block_dims.iter().map(|&d| HermitianMatrix::zeros(d)).collect();
        SdpSolution {
            status,
            objective_value: problem.objective_at(&blocks),
            primal_blocks: blocks,
            duality_gap: 0.0,
            iterations: 0,
            gap_history: Vec::new(),
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
        }
    }
}

fn add_entry(entries: &mut Vec<(usize, DMatrix<f64>)>, k: usize, m: DMatrix<f64>) {
    if let Some((_, existing)) = entries.iter_mut().find(|(idx, _)| *idx == k) {
        *existing += m;
    } else {
        entries.push((k, m));
    }
}

/// Real problem plus the index of each user block inside it.
pub(super) struct RealProblemWithMap {
    pub problem: RealProblem,
    pub block_index: Vec<Option<usize>>,
}

//! Small dense semidefinite programs over Hermitian matrix variables.
//!
//! A problem has one or more Hermitian PSD blocks `X_j` and reads
//!
//! ```text
//! maximize   Σ_j Tr(C_j X_j)
//! subject to Σ_j Tr(A_ij X_j)  {=, ≤, ≥}  b_i
//!            F_0 + Σ_k F_k(X) ⪰ 0
//! ```
//!
//! where each LMI term `F_k` is either a congruence `s · T^H X_j T` or, for a
//! 1×1 block, a scalar multiple `x_j · G` of a fixed Hermitian matrix.
//!
//! Problems are converted to a real symmetric standard form (see
//! [`convert`]) and solved by a primal-dual interior-point method (see
//! [`solver`]).

mod convert;
pub mod dump;
mod randomization;
mod solver;

use crate::numerics::{ComplexMatrix, HermitianMatrix};
use thiserror::Error;

pub use randomization::{gaussian_randomization, unit_modulus, RandomizationError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Term {
    pub block: usize,
    pub coeff: HermitianMatrix,
}

#[derive(Debug, Clone)]
pub struct Constraint {
    pub terms: Vec<Term>,
    pub relation: Relation,
    pub bound: f64,
}

impl Constraint {
    pub fn new(terms: Vec<Term>, relation: Relation, bound: f64) -> Self {
        Self {
            terms,
            relation,
            bound,
        }
    }

    pub fn single(block: usize, coeff: HermitianMatrix, relation: Relation, bound: f64) -> Self {
        Self::new(vec![Term { block, coeff }], relation, bound)
    }
}

#[derive(Debug, Clone)]
pub enum LmiTerm {
    /// `scale · T^H X_block T`; `map` has `dim(block)` rows and `dim(lmi)` columns.
    Congruence {
        block: usize,
        map: ComplexMatrix,
        scale: f64,
    },
    /// `x · G` for a 1×1 block holding the nonnegative scalar `x`.
    Scalar { block: usize, matrix: HermitianMatrix },
}

impl LmiTerm {
    pub fn block(&self) -> usize {
        match self {
            LmiTerm::Congruence { block, .. } | LmiTerm::Scalar { block, .. } => *block,
        }
    }
}

/// `constant + Σ terms ⪰ 0`.
#[derive(Debug, Clone)]
pub struct Lmi {
    pub constant: HermitianMatrix,
    pub terms: Vec<LmiTerm>,
}

#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub block_dims: Vec<usize>,
    /// One coefficient per block; `None` means zero.
    pub objective: Vec<Option<HermitianMatrix>>,
    pub constraints: Vec<Constraint>,
    pub lmis: Vec<Lmi>,
}

impl SdpProblem {
    pub fn new(block_dims: Vec<usize>) -> Self {
        let objective = vec![None; block_dims.len()];
        Self {
            block_dims,
            objective,
            constraints: Vec::new(),
            lmis: Vec::new(),
        }
    }

    pub fn set_objective(&mut self, block: usize, coeff: HermitianMatrix) {
        self.objective[block] = Some(coeff);
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        self.constraints.push(c);
    }

    pub fn add_lmi(&mut self, lmi: Lmi) {
        self.lmis.push(lmi);
    }

    /// Objective value of candidate blocks.
    pub fn objective_at(&self, blocks: &[HermitianMatrix]) -> f64 {
        self.objective
            .iter()
            .zip(blocks)
            .filter_map(|(c, x)| c.as_ref().map(|c| c.trace_product(x)))
            .sum()
    }

    /// Left-hand side of constraint `i` at candidate blocks.
    pub fn constraint_value(&self, i: usize, blocks: &[HermitianMatrix]) -> f64 {
        self.constraints[i]
            .terms
            .iter()
            .map(|t| t.coeff.trace_product(&blocks[t.block]))
            .sum()
    }

    /// Value of LMI `k` at candidate blocks.
    pub fn lmi_value(&self, k: usize, blocks: &[HermitianMatrix]) -> HermitianMatrix {
        let lmi = &self.lmis[k];
        let mut acc = lmi.constant.as_matrix().clone();
        for term in &lmi.terms {
            match term {
                LmiTerm::Congruence { block, map, scale } => {
                    acc += blocks[*block].congruence(map).as_matrix() * num_complex::Complex64::new(*scale, 0.0);
                }
                LmiTerm::Scalar { block, matrix } => {
                    let x = blocks[*block].as_matrix()[(0, 0)].re;
                    acc += matrix.as_matrix() * num_complex::Complex64::new(x, 0.0);
                }
            }
        }
        HermitianMatrix::symmetrize(acc)
    }

    pub fn validate(&self) -> Result<(), SdpError> {
        if self.block_dims.is_empty() {
            return Err(SdpError::NoBlocks);
        }
        if let Some(j) = self.block_dims.iter().position(|&d| d == 0) {
            return Err(SdpError::EmptyBlock { block: j });
        }
        if self.objective.len() != self.block_dims.len() {
            return Err(SdpError::Dimension(format!(
                "{} objective entries for {} blocks",
                self.objective.len(),
                self.block_dims.len()
            )));
        }
        for (j, c) in self.objective.iter().enumerate() {
            if let Some(c) = c {
                self.check_block(j, c.dim(), "objective")?;
            }
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if !con.bound.is_finite() {
                return Err(SdpError::Dimension(format!("constraint {i} has a non-finite bound")));
            }
            for t in &con.terms {
                self.check_block(t.block, t.coeff.dim(), &format!("constraint {i}"))?;
            }
        }
        for (k, lmi) in self.lmis.iter().enumerate() {
            let m = lmi.constant.dim();
            for t in &lmi.terms {
                match t {
                    LmiTerm::Congruence { block, map, .. } => {
                        self.check_block(*block, map.nrows(), &format!("lmi {k}"))?;
                        if map.ncols() != m {
                            return Err(SdpError::Dimension(format!(
                                "lmi {k}: map has {} columns, lmi dimension is {m}",
                                map.ncols()
                            )));
                        }
                    }
                    LmiTerm::Scalar { block, matrix } => {
                        self.check_block(*block, 1, &format!("lmi {k}"))?;
                        if matrix.dim() != m {
                            return Err(SdpError::Dimension(format!(
                                "lmi {k}: scalar term has dimension {}, expected {m}",
                                matrix.dim()
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_block(&self, block: usize, dim: usize, what: &str) -> Result<(), SdpError> {
        match self.block_dims.get(block) {
            None => Err(SdpError::Dimension(format!("{what}: block {block} does not exist"))),
            Some(&d) if d != dim => Err(SdpError::Dimension(format!(
                "{what}: block {block} has dimension {d}, coefficient has {dim}"
            ))),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SdpSettings {
    pub gap_tol: f64,
    pub feas_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpSettings {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            feas_tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIterations,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub primal_blocks: Vec<HermitianMatrix>,
    pub objective_value: f64,
    /// Complementarity `⟨X, S⟩` of the returned iterate, in objective units.
    pub duality_gap: f64,
    pub iterations: usize,
    /// Complementarity after each iteration, in objective units.
    pub gap_history: Vec<f64>,
    pub primal_infeasibility: f64,
    pub dual_infeasibility: f64,
}

impl SdpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SdpStatus::Optimal
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SdpError {
    #[error("problem has no variable blocks")]
    NoBlocks,
    #[error("block {block} has dimension zero")]
    EmptyBlock { block: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

pub fn solve(problem: &SdpProblem, settings: &SdpSettings) -> Result<SdpSolution, SdpError> {
    problem.validate()?;
    let reduction = convert::Reduction::new(problem);
    if reduction.trivially_infeasible {
        return Ok(reduction.constant_solution(problem, SdpStatus::Infeasible));
    }
    let real = reduction.real_problem(problem);
    if real.problem.dims.is_empty() {
        return Ok(reduction.constant_solution(problem, SdpStatus::Optimal));
    }
    let out = solver::solve_real(&real.problem, settings);
    Ok(reduction.lift(problem, &real, out))
}

//! Line-oriented text dump of an [`SdpProblem`] for cross-checking with
//! external solvers.
//!
//! ```text
//! blocks <d_0> <d_1> ...
//! objective <block>
//! entry <row> <col> <re> <im>          (upper triangle, nonzeros only)
//! constraint <index> <relation> <bound>   (relation is =, <= or >=)
//! term <block>
//! entry ...
//! lmi <index> <dim>
//! constant
//! entry ...
//! congruence <block> <scale> <rows> <cols>
//! map <row> <col> <re> <im>            (nonzeros only)
//! scalar <block>
//! entry ...
//! ```
//!
//! Every `entry`/`map` line belongs to the nearest preceding header.
//! Numbers are written with Rust's shortest round-trip formatting.

use super::{LmiTerm, SdpProblem};
use crate::numerics::{ComplexMatrix, HermitianMatrix};
use std::fmt::Write;

fn entries(out: &mut String, m: &HermitianMatrix) {
    let a = m.as_matrix();
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            let z = a[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                let _ = writeln!(out, "entry {i} {j} {} {}", z.re, z.im);
            }
        }
    }
}

fn map_entries(out: &mut String, m: &ComplexMatrix) {
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                let _ = writeln!(out, "map {i} {j} {} {}", z.re, z.im);
            }
        }
    }
}

pub fn dump(problem: &SdpProblem) -> String {
    let mut out = String::new();
    let dims: Vec<String> = problem.block_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "blocks {}", dims.join(" "));
    for (j, c) in problem.objective.iter().enumerate() {
        if let Some(c) = c {
            let _ = writeln!(out, "objective {j}");
            entries(&mut out, c);
        }
    }
    for (i, con) in problem.constraints.iter().enumerate() {
        let _ = writeln!(out, "constraint {i} {} {}", con.relation.symbol(), con.bound);
        for t in &con.terms {
            let _ = writeln!(out, "term {}", t.block);
            entries(&mut out, &t.coeff);
        }
    }
    for (k, lmi) in problem.lmis.iter().enumerate() {
        let _ = writeln!(out, "lmi {k} {}", lmi.constant.dim());
        let _ = writeln!(out, "constant");
        entries(&mut out, &lmi.constant);
        for t in &lmi.terms {
            match t {
                LmiTerm::Congruence { block, map, scale } => {
                    let _ = writeln!(out, "congruence {block} {scale} {} {}", map.nrows(), map.ncols());
                    map_entries(&mut out, map);
                }
                LmiTerm::Scalar { block, matrix } => {
                    let _ = writeln!(out, "scalar {block}");
                    entries(&mut out, matrix);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{Constraint, Relation};

    #[test]
    fn dump_lists_blocks_and_constraints() {
        let mut p = SdpProblem::new(vec![2, 1]);
        p.set_objective(0, HermitianMatrix::from_real_diagonal(&[3.0, 1.0]));
        p.add_constraint(Constraint::single(0, HermitianMatrix::identity(2), Relation::Eq, 1.0));
        let text = dump(&p);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "blocks 2 1");
        assert_eq!(lines[1], "objective 0");
        assert_eq!(lines[2], "entry 0 0 3 0");
        assert!(lines.contains(&"constraint 0 = 1"));
    }
}

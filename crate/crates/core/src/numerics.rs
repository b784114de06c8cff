//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small (dimension ≲ 64) dense matrices. The
//! Hermitian eigensolver is nalgebra's; this module adds the PSD-aware
//! conveniences the beamforming code needs: descending spectra, square
//! roots with noise clamping, orthogonal-complement projectors and
//! principal-component extraction.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Dense complex matrix.
pub type ComplexMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = DVector<Complex64>;

/// Elementwise tolerance used when accepting a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative tolerance below which negative eigenvalues are treated as noise.
pub const PSD_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: max |A - A^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite: smallest eigenvalue {min_eigenvalue:e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("matrix has no entries")]
    Empty,
}

/// A square complex matrix equal to its conjugate transpose.
///
/// Construction checks the input against [`HERMITIAN_TOL`] (scaled by the
/// largest entry) and then symmetrizes, so downstream code can rely on exact
/// Hermitian symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(ComplexMatrix);

impl HermitianMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self, NumericsError> {
        if m.nrows() != m.ncols() {
            return Err(NumericsError::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(NumericsError::Empty);
        }
        let scale = m.iter().fold(1.0_f64, |acc, z| acc.max(z.norm()));
        let deviation = (&m - m.adjoint())
            .iter()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()));
        if deviation > HERMITIAN_TOL * scale {
            return Err(NumericsError::NotHermitian { deviation });
        }
        Ok(Self::symmetrize(m))
    }

    /// Hermitian part `(A + A^H)/2` of an arbitrary square matrix.
    ///
    /// Used on matrices that are Hermitian up to round-off by construction.
    pub fn symmetrize(m: ComplexMatrix) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "symmetrize needs a square matrix");
        let adj = m.adjoint();
        Self((m + adj).scale(0.5))
    }

    pub fn identity(n: usize) -> Self {
        Self(ComplexMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(ComplexMatrix::zeros(n, n))
    }

    /// `u u^H`.
    pub fn outer(u: &ComplexVector) -> Self {
        Self::symmetrize(u * u.adjoint())
    }

    /// Real diagonal matrix.
    pub fn from_real_diagonal(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// `Re Tr(self · other)`; the trace of a product of Hermitian matrices is real.
    pub fn trace_product(&self, other: &HermitianMatrix) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += (self.0[(i, j)] * other.0[(j, i)]).re;
            }
        }
        acc
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.0[(i, i)].re).sum()
    }

    /// `u^H A u`, real for Hermitian `A`.
    pub fn quadratic_form(&self, u: &ComplexVector) -> f64 {
        (u.adjoint() * &self.0 * u)[(0, 0)].re
    }

    /// `T^H A T` for a conformable `T`.
    pub fn congruence(&self, t: &ComplexMatrix) -> HermitianMatrix {
        Self::symmetrize(t.adjoint() * &self.0 * t)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> HermitianMatrix {
        Self(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self(&self.0 - &other.0)
    }
}

/// Eigendecomposition `A = V diag(λ) V^H` with eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let l = self.values[j];
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= l);
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn hermitian_eig(a: &HermitianMatrix) -> Eigen {
    let eig = SymmetricEigen::new(a.as_matrix().clone());
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Eigen { values, vectors }
}

/// Real symmetric eigenvalues, descending.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(a.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

fn clamp_spectrum(eig: &Eigen) -> Result<Vec<f64>, NumericsError> {
    let scale = eig.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let min = eig.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(NumericsError::NotPsd { min_eigenvalue: min });
    }
    Ok(eig.values.iter().map(|&v| v.max(0.0)).collect())
}

/// Principal square root of a PSD matrix.
pub fn psd_sqrt(w: &HermitianMatrix) -> Result<HermitianMatrix, NumericsError> {
    let eig = hermitian_eig(w);
    let values = clamp_spectrum(&eig)?;
    let roots: Vec<f64> = values.iter().map(|v| v.sqrt()).collect();
    Ok(HermitianMatrix::symmetrize(
        Eigen {
            values: roots,
            vectors: eig.vectors,
        }
        .reconstruct(),
    ))
}

/// Projector onto the orthogonal complement of `t`: `I - t t^H / ‖t‖²`.
///
/// A zero vector imposes no direction and yields the identity.
pub fn null_projector(t: &ComplexVector) -> HermitianMatrix {
    let n = t.len();
    let norm2 = t.norm_squared();
    if norm2 == 0.0 {
        return HermitianMatrix::identity(n);
    }
    let outer = t * t.adjoint();
    HermitianMatrix::symmetrize(ComplexMatrix::identity(n, n) - outer.unscale(norm2))
}

/// Orthonormal basis (as columns) of the orthogonal complement of `t`.
pub fn null_basis(t: &ComplexVector) -> ComplexMatrix {
    let n = t.len();
    let proj = null_projector(t);
    let eig = hermitian_eig(&proj);
    let keep = if t.norm_squared() == 0.0 { n } else { n - 1 };
    eig.vectors.columns(0, keep).into_owned()
}

/// `√λ₁ v₁` for the principal eigenpair of a PSD matrix.
///
/// For a repeated top eigenvalue the first computed eigenvector is used, so
/// the direction is deterministic but not unique.
pub fn rank_one_extract(w: &HermitianMatrix) -> ComplexVector {
    let eig = hermitian_eig(w);
    let lead = eig.values[0].max(0.0);
    eig.vectors.column(0).into_owned() * Complex64::new(lead.sqrt(), 0.0)
}

/// Ratio of the second to the first eigenvalue; zero for rank ≤ 1.
pub fn rank_one_residual(w: &HermitianMatrix) -> f64 {
    let eig = hermitian_eig(w);
    if eig.values.len() < 2 || eig.values[0] <= 0.0 {
        return 0.0;
    }
    eig.values[1].max(0.0) / eig.values[0]
}

/// Real symmetric embedding `[[Re A, -Im A], [Im A, Re A]]`.
pub fn real_embedding(a: &ComplexMatrix) -> DMatrix<f64> {
    let (r, c) = a.shape();
    let mut out = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let z = a[(i, j)];
            out[(i, j)] = z.re;
            out[(i + r, j + c)] = z.re;
            out[(i, j + c)] = -z.im;
            out[(i + r, j)] = z.im;
        }
    }
    out
}

/// Hermitian matrix represented by a real embedding block, after averaging
/// out the component that does not respect the complex structure.
pub fn from_real_embedding(x: &DMatrix<f64>) -> HermitianMatrix {
    let n = x.nrows() / 2;
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
            let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
            out[(i, j)] = Complex64::new(re, im);
        }
    }
    HermitianMatrix::symmetrize(out)
}

/// `diag(v)` as a dense matrix.
pub fn diag(v: &ComplexVector) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(v)
}

/// Entrywise conjugate.
pub fn conj(v: &ComplexVector) -> ComplexVector {
    v.map(|z| z.conj())
}

/// `u^H v`.
pub fn inner(u: &ComplexVector, v: &ComplexVector) -> Complex64 {
    u.dotc(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha20Rng, r: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(r, cols, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
    }

    fn random_hermitian(rng: &mut ChaCha20Rng, n: usize) -> HermitianMatrix {
        HermitianMatrix::symmetrize(random_matrix(rng, n, n))
    }

    fn fro(m: &ComplexMatrix) -> f64 {
        m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn construction_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(NumericsError::NotHermitian { .. })));
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(HermitianMatrix::new(rect), Err(NumericsError::NotSquare { .. })));
    }

    #[test]
    fn construction_symmetrizes_tiny_asymmetry() {
        let m = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.5, 1e-14), c(0.5, 0.0), c(2.0, 1e-15)]);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.as_matrix()[(0, 1)], h.as_matrix()[(1, 0)].conj());
        assert_eq!(h.as_matrix()[(1, 1)].im, 0.0);
    }

    #[test]
    fn eig_identity_and_diagonal() {
        let e = hermitian_eig(&HermitianMatrix::identity(3));
        for v in &e.values {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-14);
        }
        let e = hermitian_eig(&HermitianMatrix::from_real_diagonal(&[1.0, 2.0]));
        assert_abs_diff_eq!(e.values[0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(1, 0)].norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.vectors[(0, 1)].norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for n in 1..=16 {
            let a = random_hermitian(&mut rng, n);
            let e = hermitian_eig(&a);
            assert!(e.values.windows(2).all(|p| p[0] >= p[1]));
            let err = fro(&(e.reconstruct() - a.as_matrix()));
            assert!(err <= 1e-10 * a.frobenius_norm(), "n={n} err={err}");
            let gram = e.vectors.adjoint() * &e.vectors - ComplexMatrix::identity(n, n);
            assert!(fro(&gram) <= 1e-10);
        }
    }

    #[test]
    fn psd_sqrt_cases() {
        let s = psd_sqrt(&HermitianMatrix::identity(3)).unwrap();
        assert!(fro(&(s.as_matrix() - ComplexMatrix::identity(3, 3))) < 1e-14);
        let s = psd_sqrt(&HermitianMatrix::from_real_diagonal(&[4.0, 9.0])).unwrap();
        assert_abs_diff_eq!(s.as_matrix()[(0, 0)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.as_matrix()[(1, 1)].re, 3.0, epsilon = 1e-14);

        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for n in [2, 4, 7] {
            let b = random_matrix(&mut rng, n, n);
            let w = HermitianMatrix::symmetrize(&b * b.adjoint());
            let r = psd_sqrt(&w).unwrap();
            let err = fro(&(r.as_matrix() * r.as_matrix() - w.as_matrix()));
            assert!(err <= 1e-9 * w.frobenius_norm());
        }
    }

    #[test]
    fn psd_sqrt_rejects_indefinite_and_clamps_noise() {
        let bad = HermitianMatrix::from_real_diagonal(&[1.0, -0.1]);
        assert!(matches!(psd_sqrt(&bad), Err(NumericsError::NotPsd { .. })));
        let noisy = HermitianMatrix::from_real_diagonal(&[1.0, -1e-13]);
        let r = psd_sqrt(&noisy).unwrap();
        assert_eq!(r.as_matrix()[(1, 1)].re, 0.0);
    }

    #[test]
    fn null_projector_basis_vector() {
        let t = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let p = null_projector(&t);
        assert!(fro(&(p.as_matrix() - HermitianMatrix::from_real_diagonal(&[0.0, 1.0]).as_matrix())) < 1e-15);
        let zero = ComplexVector::zeros(3);
        assert_eq!(null_projector(&zero), HermitianMatrix::identity(3));
    }

    #[test]
    fn null_projector_properties_random() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for n in 1..8 {
            let t = random_matrix(&mut rng, n, 1).column(0).into_owned();
            let p = null_projector(&t);
            assert!((p.as_matrix() * &t).norm() <= 1e-12 * t.norm());
            let sq = p.as_matrix() * p.as_matrix();
            assert!(fro(&(sq - p.as_matrix())) <= 1e-12);
            let basis = null_basis(&t);
            assert_eq!(basis.ncols(), n - 1);
            assert!((basis.adjoint() * &t).norm() <= 1e-12 * t.norm());
        }
    }

    #[test]
    fn rank_one_extract_cases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = ComplexVector::from_vec(vec![c(s, 0.0), c(0.0, s)]);
        let w = HermitianMatrix::outer(&u).scale(4.0);
        let x = rank_one_extract(&w);
        assert!(fro(&(&x * x.adjoint() - w.as_matrix())) <= 1e-9);

        assert_eq!(rank_one_extract(&HermitianMatrix::zeros(3)).norm(), 0.0);
        let x = rank_one_extract(&HermitianMatrix::identity(2));
        assert_abs_diff_eq!(x.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn real_embedding_round_trip_and_trace() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let a = random_hermitian(&mut rng, 4);
        let x = random_hermitian(&mut rng, 4);
        let ea = real_embedding(a.as_matrix());
        let ex = real_embedding(x.as_matrix());
        assert_abs_diff_eq!(0.5 * (&ea * &ex).trace(), a.trace_product(&x), epsilon = 1e-12);
        let back = from_real_embedding(&ex);
        assert!(fro(&(back.as_matrix() - x.as_matrix())) < 1e-14);
    }
}

//! Dense square matrices over a scalar backend, with the
//! tensor/dagger/trace algebra and the positive-semidefiniteness
//! decisions the verifier is built on.

mod psd;

pub use psd::{min_eigenvalue, PsdOutcome};

use crate::scalar::{Backend, Cyclotomic, Scalar};
use num::complex::Complex64;
use std::fmt;
use std::ops::{Index, IndexMut};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch in {op}: {left} vs {right}")]
    DimMismatch {
        op: &'static str,
        left: usize,
        right: usize,
    },
    #[error("matrix is not square: {rows} rows, row {row} has {cols} columns")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("matrix dimension must be positive")]
    EmptyMatrix,
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("eigenvalue iteration did not converge after {sweeps} sweeps (off-norm {off:.3e})")]
    NonConvergence { sweeps: usize, off: f64 },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("not a quantum predicate: {reason}")]
    NotPredicate { reason: &'static str },
    #[error("not a density matrix: {reason}")]
    NotDensity { reason: &'static str },
    #[error(transparent)]
    Scalar(#[from] crate::scalar::ScalarError),
}

/// A dense `dim × dim` matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Matrix { dim, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self, MatrixError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MatrixError::EmptyMatrix);
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(MatrixError::NotSquare {
                    rows: dim,
                    row: i,
                    cols: r.len(),
                });
            }
        }
        Ok(Matrix {
            dim,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// |i⟩⟨j| at the given dimension.
    pub fn ket_bra(dim: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(dim);
        m[(i, j)] = S::one();
        m
    }

    /// |v⟩⟨v| for a basis index v.
    pub fn basis_proj(dim: usize, v: usize) -> Self {
        Self::ket_bra(dim, v, v)
    }

    /// Rank-one |x⟩⟨y| from explicit vectors.
    pub fn outer(x: &[S], y: &[S]) -> Self {
        let dim = x.len();
        Matrix::from_fn(dim, |i, j| x[i].clone() * y[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn backend(&self) -> Backend {
        S::BACKEND
    }

    fn check_dim(&self, rhs: &Self, op: &'static str) -> Result<(), MatrixError> {
        if self.dim != rhs.dim {
            return Err(MatrixError::DimMismatch {
                op,
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(())
    }

    pub fn add(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_dim(rhs, "add")?;
        Ok(Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_dim(rhs, "sub")?;
        Ok(Matrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        })
    }

    pub fn mul(&self, rhs: &Self) -> Result<Self, MatrixError> {
        self.check_dim(rhs, "mul")?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self.data[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.data[k * n + j];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.data[i * n + j].clone();
                    out.data[i * n + j] = cur + a.clone() * b.clone();
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, s: &S) -> Self {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Matrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.dim {
            t = t + self[(i, i)].clone();
        }
        t
    }

    /// Kronecker product; `out[(i·db+k, j·db+l)] = a[i,j]·b[k,l]`.
    pub fn tensor(&self, rhs: &Self) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        Matrix::from_fn(da * db, |r, c| {
            let (i, k) = (r / db, r % db);
            let (j, l) = (c / db, c % db);
            self[(i, j)].clone() * rhs[(k, l)].clone()
        })
    }

    /// A = A† — exact equality on the exact backend, entrywise within
    /// `tol` on the float backend.
    pub fn is_hermitian(&self, tol: f64) -> bool {
        match S::BACKEND {
            Backend::Exact => {
                for i in 0..self.dim {
                    for j in i..self.dim {
                        if self[(i, j)] != self[(j, i)].conj() {
                            return false;
                        }
                    }
                }
                true
            }
            Backend::Float => {
                for i in 0..self.dim {
                    for j in i..self.dim {
                        let d = self[(i, j)].clone() - self[(j, i)].conj();
                        if d.to_c64().norm() > tol {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    /// Largest entry magnitude (0 for the empty sum).
    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .map(|s| s.to_c64().norm())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> Result<(), MatrixError> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                if !self[(i, j)].is_finite_value() {
                    return Err(MatrixError::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    /// U†U = I, within `tol` on the float backend.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = match self.dagger().mul(self) {
            Ok(p) => p,
            Err(_) => return false,
        };
        p.approx_eq(&Matrix::identity(self.dim), tol)
    }

    /// Equality that is exact on the exact backend and entrywise
    /// within `tol` on the float backend.
    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        if self.dim != rhs.dim {
            return false;
        }
        match S::BACKEND {
            Backend::Exact => self == rhs,
            Backend::Float => self
                .data
                .iter()
                .zip(&rhs.data)
                .all(|(a, b)| (a.clone() - b.clone()).to_c64().norm() <= tol),
        }
    }

    pub fn to_float(&self) -> Matrix<Complex64> {
        Matrix {
            dim: self.dim,
            data: self.data.iter().map(|s| s.to_c64()).collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = &S> {
        self.data.iter()
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.data[i * self.dim + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.data[i * self.dim + j]
    }
}

impl<S: Scalar> fmt::Display for Matrix<S> {
    /// Prints in the matrix-file syntax, one row per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ",\n ")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<S: Scalar> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix<{}x{}>\n{}", self.dim, self.dim, self)
    }
}

impl Matrix<Complex64> {
    pub fn from_c64_rows(rows: Vec<Vec<Complex64>>) -> Result<Self, MatrixError> {
        Matrix::from_rows(rows)
    }
}

/// Hermitian matrix P with 0 ⊑ P ⊑ I.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumPredicate<S: Scalar>(Matrix<S>);

impl<S: Scalar> QuantumPredicate<S>
where
    Matrix<S>: PsdDecide,
{
    pub fn new(m: Matrix<S>, tol: f64) -> Result<Self, MatrixError> {
        if !m.is_hermitian(tol) {
            return Err(MatrixError::NotPredicate {
                reason: "not Hermitian",
            });
        }
        if !psd(&m, tol)? {
            return Err(MatrixError::NotPredicate {
                reason: "lower bound 0 \u{2291} P fails",
            });
        }
        if !psd(&Matrix::identity(m.dim()).sub(&m)?, tol)? {
            return Err(MatrixError::NotPredicate {
                reason: "upper bound P \u{2291} I fails",
            });
        }
        Ok(QuantumPredicate(m))
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }
}

/// Hermitian PSD matrix with 0 ≤ trace ≤ 1 (partial density operator).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<S: Scalar>(Matrix<S>);

impl<S: Scalar> DensityMatrix<S>
where
    Matrix<S>: PsdDecide,
{
    pub fn new(m: Matrix<S>, tol: f64) -> Result<Self, MatrixError> {
        if !m.is_hermitian(tol) {
            return Err(MatrixError::NotDensity {
                reason: "not Hermitian",
            });
        }
        if !psd(&m, tol)? {
            return Err(MatrixError::NotDensity {
                reason: "not positive semidefinite",
            });
        }
        let tr = m.trace();
        if !S::zero().real_leq(&tr, tol)? || !tr.real_leq(&S::one(), tol)? {
            return Err(MatrixError::NotDensity {
                reason: "trace outside [0, 1]",
            });
        }
        Ok(DensityMatrix(m))
    }

    /// Wraps a matrix the caller has already established to be a
    /// partial density operator (evaluator internals).
    pub fn new_unchecked(m: Matrix<S>) -> Self {
        DensityMatrix(m)
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.0
    }
}

/// Backend-specific PSD decision.
pub trait PsdDecide {
    /// Psd/NotPsd on the exact backend; the float backend adds the
    /// ambiguity band (and can fail with `NonConvergence`).
    fn psd_decide(&self, tol: f64) -> Result<PsdOutcome, MatrixError>;
}

impl PsdDecide for Matrix<Cyclotomic> {
    fn psd_decide(&self, _tol: f64) -> Result<PsdOutcome, MatrixError> {
        Ok(if self.psd_exact()? {
            PsdOutcome::Psd { min_eig: None }
        } else {
            PsdOutcome::NotPsd { min_eig: None }
        })
    }
}

impl PsdDecide for Matrix<Complex64> {
    fn psd_decide(&self, tol: f64) -> Result<PsdOutcome, MatrixError> {
        psd::psd_decide_float(self, tol)
    }
}

/// Two-valued PSD test at the module boundary: exact decision on the
/// exact backend, `λ_min ≥ −tol·max(1, ‖a‖_∞)` on the float backend.
pub fn psd<S: Scalar>(m: &Matrix<S>, tol: f64) -> Result<bool, MatrixError>
where
    Matrix<S>: PsdDecide,
{
    Ok(matches!(m.psd_decide(tol)?, PsdOutcome::Psd { .. }))
}

/// Löwner order: p ⊑ q iff q − p is positive semidefinite.
pub fn loewner_leq<S: Scalar>(p: &Matrix<S>, q: &Matrix<S>, tol: f64) -> Result<bool, MatrixError>
where
    Matrix<S>: PsdDecide,
{
    if p.dim() != q.dim() {
        return Err(MatrixError::DimMismatch {
            op: "loewner_leq",
            left: p.dim(),
            right: q.dim(),
        });
    }
    if !p.is_hermitian(tol) || !q.is_hermitian(tol) {
        return Err(MatrixError::NotHermitian);
    }
    psd(&q.sub(p)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates;
    use num::traits::{One, Zero};
    use num::BigRational;

    fn h() -> Matrix<Cyclotomic> {
        gates::hadamard()
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let id = Matrix::<Cyclotomic>::identity(2);
        assert_eq!(id.mul(&h()).unwrap(), h());
    }

    #[test]
    fn hadamard_squares_to_identity() {
        assert_eq!(h().mul(&h()).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn pauli_x_is_an_involution() {
        let x = gates::pauli_x();
        assert_eq!(x.mul(&x).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn add_examples() {
        let a = h();
        let z = Matrix::zeros(2);
        assert_eq!(a.add(&z).unwrap(), a);
        let p0 = Matrix::<Cyclotomic>::basis_proj(2, 0);
        let p1 = Matrix::<Cyclotomic>::basis_proj(2, 1);
        assert_eq!(p0.add(&p1).unwrap(), Matrix::identity(2));
        // Counter-measurement completeness on the dim-2 truncation.
        let m0 = Matrix::<Cyclotomic>::basis_proj(2, 1);
        let m1 = Matrix::<Cyclotomic>::basis_proj(2, 0);
        let s = m0.dagger().mul(&m0).unwrap().add(&m1.dagger().mul(&m1).unwrap()).unwrap();
        assert_eq!(s, Matrix::identity(2));
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(Matrix::<Cyclotomic>::identity(3).dagger(), Matrix::identity(3));
        assert_eq!(h().dagger(), h());
        let s = gates::phase_s();
        let mut expected = Matrix::<Cyclotomic>::identity(2);
        expected[(1, 1)] = -Cyclotomic::i();
        assert_eq!(s.dagger(), expected);
    }

    #[test]
    fn trace_examples() {
        assert_eq!(Matrix::<Cyclotomic>::identity(4).trace(), Cyclotomic::from_int(4));
        assert_eq!(
            Matrix::<Cyclotomic>::basis_proj(2, 0).trace(),
            Cyclotomic::one()
        );
        let conj = h()
            .mul(&Matrix::basis_proj(2, 0))
            .unwrap()
            .mul(&h())
            .unwrap();
        assert_eq!(conj.trace(), Cyclotomic::one());
    }

    #[test]
    fn tensor_examples() {
        let i2 = Matrix::<Cyclotomic>::identity(2);
        assert_eq!(i2.tensor(&i2), Matrix::identity(4));
        let p01 = Matrix::<Cyclotomic>::basis_proj(2, 0).tensor(&Matrix::basis_proj(2, 1));
        assert_eq!(p01, Matrix::basis_proj(4, 1));
    }

    #[test]
    fn hermitian_examples() {
        assert!(h().is_hermitian(0.0));
        assert!(!gates::phase_s().is_hermitian(0.0));
        let a = gates::phase_t().mul(&h()).unwrap();
        let sym = a.add(&a.dagger()).unwrap();
        assert!(sym.is_hermitian(0.0));
    }

    #[test]
    fn psd_exact_examples() {
        assert!(Matrix::<Cyclotomic>::identity(4).psd_exact().unwrap());
        let mut d = Matrix::<Cyclotomic>::identity(2);
        d[(1, 1)] = Cyclotomic::from_int(-1);
        assert!(!d.psd_exact().unwrap());
        // |+⟩⟨+|: characteristic polynomial x² − x, e₁ = 1, e₂ = 0.
        let half = Cyclotomic::from_ratio(1, 2);
        let plus = Matrix::from_fn(2, |_, _| half.clone());
        assert!(plus.psd_exact().unwrap());
        let e = plus.char_poly_elementary_symmetric().unwrap();
        assert_eq!(e, vec![Cyclotomic::one(), Cyclotomic::zero()]);
    }

    #[test]
    fn psd_float_examples() {
        let id = Matrix::<Cyclotomic>::identity(4).to_float();
        assert!(id.psd_float(1e-9).unwrap());
        let mut m = Matrix::<Cyclotomic>::identity(2).to_float();
        m[(1, 1)] = Complex64::new(-1e-3, 0.0);
        assert!(!m.psd_float(1e-9).unwrap());
        m[(1, 1)] = Complex64::new(-1e-12, 0.0);
        assert!(m.psd_float(1e-9).unwrap());
    }

    #[test]
    fn loewner_examples() {
        let p = Matrix::<Cyclotomic>::basis_proj(2, 0);
        assert!(loewner_leq(&p, &p, 1e-9).unwrap());
        assert!(loewner_leq(&Matrix::<Cyclotomic>::zeros(2), &Matrix::identity(2), 1e-9).unwrap());
        assert!(!loewner_leq(&Matrix::identity(2), &p, 1e-9).unwrap());
    }

    #[test]
    fn dagger_is_antihomomorphism() {
        let a = gates::phase_t();
        let b = h();
        let lhs = a.mul(&b).unwrap().dagger();
        let rhs = b.dagger().mul(&a.dagger()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn trace_is_cyclic_and_tensor_multiplicative() {
        let a = gates::phase_t();
        let b = h().add(&gates::pauli_z()).unwrap();
        assert_eq!(
            a.mul(&b).unwrap().trace(),
            b.mul(&a).unwrap().trace()
        );
        assert_eq!(
            a.tensor(&b).trace(),
            a.trace() * b.trace()
        );
    }

    #[test]
    fn scaled_rational_matrix_keeps_exact_psd() {
        // diag(1/3, 1/7) is PSD; denominators exercise the
        // denominator-clearing path.
        let mut m = Matrix::<Cyclotomic>::zeros(2);
        m[(0, 0)] = Cyclotomic::from_ratio(1, 3);
        m[(1, 1)] = Cyclotomic::from_ratio(1, 7);
        assert!(m.psd_exact().unwrap());
        let e = m.char_poly_elementary_symmetric().unwrap();
        assert_eq!(
            e[0],
            Cyclotomic::from_rational(BigRational::new(10.into(), 21.into()))
        );
        assert_eq!(
            e[1],
            Cyclotomic::from_rational(BigRational::new(1.into(), 21.into()))
        );
    }
}

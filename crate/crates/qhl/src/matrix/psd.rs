//! Positive-semidefiniteness decisions.
//!
//! Exact backend: the characteristic polynomial of a Hermitian
//! matrix has only real roots, and a real-rooted monic polynomial
//! xⁿ − e₁xⁿ⁻¹ + e₂xⁿ⁻² − … has all roots ≥ 0 iff every eₖ ≥ 0. The
//! eₖ are computed by the Faddeev–LeVerrier recurrence in exact
//! arithmetic, so the decision is a finite list of exact sign tests.
//!
//! Float backend: cyclic Jacobi on the 2n×2n real symmetric
//! embedding of the Hermitian matrix, yielding the minimum
//! eigenvalue to working precision.

use super::{Matrix, MatrixError};
use crate::scalar::{Cyclotomic, Scalar};
use num::complex::Complex64;
use num::traits::{One, Zero};
use num::{BigInt, BigRational};

/// Three-way PSD verdict. `min_eig` is populated on the float
/// backend only.
#[derive(Debug, Clone, PartialEq)]
pub enum PsdOutcome {
    Psd { min_eig: Option<f64> },
    NotPsd { min_eig: Option<f64> },
    /// Float backend: λ_min fell inside the (−10·tol·s, −tol·s)
    /// ambiguity band and the answer is deliberately withheld.
    Ambiguous { min_eig: f64 },
}

impl Matrix<Cyclotomic> {
    /// Elementary symmetric functions e₁…eₙ of the eigenvalues,
    /// so that det(xI − A) = xⁿ − e₁xⁿ⁻¹ + e₂xⁿ⁻² − … .
    ///
    /// Denominators are cleared first: with B = L·A for the common
    /// denominator L, the recurrence runs over cyclotomic integers
    /// and eₖ(A) = eₖ(B)/Lᵏ.
    pub fn char_poly_elementary_symmetric(&self) -> Result<Vec<Cyclotomic>, MatrixError> {
        let n = self.dim();
        let l = self.denominator_lcm();
        let b = self.scale(&Cyclotomic::from_rational(BigRational::from_integer(
            l.clone(),
        )));

        // Faddeev–LeVerrier: M₀ = 0, c_n = 1,
        // M_k = B·M_{k−1} + c_{n−k+1}·I, c_{n−k} = −tr(B·M_k)/k.
        let mut coeffs = vec![Cyclotomic::zero(); n + 1];
        coeffs[n] = Cyclotomic::one();
        let mut m = Matrix::<Cyclotomic>::zeros(n);
        for k in 1..=n {
            m = b.mul(&m)?;
            for i in 0..n {
                let d = m[(i, i)].clone() + coeffs[n - k + 1].clone();
                m[(i, i)] = d;
            }
            let t = trace_of_product(&b, &m);
            coeffs[n - k] = -(t.div_nat(k as u64));
        }

        // eₖ = (−1)ᵏ c_{n−k}, undoing the scaling by L.
        let mut scale = BigRational::one();
        let linv = BigRational::new(BigInt::one(), l);
        let mut es = Vec::with_capacity(n);
        for k in 1..=n {
            scale *= &linv;
            let mut e = coeffs[n - k].scale(&scale);
            if k % 2 == 1 {
                e = -e;
            }
            es.push(e);
        }
        Ok(es)
    }

    /// Exact PSD test for a Hermitian matrix.
    pub fn psd_exact(&self) -> Result<bool, MatrixError> {
        if !self.is_hermitian(0.0) {
            return Err(MatrixError::NotHermitian);
        }
        for e in self.char_poly_elementary_symmetric()? {
            if e.real_sign()? < 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// LCM of all coefficient denominators across all entries.
    fn denominator_lcm(&self) -> BigInt {
        let mut l = BigInt::one();
        for s in self.entries() {
            for c in s.coeffs() {
                l = num::integer::lcm(l, c.denom().clone());
            }
        }
        l
    }
}

fn trace_of_product(a: &Matrix<Cyclotomic>, b: &Matrix<Cyclotomic>) -> Cyclotomic {
    let n = a.dim();
    let mut t = Cyclotomic::zero();
    for i in 0..n {
        for k in 0..n {
            let x = &a[(i, k)];
            let y = &b[(k, i)];
            if x.is_zero() || y.is_zero() {
                continue;
            }
            t = t + x.clone() * y.clone();
        }
    }
    t
}

impl Matrix<Complex64> {
    /// Two-valued PSD test: λ_min ≥ −tol·max(1, ‖a‖_∞).
    pub fn psd_float(&self, tol: f64) -> Result<bool, MatrixError> {
        if !self.is_hermitian(tol) {
            return Err(MatrixError::NotHermitian);
        }
        let lam = min_eigenvalue(self)?;
        Ok(lam >= -tol * 1.0_f64.max(self.max_abs()))
    }
}

/// Three-way float decision with the ambiguity band used by VC
/// discharge: clearly PSD above −tol·s, clearly not below −10·tol·s,
/// withheld in between.
pub(super) fn psd_decide_float(
    m: &Matrix<Complex64>,
    tol: f64,
) -> Result<PsdOutcome, MatrixError> {
    if !m.is_hermitian(tol) {
        return Err(MatrixError::NotHermitian);
    }
    let s = 1.0_f64.max(m.max_abs());
    let lam = min_eigenvalue(m)?;
    Ok(if lam >= -tol * s {
        PsdOutcome::Psd { min_eig: Some(lam) }
    } else if lam <= -10.0 * tol * s {
        PsdOutcome::NotPsd { min_eig: Some(lam) }
    } else {
        PsdOutcome::Ambiguous { min_eig: lam }
    })
}

/// Minimum eigenvalue of a Hermitian matrix via cyclic Jacobi on the
/// real symmetric embedding [[Re, −Im], [Im, Re]].
pub fn min_eigenvalue(m: &Matrix<Complex64>) -> Result<f64, MatrixError> {
    m.all_finite()?;
    let n = m.dim();
    let nn = 2 * n;
    let mut a = vec![0.0f64; nn * nn];
    for i in 0..n {
        for j in 0..n {
            let z = m[(i, j)];
            a[i * nn + j] = z.re;
            a[i * nn + j + n] = -z.im;
            a[(i + n) * nn + j] = z.im;
            a[(i + n) * nn + j + n] = z.re;
        }
    }
    jacobi_min_eig(&mut a, nn)
}

fn off_diagonal_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[i * n + j] * a[i * n + j];
        }
    }
    (2.0 * s).sqrt()
}

fn jacobi_min_eig(a: &mut [f64], n: usize) -> Result<f64, MatrixError> {
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return Ok(0.0);
    }
    let target = 1e-14 * frob;
    const MAX_SWEEPS: usize = 64;

    for _sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(a, n);
        if off <= target {
            let mut lam = f64::INFINITY;
            for i in 0..n {
                lam = lam.min(a[i * n + i]);
            }
            return Ok(lam);
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= target / (n as f64) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A ← JᵀAJ for the rotation J in the (p, q) plane.
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[p * n + k] = a[k * n + p];
                    a[k * n + q] = s * akp + c * akq;
                    a[q * n + k] = a[k * n + q];
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    Err(MatrixError::NonConvergence {
        sweeps: MAX_SWEEPS,
        off: off_diagonal_norm(a, n),
    })
}

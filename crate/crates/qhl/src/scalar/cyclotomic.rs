//! Exact arithmetic in the cyclotomic field Q(ζ₈).
//!
//! Every element is stored as `c0 + c1·ζ + c2·ζ² + c3·ζ³` with
//! rational coefficients, where ζ = e^{iπ/4} is a primitive 8th root
//! of unity, so ζ⁴ = −1, ζ² = i and ζ − ζ³ = √2. The field contains
//! every entry of the H, X, Z, S, T and controlled-phase gates, which
//! is exactly what the exact verification backend needs.
//!
//! The representation is canonical: `num::BigRational` keeps
//! coefficients in lowest terms with positive denominators, so value
//! equality is coefficient-tuple equality.

use super::{rational_to_f64, Backend, Scalar, ScalarError};
use num::complex::Complex64;
use num::traits::{One, Signed, Zero};
use num::{BigInt, BigRational};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An element of Q(ζ₈), ζ = e^{iπ/4}.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cyclotomic {
    /// Coefficients of 1, ζ, ζ², ζ³.
    c: [BigRational; 4],
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Cyclotomic {
    pub fn new(c: [BigRational; 4]) -> Self {
        Cyclotomic { c }
    }

    pub fn from_rational(r: BigRational) -> Self {
        Cyclotomic {
            c: [r, BigRational::zero(), BigRational::zero(), BigRational::zero()],
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    /// ζ itself.
    pub fn omega() -> Self {
        Cyclotomic::new([
            BigRational::zero(),
            BigRational::one(),
            BigRational::zero(),
            BigRational::zero(),
        ])
    }

    /// i = ζ².
    pub fn i() -> Self {
        Cyclotomic::new([
            BigRational::zero(),
            BigRational::zero(),
            BigRational::one(),
            BigRational::zero(),
        ])
    }

    /// √2 = ζ − ζ³.
    pub fn sqrt2() -> Self {
        Cyclotomic::new([
            BigRational::zero(),
            BigRational::one(),
            BigRational::zero(),
            -BigRational::one(),
        ])
    }

    /// ζ^k for any integer k, reduced mod 8.
    pub fn omega_pow(k: i64) -> Self {
        let k = k.rem_euclid(8) as usize;
        let mut c = [
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        ];
        if k < 4 {
            c[k] = BigRational::one();
        } else {
            c[k - 4] = -BigRational::one();
        }
        Cyclotomic::new(c)
    }

    pub fn coeffs(&self) -> &[BigRational; 4] {
        &self.c
    }

    /// Applies the Galois automorphism ζ ↦ ζ^k, k odd mod 8.
    fn galois(&self, k: u8) -> Self {
        let c = &self.c;
        let m = match k % 8 {
            1 => return self.clone(),
            // ζ ↦ ζ³: ζ² ↦ −ζ², ζ³ ↦ ζ.
            3 => [c[0].clone(), c[3].clone(), -c[2].clone(), c[1].clone()],
            // ζ ↦ ζ⁵ = −ζ.
            5 => [c[0].clone(), -c[1].clone(), c[2].clone(), -c[3].clone()],
            // ζ ↦ ζ⁷ = ζ̄ (complex conjugation).
            7 => [c[0].clone(), -c[3].clone(), -c[2].clone(), -c[1].clone()],
            _ => panic!("galois automorphism index must be odd"),
        };
        Cyclotomic::new(m)
    }

    /// True iff the value lies in the real subfield Q(√2),
    /// i.e. conj(a) = a.
    pub fn is_real(&self) -> bool {
        self.c[2].is_zero() && self.c[3] == -self.c[1].clone()
    }

    /// Exact sign of a real value c0 + c1·√2.
    ///
    /// Decided by rational case analysis: when c0 and c1 disagree in
    /// sign, |c0| and |c1·√2| are compared through c0² vs 2·c1².
    pub fn real_sign(&self) -> Result<i32, ScalarError> {
        if !self.is_real() {
            return Err(ScalarError::NotReal(self.to_string()));
        }
        let c0 = &self.c[0];
        let c1 = &self.c[1];
        let s0 = sign_of(c0);
        let s1 = sign_of(c1);
        Ok(match (s0, s1) {
            (0, s) => s,
            (s, 0) => s,
            (a, b) if a == b => a,
            _ => {
                // Mixed signs: the larger magnitude wins.
                let lhs = c0 * c0;
                let rhs = c1 * c1 * BigRational::from_integer(BigInt::from(2));
                match lhs.cmp(&rhs) {
                    std::cmp::Ordering::Greater => s0,
                    std::cmp::Ordering::Less => s1,
                    // c0² = 2c1² has no rational solution with c1 ≠ 0.
                    std::cmp::Ordering::Equal => 0,
                }
            }
        })
    }

    /// The rational part if the value is rational, else None.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.c[1].is_zero() && self.c[2].is_zero() && self.c[3].is_zero() {
            Some(&self.c[0])
        } else {
            None
        }
    }

    /// Exact scaling by a rational.
    pub fn scale(&self, r: &BigRational) -> Self {
        Cyclotomic::new([
            &self.c[0] * r,
            &self.c[1] * r,
            &self.c[2] * r,
            &self.c[3] * r,
        ])
    }
}

fn sign_of(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl Add for Cyclotomic {
    type Output = Cyclotomic;
    fn add(self, rhs: Self) -> Self {
        Cyclotomic::new([
            &self.c[0] + &rhs.c[0],
            &self.c[1] + &rhs.c[1],
            &self.c[2] + &rhs.c[2],
            &self.c[3] + &rhs.c[3],
        ])
    }
}

impl Sub for Cyclotomic {
    type Output = Cyclotomic;
    fn sub(self, rhs: Self) -> Self {
        Cyclotomic::new([
            &self.c[0] - &rhs.c[0],
            &self.c[1] - &rhs.c[1],
            &self.c[2] - &rhs.c[2],
            &self.c[3] - &rhs.c[3],
        ])
    }
}

impl Neg for Cyclotomic {
    type Output = Cyclotomic;
    fn neg(self) -> Self {
        Cyclotomic::new([
            -self.c[0].clone(),
            -self.c[1].clone(),
            -self.c[2].clone(),
            -self.c[3].clone(),
        ])
    }
}

impl Mul for Cyclotomic {
    type Output = Cyclotomic;
    fn mul(self, rhs: Self) -> Self {
        // Convolution of coefficients reduced via ζ⁴ = −1.
        let mut out = [
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
            BigRational::zero(),
        ];
        for i in 0..4 {
            if self.c[i].is_zero() {
                continue;
            }
            for j in 0..4 {
                if rhs.c[j].is_zero() {
                    continue;
                }
                let p = &self.c[i] * &rhs.c[j];
                let k = i + j;
                if k < 4 {
                    out[k] += p;
                } else {
                    out[k - 4] -= p;
                }
            }
        }
        Cyclotomic::new(out)
    }
}

impl Zero for Cyclotomic {
    fn zero() -> Self {
        Cyclotomic::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
}

impl One for Cyclotomic {
    fn one() -> Self {
        Cyclotomic::from_int(1)
    }
    fn is_one(&self) -> bool {
        *self == Self::one()
    }
}

impl Scalar for Cyclotomic {
    const BACKEND: Backend = Backend::Exact;

    fn conj(&self) -> Self {
        self.galois(7)
    }

    /// Inverse through the field norm: with b the product of the
    /// three nontrivial Galois conjugates, a·b is rational, so
    /// a⁻¹ = b / (a·b).
    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let b = self.galois(3) * self.galois(5) * self.galois(7);
        let n = self.clone() * b.clone();
        let norm = n
            .as_rational()
            .expect("product with all Galois conjugates is rational")
            .clone();
        debug_assert!(!norm.is_zero());
        Ok(b.scale(&norm.recip()))
    }

    fn from_rational(r: &BigRational) -> Self {
        Cyclotomic::from_rational(r.clone())
    }

    fn div_nat(&self, k: u64) -> Self {
        let d = BigRational::new(BigInt::one(), BigInt::from(k));
        self.scale(&d)
    }

    fn to_c64(&self) -> Complex64 {
        // ζ = √2/2 · (1 + i), ζ³ = √2/2 · (−1 + i).
        let h = std::f64::consts::SQRT_2 / 2.0;
        let c: Vec<f64> = self.c.iter().map(rational_to_f64).collect();
        Complex64::new(c[0] + (c[1] - c[3]) * h, c[2] + (c[1] + c[3]) * h)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn real_leq(&self, other: &Self, _slack: f64) -> Result<bool, ScalarError> {
        let d = other.clone() - self.clone();
        Ok(d.real_sign()? >= 0)
    }
}

impl fmt::Display for Cyclotomic {
    /// Prints an expression the matrix-file grammar parses back:
    /// terms in 1, omega, i and i*omega with rational coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let units = ["", "omega", "i", "i*omega"];
        let mut first = true;
        for (coef, unit) in self.c.iter().zip(units) {
            if coef.is_zero() {
                continue;
            }
            let mag = coef.abs();
            if first {
                if coef.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if coef.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if unit.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{unit}")?;
            } else {
                write!(f, "{mag}*{unit}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Cyclotomic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclotomic({self})")
    }
}

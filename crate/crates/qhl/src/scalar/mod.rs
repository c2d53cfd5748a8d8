//! Scalar backends for matrix entries.
//!
//! Two backends share one contract: [`Cyclotomic`] is exact
//! arithmetic in Q(ζ₈) with a decidable sign on its real subfield
//! Q(√2); `Complex<f64>` is the floating-point fallback for entries
//! that do not live in Q(ζ₈). Everything above this module
//! (matrices, semantics, precondition computation) is generic over
//! [`Scalar`].

mod cyclotomic;

pub use cyclotomic::Cyclotomic;

use num::complex::Complex64;
use num::traits::{One, Zero};
use num::BigRational;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Which arithmetic a value (or a whole matrix) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Exact,
    Float,
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Float => write!(f, "float"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not real: {0}")]
    NotReal(String),
    #[error("floating-point overflow (non-finite value)")]
    Overflow,
}

/// Common contract of the two scalar backends.
///
/// The trait covers the ring operations plus the handful of hooks
/// the decision procedures need: conjugation, embedding into
/// `Complex64`, exact division by a positive integer (used by the
/// characteristic-polynomial recurrence) and a backend-appropriate
/// comparison of real parts.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    const BACKEND: Backend;

    /// Complex conjugate.
    fn conj(&self) -> Self;

    /// Multiplicative inverse; errors on zero.
    fn inv(&self) -> Result<Self, ScalarError>;

    fn from_rational(r: &BigRational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&BigRational::from_integer(n.into()))
    }

    /// Exact division by a positive integer.
    fn div_nat(&self, k: u64) -> Self;

    /// Numeric embedding into complex doubles.
    fn to_c64(&self) -> Complex64;

    /// False only on the float backend after overflow.
    fn is_finite_value(&self) -> bool;

    /// Decides `re(self) <= re(other) + slack`.
    ///
    /// On the exact backend the slack is ignored and the comparison
    /// is an exact sign decision; both operands must be real.
    fn real_leq(&self, other: &Self, slack: f64) -> Result<bool, ScalarError>;
}

impl Scalar for Complex64 {
    const BACKEND: Backend = Backend::Float;

    fn conj(&self) -> Self {
        Complex64::new(self.re, -self.im)
    }

    fn inv(&self) -> Result<Self, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        let v = Complex64::new(1.0, 0.0) / self;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(ScalarError::Overflow);
        }
        Ok(v)
    }

    fn from_rational(r: &BigRational) -> Self {
        Complex64::new(rational_to_f64(r), 0.0)
    }

    fn div_nat(&self, k: u64) -> Self {
        self / (k as f64)
    }

    fn to_c64(&self) -> Complex64 {
        *self
    }

    fn is_finite_value(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    fn real_leq(&self, other: &Self, slack: f64) -> Result<bool, ScalarError> {
        Ok(self.re <= other.re + slack)
    }
}

/// Rational → f64, accurate to a rounding of the true quotient.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

//! Verification of quantum while-programs.
//!
//! The pipeline: parse a program and its matrix definitions
//! ([`lang`]), validate well-formedness (unitarity, measurement
//! completeness, predicate bounds), compute weakest liberal
//! preconditions and Löwner-order verification conditions ([`wlp`]),
//! and discharge them with positive-semidefiniteness decisions
//! ([`matrix`]) — exactly over the cyclotomic field Q(ζ₈)
//! ([`scalar`]) or numerically over complex doubles.
//!
//! [`semantics`] provides the density-matrix evaluator used both by
//! the `simulate` command and as an independent soundness oracle.

pub mod gates;
pub mod lang;
pub mod matrix;
pub mod sampling;
pub mod scalar;
pub mod semantics;
pub mod wlp;

pub use lang::{parse_matrix_file, parse_program, validate, Model, Program, SymbolTable};
pub use matrix::{DensityMatrix, Matrix, QuantumPredicate};
pub use scalar::{Backend, Cyclotomic, Scalar};
pub use wlp::{DischargePolicy, VcVerdict, VerificationReport, Verdict};

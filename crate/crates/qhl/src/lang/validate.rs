//! Well-formedness validation: resolves a parsed program against a
//! symbol table, fixes the scalar backend, and checks the side
//! conditions every proof rule assumes — unitarity of applied
//! operators, completeness of measurements, and predicate bounds on
//! pre/post/invariants.

use super::ast::{Program, Stmt};
use super::matfile::{AnyMatrix, SymbolTable};
use crate::matrix::{psd, Matrix, MatrixError, PsdDecide};
use crate::scalar::{Backend, Cyclotomic, Scalar};
use crate::semantics::VarContext;
use num::complex::Complex64;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidateError {
    #[error("symbol `{0}` is not defined in the matrix file")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` has dimension {found}, expected {expected} for register [{register}]")]
    SymbolDimMismatch {
        symbol: String,
        found: usize,
        expected: usize,
        register: String,
    },
    #[error("`{symbol}` is not unitary (U\u{2020}U \u{2260} I)")]
    NotUnitary { symbol: String },
    #[error("measurement `{family}` is incomplete: \u{2211} M\u{2020}M \u{2260} I")]
    IncompleteMeasurement { family: String },
    #[error("loop measurement pair `{m0}`, `{m1}` is incomplete: M0\u{2020}M0 + M1\u{2020}M1 \u{2260} I")]
    IncompleteLoopMeasurement { m0: String, m1: String },
    #[error("`{symbol}` is not Hermitian")]
    NotHermitian { symbol: String },
    #[error("`{symbol}` violates the predicate lower bound 0 \u{2291} P")]
    PredicateLowerBound { symbol: String },
    #[error("`{symbol}` violates the predicate upper bound P \u{2291} I")]
    PredicateUpperBound { symbol: String },
    #[error("backend `exact` requested but symbol `{0}` has float entries")]
    FloatUnderExactBackend(String),
    #[error("matrix error while validating `{symbol}`: {source}")]
    Matrix {
        symbol: String,
        source: MatrixError,
    },
}

/// Requested backend; `Auto` prefers exact and falls back to float
/// when any referenced matrix has float entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackendChoice {
    #[default]
    Auto,
    Exact,
    Float,
}

/// A validated program with every referenced symbol resolved to one
/// backend. Immutable after construction.
#[derive(Debug, Clone)]
pub struct ValidatedModel<S: Scalar> {
    pub program: Program,
    pub ctx: VarContext,
    pub symbols: BTreeMap<String, Matrix<S>>,
}

impl<S: Scalar> ValidatedModel<S> {
    pub fn symbol(&self, name: &str) -> &Matrix<S> {
        &self.symbols[name]
    }

    pub fn pre(&self) -> &Matrix<S> {
        self.symbol(&self.program.pre)
    }

    pub fn post(&self) -> &Matrix<S> {
        self.symbol(&self.program.post)
    }
}

impl ValidatedModel<Cyclotomic> {
    /// The same model with every symbol embedded into complex
    /// doubles.
    pub fn to_float(&self) -> ValidatedModel<Complex64> {
        ValidatedModel {
            program: self.program.clone(),
            ctx: self.ctx.clone(),
            symbols: self
                .symbols
                .iter()
                .map(|(k, v)| (k.clone(), v.to_float()))
                .collect(),
        }
    }
}

/// A validated model on whichever backend was selected.
#[derive(Debug, Clone)]
pub enum Model {
    Exact(ValidatedModel<Cyclotomic>),
    Float(ValidatedModel<Complex64>),
}

impl Model {
    pub fn backend(&self) -> Backend {
        match self {
            Model::Exact(_) => Backend::Exact,
            Model::Float(_) => Backend::Float,
        }
    }

    pub fn program(&self) -> &Program {
        match self {
            Model::Exact(m) => &m.program,
            Model::Float(m) => &m.program,
        }
    }
}

/// Every symbol reference a statement tree makes, with the register
/// it is applied to.
#[derive(Debug, Clone, PartialEq)]
enum Usage {
    Unitary { symbol: String, register: Vec<String> },
    MeasureFamily { family: String, arity: usize, register: Vec<String> },
    LoopPair { m0: String, m1: String, register: Vec<String> },
    Invariant { symbol: String },
}

fn collect_usages(s: &Stmt, out: &mut Vec<Usage>) {
    match s {
        Stmt::Skip { .. } | Stmt::Init { .. } => {}
        Stmt::Unitary { symbol, vars, .. } => out.push(Usage::Unitary {
            symbol: symbol.clone(),
            register: vars.clone(),
        }),
        Stmt::Seq(ss) => ss.iter().for_each(|s| collect_usages(s, out)),
        Stmt::Measure {
            family,
            vars,
            branches,
            ..
        } => {
            out.push(Usage::MeasureFamily {
                family: family.clone(),
                arity: branches.len(),
                register: vars.clone(),
            });
            branches.iter().for_each(|b| collect_usages(b, out));
        }
        Stmt::While {
            m0,
            m1,
            vars,
            invariant,
            body,
            ..
        } => {
            out.push(Usage::LoopPair {
                m0: m0.clone(),
                m1: m1.clone(),
                register: vars.clone(),
            });
            out.push(Usage::Invariant {
                symbol: invariant.clone(),
            });
            collect_usages(body, out);
        }
        Stmt::WhileN {
            m0, m1, vars, body, ..
        } => {
            out.push(Usage::LoopPair {
                m0: m0.clone(),
                m1: m1.clone(),
                register: vars.clone(),
            });
            collect_usages(body, out);
        }
    }
}

fn referenced_symbols(p: &Program) -> Vec<String> {
    let mut usages = Vec::new();
    collect_usages(&p.body, &mut usages);
    let mut names = vec![p.pre.clone(), p.post.clone()];
    for u in &usages {
        match u {
            Usage::Unitary { symbol, .. } | Usage::Invariant { symbol } => {
                names.push(symbol.clone())
            }
            Usage::MeasureFamily { family, arity, .. } => {
                for m in 0..*arity {
                    names.push(format!("{family}_{m}"));
                }
            }
            Usage::LoopPair { m0, m1, .. } => {
                names.push(m0.clone());
                names.push(m1.clone());
            }
        }
    }
    names
}

/// Validates a parsed program against a symbol table and resolves
/// the backend.
pub fn validate(
    program: &Program,
    table: &SymbolTable,
    choice: BackendChoice,
    tol: f64,
) -> Result<Model, ValidateError> {
    let names = referenced_symbols(program);
    for n in &names {
        if table.get(n).is_none() {
            return Err(ValidateError::UnknownSymbol(n.clone()));
        }
    }
    let all_exact = names
        .iter()
        .all(|n| matches!(table.get(n), Some(AnyMatrix::Exact(_))));

    let backend = match choice {
        BackendChoice::Exact => {
            if let Some(n) = names
                .iter()
                .find(|n| matches!(table.get(n), Some(AnyMatrix::Float(_))))
            {
                return Err(ValidateError::FloatUnderExactBackend(n.clone()));
            }
            Backend::Exact
        }
        BackendChoice::Float => Backend::Float,
        BackendChoice::Auto => {
            if all_exact {
                Backend::Exact
            } else {
                Backend::Float
            }
        }
    };

    match backend {
        Backend::Exact => {
            let mut symbols = BTreeMap::new();
            for n in &names {
                if let Some(AnyMatrix::Exact(m)) = table.get(n) {
                    symbols.insert(n.clone(), m.clone());
                }
            }
            let model = build_model(program, symbols)?;
            // The exact backend decides side conditions exactly.
            check_model(&model, 0.0, tol)?;
            Ok(Model::Exact(model))
        }
        Backend::Float => {
            let mut symbols = BTreeMap::new();
            for n in &names {
                symbols.insert(n.clone(), table.get(n).unwrap().to_float());
            }
            let model = build_model(program, symbols)?;
            check_model(&model, tol, tol)?;
            Ok(Model::Float(model))
        }
    }
}

fn build_model<S: Scalar>(
    program: &Program,
    symbols: BTreeMap<String, Matrix<S>>,
) -> Result<ValidatedModel<S>, ValidateError> {
    let ctx = VarContext::new(
        program
            .vars
            .iter()
            .map(|v| (v.name.clone(), v.kind.dim())),
    );
    Ok(ValidatedModel {
        program: program.clone(),
        ctx,
        symbols,
    })
}

fn check_model<S: Scalar>(
    model: &ValidatedModel<S>,
    eq_tol: f64,
    psd_tol: f64,
) -> Result<(), ValidateError>
where
    Matrix<S>: PsdDecide,
{
    let ctx = &model.ctx;
    let d = ctx.total_dim();
    let mut usages = Vec::new();
    collect_usages(&model.program.body, &mut usages);

    let dim_of = |symbol: &str, register: &[String]| -> Result<usize, ValidateError> {
        let expected = ctx
            .local_dim(register)
            .map_err(|_| ValidateError::UnknownSymbol(symbol.to_string()))?;
        let found = model.symbols[symbol].dim();
        if found != expected {
            return Err(ValidateError::SymbolDimMismatch {
                symbol: symbol.to_string(),
                found,
                expected,
                register: register.join(","),
            });
        }
        Ok(expected)
    };

    for u in &usages {
        match u {
            Usage::Unitary { symbol, register } => {
                dim_of(symbol, register)?;
                if !model.symbols[symbol].is_unitary(eq_tol) {
                    return Err(ValidateError::NotUnitary {
                        symbol: symbol.clone(),
                    });
                }
            }
            Usage::MeasureFamily {
                family,
                arity,
                register,
            } => {
                let dim = dim_of(&format!("{family}_0"), register)?;
                let mut sum = Matrix::<S>::zeros(dim);
                for m in 0..*arity {
                    let name = format!("{family}_{m}");
                    dim_of(&name, register)?;
                    let mm = &model.symbols[&name];
                    let prod = mm
                        .dagger()
                        .mul(mm)
                        .map_err(|source| ValidateError::Matrix {
                            symbol: name.clone(),
                            source,
                        })?;
                    sum = sum.add(&prod).map_err(|source| ValidateError::Matrix {
                        symbol: name.clone(),
                        source,
                    })?;
                }
                if !sum.approx_eq(&Matrix::identity(dim), eq_tol) {
                    return Err(ValidateError::IncompleteMeasurement {
                        family: family.clone(),
                    });
                }
            }
            Usage::LoopPair { m0, m1, register } => {
                let dim = dim_of(m0, register)?;
                dim_of(m1, register)?;
                let a = &model.symbols[m0];
                let b = &model.symbols[m1];
                let sum = a
                    .dagger()
                    .mul(a)
                    .and_then(|p| b.dagger().mul(b).and_then(|q| p.add(&q)))
                    .map_err(|source| ValidateError::Matrix {
                        symbol: m0.clone(),
                        source,
                    })?;
                if !sum.approx_eq(&Matrix::identity(dim), eq_tol) {
                    return Err(ValidateError::IncompleteLoopMeasurement {
                        m0: m0.clone(),
                        m1: m1.clone(),
                    });
                }
            }
            Usage::Invariant { symbol } => {
                check_predicate(model, symbol, d, psd_tol)?;
            }
        }
    }

    check_predicate(model, &model.program.pre, d, psd_tol)?;
    check_predicate(model, &model.program.post, d, psd_tol)?;
    Ok(())
}

fn check_predicate<S: Scalar>(
    model: &ValidatedModel<S>,
    symbol: &str,
    d: usize,
    tol: f64,
) -> Result<(), ValidateError>
where
    Matrix<S>: PsdDecide,
{
    let m = &model.symbols[symbol];
    if m.dim() != d {
        return Err(ValidateError::SymbolDimMismatch {
            symbol: symbol.to_string(),
            found: m.dim(),
            expected: d,
            register: "<all variables>".into(),
        });
    }
    if !m.is_hermitian(tol) {
        return Err(ValidateError::NotHermitian {
            symbol: symbol.to_string(),
        });
    }
    let wrap = |source: MatrixError| ValidateError::Matrix {
        symbol: symbol.to_string(),
        source,
    };
    if !psd(m, tol).map_err(wrap)? {
        return Err(ValidateError::PredicateLowerBound {
            symbol: symbol.to_string(),
        });
    }
    let gap = Matrix::identity(d).sub(m).map_err(wrap)?;
    if !psd(&gap, tol).map_err(wrap)? {
        return Err(ValidateError::PredicateUpperBound {
            symbol: symbol.to_string(),
        });
    }
    Ok(())
}

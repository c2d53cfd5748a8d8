//! Symbolic precondition terms.
//!
//! `wlp_term` mirrors the structure of the precondition computation
//! without evaluating any matrix: initialization becomes a `matsum`
//! node, unitary application a `matUtrans` node, an annotated loop a
//! `fixpoint_wlp` node, and a measurement the explicit
//! `mat_add`/`mat_mult` sum over its branches. Printed as an
//! indented s-expression.

use crate::lang::ast::Stmt;
use crate::semantics::{SemanticsError, VarContext};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum WlpTerm {
    /// The postcondition symbol.
    Post(String),
    /// Initialization of one variable (name, declaration index).
    MatSum {
        var: String,
        var_idx: usize,
        inner: Box<WlpTerm>,
    },
    /// Unitary conjugation U†·P·U.
    MatUtrans {
        symbol: String,
        var_idxs: Vec<usize>,
        inner: Box<WlpTerm>,
    },
    /// Annotated loop: M₀†·P·M₀ + M₁†·Inv·M₁.
    Fixpoint {
        m0: String,
        m1: String,
        invariant: String,
        inner: Box<WlpTerm>,
    },
    /// Bounded loop unrolling.
    FixpointBounded {
        n: u32,
        m0: String,
        m1: String,
        inner: Box<WlpTerm>,
    },
    /// Measurement: Σ_m (dag M_m)·P_m·M_m spelled as a mat_add
    /// chain; each branch carries its own inner term.
    MeasureSum { terms: Vec<(String, WlpTerm)> },
}

/// Builds the symbolic wlp term of `s` around `inner` (usually
/// `WlpTerm::Post`).
pub fn wlp_term(s: &Stmt, inner: WlpTerm, ctx: &VarContext) -> Result<WlpTerm, SemanticsError> {
    Ok(match s {
        Stmt::Skip { .. } => inner,
        Stmt::Init { var, .. } => WlpTerm::MatSum {
            var: var.clone(),
            var_idx: ctx.index_of(var)?,
            inner: Box::new(inner),
        },
        Stmt::Unitary { symbol, vars, .. } => {
            let mut idxs = Vec::with_capacity(vars.len());
            for v in vars {
                idxs.push(ctx.index_of(v)?);
            }
            WlpTerm::MatUtrans {
                symbol: symbol.clone(),
                var_idxs: idxs,
                inner: Box::new(inner),
            }
        }
        Stmt::Seq(ss) => {
            let mut acc = inner;
            for s in ss.iter().rev() {
                acc = wlp_term(s, acc, ctx)?;
            }
            acc
        }
        Stmt::Measure {
            family, branches, ..
        } => {
            let mut terms = Vec::with_capacity(branches.len());
            for (m, b) in branches.iter().enumerate() {
                terms.push((format!("{family}_{m}"), wlp_term(b, inner.clone(), ctx)?));
            }
            WlpTerm::MeasureSum { terms }
        }
        Stmt::While {
            m0, m1, invariant, ..
        } => WlpTerm::Fixpoint {
            m0: m0.clone(),
            m1: m1.clone(),
            invariant: invariant.clone(),
            inner: Box::new(inner),
        },
        Stmt::WhileN { n, m0, m1, .. } => WlpTerm::FixpointBounded {
            n: *n,
            m0: m0.clone(),
            m1: m1.clone(),
            inner: Box::new(inner),
        },
    })
}

impl WlpTerm {
    fn is_leaf(&self) -> bool {
        matches!(self, WlpTerm::Post(_))
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match self {
            WlpTerm::Post(name) => write!(f, "{pad}{name}"),
            WlpTerm::MatSum { var, var_idx, inner } => {
                writeln!(f, "{pad}(matsum {var} {var_idx}")?;
                inner.fmt_at(f, depth + 1)?;
                write!(f, ")")
            }
            WlpTerm::MatUtrans {
                symbol,
                var_idxs,
                inner,
            } => {
                let idxs = var_idxs
                    .iter()
                    .map(usize::to_string)
                    .collect::<Vec<_>>()
                    .join(" ");
                writeln!(f, "{pad}(matUtrans {symbol} {idxs}")?;
                inner.fmt_at(f, depth + 1)?;
                write!(f, ")")
            }
            WlpTerm::Fixpoint {
                m0,
                m1,
                invariant,
                inner,
            } => {
                writeln!(f, "{pad}(fixpoint_wlp {m0} {m1} {invariant}")?;
                inner.fmt_at(f, depth + 1)?;
                write!(f, ")")
            }
            WlpTerm::FixpointBounded { n, m0, m1, inner } => {
                writeln!(f, "{pad}(fixpoint_wlp_n {n} {m0} {m1}")?;
                inner.fmt_at(f, depth + 1)?;
                write!(f, ")")
            }
            WlpTerm::MeasureSum { terms } => {
                // Right-nested mat_add chain terminated by zero.
                for (k, (sym, t)) in terms.iter().enumerate() {
                    let p = "  ".repeat(depth + k);
                    if k > 0 {
                        writeln!(f)?;
                    }
                    writeln!(f, "{p}(mat_add")?;
                    if t.is_leaf() {
                        write!(f, "{p}  (mat_mult (mat_mult (dag {sym}) ")?;
                        t.fmt_at(f, 0)?;
                        write!(f, ") {sym})")?;
                    } else {
                        writeln!(f, "{p}  (mat_mult (mat_mult (dag {sym})")?;
                        t.fmt_at(f, depth + k + 2)?;
                        write!(f, ") {sym})")?;
                    }
                }
                writeln!(f)?;
                write!(f, "{}zero", "  ".repeat(depth + terms.len()))?;
                for _ in 0..terms.len() {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for WlpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_program;

    fn ctx(p: &crate::lang::Program) -> VarContext {
        VarContext::new(p.vars.iter().map(|v| (v.name.clone(), v.kind.dim())))
    }

    #[test]
    fn sequence_nests_first_statement_outermost() {
        let p = parse_program(
            "program t vars a:qubit; b:qubit; pre P; post Q; \
             body a := |0>; b := H[b]",
        )
        .unwrap();
        let c = ctx(&p);
        let t = wlp_term(&p.body, WlpTerm::Post("Q".into()), &c).unwrap();
        match t {
            WlpTerm::MatSum { var, var_idx, inner } => {
                assert_eq!((var.as_str(), var_idx), ("a", 0));
                assert!(matches!(*inner, WlpTerm::MatUtrans { .. }));
            }
            other => panic!("unexpected head {other:?}"),
        }
    }

    #[test]
    fn measure_prints_paper_style_sum() {
        let p = parse_program(
            "program t vars q:qubit; pre P; post Q; \
             body measure N[q] { 0 -> { skip } 1 -> { skip } }",
        )
        .unwrap();
        let c = ctx(&p);
        let t = wlp_term(&p.body, WlpTerm::Post("Q".into()), &c).unwrap();
        let s = t.to_string();
        assert!(s.contains("(mat_mult (mat_mult (dag N_0) Q) N_0)"), "{s}");
        assert!(s.contains("zero"), "{s}");
    }
}

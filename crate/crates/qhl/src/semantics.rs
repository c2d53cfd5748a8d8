//! Density-matrix semantics.
//!
//! [`VarContext`] fixes the global Hilbert space: the state space is
//! the tensor product of the declared variables, ordered by
//! declaration, with the first-declared variable owning the most
//! significant digit of the computational-basis index (row-major
//! flattening).
//!
//! [`lift`] embeds a local operator acting on a variable list into
//! the global space. [`deno_apply`] evaluates a statement on a
//! density matrix as a Kraus-sum superoperator; [`dual_apply`] is
//! its adjoint on observables, defined for loop-free statements
//! (bounded loops unroll).

use crate::lang::ast::{Span, Stmt};
use crate::matrix::{Matrix, MatrixError};
use crate::scalar::{Backend, Scalar};
use std::collections::BTreeMap;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SemanticsError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("bad basis-state specification: {0}")]
    BadStateSpec(String),
    #[error("variable `{0}` repeated in operator application")]
    RepeatedVariable(String),
    #[error("operator dimension {op_dim} does not match register dimension {reg_dim}")]
    LiftDimMismatch { op_dim: usize, reg_dim: usize },
    #[error("unknown matrix symbol `{0}`")]
    UnknownSymbol(String),
    #[error("{stmt} at {span}: the dual semantics is only defined for loop-free statements")]
    LoopInDual { stmt: &'static str, span: Span },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Ordered variable layout of the global space.
#[derive(Debug, Clone, PartialEq)]
pub struct VarContext {
    names: Vec<String>,
    dims: Vec<usize>,
    /// Index stride of each variable in the flattened basis.
    strides: Vec<usize>,
    total_dim: usize,
    by_name: HashMap<String, usize>,
}

impl VarContext {
    pub fn new(vars: impl IntoIterator<Item = (String, usize)>) -> Self {
        let (names, dims): (Vec<_>, Vec<_>) = vars.into_iter().unzip();
        let total_dim = dims.iter().product();
        let mut strides = vec![1usize; dims.len()];
        for k in (0..dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * dims[k + 1];
        }
        let by_name = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), i))
            .collect();
        VarContext {
            names,
            dims,
            strides,
            total_dim,
            by_name,
        }
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, SemanticsError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| SemanticsError::UnknownVariable(name.into()))
    }

    pub fn dim_of(&self, idx: usize) -> usize {
        self.dims[idx]
    }

    pub fn name_of(&self, idx: usize) -> &str {
        &self.names[idx]
    }

    /// Product of the dimensions of the named variables.
    pub fn local_dim(&self, vars: &[String]) -> Result<usize, SemanticsError> {
        let mut d = 1usize;
        for v in vars {
            d *= self.dims[self.index_of(v)?];
        }
        Ok(d)
    }

    /// Digit of `global` belonging to variable `idx`.
    fn digit(&self, global: usize, idx: usize) -> usize {
        (global / self.strides[idx]) % self.dims[idx]
    }

    /// Global basis index of a per-variable digit assignment (one
    /// digit per declared variable, declaration order).
    pub fn flatten(&self, digits: &[usize]) -> Result<usize, SemanticsError> {
        if digits.len() != self.dims.len() {
            return Err(SemanticsError::BadStateSpec(format!(
                "expected {} digits, got {}",
                self.dims.len(),
                digits.len()
            )));
        }
        let mut g = 0usize;
        for (i, &d) in digits.iter().enumerate() {
            if d >= self.dims[i] {
                return Err(SemanticsError::BadStateSpec(format!(
                    "digit {d} out of range for `{}` (dimension {})",
                    self.names[i], self.dims[i]
                )));
            }
            g += d * self.strides[i];
        }
        Ok(g)
    }

    /// Basis permutation mapping each global index to the index of
    /// the layout that lists `front` first (in list order) followed
    /// by the remaining variables in declaration order.
    fn to_front_permutation(&self, front: &[usize]) -> Vec<usize> {
        let rest: Vec<usize> = (0..self.dims.len()).filter(|i| !front.contains(i)).collect();
        let order: Vec<usize> = front.iter().copied().chain(rest).collect();
        (0..self.total_dim)
            .map(|g| {
                let mut h = 0usize;
                for &v in &order {
                    h = h * self.dims[v] + self.digit(g, v);
                }
                h
            })
            .collect()
    }
}

/// Embeds `op` (acting on `vars`, in list order) into the global
/// space: Π† (op ⊗ I_rest) Π for the basis permutation Π that brings
/// the listed variables to the front.
pub fn lift<S: Scalar>(
    op: &Matrix<S>,
    vars: &[String],
    ctx: &VarContext,
) -> Result<Matrix<S>, SemanticsError> {
    let mut idxs = Vec::with_capacity(vars.len());
    for v in vars {
        let i = ctx.index_of(v)?;
        if idxs.contains(&i) {
            return Err(SemanticsError::RepeatedVariable(v.clone()));
        }
        idxs.push(i);
    }
    let reg_dim: usize = idxs.iter().map(|&i| ctx.dim_of(i)).product();
    if op.dim() != reg_dim {
        return Err(SemanticsError::LiftDimMismatch {
            op_dim: op.dim(),
            reg_dim,
        });
    }
    let rest_dim = ctx.total_dim() / reg_dim;
    let perm = ctx.to_front_permutation(&idxs);
    let big = op.tensor(&Matrix::identity(rest_dim));
    Ok(Matrix::from_fn(ctx.total_dim(), |r, c| {
        big[(perm[r], perm[c])].clone()
    }))
}

/// Initialization Kraus operator E_n = |0⟩⟨n| on one variable,
/// lifted to the global space.
pub fn init_kraus<S: Scalar>(
    ctx: &VarContext,
    var: &str,
    n: usize,
) -> Result<Matrix<S>, SemanticsError> {
    let idx = ctx.index_of(var)?;
    let d = ctx.dim_of(idx);
    let vars = [var.to_string()];
    lift(&Matrix::ket_bra(d, 0, n), &vars, ctx)
}

/// Matrix symbols resolved to one backend.
pub trait SymbolLookup<S: Scalar> {
    fn lookup(&self, name: &str) -> Result<&Matrix<S>, SemanticsError>;
}

impl<S: Scalar> SymbolLookup<S> for BTreeMap<String, Matrix<S>> {
    fn lookup(&self, name: &str) -> Result<&Matrix<S>, SemanticsError> {
        self.get(name)
            .ok_or_else(|| SemanticsError::UnknownSymbol(name.into()))
    }
}

/// Knobs for loop evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalOptions {
    /// Hard cap on loop unrollings.
    pub k_max: usize,
    /// Float backend: stop once the residual trace drops below this.
    /// The exact backend stops only at an exactly zero residual.
    pub trace_eps: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            k_max: 1000,
            trace_eps: 1e-12,
        }
    }
}

/// Result of evaluating ⟦S⟧(ρ).
#[derive(Debug, Clone)]
pub struct EvalOutput<S: Scalar> {
    pub state: Matrix<S>,
    /// False when a loop hit `k_max` with residual mass left: the
    /// state is then a lower bound on the true output.
    pub converged: bool,
}

/// Per-measurement branch statistics collected during evaluation,
/// keyed by (source line, branch index); values are the accumulated
/// branch probability mass.
pub type MeasureStats = BTreeMap<(u32, usize), f64>;

/// Evaluates the denotational semantics ⟦S⟧(ρ) structurally.
pub fn deno_apply<S: Scalar>(
    s: &Stmt,
    rho: &Matrix<S>,
    ctx: &VarContext,
    st: &impl SymbolLookup<S>,
    opts: &EvalOptions,
) -> Result<EvalOutput<S>, SemanticsError> {
    let mut stats = MeasureStats::new();
    deno_apply_with_stats(s, rho, ctx, st, opts, &mut stats)
}

pub fn deno_apply_with_stats<S: Scalar>(
    s: &Stmt,
    rho: &Matrix<S>,
    ctx: &VarContext,
    st: &impl SymbolLookup<S>,
    opts: &EvalOptions,
    stats: &mut MeasureStats,
) -> Result<EvalOutput<S>, SemanticsError> {
    match s {
        Stmt::Skip { .. } => Ok(EvalOutput {
            state: rho.clone(),
            converged: true,
        }),
        Stmt::Init { var, span: _ } => {
            let idx = ctx.index_of(var)?;
            let d = ctx.dim_of(idx);
            let mut acc = Matrix::zeros(ctx.total_dim());
            for n in 0..d {
                let e = init_kraus::<S>(ctx, var, n)?;
                acc = acc.add(&e.mul(rho)?.mul(&e.dagger())?)?;
            }
            Ok(EvalOutput {
                state: acc,
                converged: true,
            })
        }
        Stmt::Unitary { symbol, vars, .. } => {
            let u = lift(st.lookup(symbol)?, vars, ctx)?;
            Ok(EvalOutput {
                state: u.mul(rho)?.mul(&u.dagger())?,
                converged: true,
            })
        }
        Stmt::Seq(ss) => {
            let mut cur = rho.clone();
            let mut converged = true;
            for s in ss {
                let out = deno_apply_with_stats(s, &cur, ctx, st, opts, stats)?;
                cur = out.state;
                converged &= out.converged;
            }
            Ok(EvalOutput {
                state: cur,
                converged,
            })
        }
        Stmt::Measure {
            family,
            vars,
            branches,
            span,
        } => {
            let mut acc = Matrix::zeros(ctx.total_dim());
            let mut converged = true;
            for (m, branch) in branches.iter().enumerate() {
                let mm = lift(st.lookup(&format!("{family}_{m}"))?, vars, ctx)?;
                let collapsed = mm.mul(rho)?.mul(&mm.dagger())?;
                *stats.entry((span.line, m)).or_insert(0.0) +=
                    collapsed.trace().to_c64().re;
                let out = deno_apply_with_stats(branch, &collapsed, ctx, st, opts, stats)?;
                acc = acc.add(&out.state)?;
                converged &= out.converged;
            }
            Ok(EvalOutput {
                state: acc,
                converged,
            })
        }
        Stmt::While {
            m0,
            m1,
            vars,
            body,
            ..
        } => eval_loop(
            rho,
            st.lookup(m0)?,
            st.lookup(m1)?,
            vars,
            body,
            None,
            ctx,
            st,
            opts,
            stats,
        ),
        Stmt::WhileN {
            n,
            m0,
            m1,
            vars,
            body,
            ..
        } => eval_loop(
            rho,
            st.lookup(m0)?,
            st.lookup(m1)?,
            vars,
            body,
            Some(*n as usize),
            ctx,
            st,
            opts,
            stats,
        ),
    }
}

/// Loop evaluation: Σ_k E₀ ((⟦body⟧ ∘ E₁)^k (ρ)) with E_b(σ) =
/// M_b σ M_b†. An unbounded loop truncates when the residual trace
/// vanishes (exactly, or below `trace_eps` on the float backend) or
/// at `k_max`; `while_n n` runs exactly n terms.
#[allow(clippy::too_many_arguments)]
fn eval_loop<S: Scalar>(
    rho: &Matrix<S>,
    m0: &Matrix<S>,
    m1: &Matrix<S>,
    vars: &[String],
    body: &Stmt,
    bound: Option<usize>,
    ctx: &VarContext,
    st: &impl SymbolLookup<S>,
    opts: &EvalOptions,
    stats: &mut MeasureStats,
) -> Result<EvalOutput<S>, SemanticsError> {
    let e0 = lift(m0, vars, ctx)?;
    let e1 = lift(m1, vars, ctx)?;
    let e0d = e0.dagger();
    let e1d = e1.dagger();

    let mut acc = Matrix::zeros(ctx.total_dim());
    let mut term = rho.clone();
    let mut converged = true;
    let steps = bound.unwrap_or(opts.k_max);

    for _ in 0..steps {
        acc = acc.add(&e0.mul(&term)?.mul(&e0d)?)?;
        let continued = e1.mul(&term)?.mul(&e1d)?;
        let body_out = deno_apply_with_stats(body, &continued, ctx, st, opts, stats)?;
        converged &= body_out.converged;
        term = body_out.state;
        // A bounded loop runs its full term count; the unbounded
        // form stops once the residual mass is gone.
        if bound.is_none() && residual_gone::<S>(&term.trace(), opts.trace_eps) {
            return Ok(EvalOutput {
                state: acc,
                converged,
            });
        }
    }
    if bound.is_none() {
        // k_max exhausted with residual mass: flag a lower bound.
        converged = false;
    }
    Ok(EvalOutput {
        state: acc,
        converged,
    })
}

fn residual_gone<S: Scalar>(trace: &S, eps: f64) -> bool {
    match S::BACKEND {
        Backend::Exact => trace.is_zero(),
        Backend::Float => trace.to_c64().re < eps,
    }
}

/// The adjoint superoperator ⟦S⟧*(A) = Σᵢ Eᵢ† A Eᵢ, structurally.
/// Unbounded loops are rejected; `while_n` unrolls.
pub fn dual_apply<S: Scalar>(
    s: &Stmt,
    a: &Matrix<S>,
    ctx: &VarContext,
    st: &impl SymbolLookup<S>,
) -> Result<Matrix<S>, SemanticsError> {
    match s {
        Stmt::Skip { .. } => Ok(a.clone()),
        Stmt::Init { var, .. } => {
            let idx = ctx.index_of(var)?;
            let d = ctx.dim_of(idx);
            let mut acc = Matrix::zeros(ctx.total_dim());
            for n in 0..d {
                let e = init_kraus::<S>(ctx, var, n)?;
                acc = acc.add(&e.dagger().mul(a)?.mul(&e)?)?;
            }
            Ok(acc)
        }
        Stmt::Unitary { symbol, vars, .. } => {
            let u = lift(st.lookup(symbol)?, vars, ctx)?;
            Ok(u.dagger().mul(a)?.mul(&u)?)
        }
        Stmt::Seq(ss) => {
            // ⟦s₁;s₂⟧* = ⟦s₁⟧* ∘ ⟦s₂⟧*.
            let mut cur = a.clone();
            for s in ss.iter().rev() {
                cur = dual_apply(s, &cur, ctx, st)?;
            }
            Ok(cur)
        }
        Stmt::Measure {
            family,
            vars,
            branches,
            ..
        } => {
            let mut acc = Matrix::zeros(ctx.total_dim());
            for (m, branch) in branches.iter().enumerate() {
                let mm = lift(st.lookup(&format!("{family}_{m}"))?, vars, ctx)?;
                let inner = dual_apply(branch, a, ctx, st)?;
                acc = acc.add(&mm.dagger().mul(&inner)?.mul(&mm)?)?;
            }
            Ok(acc)
        }
        Stmt::While { span, .. } => Err(SemanticsError::LoopInDual {
            stmt: "while",
            span: *span,
        }),
        Stmt::WhileN {
            n,
            m0,
            m1,
            vars,
            body,
            ..
        } => {
            // D₀(A) = 0; D_{k+1}(A) = M₀†AM₀ + M₁†·⟦body⟧*(D_k(A))·M₁.
            let e0 = lift(st.lookup(m0)?, vars, ctx)?;
            let e1 = lift(st.lookup(m1)?, vars, ctx)?;
            let exit = e0.dagger().mul(a)?.mul(&e0)?;
            let mut acc = Matrix::zeros(ctx.total_dim());
            for _ in 0..*n {
                let inner = dual_apply(body, &acc, ctx, st)?;
                acc = exit.add(&e1.dagger().mul(&inner)?.mul(&e1)?)?;
            }
            Ok(acc)
        }
    }
}

/// Partial-correctness check at a single state:
/// tr(Pρ) ≤ tr(Q·⟦S⟧ρ) + tr(ρ) − tr(⟦S⟧ρ), exact on the exact
/// backend, within `slack` on the float backend.
pub fn triple_holds_on<S: Scalar>(
    p: &Matrix<S>,
    s: &Stmt,
    q: &Matrix<S>,
    rho: &Matrix<S>,
    ctx: &VarContext,
    st: &impl SymbolLookup<S>,
    opts: &EvalOptions,
    slack: f64,
) -> Result<bool, SemanticsError> {
    let out = deno_apply(s, rho, ctx, st, opts)?.state;
    let lhs = p.mul(rho)?.trace();
    let rhs = q.mul(&out)?.trace() + rho.trace() - out.trace();
    Ok(lhs.real_leq(&rhs, slack).map_err(MatrixError::from)?)
}

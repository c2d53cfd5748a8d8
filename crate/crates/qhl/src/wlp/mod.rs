//! Weakest liberal preconditions, verification-condition generation
//! and discharge.
//!
//! `wlp` computes preconditions structurally; annotated loops
//! contribute `M₀†·post·M₀ + M₁†·Inv·M₁` and emit side conditions
//! instead of an (uncomputable) infinite greatest lower bound.
//! `generate_vcs` reduces a Hoare triple to a list of Löwner
//! inequalities; `discharge` decides each one on the chosen backend.

mod term;

pub use term::{wlp_term, WlpTerm};

use crate::lang::ast::Stmt;
use crate::lang::ValidatedModel;
use crate::matrix::{Matrix, MatrixError, PsdDecide, PsdOutcome};
use crate::scalar::{Backend, Scalar};
use crate::semantics::{init_kraus, lift, SemanticsError};
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WlpError {
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// A claimed Löwner inequality `lhs ⊑ rhs` with its provenance.
#[derive(Debug, Clone)]
pub struct VerificationCondition<S: Scalar> {
    pub lhs: Matrix<S>,
    pub rhs: Matrix<S>,
    pub origin: String,
}

/// Computes wlp(s, post) discarding side conditions; see
/// [`wlp_collect`] for the collecting form.
pub fn wlp<S: Scalar>(
    s: &Stmt,
    post: &Matrix<S>,
    model: &ValidatedModel<S>,
) -> Result<Matrix<S>, WlpError> {
    let mut sink = Vec::new();
    wlp_collect(s, post, model, &mut sink)
}

/// Computes wlp(s, post), pushing one side condition triple per
/// annotated loop: 0 ⊑ Inv, Inv ⊑ I, and Inv ⊑ wlp(body, loop_pre).
pub fn wlp_collect<S: Scalar>(
    s: &Stmt,
    post: &Matrix<S>,
    model: &ValidatedModel<S>,
    vcs: &mut Vec<VerificationCondition<S>>,
) -> Result<Matrix<S>, WlpError> {
    let ctx = &model.ctx;
    match s {
        Stmt::Skip { .. } => Ok(post.clone()),
        Stmt::Init { var, .. } => {
            let idx = ctx.index_of(var)?;
            let d = ctx.dim_of(idx);
            let mut acc = Matrix::zeros(ctx.total_dim());
            for n in 0..d {
                // Σ_n |n⟩⟨0| · post · |0⟩⟨n| over the variable.
                let e = init_kraus::<S>(ctx, var, n)?;
                acc = acc.add(&e.dagger().mul(post)?.mul(&e)?)?;
            }
            Ok(acc)
        }
        Stmt::Unitary { symbol, vars, .. } => {
            let u = lift(&model.symbols[symbol], vars, ctx)?;
            Ok(u.dagger().mul(post)?.mul(&u)?)
        }
        Stmt::Seq(ss) => {
            let mut acc = post.clone();
            for s in ss.iter().rev() {
                acc = wlp_collect(s, &acc, model, vcs)?;
            }
            Ok(acc)
        }
        Stmt::Measure {
            family,
            vars,
            branches,
            ..
        } => {
            let mut acc = Matrix::zeros(ctx.total_dim());
            for (m, branch) in branches.iter().enumerate() {
                let mm = lift(&model.symbols[&format!("{family}_{m}")], vars, ctx)?;
                let inner = wlp_collect(branch, post, model, vcs)?;
                acc = acc.add(&mm.dagger().mul(&inner)?.mul(&mm)?)?;
            }
            Ok(acc)
        }
        Stmt::While {
            m0,
            m1,
            vars,
            invariant,
            body,
            span,
        } => {
            let inv = model.symbols[invariant].clone();
            let pre = loop_pre(
                &model.symbols[m0],
                &model.symbols[m1],
                vars,
                &inv,
                post,
                model,
            )?;
            let id = Matrix::identity(ctx.total_dim());
            let zero = Matrix::zeros(ctx.total_dim());
            vcs.push(VerificationCondition {
                lhs: zero,
                rhs: inv.clone(),
                origin: format!("invariant lower bound (0 \u{2291} {invariant}) at line {}", span.line),
            });
            vcs.push(VerificationCondition {
                lhs: inv.clone(),
                rhs: id,
                origin: format!("invariant upper bound ({invariant} \u{2291} I) at line {}", span.line),
            });
            let preserved = wlp_collect(body, &pre, model, vcs)?;
            vcs.push(VerificationCondition {
                lhs: inv,
                rhs: preserved,
                origin: format!("loop invariant at line {}", span.line),
            });
            Ok(pre)
        }
        Stmt::WhileN {
            n,
            m0,
            m1,
            vars,
            body,
            ..
        } => {
            let (p, _) = fixpoint_wlp_bounded(
                &model.symbols[m0],
                &model.symbols[m1],
                vars,
                body,
                post,
                *n as usize,
                model,
                vcs,
            )?;
            Ok(p)
        }
    }
}

/// The annotated-loop precondition
/// `lift(M₀)†·post·lift(M₀) + lift(M₁)†·inv·lift(M₁)`.
pub fn loop_pre<S: Scalar>(
    m0: &Matrix<S>,
    m1: &Matrix<S>,
    vars: &[String],
    inv: &Matrix<S>,
    post: &Matrix<S>,
    model: &ValidatedModel<S>,
) -> Result<Matrix<S>, WlpError> {
    let e0 = lift(m0, vars, &model.ctx)?;
    let e1 = lift(m1, vars, &model.ctx)?;
    let exit = e0.dagger().mul(post)?.mul(&e0)?;
    let stay = e1.dagger().mul(inv)?.mul(&e1)?;
    Ok(exit.add(&stay)?)
}

/// The bounded precondition sequence P₀ = I,
/// P_{k+1} = M₀†·post·M₀ + M₁†·wlp(body, P_k)·M₁, returned as
/// P₀ … P_n.
#[allow(clippy::too_many_arguments)]
pub fn wlp_loop_sequence<S: Scalar>(
    m0: &Matrix<S>,
    m1: &Matrix<S>,
    vars: &[String],
    body: &Stmt,
    post: &Matrix<S>,
    n: usize,
    model: &ValidatedModel<S>,
    vcs: &mut Vec<VerificationCondition<S>>,
) -> Result<Vec<Matrix<S>>, WlpError> {
    let ctx = &model.ctx;
    let e0 = lift(m0, vars, ctx)?;
    let e1 = lift(m1, vars, ctx)?;
    let e0d = e0.dagger();
    let e1d = e1.dagger();
    let exit = e0d.mul(post)?.mul(&e0)?;

    let mut seq = vec![Matrix::identity(ctx.total_dim())];
    for _ in 0..n {
        let inner = wlp_collect(body, seq.last().unwrap(), model, vcs)?;
        let next = exit.add(&e1d.mul(&inner)?.mul(&e1)?)?;
        seq.push(next);
    }
    Ok(seq)
}

/// P_n from the bounded recurrence, plus whether the sequence
/// stabilized (P_n = P_{n−1} exactly, or within 1e-10 entrywise on
/// the float backend).
#[allow(clippy::too_many_arguments)]
pub fn fixpoint_wlp_bounded<S: Scalar>(
    m0: &Matrix<S>,
    m1: &Matrix<S>,
    vars: &[String],
    body: &Stmt,
    post: &Matrix<S>,
    n: usize,
    model: &ValidatedModel<S>,
    vcs: &mut Vec<VerificationCondition<S>>,
) -> Result<(Matrix<S>, bool), WlpError> {
    let seq = wlp_loop_sequence(m0, m1, vars, body, post, n, model, vcs)?;
    let stabilized = match seq.len() {
        0 | 1 => false,
        l => {
            let (a, b) = (&seq[l - 1], &seq[l - 2]);
            match S::BACKEND {
                Backend::Exact => a == b,
                Backend::Float => a.sub(b).map(|d| d.max_abs() < 1e-10).unwrap_or(false),
            }
        }
    };
    Ok((seq.into_iter().last().unwrap(), stabilized))
}

/// Output of VC generation: the deduced precondition and every
/// Löwner inequality whose truth establishes the triple.
#[derive(Debug, Clone)]
pub struct VcgOutput<S: Scalar> {
    pub computed_pre: Matrix<S>,
    pub vcs: Vec<VerificationCondition<S>>,
}

/// Reduces `{pre} body {post}` (taken from the model's annotations)
/// to verification conditions: the top condition pre ⊑ wlp(body,
/// post) first, then loop side conditions in traversal order.
pub fn generate_vcs<S: Scalar>(model: &ValidatedModel<S>) -> Result<VcgOutput<S>, WlpError> {
    generate_vcs_for(model, model.pre(), model.post())
}

/// As [`generate_vcs`] with explicit pre/post matrices.
pub fn generate_vcs_for<S: Scalar>(
    model: &ValidatedModel<S>,
    pre: &Matrix<S>,
    post: &Matrix<S>,
) -> Result<VcgOutput<S>, WlpError> {
    let mut side = Vec::new();
    let computed_pre = wlp_collect(&model.program.body, post, model, &mut side)?;
    let mut vcs = vec![VerificationCondition {
        lhs: pre.clone(),
        rhs: computed_pre.clone(),
        origin: "ord_wlp at top level".to_string(),
    }];
    vcs.extend(side);
    Ok(VcgOutput { computed_pre, vcs })
}

/// Three-way verdict of a single discharged condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VcVerdict {
    #[serde(rename = "true")]
    Holds,
    #[serde(rename = "false")]
    Fails,
    #[serde(rename = "unknown")]
    Unknown,
}

impl fmt::Display for VcVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VcVerdict::Holds => write!(f, "true"),
            VcVerdict::Fails => write!(f, "false"),
            VcVerdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Result of discharging one VC.
#[derive(Debug, Clone, PartialEq)]
pub struct VcResult {
    pub origin: String,
    pub verdict: VcVerdict,
    /// Float backend: the computed λ_min of rhs − lhs.
    pub min_eigenvalue_lower_bound: Option<f64>,
    /// Extra detail for unknown verdicts (ambiguity band,
    /// non-convergence).
    pub note: Option<String>,
}

/// Tolerance and parallelism knobs for discharge.
#[derive(Debug, Clone, Copy)]
pub struct DischargePolicy {
    /// Relative PSD tolerance on the float backend.
    pub tol: f64,
    /// Worker threads for independent VCs.
    pub jobs: usize,
}

impl Default for DischargePolicy {
    fn default() -> Self {
        DischargePolicy { tol: 1e-9, jobs: 1 }
    }
}

/// Decides one condition. The exact backend answers true/false; the
/// float backend answers unknown inside the (−10·tol, −tol)·scale
/// band instead of guessing, and reports non-convergence the same
/// way.
pub fn discharge<S: Scalar>(vc: &VerificationCondition<S>, tol: f64) -> VcResult
where
    Matrix<S>: PsdDecide,
{
    let diff = match vc.rhs.sub(&vc.lhs) {
        Ok(d) => d,
        Err(e) => {
            return VcResult {
                origin: vc.origin.clone(),
                verdict: VcVerdict::Unknown,
                min_eigenvalue_lower_bound: None,
                note: Some(e.to_string()),
            }
        }
    };
    match diff.psd_decide(tol) {
        Ok(PsdOutcome::Psd { min_eig }) => VcResult {
            origin: vc.origin.clone(),
            verdict: VcVerdict::Holds,
            min_eigenvalue_lower_bound: min_eig,
            note: None,
        },
        Ok(PsdOutcome::NotPsd { min_eig }) => VcResult {
            origin: vc.origin.clone(),
            verdict: VcVerdict::Fails,
            min_eigenvalue_lower_bound: min_eig,
            note: None,
        },
        Ok(PsdOutcome::Ambiguous { min_eig }) => VcResult {
            origin: vc.origin.clone(),
            verdict: VcVerdict::Unknown,
            min_eigenvalue_lower_bound: Some(min_eig),
            note: Some(format!(
                "\u{3bb}_min = {min_eig:.3e} falls in the ambiguity band"
            )),
        },
        Err(e) => VcResult {
            origin: vc.origin.clone(),
            verdict: VcVerdict::Unknown,
            min_eigenvalue_lower_bound: None,
            note: Some(e.to_string()),
        },
    }
}

/// Discharges all conditions, optionally in parallel; results come
/// back in emission order regardless of the worker count.
pub fn discharge_all<S: Scalar>(
    vcs: &[VerificationCondition<S>],
    policy: &DischargePolicy,
) -> Vec<VcResult>
where
    Matrix<S>: PsdDecide,
{
    let jobs = policy.jobs.max(1).min(vcs.len().max(1));
    if jobs <= 1 || vcs.len() <= 1 {
        return vcs.iter().map(|vc| discharge(vc, policy.tol)).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<VcResult>>> =
        (0..vcs.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= vcs.len() {
                    break;
                }
                *results[i].lock().unwrap() = Some(discharge(&vcs[i], policy.tol));
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every VC discharged"))
        .collect()
}

/// Overall verdict of a verification run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Verified => write!(f, "verified"),
            Verdict::Refuted => write!(f, "refuted"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// Verified iff every condition holds; a single failing condition
/// refutes the proof attempt; otherwise unknown.
pub fn overall_verdict(results: &[VcResult]) -> Verdict {
    if results.iter().any(|r| r.verdict == VcVerdict::Fails) {
        Verdict::Refuted
    } else if results.iter().all(|r| r.verdict == VcVerdict::Holds) {
        Verdict::Verified
    } else {
        Verdict::Unknown
    }
}

/// Full outcome of a verification run.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub program: String,
    pub verdict: Verdict,
    pub vcs: Vec<VcResult>,
    pub backend: Backend,
    pub wall_time_ms: u64,
    /// The deduced precondition, already rendered.
    pub computed_pre: String,
}

/// Wire format of a report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonReport {
    pub program: String,
    pub verdict: Verdict,
    pub vcs: Vec<JsonVc>,
    pub backend: String,
    pub wall_time_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonVc {
    pub origin: String,
    pub verdict: VcVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_eigenvalue_lower_bound: Option<f64>,
}

impl VerificationReport {
    pub fn to_json(&self) -> JsonReport {
        JsonReport {
            program: self.program.clone(),
            verdict: self.verdict,
            vcs: self
                .vcs
                .iter()
                .map(|r| JsonVc {
                    origin: r.origin.clone(),
                    verdict: r.verdict,
                    min_eigenvalue_lower_bound: r.min_eigenvalue_lower_bound,
                })
                .collect(),
            backend: self.backend.to_string(),
            wall_time_ms: self.wall_time_ms,
        }
    }
}

/// End-to-end verification of a validated model.
pub fn verify_model<S: Scalar>(
    model: &ValidatedModel<S>,
    policy: &DischargePolicy,
) -> Result<VerificationReport, WlpError>
where
    Matrix<S>: PsdDecide,
{
    let start = std::time::Instant::now();
    let out = generate_vcs(model)?;
    let results = discharge_all(&out.vcs, policy);
    let verdict = overall_verdict(&results);
    Ok(VerificationReport {
        program: model.program.name.clone(),
        verdict,
        vcs: results,
        backend: S::BACKEND,
        wall_time_ms: start.elapsed().as_millis() as u64,
        computed_pre: out.computed_pre.to_string(),
    })
}

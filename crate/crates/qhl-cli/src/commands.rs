//! Subcommand implementations, generic over the scalar backend.

use crate::output::{paint, use_color};
use crate::resolve::{backend_choice, load, Inputs};
use crate::{CommonArgs, WlpShow};
use anyhow::{bail, Context, Result};
use qhl::lang::{validate, Model, ValidatedModel};
use qhl::matrix::{psd, Matrix, PsdDecide};
use qhl::scalar::Scalar;
use qhl::semantics::{deno_apply_with_stats, EvalOptions, MeasureStats, VarContext};
use qhl::wlp::{
    verify_model, wlp_term, DischargePolicy, VcVerdict, Verdict, VerificationReport, WlpTerm,
};
use serde_json::json;
use std::process::ExitCode;

fn validate_inputs(common: &CommonArgs, inputs: &Inputs) -> Result<Vec<(String, Model)>> {
    let mut out = Vec::new();
    for (path, table) in &inputs.tables {
        let model = validate(
            &inputs.program,
            table,
            backend_choice(common.backend),
            common.tol,
        )
        .map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))?;
        out.push((path.display().to_string(), model));
    }
    Ok(out)
}

fn single_model(common: &CommonArgs) -> Result<Model> {
    let inputs = load(common)?;
    if inputs.tables.len() != 1 {
        bail!(
            "{} matrix files found; pass --matrices to pick one",
            inputs.tables.len()
        );
    }
    Ok(validate_inputs(common, &inputs)?.pop().unwrap().1)
}

pub fn verify(common: &CommonArgs, show_pre: bool) -> Result<ExitCode> {
    let inputs = load(common)?;
    let models = validate_inputs(common, &inputs)?;
    let policy = DischargePolicy {
        tol: common.tol,
        jobs: common.jobs,
    };

    let mut reports = Vec::new();
    for (label, model) in &models {
        let report = match model {
            Model::Exact(m) => verify_model(m, &policy)?,
            Model::Float(m) => verify_model(m, &policy)?,
        };
        reports.push((label.clone(), report));
    }

    if common.json {
        let objs: Vec<_> = reports.iter().map(|(_, r)| r.to_json()).collect();
        if objs.len() == 1 {
            println!("{}", serde_json::to_string_pretty(&objs[0])?);
        } else {
            println!("{}", serde_json::to_string_pretty(&objs)?);
        }
    } else {
        let color = use_color();
        for (label, report) in &reports {
            print_report(label, report, show_pre, color);
        }
    }

    let mut worst = ExitCode::SUCCESS;
    for (_, r) in &reports {
        worst = max_severity(worst, verdict_code(r.verdict));
    }
    Ok(worst)
}

fn verdict_code(v: Verdict) -> ExitCode {
    match v {
        Verdict::Verified => ExitCode::SUCCESS,
        Verdict::Refuted => ExitCode::from(1),
        Verdict::Unknown => ExitCode::from(2),
    }
}

fn max_severity(a: ExitCode, b: ExitCode) -> ExitCode {
    // Severity order: verified < unknown < refuted.
    let rank = |c: ExitCode| {
        if c == ExitCode::from(1) {
            2
        } else if c == ExitCode::from(2) {
            1
        } else {
            0
        }
    };
    if rank(b) > rank(a) {
        b
    } else {
        a
    }
}

fn print_report(label: &str, report: &VerificationReport, show_pre: bool, color: bool) {
    println!(
        "program {} [{}] ({} backend)",
        report.program, label, report.backend
    );
    let n = report.vcs.len();
    for (k, vc) in report.vcs.iter().enumerate() {
        let verdict = match vc.verdict {
            VcVerdict::Holds => paint("true", "32", color),
            VcVerdict::Fails => paint("false", "31", color),
            VcVerdict::Unknown => paint("unknown", "33", color),
        };
        print!("  [{}/{n}] {}: {verdict}", k + 1, vc.origin);
        if let Some(lam) = vc.min_eigenvalue_lower_bound {
            print!("  (min eigenvalue {lam:.3e})");
        }
        if let Some(note) = &vc.note {
            print!("  [{note}]");
        }
        println!();
    }
    if show_pre {
        println!("deduced precondition:\n{}", report.computed_pre);
    }
    let v = match report.verdict {
        Verdict::Verified => paint("verified", "32", color),
        Verdict::Refuted => paint("refuted", "31", color),
        Verdict::Unknown => paint("unknown", "33", color),
    };
    println!("verdict: {v} ({} ms)", report.wall_time_ms);
}

pub fn wlp(common: &CommonArgs, show: WlpShow) -> Result<ExitCode> {
    let model = single_model(common)?;
    match show {
        WlpShow::Term => {
            let (program, ctx) = match &model {
                Model::Exact(m) => (&m.program, &m.ctx),
                Model::Float(m) => (&m.program, &m.ctx),
            };
            let term = wlp_term(&program.body, WlpTerm::Post(program.post.clone()), ctx)?;
            if common.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&json!({
                        "program": program.name,
                        "show": "term",
                        "term": term.to_string(),
                    }))?
                );
            } else {
                println!("{term}");
            }
        }
        WlpShow::Matrix => {
            match &model {
                Model::Exact(m) => print_wlp_matrix(common, m)?,
                Model::Float(m) => print_wlp_matrix(common, m)?,
            };
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_wlp_matrix<S: Scalar>(common: &CommonArgs, model: &ValidatedModel<S>) -> Result<()>
where
    Matrix<S>: PsdDecide,
{
    let w = qhl::wlp::wlp(&model.program.body, model.post(), model)?;
    // Preconditions of Hermitian postconditions are Hermitian; a
    // failure here would be an arithmetic defect worth surfacing.
    if !w.is_hermitian(common.tol) {
        bail!("internal check failed: computed precondition is not Hermitian");
    }
    if common.json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "program": model.program.name,
                "show": "matrix",
                "dim": w.dim(),
                "matrix": w.to_string(),
            }))?
        );
    } else {
        println!("{w}");
    }
    Ok(())
}

/// Parses `|010>` / `|0,1,0>` into a global basis index.
fn parse_ket(spec: &str, ctx: &VarContext) -> Result<usize> {
    let inner = spec
        .trim()
        .strip_prefix('|')
        .and_then(|x| x.strip_suffix('>'))
        .with_context(|| format!("state `{spec}` must look like |010> or |0,1,0>"))?;
    let digits: Vec<usize> = if inner.contains(',') {
        inner
            .split(',')
            .map(|d| d.trim().parse::<usize>().context("bad digit"))
            .collect::<Result<_>>()?
    } else {
        inner
            .chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as usize)
                    .with_context(|| format!("bad digit `{c}`"))
            })
            .collect::<Result<_>>()?
    };
    Ok(ctx.flatten(&digits)?)
}

pub fn simulate(common: &CommonArgs, state: Option<&str>) -> Result<ExitCode> {
    let model = single_model(common)?;
    match &model {
        Model::Exact(m) => simulate_on(common, m, state),
        Model::Float(m) => simulate_on(common, m, state),
    }
}

fn simulate_on<S: Scalar>(
    common: &CommonArgs,
    model: &ValidatedModel<S>,
    state: Option<&str>,
) -> Result<ExitCode>
where
    Matrix<S>: PsdDecide,
{
    let ctx = &model.ctx;
    let index = match state {
        Some(s) => parse_ket(s, ctx)?,
        None => 0,
    };
    let rho = Matrix::<S>::basis_proj(ctx.total_dim(), index);
    let opts = EvalOptions {
        k_max: common.kmax,
        trace_eps: 1e-12,
    };
    let mut stats = MeasureStats::new();
    let out = deno_apply_with_stats(&model.program.body, &rho, ctx, &model.symbols, &opts, &mut stats)?;

    let trace = out.state.trace();
    let post_exp = model.post().mul(&out.state)?.trace();

    if common.json {
        let branches: Vec<_> = stats
            .iter()
            .map(|((line, m), p)| json!({"line": line, "outcome": m, "probability": p}))
            .collect();
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "program": model.program.name,
                "backend": S::BACKEND.to_string(),
                "input_index": index,
                "trace": trace.to_c64().re,
                "post_expectation": post_exp.to_c64().re,
                "converged": out.converged,
                "branches": branches,
            }))?
        );
    } else {
        println!(
            "program {} ({} backend), input basis index {index}",
            model.program.name,
            S::BACKEND
        );
        println!("output state:\n{}", out.state);
        println!("trace (termination probability): {trace}");
        println!("postcondition expectation: {post_exp}");
        if !stats.is_empty() {
            println!("measurement branches:");
            for ((line, m), p) in &stats {
                println!("  line {line} outcome {m}: {p}");
            }
        }
        if !out.converged {
            println!(
                "warning: loop cap k_max = {} reached with residual mass; \
                 the output is a lower bound",
                common.kmax
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

pub fn check_matrices(common: &CommonArgs) -> Result<ExitCode> {
    let inputs = load(common)?;
    let color = use_color();
    let mut objs = Vec::new();
    for (path, table) in &inputs.tables {
        if !common.json {
            println!("{}:", path.display());
        }
        for (name, any) in table.iter() {
            let (dim, backend) = (any.dim(), if any.is_exact() { "exact" } else { "float" });
            let (herm, unit, pred) = match any {
                qhl::lang::AnyMatrix::Exact(m) => describe(m, 0.0),
                qhl::lang::AnyMatrix::Float(m) => describe(m, common.tol),
            };
            if common.json {
                objs.push(json!({
                    "name": name,
                    "dim": dim,
                    "backend": backend,
                    "hermitian": herm,
                    "unitary": unit,
                    "predicate": pred,
                }));
            } else {
                let yn = |b: bool| {
                    if b {
                        paint("yes", "32", color)
                    } else {
                        paint("no", "33", color)
                    }
                };
                println!(
                    "  {name}: dim {dim}, backend {backend}, hermitian {}, unitary {}, predicate {}",
                    yn(herm),
                    yn(unit),
                    yn(pred)
                );
            }
        }
    }
    if common.json {
        println!("{}", serde_json::to_string_pretty(&objs)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn describe<S: Scalar>(m: &Matrix<S>, tol: f64) -> (bool, bool, bool)
where
    Matrix<S>: PsdDecide,
{
    let herm = m.is_hermitian(tol);
    let unit = m.is_unitary(tol);
    let pred = herm
        && psd(m, tol).unwrap_or(false)
        && Matrix::identity(m.dim())
            .sub(m)
            .map(|gap| psd(&gap, tol).unwrap_or(false))
            .unwrap_or(false);
    (herm, unit, pred)
}

//! `qhl` — batch verifier for quantum while-programs.
//!
//! Exit codes: 0 verified (or command succeeded), 1 refuted,
//! 2 unknown, 3 input error.

mod commands;
mod output;
mod resolve;

use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "qhl",
    about = "Verify quantum while-programs against Hermitian pre/postconditions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Exact,
    Float,
    Auto,
}

#[derive(Debug, Clone, clap::Args)]
struct CommonArgs {
    /// Program file, or a directory containing `program.qhl`.
    program: PathBuf,

    /// Matrix-definition file; defaults to `matrices.qmat` next to
    /// the program.
    #[arg(long)]
    matrices: Option<PathBuf>,

    /// Scalar backend. `auto` picks exact when every referenced
    /// matrix parsed exactly.
    #[arg(long, value_enum, default_value = "auto")]
    backend: BackendArg,

    /// Relative tolerance for float-backend decisions.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Unrolling cap for unbounded loops in simulation.
    #[arg(long, default_value_t = 1000)]
    kmax: usize,

    /// Machine-readable output.
    #[arg(long)]
    json: bool,

    /// Worker threads for discharging independent conditions.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum WlpShow {
    Term,
    Matrix,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Generate and discharge the verification conditions of the
    /// program's Hoare triple.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Also print the deduced precondition.
        #[arg(long)]
        show_pre: bool,
    },
    /// Print the weakest liberal precondition of the body, either as
    /// a symbolic term or as the evaluated matrix.
    Wlp {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value = "term")]
        show: WlpShow,
    },
    /// Evaluate the program on an input density matrix and report
    /// the output state, its trace, and measurement statistics.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        /// Basis input state, e.g. `|010>` or `|0,1,0>` (one digit
        /// per declared variable); defaults to all zeros.
        #[arg(long)]
        state: Option<String>,
    },
    /// Report dimension, backend, Hermiticity, unitarity and
    /// predicate bounds for every symbol in the matrix file.
    CheckMatrices {
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Cmd::Verify { common, show_pre } => commands::verify(&common, show_pre),
        Cmd::Wlp { common, show } => commands::wlp(&common, show),
        Cmd::Simulate { common, state } => commands::simulate(&common, state.as_deref()),
        Cmd::CheckMatrices { common } => commands::check_matrices(&common),
    };
    match code {
        Ok(c) => c,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(3)
        }
    }
}

//! Input resolution: program path, matrix file(s), backend choice.

use crate::{BackendArg, CommonArgs};
use anyhow::{bail, Context, Result};
use qhl::lang::{parse_matrix_file, parse_program, BackendChoice, Program, SymbolTable};
use std::path::{Path, PathBuf};

pub struct Inputs {
    pub program: Program,
    /// One entry per matrix file to run against (a directory with
    /// several `.qmat` files fans out).
    pub tables: Vec<(PathBuf, SymbolTable)>,
}

pub fn backend_choice(arg: BackendArg) -> BackendChoice {
    match arg {
        BackendArg::Exact => BackendChoice::Exact,
        BackendArg::Float => BackendChoice::Float,
        BackendArg::Auto => BackendChoice::Auto,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load(common: &CommonArgs) -> Result<Inputs> {
    let (program_path, matrix_paths) = locate(common)?;
    let text = read(&program_path)?;
    let program = parse_program(&text)
        .map_err(|e| anyhow::anyhow!("{}: {e}", program_path.display()))?;
    let mut tables = Vec::new();
    for mp in matrix_paths {
        let table = parse_matrix_file(&read(&mp)?)
            .map_err(|e| anyhow::anyhow!("{}: {e}", mp.display()))?;
        tables.push((mp, table));
    }
    Ok(Inputs { program, tables })
}

fn locate(common: &CommonArgs) -> Result<(PathBuf, Vec<PathBuf>)> {
    let p = &common.program;
    if p.is_dir() {
        let program_path = p.join("program.qhl");
        if !program_path.is_file() {
            bail!("{} has no program.qhl", p.display());
        }
        let matrices = match &common.matrices {
            Some(m) => vec![m.clone()],
            None => {
                let default = p.join("matrices.qmat");
                if default.is_file() {
                    vec![default]
                } else {
                    let mut found: Vec<PathBuf> = std::fs::read_dir(p)?
                        .filter_map(|e| e.ok().map(|e| e.path()))
                        .filter(|f| f.extension().map(|x| x == "qmat").unwrap_or(false))
                        .collect();
                    found.sort();
                    if found.is_empty() {
                        bail!(
                            "{} has no matrix file; pass --matrices",
                            p.display()
                        );
                    }
                    found
                }
            }
        };
        Ok((program_path, matrices))
    } else {
        let matrices = match &common.matrices {
            Some(m) => m.clone(),
            None => {
                let sibling = p.with_file_name("matrices.qmat");
                if sibling.is_file() {
                    sibling
                } else {
                    bail!(
                        "no matrix file next to {}; pass --matrices",
                        p.display()
                    );
                }
            }
        };
        Ok((p.clone(), vec![matrices]))
    }
}

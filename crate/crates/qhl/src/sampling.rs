//! Seeded random generators for the statistical test suites: small
//! cyclotomics, Hermitian matrices, predicates, density matrices,
//! and loop-free programs over the standard gate set with
//! projector-built measurements.

use crate::gates;
use crate::lang::ast::{Program, Span, Stmt, VarDecl, VarKind};
use crate::lang::ValidatedModel;
use crate::matrix::Matrix;
use crate::scalar::{Cyclotomic, Scalar};
use crate::semantics::VarContext;
use num::traits::{One, Zero};
use num::{BigInt, BigRational};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational with numerator in [−bound, bound] and denominator in
/// [1, bound].
pub fn random_rational(r: &mut impl Rng, bound: i64) -> BigRational {
    let num = r.gen_range(-bound..=bound);
    let den = r.gen_range(1..=bound);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A cyclotomic with small random coefficients.
pub fn random_cyclotomic(r: &mut impl Rng, bound: i64) -> Cyclotomic {
    Cyclotomic::new([
        random_rational(r, bound),
        random_rational(r, bound),
        random_rational(r, bound),
        random_rational(r, bound),
    ])
}

pub fn random_matrix(r: &mut impl Rng, dim: usize, bound: i64) -> Matrix<Cyclotomic> {
    Matrix::from_fn(dim, |_, _| random_cyclotomic(r, bound))
}

/// B + B† for random B — Hermitian by construction.
pub fn random_hermitian(r: &mut impl Rng, dim: usize, bound: i64) -> Matrix<Cyclotomic> {
    let b = random_matrix(r, dim, bound);
    b.add(&b.dagger()).unwrap()
}

/// C†·C — positive semidefinite by construction.
pub fn random_psd(r: &mut impl Rng, dim: usize, bound: i64) -> Matrix<Cyclotomic> {
    let c = random_matrix(r, dim, bound);
    c.dagger().mul(&c).unwrap()
}

/// A quantum predicate: C†C normalized by its trace plus a little
/// headroom, so 0 ⊑ P ⊑ I holds exactly.
pub fn random_predicate(r: &mut impl Rng, dim: usize) -> Matrix<Cyclotomic> {
    let p = random_psd(r, dim, 2);
    let tr = p.trace();
    if tr.is_zero() {
        return Matrix::zeros(dim);
    }
    // trace ≥ λ_max for PSD matrices, so P/tr ⊑ I.
    let inv = tr.inv().expect("nonzero trace");
    p.scale(&inv)
}

/// A density matrix: C†C normalized to unit trace.
pub fn random_density(r: &mut impl Rng, dim: usize) -> Matrix<Cyclotomic> {
    loop {
        let p = random_psd(r, dim, 2);
        let tr = p.trace();
        if !tr.is_zero() {
            return p.scale(&tr.inv().expect("nonzero trace"));
        }
    }
}

/// Float-backend density matrix, for the high-volume sampling
/// suites.
pub fn random_density_float(r: &mut impl Rng, dim: usize) -> Matrix<num::complex::Complex64> {
    use num::complex::Complex64;
    let c = Matrix::<Complex64>::from_fn(dim, |_, _| {
        Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
    });
    let p = c.dagger().mul(&c).unwrap();
    let tr = p.trace().re;
    p.scale(&Complex64::new(1.0 / tr, 0.0))
}

/// A diagonal projector onto a random basis subset.
pub fn random_basis_projector(r: &mut impl Rng, dim: usize) -> Matrix<Cyclotomic> {
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        if r.gen_bool(0.5) {
            m[(i, i)] = Cyclotomic::one();
        }
    }
    m
}

/// The gate pool used by the random program generator.
fn gate_pool() -> Vec<(&'static str, Matrix<Cyclotomic>, usize)> {
    vec![
        ("H", gates::hadamard(), 1),
        ("X", gates::pauli_x(), 1),
        ("Z", gates::pauli_z(), 1),
        ("S", gates::phase_s(), 1),
        ("T", gates::phase_t(), 1),
        ("CNOT", gates::cnot(), 2),
    ]
}

/// A random loop-free program over 1–`max_vars` qubits with at most
/// `max_stmts` top-level statements, together with its resolved
/// model. Gates come from {H, X, Z, S, T, CNOT}; measurements are
/// complete projector pairs; branches may nest further statements.
pub fn random_loop_free_model(
    r: &mut impl Rng,
    max_vars: usize,
    max_stmts: usize,
) -> ValidatedModel<Cyclotomic> {
    let nvars = r.gen_range(1..=max_vars);
    let vars: Vec<VarDecl> = (0..nvars)
        .map(|k| VarDecl {
            name: format!("q{k}"),
            kind: VarKind::Qubit,
            span: Span::default(),
        })
        .collect();
    let names: Vec<String> = vars.iter().map(|v| v.name.clone()).collect();

    let mut symbols: BTreeMap<String, Matrix<Cyclotomic>> = BTreeMap::new();
    let nstmts = r.gen_range(1..=max_stmts);
    let mut stmts = Vec::with_capacity(nstmts);
    for _ in 0..nstmts {
        stmts.push(random_stmt(r, &names, &mut symbols, 1));
    }
    let body = if stmts.len() == 1 {
        stmts.pop().unwrap()
    } else {
        Stmt::Seq(stmts)
    };

    let ctx = VarContext::new(names.iter().map(|n| (n.clone(), 2usize)));
    let d = ctx.total_dim();
    let pre = random_predicate(r, d);
    let post = random_predicate(r, d);
    symbols.insert("Pre".into(), pre);
    symbols.insert("Post".into(), post);

    ValidatedModel {
        program: Program {
            name: "random".into(),
            vars,
            pre: "Pre".into(),
            post: "Post".into(),
            body,
        },
        ctx,
        symbols,
    }
}

fn random_stmt(
    r: &mut impl Rng,
    names: &[String],
    symbols: &mut BTreeMap<String, Matrix<Cyclotomic>>,
    depth: usize,
) -> Stmt {
    let span = Span::default();
    let choice = if depth >= 3 { r.gen_range(0..3) } else { r.gen_range(0..4) };
    match choice {
        0 => Stmt::Skip { span },
        1 => Stmt::Init {
            var: names.choose(r).unwrap().clone(),
            span,
        },
        2 => {
            let pool = gate_pool();
            let viable: Vec<_> = pool.into_iter().filter(|(_, _, k)| *k <= names.len()).collect();
            let (gname, gate, arity) = viable.choose(r).unwrap().clone();
            let sym = format!("G{}_{gname}", symbols.len());
            symbols.insert(sym.clone(), gate);
            let vars = names
                .choose_multiple(r, arity)
                .cloned()
                .collect::<Vec<_>>();
            Stmt::Unitary {
                symbol: sym,
                vars,
                span,
            }
        }
        _ => {
            // A complete two-outcome projector measurement on one
            // qubit, with sub-statements in each branch.
            let var = names.choose(r).unwrap().clone();
            let p = random_basis_projector(r, 2);
            let q = Matrix::identity(2).sub(&p).unwrap();
            let family = format!("F{}", symbols.len());
            symbols.insert(format!("{family}_0"), p);
            symbols.insert(format!("{family}_1"), q);
            let branches = vec![
                random_stmt(r, names, symbols, depth + 1),
                random_stmt(r, names, symbols, depth + 1),
            ];
            Stmt::Measure {
                family,
                vars: vec![var],
                branches,
                span,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::psd;

    #[test]
    fn predicates_and_densities_satisfy_their_bounds() {
        let mut r = rng(7);
        for _ in 0..10 {
            let dim = r.gen_range(2..=4);
            let p = random_predicate(&mut r, dim);
            assert!(p.is_hermitian(0.0));
            assert!(psd(&p, 0.0).unwrap());
            assert!(psd(&Matrix::identity(dim).sub(&p).unwrap(), 0.0).unwrap());
            let rho = random_density(&mut r, dim);
            assert!(psd(&rho, 0.0).unwrap());
            assert!(rho.trace().is_one());
        }
    }

    #[test]
    fn generated_models_are_well_formed() {
        let mut r = rng(11);
        for _ in 0..20 {
            let m = random_loop_free_model(&mut r, 3, 3);
            // Every referenced symbol resolves and registers match.
            let d = m.ctx.total_dim();
            assert_eq!(m.pre().dim(), d);
            assert_eq!(m.post().dim(), d);
        }
    }
}

//! The generated corpus files are frozen artifacts: this suite
//! rebuilds each one from first principles and compares byte for
//! byte. Run with QHL_REGEN_CORPUS=1 to rewrite them after an
//! intentional change.

use num::traits::{One, Zero};
use qhl::gates;
use qhl::lang::{parse_matrix_file, parse_program, validate, AnyMatrix, BackendChoice, Model};
use qhl::matrix::Matrix;
use qhl::scalar::Cyclotomic;
use qhl::wlp::{loop_pre, wlp};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// The marked index of the shipped search instance.
const MARKED: usize = 2;

fn def(out: &mut String, comment: &str, name: &str, m: &Matrix<Cyclotomic>) {
    if !comment.is_empty() {
        writeln!(out, "# {comment}").unwrap();
    }
    writeln!(out, "{name} = {m}").unwrap();
    writeln!(out).unwrap();
}

/// Uniform superposition projector on two qubits.
fn uniform4() -> Matrix<Cyclotomic> {
    Matrix::from_fn(4, |_, _| Cyclotomic::from_ratio(1, 4))
}

fn grover_matrices() -> String {
    let i2 = Matrix::<Cyclotomic>::identity(2);

    // Phase oracle: flips the sign of the marked basis state.
    let mut oracle = Matrix::<Cyclotomic>::identity(4);
    oracle[(MARKED, MARKED)] = Cyclotomic::from_int(-1);

    // Conditional phase shift 2|00><00| - I.
    let mut ph = Matrix::<Cyclotomic>::identity(4).scale(&Cyclotomic::from_int(-1));
    ph[(0, 0)] = Cyclotomic::one();

    let post = Matrix::<Cyclotomic>::basis_proj(4, MARKED)
        .tensor(&i2)
        .tensor(&i2);
    let invariant = uniform4().tensor(&i2).tensor(&Matrix::basis_proj(2, 0));

    let mut out = String::new();
    out.push_str("# Matrices for the four-element search instance (marked index 2).\n\n");
    def(&mut out, "", "H", &gates::hadamard());
    def(&mut out, "", "X", &gates::pauli_x());
    def(&mut out, "phase oracle: flips the marked index", "O", &oracle);
    def(&mut out, "conditional phase shift 2|00><00| - I", "Ph", &ph);
    def(&mut out, "counter increment mod 2", "Uplus", &gates::pauli_x());
    def(
        &mut out,
        "loop measurement on the counter: exit once r >= 1",
        "M0",
        &Matrix::basis_proj(2, 1),
    );
    def(&mut out, "", "M1", &Matrix::basis_proj(2, 0));
    for t in 0..4 {
        def(
            &mut out,
            if t == 0 {
                "computational-basis readout on the data register"
            } else {
                ""
            },
            &format!("N_{t}"),
            &Matrix::basis_proj(4, t),
        );
    }
    def(
        &mut out,
        "trivial precondition: success from every input state",
        "Pre",
        &Matrix::identity(16),
    );
    def(
        &mut out,
        "postcondition: the data register holds the marked index",
        "Post",
        &post,
    );
    def(
        &mut out,
        "loop invariant: uniform data register while the counter is 0",
        "Q",
        &invariant,
    );
    out
}

fn qpe_matrices(k: usize) -> String {
    let i2 = Matrix::<Cyclotomic>::identity(2);
    // Eigenphase 2pi*k/4: U = diag(1, i^k) on |u> = |1>.
    let cu1 = gates::controlled_phase(pow_i(k));
    let cu2 = gates::controlled_phase(pow_i(2 * k));

    let pre = Matrix::<Cyclotomic>::identity(4).tensor(&Matrix::basis_proj(2, 1));
    let post = Matrix::<Cyclotomic>::basis_proj(4, k).tensor(&Matrix::basis_proj(2, 1));

    // Stage-one product state: q0 carries phase i^{2k}, q1 carries
    // i^k, u stays on |1>.
    let half = Cyclotomic::from_ratio(1, 2);
    let mut psi = vec![Cyclotomic::zero(); 8];
    for a in 0..2usize {
        for b in 0..2usize {
            let mut amp = half.clone();
            for _ in 0..a {
                amp = amp * pow_i(2 * k);
            }
            for _ in 0..b {
                amp = amp * pow_i(k);
            }
            psi[a * 4 + b * 2 + 1] = amp;
        }
    }
    let eq1 = Matrix::outer(&psi, &psi);

    let mut out = String::new();
    writeln!(
        out,
        "# Matrices for phase estimation with eigenphase {k}/4.\n"
    )
    .unwrap();
    def(&mut out, "", "H", &gates::hadamard());
    def(&mut out, "controlled U (phase on |11>)", "CU1", &cu1);
    def(&mut out, "controlled U^2", "CU2", &cu2);
    def(&mut out, "", "SWAP", &gates::swap());
    def(
        &mut out,
        "inverse controlled phase, diag(1,1,1,-i)",
        "CSdg",
        &gates::controlled_phase(-Cyclotomic::i()),
    );
    for t in 0..4 {
        def(
            &mut out,
            if t == 0 {
                "computational-basis readout on the estimation register"
            } else {
                ""
            },
            &format!("N_{t}"),
            &Matrix::basis_proj(4, t),
        );
    }
    def(
        &mut out,
        "precondition: u holds the eigenvector",
        "Pre",
        &pre,
    );
    def(
        &mut out,
        "postcondition: the estimation register reads the phase bits",
        "Post",
        &post,
    );
    def(
        &mut out,
        "stage-one product state (see stage1.qhl)",
        "EQ1",
        &eq1,
    );
    let _ = i2;
    out
}

fn pow_i(k: usize) -> Cyclotomic {
    let mut v = Cyclotomic::one();
    for _ in 0..(k % 4) {
        v = v * Cyclotomic::i();
    }
    v
}

/// The loop's deduced precondition inside the full verification
/// flow, i.e. loop_pre against the postcondition that the final
/// measurement passes through unchanged.
fn grover_loop_pre_content() -> String {
    let program = std::fs::read_to_string(corpus_root().join("grover_n4/program.qhl")).unwrap();
    let table = parse_matrix_file(&grover_matrices()).unwrap();
    let program = parse_program(&program).unwrap();
    let model = match validate(&program, &table, BackendChoice::Exact, 1e-9).unwrap() {
        Model::Exact(m) => m,
        Model::Float(_) => unreachable!(),
    };
    // wlp of the trailing measurement w.r.t. Post.
    let stmts = match &model.program.body {
        qhl::lang::Stmt::Seq(ss) => ss.clone(),
        _ => unreachable!(),
    };
    let measure = stmts.last().unwrap();
    let post_at_loop = wlp(measure, model.post(), &model).unwrap();
    let lp = loop_pre(
        model.symbol("M0"),
        model.symbol("M1"),
        &["r".to_string()],
        model.symbol("Q"),
        &post_at_loop,
        &model,
    )
    .unwrap();
    format!(
        "# Deduced precondition of the search loop, frozen from the\n\
         # fixpoint formula M0'.post.M0 + M1'.Q.M1 lifted over the counter.\n\
         LOOP_PRE = {lp}\n"
    )
}

fn check_or_regen(rel: &str, expected: String) {
    let path = corpus_root().join(rel);
    if std::env::var("QHL_REGEN_CORPUS").as_deref() == Ok("1") {
        std::fs::write(&path, expected).unwrap();
        return;
    }
    let shipped = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("missing corpus file {}: {e}", path.display()));
    assert_eq!(
        shipped,
        expected,
        "{} differs from its generator; run with QHL_REGEN_CORPUS=1 after intentional changes",
        path.display()
    );
}

#[test]
fn grover_matrix_file_is_frozen() {
    check_or_regen("grover_n4/matrices.qmat", grover_matrices());
}

#[test]
fn qpe_matrix_files_are_frozen() {
    for (k, name) in [
        (0, "qpe_n2/phi_00.qmat"),
        (1, "qpe_n2/phi_01.qmat"),
        (2, "qpe_n2/phi_10.qmat"),
        (3, "qpe_n2/phi_11.qmat"),
    ] {
        check_or_regen(name, qpe_matrices(k));
    }
}

#[test]
fn grover_loop_pre_golden_is_frozen() {
    check_or_regen("grover_n4/grover_loop_pre.golden", grover_loop_pre_content());
}

/// The golden loop precondition double-checked against a fully
/// independent construction: the exit branch keeps the marked
/// projector on counter value 1, the continue branch keeps the
/// invariant on counter value 0.
#[test]
fn grover_loop_pre_matches_independent_construction() {
    let golden =
        std::fs::read_to_string(corpus_root().join("grover_n4/grover_loop_pre.golden")).unwrap();
    let table = parse_matrix_file(&golden).unwrap();
    let AnyMatrix::Exact(shipped) = table.get("LOOP_PRE").unwrap() else {
        panic!("golden must be exact");
    };
    let i2 = Matrix::<Cyclotomic>::identity(2);
    let exit = Matrix::<Cyclotomic>::basis_proj(4, MARKED)
        .tensor(&i2)
        .tensor(&Matrix::basis_proj(2, 1));
    let stay = uniform4().tensor(&i2).tensor(&Matrix::basis_proj(2, 0));
    let expected = exit.add(&stay).unwrap();
    assert_eq!(*shipped, expected);
}

/// Sanity: the shipped files parse and validate on the exact
/// backend.
#[test]
fn corpus_files_validate() {
    let root = corpus_root();
    for (prog, mats) in [
        ("grover_n4/program.qhl", vec!["grover_n4/matrices.qmat"]),
        (
            "qpe_n2/program.qhl",
            vec![
                "qpe_n2/phi_00.qmat",
                "qpe_n2/phi_01.qmat",
                "qpe_n2/phi_10.qmat",
                "qpe_n2/phi_11.qmat",
            ],
        ),
        (
            "qpe_n2/stage1.qhl",
            vec![
                "qpe_n2/phi_00.qmat",
                "qpe_n2/phi_01.qmat",
                "qpe_n2/phi_10.qmat",
                "qpe_n2/phi_11.qmat",
            ],
        ),
    ] {
        let p = parse_program(&std::fs::read_to_string(root.join(prog)).unwrap())
            .unwrap_or_else(|e| panic!("{prog}: {e}"));
        for m in mats {
            let t = parse_matrix_file(&std::fs::read_to_string(root.join(m)).unwrap())
                .unwrap_or_else(|e| panic!("{m}: {e}"));
            let model = validate(&p, &t, BackendChoice::Exact, 1e-9)
                .unwrap_or_else(|e| panic!("{prog} + {m}: {e}"));
            assert!(matches!(model, Model::Exact(_)));
        }
    }
}

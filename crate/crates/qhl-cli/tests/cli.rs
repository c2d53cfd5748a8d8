//! End-to-end CLI behavior: exit codes, JSON schema stability,
//! determinism, parallel discharge, and input-error handling.

use qhl::wlp::JsonReport;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn qhl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhl"))
        .args(args)
        .env_remove("QHL_COLOR")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Zeroes out the only run-dependent field, textually, so key order
/// and layout stay exactly as emitted.
fn normalize(json: &str) -> String {
    json.lines()
        .map(|line| {
            if let Some(idx) = line.find("\"wall_time_ms\": ") {
                let (head, _) = line.split_at(idx);
                format!("{head}\"wall_time_ms\": 0")
            } else {
                line.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn tmp_file(name: &str, content: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qhl-cli-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, content).unwrap();
    p
}

#[test]
fn unit_corpus_verifies_with_documented_exit_codes() {
    for prog in [
        "skip", "init", "unitary", "seq", "measure", "while", "while_n",
    ] {
        let p = corpus().join(format!("unit/{prog}.qhl"));
        let m = corpus().join("unit/matrices.qmat");
        let out = qhl(&[
            "verify",
            p.to_str().unwrap(),
            "--matrices",
            m.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{prog}: {}", stdout(&out));
        assert!(stdout(&out).contains("verdict: verified"), "{prog}");
    }
}

#[test]
fn json_report_schema_is_stable() {
    let p = corpus().join("unit/skip.qhl");
    let m = corpus().join("unit/matrices.qmat");
    let out = qhl(&[
        "verify",
        p.to_str().unwrap(),
        "--matrices",
        m.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let expected = r#"{
  "program": "unit_skip",
  "verdict": "verified",
  "vcs": [
    {
      "origin": "ord_wlp at top level",
      "verdict": "true"
    }
  ],
  "backend": "exact",
  "wall_time_ms": 0
}"#;
    assert_eq!(normalize(&stdout(&out)), expected);

    // Parse → emit → parse is the identity.
    let parsed: JsonReport = serde_json::from_str(&stdout(&out)).unwrap();
    let emitted = serde_json::to_string_pretty(&parsed).unwrap();
    let reparsed: JsonReport = serde_json::from_str(&emitted).unwrap();
    assert_eq!(parsed, reparsed);
}

#[test]
fn verify_twice_is_byte_identical_and_jobs_invariant() {
    let dir = corpus().join("grover_n4");
    let run = |jobs: &str| {
        let out = qhl(&[
            "verify",
            dir.to_str().unwrap(),
            "--backend",
            "exact",
            "--json",
            "--jobs",
            jobs,
        ]);
        assert_eq!(out.status.code(), Some(0));
        normalize(&stdout(&out))
    };
    let a = run("1");
    let b = run("1");
    let c = run("4");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn refuted_inputs_exit_1() {
    let p = tmp_file(
        "refuted.qhl",
        "program refuted vars q: qubit; pre I2; post P0; body skip",
    );
    let m = corpus().join("unit/matrices.qmat");
    let out = qhl(&[
        "verify",
        p.to_str().unwrap(),
        "--matrices",
        m.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: refuted"));
}

#[test]
fn float_ambiguity_band_exits_2() {
    // skip with pre − post having λ_min = −5e-9: inside the
    // (−10·tol, −tol) band at the default tol = 1e-9.
    let p = tmp_file(
        "band.qhl",
        "program band vars q: qubit; pre A; post B; body skip",
    );
    let m = tmp_file(
        "band.qmat",
        "A = [[0.500000005, 0],[0, 0.5]]\nB = [[0.5, 0],[0, 0.5]]\n",
    );
    let out = qhl(&[
        "verify",
        p.to_str().unwrap(),
        "--matrices",
        m.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("verdict: unknown"), "{}", stdout(&out));
    assert!(stdout(&out).contains("ambiguity band"), "{}", stdout(&out));
    // A wider tolerance resolves it.
    let out = qhl(&[
        "verify",
        p.to_str().unwrap(),
        "--matrices",
        m.to_str().unwrap(),
        "--tol",
        "1e-7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn input_errors_exit_3() {
    // Missing file.
    let out = qhl(&["verify", "/nonexistent/prog.qhl"]);
    assert_eq!(out.status.code(), Some(3));
    // Syntax error with a position.
    let p = tmp_file("syntax.qhl", "program t vars q:qubit; pre P; post P; body q := U[q");
    let m = corpus().join("unit/matrices.qmat");
    let out = qhl(&[
        "verify",
        p.to_str().unwrap(),
        "--matrices",
        m.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("line 1"), "{err}");
    // Validation failure (incomplete loop measurement pair).
    let p = tmp_file(
        "badloop.qhl",
        "program t vars q: qubit; pre I2; post I2; \
         body while M0, M0 [q] invariant Inv { skip }",
    );
    let out = qhl(&[
        "verify",
        p.to_str().unwrap(),
        "--matrices",
        m.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
}

#[test]
fn directory_argument_fans_out_over_matrix_files() {
    let out = qhl(&[
        "verify",
        corpus().join("qpe_n2").to_str().unwrap(),
        "--backend",
        "exact",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = v.as_array().expect("array of reports");
    assert_eq!(arr.len(), 4);
    for r in arr {
        assert_eq!(r["verdict"], "verified");
    }
}

#[test]
fn color_is_opt_in() {
    let dir = corpus().join("unit");
    let plain = qhl(&[
        "verify",
        dir.join("skip.qhl").to_str().unwrap(),
        "--matrices",
        dir.join("matrices.qmat").to_str().unwrap(),
    ]);
    assert!(!stdout(&plain).contains("\x1b["));
    let colored = Command::new(env!("CARGO_BIN_EXE_qhl"))
        .args([
            "verify",
            dir.join("skip.qhl").to_str().unwrap(),
            "--matrices",
            dir.join("matrices.qmat").to_str().unwrap(),
        ])
        .env("QHL_COLOR", "1")
        .output()
        .unwrap();
    assert!(stdout(&colored).contains("\x1b[32m"));
}

#[test]
fn simulate_accepts_basis_state_shorthand() {
    let dir = corpus().join("unit");
    let out = qhl(&[
        "simulate",
        dir.join("seq.qhl").to_str().unwrap(),
        "--matrices",
        dir.join("matrices.qmat").to_str().unwrap(),
        "--state",
        "|1>",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    // X then H on |1⟩ lands on |+⟩ — full overlap with the
    // postcondition projector.
    assert_eq!(v["trace"], 1.0);
    assert_eq!(v["post_expectation"], 1.0);
    // Malformed states are input errors.
    let out = qhl(&[
        "simulate",
        dir.join("seq.qhl").to_str().unwrap(),
        "--matrices",
        dir.join("matrices.qmat").to_str().unwrap(),
        "--state",
        "|27>",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn wlp_term_view_nests_first_statement_outermost() {
    let out = qhl(&[
        "wlp",
        corpus().join("grover_n4").to_str().unwrap(),
        "--show",
        "term",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.starts_with("(matsum q0 0"), "{s}");
    assert!(s.contains("(fixpoint_wlp M0 M1 Q"), "{s}");
    assert!(s.contains("(mat_mult (mat_mult (dag N_3) Post) N_3)"), "{s}");
    assert!(s.contains("zero"), "{s}");
}

#[test]
fn wlp_matrix_view_prints_parseable_matrix() {
    let dir = corpus().join("unit");
    let out = qhl(&[
        "wlp",
        dir.join("unitary.qhl").to_str().unwrap(),
        "--matrices",
        dir.join("matrices.qmat").to_str().unwrap(),
        "--show",
        "matrix",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let printed = format!("W = {}", stdout(&out));
    let table = qhl::lang::parse_matrix_file(&printed).unwrap();
    // wlp(q := H[q], |+⟩⟨+|) = |0⟩⟨0|.
    match table.get("W").unwrap() {
        qhl::lang::AnyMatrix::Exact(m) => {
            assert_eq!(*m, qhl::matrix::Matrix::basis_proj(2, 0));
        }
        _ => panic!("expected exact"),
    }
}

#[test]
fn float_backend_verifies_both_case_studies() {
    for dir in ["grover_n4", "qpe_n2"] {
        let out = qhl(&[
            "verify",
            corpus().join(dir).to_str().unwrap(),
            "--backend",
            "float",
        ]);
        assert_eq!(out.status.code(), Some(0), "{dir}: {}", stdout(&out));
    }
}

/// A verified triple also holds pointwise: the search case study
/// sampled on random input states through the float evaluator.
#[test]
fn verified_search_triple_holds_on_sampled_states() {
    use qhl::lang::{parse_matrix_file, parse_program, validate, BackendChoice, Model};
    use qhl::semantics::{triple_holds_on, EvalOptions};
    let p = parse_program(
        &std::fs::read_to_string(corpus().join("grover_n4/program.qhl")).unwrap(),
    )
    .unwrap();
    let t = parse_matrix_file(
        &std::fs::read_to_string(corpus().join("grover_n4/matrices.qmat")).unwrap(),
    )
    .unwrap();
    let model = match validate(&p, &t, BackendChoice::Float, 1e-9).unwrap() {
        Model::Float(m) => m,
        Model::Exact(_) => unreachable!(),
    };
    let mut r = qhl::sampling::rng(42);
    let opts = EvalOptions::default();
    for _ in 0..20 {
        let rho = qhl::sampling::random_density_float(&mut r, 16);
        assert!(triple_holds_on(
            model.pre(),
            &model.program.body,
            model.post(),
            &rho,
            &model.ctx,
            &model.symbols,
            &opts,
            1e-9,
        )
        .unwrap());
    }
}

#[test]
fn check_matrices_reports_gate_properties() {
    let dir = corpus().join("unit");
    let out = qhl(&[
        "check-matrices",
        dir.join("skip.qhl").to_str().unwrap(),
        "--matrices",
        dir.join("matrices.qmat").to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let find = |name: &str| {
        v.as_array()
            .unwrap()
            .iter()
            .find(|o| o["name"] == name)
            .unwrap()
            .clone()
    };
    let h = find("H");
    assert_eq!(h["hermitian"], true);
    assert_eq!(h["unitary"], true);
    assert_eq!(h["predicate"], false);
    let p = find("P");
    assert_eq!(p["unitary"], false);
    assert_eq!(p["predicate"], true);
}

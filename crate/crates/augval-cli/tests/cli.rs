//! End-to-end checks of the command-line surface and its exit-code
//! contract: 0 pass, 1 semantic mismatch, 2 input error, 3 inconclusive.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(file: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(file)
        .to_str()
        .unwrap()
        .to_string()
}

fn augval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_augval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn catalog(name: &str) -> String {
    format!("{}#{name}", data("catalog.json"))
}

#[test]
fn eval_prints_exact_values() {
    let out = augval(&[
        "eval",
        "--chain",
        &catalog("monomial-half"),
        "--poly",
        &data("poly-x2p2.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "1");

    let out = augval(&[
        "eval-l",
        "--chain",
        &catalog("monomial-half"),
        "--ratfn",
        &data("ratfn-inv-x.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "-1/2");
}

#[test]
fn malformed_gamma_is_an_input_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("bad.json");
    fs::write(
        &chain,
        r#"{"field": {"valuation": {"type": "p-adic", "p": "2"}},
            "steps": [{"phi": ["0","1"], "gamma": "one-half"}]}"#,
    )
    .unwrap();
    let out = augval(&[
        "eval",
        "--chain",
        chain.to_str().unwrap(),
        "--poly",
        &data("poly-x2p2.json"),
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("one-half"), "stderr was: {err}");
}

#[test]
fn validate_reports_violations() {
    let out = augval(&["validate", "--chain", &catalog("quadratic")]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "ok");

    let dir = tempfile::tempdir().unwrap();
    let chain = dir.path().join("bad.json");
    fs::write(
        &chain,
        r#"{"field": {"valuation": {"type": "p-adic", "p": "2"}},
            "steps": [{"phi": ["0","1"], "gamma": "1/2"},
                      {"phi": ["2","0","1"], "gamma": "1/2"}]}"#,
    )
    .unwrap();
    let out = augval(&["validate", "--chain", chain.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("gamma not strictly above previous value"));
}

#[test]
fn compare_passes_on_the_catalog_and_fails_on_corruption() {
    let out = augval(&[
        "compare",
        "--chain",
        &catalog("quadratic"),
        "--map",
        &catalog("inv"),
        "--samples",
        "60",
        "--seed",
        "42",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(stdout(&out).contains("verdict: pass"));

    // corrupted transported chain: last value perturbed by 1
    let dir = tempfile::tempdir().unwrap();
    let corrupted = dir.path().join("corrupted.json");
    fs::write(
        &corrupted,
        r#"{"field": {"valuation": {"type": "p-adic", "p": "2"}},
            "variable": "y",
            "steps": [{"phi": ["0","1"], "gamma": "-1/2"},
                      {"phi": ["1/2","0","1"], "gamma": "1"}]}"#,
    )
    .unwrap();
    let out = augval(&[
        "compare",
        "--chain",
        &catalog("quadratic"),
        "--map",
        &catalog("inv"),
        "--transported",
        corrupted.to_str().unwrap(),
        "--samples",
        "60",
        "--seed",
        "42",
    ]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("verdict: fail"));
}

#[test]
fn compare_rejects_singular_maps() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("singular.json");
    fs::write(&map, r#"{"a": "2", "b": "4", "c": "1", "d": "2"}"#).unwrap();
    let out = augval(&[
        "compare",
        "--chain",
        &catalog("quadratic"),
        "--map",
        map.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn compare_output_is_deterministic_and_parallel_invariant() {
    let run = |extra: &[&str]| {
        let mut args = vec![
            "compare",
            "--chain",
            &*Box::leak(catalog("cubic").into_boxed_str()),
            "--map",
            &*Box::leak(catalog("inv").into_boxed_str()),
            "--samples",
            "40",
            "--seed",
            "7",
        ];
        args.extend_from_slice(extra);
        let out = augval(&args);
        assert_eq!(code(&out), 0);
        stdout(&out)
    };
    let serial = run(&[]);
    let again = run(&[]);
    let parallel = run(&["--parallel"]);
    assert_eq!(serial, again);
    assert_eq!(serial, parallel);
}

#[test]
fn transport_writes_a_round_trippable_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path: PathBuf = dir.path().join("report.json");
    let out = augval(&[
        "transport",
        "--chain",
        &catalog("quadratic"),
        "--map",
        &catalog("inv"),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(report["verdict"]["status"], "pass");
    // the emitted transported chain re-parses and evaluates identically
    let transported = dir.path().join("transported.json");
    fs::write(&transported, report["transported"].to_string()).unwrap();
    let out = augval(&[
        "eval",
        "--chain",
        transported.to_str().unwrap(),
        "--poly",
        &data("poly-x2p2.json"),
    ]);
    assert_eq!(code(&out), 0);
    // value of y^2 + 2 under the transported chain: digits (3/2, 1) at key
    // y^2 + 1/2 give min(v(3/2), 0 + 0) = -1
    assert_eq!(stdout(&out).trim(), "-1");
}

#[test]
fn limit_subcommands_follow_the_exit_contract() {
    let out = augval(&[
        "limit",
        "stabilize",
        "--family",
        &catalog("geometric"),
        "--poly",
        &data("poly-x.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("1, stabilized"));

    let out = augval(&[
        "limit",
        "stabilize",
        "--family",
        &catalog("geometric"),
        "--poly",
        &data("poly-xp2.json"),
    ]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).contains("non-stabilized at horizon"));

    let out = augval(&[
        "limit",
        "eval",
        "--family",
        &catalog("pseudo-limit"),
        "--poly",
        &data("poly-x2p4.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "3");

    let out = augval(&[
        "limit",
        "witness",
        "--family",
        &catalog("geometric"),
        "--phi",
        &data("poly-xp2.json"),
        "--poly",
        &data("poly-x2p4.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("not eventually divisible"));

    // the product (x+2)*x is inconclusive at the horizon
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("prod.json");
    fs::write(&f, r#"["0", "2", "1"]"#).unwrap();
    let out = augval(&[
        "limit",
        "witness",
        "--family",
        &catalog("geometric"),
        "--phi",
        &data("poly-xp2.json"),
        "--poly",
        f.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn refine_and_degree_one_probes() {
    let out = augval(&[
        "refine",
        "--target",
        &catalog("quadratic"),
        "--chain",
        &catalog("monomial-half"),
        "--candidates",
        &data("candidates.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("minimal member degree: 2"));

    let out = augval(&[
        "probe-degree-one",
        "--chain",
        &catalog("quadratic"),
        "--candidates",
        &data("shifts.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("correspondence: yes"));
}

#[test]
fn catalog_selector_errors_are_helpful() {
    let out = augval(&[
        "eval",
        "--chain",
        &data("catalog.json"),
        "--poly",
        &data("poly-x2p2.json"),
    ]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("select an entry"), "stderr: {err}");
    assert!(err.contains("quadratic"), "stderr: {err}");

    let out = augval(&[
        "eval",
        "--chain",
        &catalog("nope"),
        "--poly",
        &data("poly-x2p2.json"),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn expand_prints_digits() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("f.json");
    fs::write(&f, r#"["0", "0", "0", "1"]"#).unwrap();
    let out = augval(&[
        "expand",
        "--poly",
        f.to_str().unwrap(),
        "--phi",
        &data("poly-x2p2.json"),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), r#"[["0","-2"],["0","1"]]"#);
}

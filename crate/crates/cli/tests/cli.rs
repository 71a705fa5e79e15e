use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_shintani");

fn run(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(BIN)
        .args(args)
        .env_remove("SHINTANI_SUBSET_CAP")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn shintani");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn stderr_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr is empty");
    serde_json::from_str(line).unwrap()
}

#[test]
fn analyze_matches_golden_outputs() {
    let cases = [
        ("1 1\n1 1\n", include_str!("golden/analyze_2x2_ones.json")),
        (
            "1 0 0\n1 1 1\n0 1 0\n",
            include_str!("golden/analyze_3x3.json"),
        ),
    ];
    for (matrix, golden) in cases {
        let out = run(&["-q", "analyze", "-"], matrix);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
        assert!(out.stderr.is_empty());
    }
}

#[test]
fn analyze_accepts_json_and_file_paths() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, r#"{{"rows":2,"cols":2,"entries":[[1,1],[1,1]]}}"#).unwrap();
    let out = run(&["-q", "analyze", file.path().to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        include_str!("golden/analyze_2x2_ones.json")
    );
}

#[test]
fn analyze_summary_goes_to_stderr_unless_quiet() {
    let loud = run(&["analyze", "-"], "1 1\n1 1\n");
    assert!(String::from_utf8_lossy(&loud.stderr).contains("s1 + s2 = 2 - l, l >= 0"));
    let quiet = run(&["--quiet", "analyze", "-"], "1 1\n1 1\n");
    assert!(quiet.stderr.is_empty());
    assert_eq!(loud.stdout, quiet.stdout);
}

#[test]
fn analyze_skeleton_agrees() {
    let out = run(
        &["-q", "analyze", "--skeleton", "-"],
        "2 0 0\n0.5 3 1\n0 7 0\n",
    );
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["skeleton_matches"], true);
    assert_eq!(
        v["skeleton"]["entries"][1],
        serde_json::json!([1.0, 1.0, 1.0])
    );
    assert_eq!(v["report"], v["skeleton_report"]);
}

#[test]
fn analyze_rejects_invalid_matrices() {
    let out = run(&["-q", "analyze", "-"], "0 0\n1 1\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = stderr_json(&out);
    assert_eq!(err["error"], "ZeroRow");
    assert_eq!(err["row"], 1);

    let out = run(&["-q", "analyze", "-"], "1 -1\n1 1\n");
    assert_eq!(stderr_json(&out)["error"], "NegativeEntry");
    let out = run(&["-q", "analyze", "/nonexistent/matrix.txt"], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn subset_cap_comes_from_the_environment() {
    let out = Command::new(BIN)
        .args(["-q", "analyze", "-"])
        .env("SHINTANI_SUBSET_CAP", "1")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .and_then(|mut c| {
            c.stdin.take().unwrap().write_all(b"1 1\n1 1\n")?;
            c.wait_with_output()
        })
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "SubsetCapExceeded");
}

#[test]
fn verify_passes_and_is_deterministic() {
    for matrix in ["1 0\n1 1\n", "1 1\n1 1\n"] {
        let a = run(
            &["-q", "verify", "--samples", "1000", "--seed", "7", "-"],
            matrix,
        );
        assert_eq!(a.status.code(), Some(0));
        let v = stdout_json(&a);
        assert_eq!(v["pass"], true);
        assert_eq!(v["subsets"].as_array().unwrap().len(), 3);
        let b = run(
            &["-q", "verify", "--samples", "1000", "--seed", "7", "-"],
            matrix,
        );
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn verify_halfspace_against_itself_passes() {
    let out = run(
        &[
            "-q",
            "verify",
            "--samples",
            "50",
            "--oracle",
            "halfspace",
            "-",
        ],
        "1 0\n1 1\n",
    );
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn verify_rejects_too_many_columns() {
    let row = vec!["1"; 25].join(" ");
    let out = run(&["-q", "verify", "-"], &format!("{row}\n"));
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "SubsetCapExceeded");
}

#[test]
fn decompose_worked_instance() {
    let inst =
        r#"{"n":6,"sets":[[2,3],[1,4,6],[1,5],[6],[3,4,5]],"sigma":[1.9,0.6,0.6,0.8,0.2,1.4]}"#;
    for alg in ["graph", "flow"] {
        let out = run(&["-q", "decompose", "--algorithm", alg, "-"], inst);
        assert_eq!(out.status.code(), Some(0), "{alg}");
        let parts = stdout_json(&out)["parts"].as_array().unwrap().clone();
        assert_eq!(parts.len(), 5);
        let sigma = [1.9, 0.6, 0.6, 0.8, 0.2, 1.4];
        for (i, s) in sigma.iter().enumerate() {
            let total: f64 = parts.iter().map(|p| p[i].as_f64().unwrap()).sum();
            assert!((total - s).abs() < 1e-9);
        }
    }
}

#[test]
fn decompose_single_set_echoes_sigma() {
    let out = run(
        &["-q", "decompose", "-"],
        r#"{"n":2,"sets":[[1,2]],"sigma":[0.25,3.5]}"#,
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["parts"], serde_json::json!([[0.25, 3.5]]));
}

#[test]
fn decompose_infeasible_exits_3_with_payload() {
    let out = run(
        &["-q", "decompose", "-"],
        r#"{"n":1,"sets":[[1],[1]],"sigma":[1.5]}"#,
    );
    assert_eq!(out.status.code(), Some(3));
    let payload = stdout_json(&out);
    assert_eq!(payload["error"], "InfeasibleInstance");
    assert_eq!(payload["violating_K"], serde_json::json!([1, 2]));
    assert_eq!(payload, stderr_json(&out));
}

#[test]
fn decompose_unknown_algorithm() {
    let out = run(
        &["-q", "decompose", "--algorithm", "greedy", "-"],
        r#"{"n":1,"sets":[[1]],"sigma":[1]}"#,
    );
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "UnknownStrategy");
}

#[test]
fn eval_riemann_and_euler_values() {
    let out = run(&["-q", "eval", "--s", "2", "-"], "1\n");
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let z2 = std::f64::consts::PI.powi(2) / 6.0;
    assert!((v["value"]["re"].as_f64().unwrap() - z2).abs() < 1e-7);
    assert_eq!(v["converged"], true);

    let out = run(&["-q", "eval", "--s", "1,2", "-"], "1 0\n1 1\n");
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["value"]["re"].as_f64().unwrap() - 1.2020569031595942).abs() < 1e-7);
}

#[test]
fn eval_complex_argument() {
    let out = run(&["-q", "eval", "--s", "2", "--s-imag", "1", "-"], "1\n");
    let v = stdout_json(&out);
    assert!((v["value"]["re"].as_f64().unwrap() - 1.1503557032549).abs() < 1e-9);
    assert!((v["value"]["im"].as_f64().unwrap() + 0.4375308659196).abs() < 1e-9);
}

#[test]
fn eval_flags_non_convergence_without_failing() {
    let out = run(
        &[
            "eval",
            "--s",
            "1.1",
            "--max-terms",
            "8",
            "--tail",
            "truncate",
            "-",
        ],
        "1\n",
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["converged"], false);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn eval_outside_region_names_the_constraint() {
    let out = run(&["-q", "eval", "--s", "0.5,1.0", "-"], "1 1\n1 1\n");
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "OutsideConvergenceRegion");
    assert_eq!(err["constraint"], "σ₁+σ₂>2");
}

#[test]
fn eval_dimension_mismatch() {
    let out = run(&["-q", "eval", "--s", "2,2,2", "-"], "1 0\n1 1\n");
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "DimensionMismatch");
}

#[test]
fn mellin_check_output() {
    let out = run(&["-q", "mellin-check", "--s", "3"], "");
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["abs_diff"].as_f64().unwrap() < 1e-6);
    assert!((v["lhs"].as_f64().unwrap() - 2.4041138063192).abs() < 1e-9);

    let out = run(&["-q", "mellin-check", "--s", "0.5"], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn emitted_json_round_trips() {
    use shintani_core::wire::{EvalResultJson, PoleReportJson};
    let out = run(&["-q", "analyze", "-"], "1 0 0\n1 1 1\n0 1 0\n");
    let rep: PoleReportJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        serde_json::to_string(&rep).unwrap() + "\n",
        String::from_utf8(out.stdout).unwrap()
    );
    let out = run(&["-q", "eval", "--s", "2.5,3", "-"], "1 0\n1 1\n");
    let r: EvalResultJson = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        serde_json::to_string(&r).unwrap() + "\n",
        String::from_utf8(out.stdout).unwrap()
    );
}

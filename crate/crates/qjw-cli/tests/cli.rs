//! Exit-code and output contract of the binary.

use serde_json::Value;
use std::process::Command;

fn run(args: &[&str]) -> (Option<i32>, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qjw"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn reports(args: &[&str]) -> (Option<i32>, Vec<Value>) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let (code, stdout, _) = run(&full);
    (code, serde_json::from_str(&stdout).expect("json reports"))
}

#[test]
fn verify_reports_theorem_claims() {
    let (code, reports) = reports(&["verify", "--n", "2", "--depth", "3"]);
    assert_eq!(code, Some(0));
    let claims: Vec<&str> = reports
        .iter()
        .map(|r| r["claim"].as_str().unwrap())
        .collect();
    assert_eq!(
        claims,
        [
            "ejw[2].idempotent",
            "ejw[2].ev[1]",
            "ejw[2].coev[1]",
            "ejw[2].tower (derived)",
            "ejw[2].trace_rank (derived)",
        ]
    );
}

#[test]
fn verify_jw_reports_seven_claims_at_n4() {
    let (code, reports) = reports(&["verify", "--jw", "--n", "4"]);
    assert_eq!(code, Some(0));
    assert_eq!(reports.len(), 7);
    assert!(reports.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["verify", "--n", "0"],
        vec!["verify", "--depth", "-1"],
        vec!["prove", "--target", "bogus"],
        vec!["op", "nonsense"],
        vec!["op", "e", "--n", "3", "--i", "9"],
        vec!["specialize", "--q0", "1", "--mu0", "20"],
        vec!["specialize", "--q0", "0", "--mu0", "20"],
        vec!["specialize", "--q0", "3/2", "--mu0", "3"],
        vec!["specialize", "--n", "2", "--depth", "2"],
        vec!["specialize", "--q0", "elephant", "--mu0", "20"],
        vec!["no-such-command"],
    ] {
        let (code, _, stderr) = run(&args);
        assert_eq!(code, Some(2), "args {args:?} should be a usage error");
        assert!(!stderr.is_empty(), "usage error must explain itself");
    }
}

#[test]
fn prove_all_is_nine_reports() {
    let (code, all) = reports(&["prove", "--all"]);
    assert_eq!(code, Some(0));
    assert_eq!(all.len(), 9);
    let (code, default_run) = reports(&["prove"]);
    assert_eq!(code, Some(0));
    assert_eq!(default_run.len(), 9);
}

#[test]
fn prove_single_target_and_generator() {
    let (code, single) = reports(&["prove", "--target", "F_mu", "--gen", "E"]);
    assert_eq!(code, Some(0));
    assert_eq!(single.len(), 1);
    assert_eq!(single[0]["claim"], "prove.F_mu.E");
    let (code, per_target) = reports(&["prove", "--target", "E_mu"]);
    assert_eq!(code, Some(0));
    assert_eq!(per_target.len(), 3);
}

#[test]
fn specialize_at_fixed_point_passes() {
    let (code, reports) = reports(&[
        "specialize",
        "--n",
        "2",
        "--depth",
        "3",
        "--q0",
        "3/2",
        "--mu0",
        "20",
    ]);
    assert_eq!(code, Some(0));
    assert!(reports.iter().all(|r| r["status"] == "pass"));
}

#[test]
fn jw_export_covers_the_full_four_dimensional_space() {
    let (code, stdout, _) = run(&["jw", "--n", "2"]);
    assert_eq!(code, Some(0));
    let blocks: Vec<Value> = serde_json::from_str(&stdout).unwrap();
    assert_eq!(blocks.len(), 3);
    let total_cols: usize = blocks
        .iter()
        .map(|b| b["cols"].as_array().unwrap().len())
        .sum();
    assert_eq!(total_cols, 4);
}

#[test]
fn op_export_resolves_padded_and_primitive_names() {
    let (code, stdout, _) = run(&["op", "ev", "--n", "2", "--i", "1"]);
    assert_eq!(code, Some(0));
    let blocks: Vec<Value> = serde_json::from_str(&stdout).unwrap();
    assert_eq!(blocks[0]["domain"]["tail"].as_array().unwrap().len(), 2);
    assert!(blocks[0]["domain"]["verma_shift"].is_i64());
    let (code, stdout, _) = run(&["op", "ev", "--n", "2"]);
    assert_eq!(code, Some(0));
    let blocks: Vec<Value> = serde_json::from_str(&stdout).unwrap();
    assert!(blocks[0]["domain"]["verma_shift"].is_null());
    let (code, stdout, _) = run(&["op", "E_tower[2]", "--n", "2", "--depth", "2"]);
    assert_eq!(code, Some(0));
    let blocks: Vec<Value> = serde_json::from_str(&stdout).unwrap();
    assert_eq!(blocks[0]["codomain"]["verma_shift"], 2);
}

#[test]
fn unwritable_output_path_exits_3() {
    let (code, _, stderr) = run(&["jw", "--n", "1", "--out", "/nonexistent-dir/x.json"]);
    assert_eq!(code, Some(3));
    assert!(stderr.contains("cannot write"));
}

#[test]
fn pretty_format_is_line_per_claim() {
    let (code, stdout, _) = run(&["verify", "--n", "1", "--depth", "2"]);
    assert_eq!(code, Some(0));
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.starts_with("PASS  ")));
}

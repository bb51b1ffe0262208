//! Acceptance suite: one test per shipped claim, each printing a single
//! pass/fail line (visible with `cargo test --test acceptance -- --nocapture`).

use qjw::maps::{BlockedMap, CheckMode};
use qjw::operators::{e_tower, f_tower, named_operators, tower_normalizer};
use qjw::projectors::{ejw, verify_jw, verify_lemmas, verify_theorem};
use qjw::prover::{prove_all, verify_agreement};
use qjw::repmod::ModuleShape;
use qjw::report::{all_pass, VerificationReport};
use qjw::scalar::{Rational, Scalar};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::process::Command;

fn record(num: u32, name: &str, ok: bool, detail: &str) {
    println!(
        "acceptance {num:02} {name}: {}",
        if ok { "pass" } else { "FAIL" }
    );
    assert!(ok, "criterion {num} ({name}) failed: {detail}");
}

fn failing(reports: &[VerificationReport]) -> String {
    reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| r.pretty())
        .collect::<Vec<_>>()
        .join("; ")
}

#[test]
fn criterion_01_classical_jw_suite() {
    let mut reports = Vec::new();
    for n in 1..=6 {
        reports.extend(verify_jw(n, &CheckMode::Exact, None));
    }
    record(
        1,
        "classical jw suite n=1..6",
        all_pass(&reports),
        &failing(&reports),
    );
}

#[test]
fn criterion_02_extended_projector_suite() {
    let mut reports = Vec::new();
    for n in 1..=4 {
        reports.extend(verify_theorem(n, 6, &CheckMode::Exact, None));
    }
    record(
        2,
        "extended projector suite n=1..4 depth 6",
        all_pass(&reports),
        &failing(&reports),
    );
}

#[test]
fn criterion_03_structural_lemma_suite() {
    let reports = verify_lemmas(8, &CheckMode::Exact, None);
    record(
        3,
        "structural lemmas depth 8",
        all_pass(&reports),
        &failing(&reports),
    );
}

#[test]
fn criterion_04_symbolic_prover_suite() {
    let reports = prove_all(None);
    let nine = reports.len() == 9;
    let agreement = verify_agreement(&[0, 1, 2, 3, 4, 5, 6, 7, 8]);
    let ok = nine && all_pass(&reports) && all_pass(&agreement);
    let detail = format!(
        "{} reports; {}; {}",
        reports.len(),
        failing(&reports),
        failing(&agreement)
    );
    record(4, "symbolic prover suite + agreement i0=0..8", ok, &detail);
}

#[test]
fn criterion_05_tower_identity() {
    let mut ok = true;
    let mut detail = String::new();
    for n in 1..=4usize {
        let ef = e_tower(n).compose(&f_tower(n)).expect("towers compose");
        let expected =
            BlockedMap::identity(&ModuleShape::verma(n as i64)).scale(&tower_normalizer(n));
        if let Some(d) = ef
            .first_difference(&expected, 6, &CheckMode::Exact)
            .expect("exact comparison")
        {
            ok = false;
            detail = format!("n={n} differs at level {} vector {}", d.level, d.vector);
            break;
        }
    }
    record(5, "tower identity n=1..4 depth 6", ok, &detail);
}

#[test]
fn criterion_06_projector_block_diagnostics() {
    let mut ok = true;
    let mut detail = String::new();
    'outer: for n in 1..=4usize {
        let p = ejw(n);
        for level in 0..=6 {
            let trace = p.block_trace(level);
            let rank = p.block_rank(level);
            if trace != Scalar::one() || rank != 1 {
                ok = false;
                detail = format!("ejw({n}) level {level}: trace {trace}, rank {rank}");
                break 'outer;
            }
        }
    }
    record(6, "ejw blocks have trace 1 and rank 1", ok, &detail);
}

#[test]
fn criterion_07_intertwiner_audit() {
    let mut ok = true;
    let mut detail = String::new();
    'outer: for n in 1..=3usize {
        for (name, map) in named_operators(n) {
            if let Some(f) = map.check_intertwiner(6) {
                ok = false;
                detail = format!(
                    "{name} (n={n}) fails for {} at level {}",
                    f.generator, f.level
                );
                break 'outer;
            }
        }
    }
    record(7, "named operators intertwine at depth 6", ok, &detail);
}

fn draw_specialization(rng: &mut ChaCha8Rng) -> (Rational, i64) {
    let q0 = loop {
        let num: i64 = rng.gen_range(-9..=9);
        let den: i64 = rng.gen_range(1..=9);
        if num != 0 && num.abs() != den {
            break Rational::new(num.into(), den.into());
        }
    };
    (q0, rng.gen_range(20..=30))
}

#[test]
fn criterion_08_seeded_specialization_cross_check() {
    let mut ok = true;
    let mut detail = String::new();
    'outer: for seed in [11u64, 23, 37, 58, 94] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (q0, mu0) = draw_specialization(&mut rng);
        let mode = CheckMode::Specialized {
            q0: q0.clone(),
            mu0,
        };
        let mut reports = Vec::new();
        for n in 1..=6 {
            reports.extend(verify_jw(n, &mode, None));
        }
        for n in 1..=4 {
            reports.extend(verify_theorem(n, 6, &mode, None));
        }
        reports.extend(verify_lemmas(8, &mode, None));
        if !all_pass(&reports) {
            ok = false;
            detail = format!("seed {seed} (q0={q0}, mu0={mu0}): {}", failing(&reports));
            break 'outer;
        }
        for n in 1..=4usize {
            let ef = e_tower(n).compose(&f_tower(n)).expect("towers compose");
            let expected =
                BlockedMap::identity(&ModuleShape::verma(n as i64)).scale(&tower_normalizer(n));
            if ef
                .first_difference(&expected, 6, &mode)
                .expect("specialized comparison")
                .is_some()
            {
                ok = false;
                detail = format!("seed {seed} (q0={q0}, mu0={mu0}): tower n={n}");
                break 'outer;
            }
        }
    }
    record(
        8,
        "five seeded specializations of suites 1-3,5",
        ok,
        &detail,
    );
}

fn run_cli(args: &[&str], envs: &[(&str, &str)]) -> (Option<i32>, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qjw"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code(),
        String::from_utf8(out.stdout).expect("utf8 output"),
    )
}

fn fails_with_counterexample(args: &[&str]) -> bool {
    let (code, stdout) = run_cli(args, &[]);
    if code != Some(1) {
        return false;
    }
    let reports: Vec<Value> = serde_json::from_str(&stdout).expect("json reports");
    reports
        .iter()
        .any(|r| r["status"] == "fail" && !r["counterexample"].is_null())
}

#[test]
fn criterion_09_soundness_probes() {
    let probes: Vec<(&str, Vec<&str>)> = vec![
        (
            "jw-sign-flip breaks the classical suite",
            vec![
                "verify",
                "--jw",
                "--n",
                "3",
                "--mutation",
                "jw-sign-flip",
                "--format",
                "json",
            ],
        ),
        (
            "drop-ejw-normalizer breaks the extended suite",
            vec![
                "verify",
                "--n",
                "2",
                "--depth",
                "3",
                "--mutation",
                "drop-ejw-normalizer",
                "--format",
                "json",
            ],
        ),
        (
            "perturb-f-mu breaks the extended suite",
            vec![
                "verify",
                "--n",
                "2",
                "--depth",
                "3",
                "--mutation",
                "perturb-f-mu",
                "--format",
                "json",
            ],
        ),
        (
            "perturb-f-mu breaks the lemma suite under specialization",
            vec![
                "specialize",
                "--n",
                "2",
                "--depth",
                "3",
                "--seed",
                "5",
                "--mutation",
                "perturb-f-mu",
                "--format",
                "json",
            ],
        ),
        (
            "perturb-f-mu breaks the symbolic suite",
            vec![
                "prove",
                "--all",
                "--mutation",
                "perturb-f-mu",
                "--format",
                "json",
            ],
        ),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (what, args) in probes {
        if !fails_with_counterexample(&args) {
            ok = false;
            detail = format!("probe did not fail as required: {what}");
            break;
        }
    }
    record(
        9,
        "mutations fail with exit 1 and counterexample",
        ok,
        &detail,
    );
}

#[test]
fn criterion_10_export_determinism() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let runs = [
        (
            vec!["ejw", "--n", "2", "--depth", "4", "--out"],
            path("a.json"),
            vec![],
        ),
        (
            vec!["ejw", "--n", "2", "--depth", "4", "--out"],
            path("b.json"),
            vec![],
        ),
        (
            vec!["ejw", "--n", "2", "--depth", "4", "--threads", "4", "--out"],
            path("c.json"),
            vec![],
        ),
        (
            vec!["ejw", "--n", "2", "--depth", "4", "--out"],
            path("d.json"),
            vec![("QJW_THREADS", "1")],
        ),
    ];
    for (args, out, envs) in &runs {
        let mut full: Vec<&str> = args.clone();
        full.push(out);
        let (code, _) = run_cli(&full, envs);
        assert_eq!(code, Some(0), "export run failed");
    }
    let reference = std::fs::read(dir.path().join("a.json")).expect("read");
    let ok = !reference.is_empty()
        && ["b.json", "c.json", "d.json"]
            .iter()
            .all(|f| std::fs::read(dir.path().join(f)).expect("read") == reference);
    record(
        10,
        "ejw export is byte-identical across runs and threads",
        ok,
        "",
    );
}

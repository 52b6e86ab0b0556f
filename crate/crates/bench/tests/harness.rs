use std::fs;
use std::process::Command;

use cat_bench::report::write_summary_csv;
use cat_bench::runner::{read_records_file, write_records_csv};
use cat_bench::stats::geometric_mean;
use cat_bench::{
    build_suite, emit_reports, geometric_mean_iters, performance_profile, read_records_csv, run_suite, summarize,
    BenchmarkRecord, Overrides, RunStatus,
};
use proptest::prelude::*;

fn rec(problem: &str, solver: &str, status: RunStatus, iters: usize) -> BenchmarkRecord {
    BenchmarkRecord {
        problem: problem.into(),
        solver: solver.into(),
        status,
        iters,
        fevals: iters + 1,
        gevals: iters + 1,
        hevals: iters,
        final_grad_norm: 1e-6,
        f_final: 0.0,
        gap: None,
        max_iter: 10_000,
        wall_time_seconds: 0.0,
    }
}

fn small_suite(problems: &[&str], solvers: &[&str]) -> cat_bench::SuiteSpec {
    build_suite(
        None,
        &Overrides {
            problems: problems.iter().map(|s| s.to_string()).collect(),
            solvers: solvers.iter().map(|s| s.to_string()).collect(),
            ..Overrides::default()
        },
    )
    .unwrap()
}

#[test]
fn one_quadratic_two_solvers() {
    let records = run_suite(&small_suite(&["quadratic_well"], &["cat", "classic"])).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.converged() && r.final_grad_norm <= 1e-5));
    assert_eq!(records[0].solver, "cat");
    assert_eq!(records[1].solver, "classic");
    assert!(records[0].gap.unwrap().abs() < 1e-9);
}

#[test]
fn iteration_limit_is_recorded() {
    let mut suite = small_suite(&["rosenbrock2d"], &["cat"]);
    suite.max_iter = 3;
    let records = run_suite(&suite).unwrap();
    assert_eq!(records[0].status, RunStatus::IterationLimit);
    assert_eq!(records[0].iters, 3);
    assert_eq!(records[0].max_iter, 3);
}

#[test]
fn repeated_runs_are_identical_apart_from_time() {
    let suite = small_suite(&["beale", "wood", "hard_case_quartic"], &["cat", "cat_theta0", "classic"]);
    let a: Vec<_> = run_suite(&suite).unwrap().iter().map(BenchmarkRecord::without_time).collect();
    let b: Vec<_> = run_suite(&suite).unwrap().iter().map(BenchmarkRecord::without_time).collect();
    assert_eq!(a, b);
    let keys: Vec<_> = a.iter().map(|r| (r.problem.clone(), r.solver.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn duplicate_problems_are_rejected() {
    let suite = small_suite(&["beale", "beale"], &["cat"]);
    assert!(run_suite(&suite).is_err());
}

#[test]
fn geometric_mean_examples() {
    let ok = rec("a", "cat", RunStatus::Converged, 10);
    let fail = rec("b", "cat", RunStatus::IterationLimit, 10_000);
    let gm = geometric_mean_iters(&[ok.clone(), fail.clone()], 10_000).unwrap();
    assert!((gm - 316.227_766_016_837_94).abs() < 1e-10, "{gm}");
    let three = vec![rec("a", "cat", RunStatus::Converged, 7); 3];
    assert!((geometric_mean_iters(&three, 10_000).unwrap() - 7.0).abs() < 1e-12);
    assert_eq!(geometric_mean_iters(&[fail], 10_000).unwrap(), 10_000.0);
    assert!(geometric_mean_iters(&[], 10_000).is_err());
    assert!(geometric_mean_iters(&[ok], 0).is_err());
}

#[test]
fn numerical_failures_also_count_as_the_cap() {
    let nf = rec("a", "cat", RunStatus::NumericalFailure, 12);
    assert_eq!(geometric_mean_iters(&[nf], 500).unwrap(), 500.0);
}

#[test]
fn profile_examples() {
    let records = vec![
        rec("p1", "cat", RunStatus::Converged, 5),
        rec("p2", "cat", RunStatus::Converged, 50),
        rec("p1", "classic", RunStatus::Converged, 5),
        rec("p2", "classic", RunStatus::IterationLimit, 10_000),
    ];
    let curves = performance_profile(&records, &[10, 100, 10_000]).unwrap();
    assert_eq!(curves[0].solver, "cat");
    assert_eq!(curves[0].points, vec![(10, 0.5), (100, 1.0), (10_000, 1.0)]);
    assert_eq!(curves[1].points, vec![(10, 0.5), (100, 0.5), (10_000, 0.5)]);
}

#[test]
fn profile_rejects_mismatched_problem_sets() {
    let records = vec![
        rec("p1", "cat", RunStatus::Converged, 5),
        rec("p2", "cat", RunStatus::Converged, 5),
        rec("p1", "classic", RunStatus::Converged, 5),
        rec("p3", "classic", RunStatus::Converged, 5),
    ];
    let err = performance_profile(&records, &[10]).unwrap_err().to_string();
    assert!(err.contains("p2") && err.contains("p3"), "{err}");
}

#[test]
fn reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let suite = small_suite(&["quadratic_well", "rosenbrock2d", "beale"], &["cat", "classic"]);
    let records = run_suite(&suite).unwrap();
    let files = emit_reports(&records, &suite.iter_grid, dir.path()).unwrap();
    assert_eq!(files.len(), 5);

    let text = fs::read_to_string(dir.path().join("records.csv")).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 * 2);
    assert!(text.starts_with(
        "problem,solver,status,iters,fevals,gevals,hevals,final_grad_norm,f_final,gap,max_iter,wall_time_seconds"
    ));
    let reread = read_records_file(&dir.path().join("records.csv")).unwrap();
    assert_eq!(reread, records);

    let mut recomputed = Vec::new();
    write_summary_csv(&summarize(&reread).unwrap(), &mut recomputed).unwrap();
    assert_eq!(recomputed, fs::read(dir.path().join("summary.csv")).unwrap());

    let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert!(summary.starts_with("solver,problems,failures,gmean_iters,gmean_fevals,gmean_gevals"));

    for solver in ["cat", "classic"] {
        let profile = fs::read_to_string(dir.path().join(format!("profile_{solver}.csv"))).unwrap();
        let fractions: Vec<f64> = profile
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert!(fractions.windows(2).all(|w| w[0] <= w[1]));
        assert!(*fractions.last().unwrap() <= 1.0);
    }
    let svg = fs::read_to_string(dir.path().join("profiles.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
}

#[test]
fn summary_counts_failures() {
    let records = vec![
        rec("p1", "cat", RunStatus::Converged, 5),
        rec("p2", "cat", RunStatus::NumericalFailure, 5),
        rec("p3", "cat", RunStatus::IterationLimit, 10_000),
    ];
    let s = summarize(&records).unwrap();
    assert_eq!(s[0].failures, 2);
    assert_eq!(s[0].problems, 3);
}

#[test]
fn records_csv_keeps_missing_gap_empty() {
    let mut buf = Vec::new();
    let mut with_gap = rec("p", "cat", RunStatus::Converged, 3);
    with_gap.gap = Some(1.5e-17);
    write_records_csv(&[rec("q", "cat", RunStatus::Converged, 3), with_gap], &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",,"));
    let back = read_records_csv(&buf[..]).unwrap();
    assert_eq!(back[0].gap, None);
    assert_eq!(back[1].gap, Some(1.5e-17));
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cat-bench"))
}

#[test]
fn cli_run_and_summarize() {
    let dir = tempfile::tempdir().unwrap();
    let suite_path = dir.path().join("suite.toml");
    fs::write(
        &suite_path,
        "max_iter = 500\n[[solver]]\nname = \"cat\"\n[[solver]]\nname = \"classic\"\n\
         [[problem]]\ngenerator = \"corpus\"\nnames = [\"beale\", \"wood\"]\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let status = cli()
        .args(["run", "--suite"])
        .arg(&suite_path)
        .arg("--out")
        .arg(&out)
        .args(["--theta", "0.05"])
        .status()
        .unwrap();
    assert!(status.success());
    let again = cli()
        .arg("summarize")
        .arg(out.join("records.csv"))
        .output()
        .unwrap();
    assert!(again.status.success());
    assert_eq!(again.stdout, fs::read(out.join("summary.csv")).unwrap());
}

#[test]
fn cli_exit_codes() {
    let bad = cli().args(["run", "--gamma2", "0.1", "--problem", "beale"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let missing = cli().args(["run", "--suite", "/nonexistent/suite.toml"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(3));
    let unknown = cli().args(["run", "--problem", "nope"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn cli_trace_instance_check_list() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let status = cli()
        .args(["trace", "--problem", "rosenbrock2d", "--out"])
        .arg(&trace)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("k,f,grad_norm,r,d_norm,delta,rho_hat,accepted,fevals,gevals,hevals"));

    let inst = cli().args(["instance", "--problem", "lds", "--seed", "4"]).output().unwrap();
    assert!(inst.status.success());
    let body = String::from_utf8(inst.stdout).unwrap();
    assert!(body.contains("generator = lds") && body.contains("seed = 4"));

    assert!(cli().args(["check", "--problem", "wood"]).status().unwrap().success());
    let list = cli().arg("list").output().unwrap();
    assert!(String::from_utf8(list.stdout).unwrap().contains("rosenbrock2d"));
}

proptest! {
    #[test]
    fn geometric_mean_ignores_order(mut values in prop::collection::vec(1u32..100_000, 1..40), seed in any::<u64>()) {
        let as_f: Vec<f64> = values.iter().map(|&v| v as f64).collect();
        let a = geometric_mean(&as_f).unwrap();
        // Deterministic shuffle.
        let n = values.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            values.swap(i, (s >> 33) as usize % (i + 1));
        }
        let b = geometric_mean(&values.iter().map(|&v| v as f64).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(a.to_bits(), b.to_bits());
        let lo = *values.iter().min().unwrap() as f64;
        let hi = *values.iter().max().unwrap() as f64;
        prop_assert!(a >= lo * (1.0 - 1e-12) && a <= hi * (1.0 + 1e-12));
    }
}

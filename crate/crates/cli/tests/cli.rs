use std::f64::consts::PI;
use std::process::Command;

use ctqw_cli::{run, AverageOutput, BoundOutput, CollapseOutput, EvolveOutput, ProductOutput, SpectrumOutput};
use ctqw_core::analysis::MixingReport;
use ctqw_core::solvers::SolutionReport;
use serde::de::DeserializeOwned;
use serde::Serialize;

fn ok(args: &[&str]) -> String {
    let mut argv = vec!["ctqw"];
    argv.extend_from_slice(args);
    let out = run(argv);
    assert_eq!(out.code, 0, "ctqw {args:?} failed: {}", out.stderr);
    out.stdout
}

fn code(args: &[&str]) -> i32 {
    let mut argv = vec!["ctqw"];
    argv.extend_from_slice(args);
    run(argv).code
}

/// Parses into the typed schema and re-emits; must reproduce the output byte for byte.
fn round_trip<T: Serialize + DeserializeOwned>(text: &str) -> T {
    let value: T = serde_json::from_str(text).unwrap();
    let mut again = serde_json::to_string_pretty(&value).unwrap();
    again.push('\n');
    assert_eq!(again, text);
    value
}

#[test]
fn k2_evolve_example() {
    let out: EvolveOutput = round_trip(&ok(&["evolve", "--family", "k2", "--start", "0", "--t", "0.7853981633974483"]));
    assert!((out.distribution[0] - 0.5).abs() < 1e-12);
    assert!((out.distribution[1] - 0.5).abs() < 1e-12);
}

#[test]
fn claw_solve_example() {
    let report: SolutionReport = round_trip(&ok(&[
        "solve", "--family", "claw", "--parts", "5", "--target", "uniform", "--start", "center",
    ]));
    let expected = (1.0 / 6f64.sqrt()).acos() / 5f64.sqrt();
    assert!((report.t - expected).abs() < 1e-12);
    assert_eq!(report.edges.len(), 5);
    let w0 = report.edges[0].2;
    assert!(report.edges.iter().all(|e| e.2 == w0));
    assert!((w0 - 1.0).abs() < 1e-12);
    assert!(report.residual <= 1e-9);
}

#[test]
fn complete_graph_bound_example() {
    let out: BoundOutput = round_trip(&ok(&["bound", "--family", "complete", "--n", "5"]));
    assert_eq!(out.bound.spectral_type, 2);
    assert_eq!(out.bound.lower_bound, 0.5);
    assert!(out.bound.bound_holds);
    assert!(out.verdict.is_none());
}

#[test]
fn bound_with_target_verdict() {
    let out: BoundOutput = round_trip(&ok(&[
        "bound", "--family", "complete", "--n", "3", "--target", "0.1,0.45,0.45", "--start", "0",
    ]));
    let v = out.verdict.unwrap();
    assert_eq!(v.verdict, ctqw_core::analysis::AverageReachability::Unreachable);
}

#[test]
fn solve_then_evolve_reproduces_target() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["--family", "p3", "--target", "0.2,0.3,0.5", "--start", "left"],
        &["--family", "claw", "--parts", "4", "--target", "random", "--seed", "11", "--start", "leaf"],
        &["--family", "bipartite", "--parts", "2,3", "--target", "random", "--seed", "5", "--start", "3"],
        &["--family", "multipartite", "--parts", "1,2,3", "--target", "point:4", "--start", "2"],
    ];
    for (i, case) in cases.iter().enumerate() {
        let mut args = vec!["solve"];
        args.extend_from_slice(case);
        let text = ok(&args);
        let report: SolutionReport = round_trip(&text);
        let path = dir.path().join(format!("sol{i}.json"));
        std::fs::write(&path, &text).unwrap();
        let t = report.t.to_string();
        let start = report.start.to_string();
        let evolved: EvolveOutput = round_trip(&ok(&[
            "evolve",
            "--graph",
            path.to_str().unwrap(),
            "--start",
            &start,
            "--t",
            &t,
        ]));
        let err = evolved.distribution.sup_distance(&report.target);
        assert!(err <= report.residual.max(1e-12) + 1e-12, "case {i}: {err} vs {}", report.residual);
        assert!(err <= 1e-9);

        let collapsed: CollapseOutput = round_trip(&ok(&[
            "collapse",
            "--graph",
            path.to_str().unwrap(),
            "--cells",
            path.to_str().unwrap(),
            "--t",
            "2.5",
        ]));
        assert!(collapsed.exact);
        assert!(collapsed.check.unwrap().max_amplitude_error < 1e-9);
    }
}

#[test]
fn spectrum_and_average_schemas() {
    let s: SpectrumOutput = round_trip(&ok(&["spectrum", "--family", "hypercube", "--n", "3"]));
    assert_eq!(s.spectral_type, 4);
    assert_eq!(s.multiplicities, vec![1, 3, 3, 1]);

    let a: AverageOutput = round_trip(&ok(&["average", "--family", "p3", "--start", "0", "--horizon", "2000", "--steps", "200000"]));
    assert!((a.average.distribution[1] - 0.25).abs() < 1e-12);
    assert!(a.numerical.unwrap().sup_distance < 5e-3);
}

#[test]
fn check_uniform_and_product() {
    let r: MixingReport = round_trip(&ok(&["check-uniform", "--family", "complete", "--n", "4", "--t-max", "5"]));
    assert!(r.feasible);
    // unnormalized K_4 is uniform at π/4 + kπ/2, which contains 3π/4
    assert!((r.first_mixing_time.unwrap() - PI / 4.0).abs() < 1e-6);
    assert!(r.mixing_times.points.iter().any(|t| (t - 3.0 * PI / 4.0).abs() < 1e-6));

    let r: MixingReport = round_trip(&ok(&["check-uniform", "--family", "complete", "--n", "5", "--t-max", "10"]));
    assert!(!r.feasible);

    let p: ProductOutput = round_trip(&ok(&["product-check", "--g", "hypercube:2", "--h", "complete:4"]));
    assert!(p.product.feasible);
    assert!((p.product.first_mixing_time.unwrap() - 3.0 * PI / 4.0).abs() < 1e-12);

    let p: ProductOutput = round_trip(&ok(&["product-check", "--g", "complete:3", "--h", "complete:3"]));
    assert!((p.product.first_mixing_time.unwrap() - 4.0 * PI / 9.0).abs() < 1e-12);
}

#[test]
fn trajectory_csv() {
    let text = ok(&["trajectory", "--family", "k2", "--t-max", "1", "--step", "0.25"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,p_0,p_1");
    assert_eq!(lines.len(), 6);
    let row: Vec<f64> = lines[2].split(',').map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - 0.25f64.cos().powi(2)).abs() < 1e-14);
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 3, \"edges\": [[0, 0, 1.0]]}").unwrap();
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["spectrum", "--graph", bad.to_str().unwrap()]), 2);
    assert_eq!(code(&["spectrum"]), 2);
    assert_eq!(code(&["solve", "--family", "p3", "--target", "0.5,0.5,0.5"]), 2);
    assert_eq!(code(&["evolve", "--family", "k2", "--start", "2", "--t", "1"]), 2);
    assert_eq!(code(&["check-uniform", "--family", "k2", "--step", "0"]), 2);
    assert_eq!(code(&["--tol", "-1", "bound", "--family", "k2"]), 2);
}

#[test]
fn deterministic_random_targets() {
    let args = ["solve", "--family", "bipartite", "--parts", "3,3", "--target", "random", "--seed", "42"];
    assert_eq!(ok(&args), ok(&args));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_ctqw");
    let out = Command::new(bin).args(["bound", "--family", "complete", "--n", "5"]).output().unwrap();
    assert!(out.status.success());
    let parsed: BoundOutput = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed.bound.lower_bound, 0.5);

    let out = Command::new(bin).args(["evolve", "--family", "k2", "--t", "nan?"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());

    let out = Command::new(bin)
        .args(["check-uniform", "--family", "complete", "--n", "4", "--t-max", "3"])
        .env("CTQW_TOL", "1e-3")
        .output()
        .unwrap();
    let r: MixingReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r.tolerance, 1e-3);
}

//! End-to-end tests of the `spdgeo` binary: flag grammar, exit codes, file
//! round trips and numeric output against library values.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spdgeo"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).trim().to_string()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("spdgeo-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn gen_round_trip_is_bitwise() {
    let path = tmp("gen.json");
    let out = run(&["gen", "--n", "3", "--seed", "42", "--spread", "1.5", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let read_back = spdgeo::matcore::io::read_matrix(&path).unwrap();
    let in_memory = spdgeo::random_spd::<f64>(3, 42, 1.5);
    for i in 0..3 {
        for j in 0..3 {
            assert_eq!(read_back.entry(i, j), in_memory.herm().entry(i, j));
        }
    }
    std::fs::remove_file(path).ok();
}

#[test]
fn distance_of_identical_inputs_is_zero() {
    let path = tmp("same.json");
    run(&["gen", "--n", "2", "--seed", "5", "--spread", "1", "--out", path.to_str().unwrap()]);
    let out = run(&[
        "distance", "--family", "theta:2", "--norm", "hs",
        "--a", path.to_str().unwrap(), "--b", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let value: f64 = stdout(&out).parse().unwrap();
    assert_eq!(value, 0.0);
    std::fs::remove_file(path).ok();
}

#[test]
fn mean_eval_logarithmic_point() {
    let out = run(&["mean-eval", "--mean", "stolarsky:2", "--x", "1", "--y", "2.718281828459045"]);
    assert!(out.status.success());
    let value: f64 = stdout(&out).parse().unwrap();
    assert!((value - (std::f64::consts::E - 1.0)).abs() < 1e-14);
}

#[test]
fn kernel_eval_diagonal_uses_exp_log() {
    let out = run(&["kernel-eval", "--kernel", "stolarsky:3^3", "--x", "1.7", "--y", "1.7"]);
    assert!(out.status.success());
    let value: f64 = stdout(&out).parse().unwrap();
    assert_eq!(value, (3.0 * 1.7f64.ln()).exp());
}

#[test]
fn metric_eval_matches_library() {
    let d = tmp("me-d.json");
    let h = tmp("me-h.json");
    run(&["gen", "--n", "2", "--seed", "9", "--spread", "1", "--out", d.to_str().unwrap()]);
    run(&["gen", "--n", "2", "--seed", "10", "--spread", "1", "--out", h.to_str().unwrap()]);
    let out = run(&[
        "metric-eval", "--kernel", "geometric^2",
        "--d", d.to_str().unwrap(), "--h", h.to_str().unwrap(), "--k", h.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let got: f64 = stdout(&out).parse().unwrap();
    let dm = spdgeo::matcore::io::read_spd(&d).unwrap();
    let hm = spdgeo::matcore::io::read_matrix(&h).unwrap();
    let want =
        spdgeo::metric_eval(&spdgeo::KernelSpec::<f64>::fisher_rao(), &dm, &hm, &hm).unwrap();
    assert!((got - want).abs() <= 1e-15 * want.abs());
    std::fs::remove_file(d).ok();
    std::fs::remove_file(h).ok();
}

#[test]
fn geodesic_endpoint_returns_input() {
    let a = tmp("geo-a.json");
    let b = tmp("geo-b.json");
    let out_file = tmp("geo-out.json");
    run(&["gen", "--n", "2", "--seed", "11", "--spread", "1", "--out", a.to_str().unwrap()]);
    run(&["gen", "--n", "2", "--seed", "12", "--spread", "1", "--out", b.to_str().unwrap()]);
    let out = run(&[
        "geodesic", "--family", "fisher",
        "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(),
        "--t", "0", "--out", out_file.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let got = spdgeo::matcore::io::read_matrix(&out_file).unwrap();
    let want = spdgeo::matcore::io::read_matrix(&a).unwrap();
    assert!(got.sub(&want).hs_norm() < 1e-10 * want.hs_norm());
    for p in [a, b, out_file] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn length_of_radial_segment() {
    // Segment I -> 2I at n = 4 under the Fisher-Rao kernel: 2 log 2.
    let a = tmp("len-a.json");
    let b = tmp("len-b.json");
    let id = spdgeo::HermitianMatrix::<f64>::identity(4);
    spdgeo::matcore::io::write_matrix(&a, &id).unwrap();
    spdgeo::matcore::io::write_matrix(&b, &id.scale(2.0)).unwrap();
    let out = run(&[
        "length", "--kernel", "geometric^2",
        "--path", a.to_str().unwrap(), b.to_str().unwrap(),
        "--norm", "hs", "--quad", "64",
    ]);
    assert!(out.status.success());
    let got: f64 = stdout(&out).parse().unwrap();
    assert!((got - 2.0 * 2.0f64.ln()).abs() < 1e-9);
    std::fs::remove_file(a).ok();
    std::fs::remove_file(b).ok();
}

#[test]
fn shortest_approaches_closed_form() {
    let a = tmp("sh-a.json");
    let b = tmp("sh-b.json");
    run(&["gen", "--n", "2", "--seed", "21", "--spread", "1", "--out", a.to_str().unwrap()]);
    run(&["gen", "--n", "2", "--seed", "22", "--spread", "1", "--out", b.to_str().unwrap()]);
    let out = run(&[
        "shortest", "--kernel", "geometric^2",
        "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(), "--seed", "3",
    ]);
    assert!(out.status.success());
    let got: f64 = stdout(&out).parse().unwrap();
    let am = spdgeo::matcore::io::read_spd(&a).unwrap();
    let bm = spdgeo::matcore::io::read_spd(&b).unwrap();
    let want = spdgeo::closed_form_distance(
        spdgeo::GeodesicFamily::FisherRao,
        &spdgeo::NormSpec::HilbertSchmidt,
        &am,
        &bm,
    )
    .unwrap();
    assert!(got >= want - 1e-9 && got <= want * (1.0 + 1e-3), "{got} vs {want}");
    std::fs::remove_file(a).ok();
    std::fs::remove_file(b).ok();
}

#[test]
fn karcher_and_alm3_commuting_oracles() {
    let one = tmp("k1.json");
    let four = tmp("k4.json");
    let eight = tmp("k8.json");
    let sixty_four = tmp("k64.json");
    for (path, v) in [(&one, 1.0), (&four, 4.0), (&eight, 8.0), (&sixty_four, 64.0)] {
        spdgeo::matcore::io::write_matrix(path, &spdgeo::HermitianMatrix::from_diag(&[v])).unwrap();
    }
    let out = run(&[
        "karcher", "--alpha", "1", "--inputs", one.to_str().unwrap(), four.to_str().unwrap(),
        "--tol", "1e-12",
    ]);
    assert!(out.status.success());
    let mean = spdgeo::matcore::io::matrix_from_json(&stdout(&out)).unwrap();
    assert!((mean.entry(0, 0).re - 2.0).abs() < 1e-9);
    let out = run(&[
        "alm3", "--inputs",
        one.to_str().unwrap(), eight.to_str().unwrap(), sixty_four.to_str().unwrap(),
        "--tol", "1e-12",
    ]);
    assert!(out.status.success());
    let mean = spdgeo::matcore::io::matrix_from_json(&stdout(&out)).unwrap();
    assert!((mean.entry(0, 0).re - 8.0).abs() < 1e-9);
    for p in [one, four, eight, sixty_four] {
        std::fs::remove_file(p).ok();
    }
}

#[test]
fn compare_emits_fixed_header_and_deterministic_rows() {
    let a = tmp("cmp-a.json");
    let b = tmp("cmp-b.json");
    run(&["gen", "--n", "3", "--seed", "31", "--spread", "1", "--out", a.to_str().unwrap()]);
    run(&["gen", "--n", "3", "--seed", "32", "--spread", "1", "--out", b.to_str().unwrap()]);
    let args = [
        "compare",
        "--a", a.to_str().unwrap(), "--b", b.to_str().unwrap(),
        "--thetas", "0,1,2", "--means", "geometric,arithmetic", "--norm", "hs",
    ];
    let out1 = run(&args);
    let out2 = run(&args);
    assert!(out1.status.success());
    assert_eq!(out1.stdout, out2.stdout, "deterministic output");
    let text = stdout(&out1);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mean,theta,delta_M_theta,delta_phi_theta,relation"
    );
    assert_eq!(lines.count(), 6);
    std::fs::remove_file(a).ok();
    std::fs::remove_file(b).ok();
}

#[test]
fn verify_single_check_emits_json_line() {
    let out = run(&[
        "verify", "--check", "lem2_2_monotone", "--seed", "7", "--dim", "2", "--samples", "10",
    ]);
    assert!(out.status.success(), "exit: {:?}", out.status);
    let text = stdout(&out);
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["name"], "lem2_2_monotone");
    assert_eq!(report["pass"], true);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["mean-eval", "--mean", "stolarsky:2", "--x", "1"]).status.code(),
        Some(2),
        "missing --y"
    );
    assert_eq!(
        run(&["mean-eval", "--mean", "stolarsky:2", "--x", "1", "--y", "2", "--bogus", "1"])
            .status
            .code(),
        Some(2),
        "unknown flag"
    );
    assert_eq!(
        run(&["distance", "--family", "warp:1", "--norm", "hs", "--a", "x", "--b", "y"])
            .status
            .code(),
        Some(2),
        "bad family"
    );
}

#[test]
fn domain_errors_exit_three_with_json() {
    // Indefinite input must be rejected when loaded as SPD.
    let path = tmp("indef.json");
    std::fs::write(
        &path,
        r#"{"n": 2, "complex": false, "data": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [-1.0, 0.0]]}"#,
    )
    .unwrap();
    let out = run(&[
        "distance", "--family", "fisher", "--norm", "hs",
        "--a", path.to_str().unwrap(), "--b", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert!(err["error"].as_str().unwrap().contains("positive definite"));
    std::fs::remove_file(&path).ok();
    // Missing file is also a data-level failure.
    let out = run(&[
        "distance", "--family", "fisher", "--norm", "hs",
        "--a", "/nonexistent/a.json", "--b", "/nonexistent/b.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    // Domain error in scalar input.
    let out = run(&["mean-eval", "--mean", "geometric", "--x", "-1", "--y", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

/// Criterion 11 at the command-line surface: the full catalog passes at
/// seed 7, dimension 3, exit status zero, within the ten-minute budget.
#[test]
fn verify_full_suite_exits_zero() {
    let started = std::time::Instant::now();
    let out = run(&["verify", "--seed", "7", "--dim", "3"]);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(out.status.success(), "verify exited {:?}", out.status.code());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17, "one JSON line per check");
    for line in lines {
        let report: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(report["pass"], true, "failed: {}", report["name"]);
    }
    assert!(elapsed < 600.0, "verify took {elapsed:.0}s");
    println!("criterion 11 (cli surface): PASS ({elapsed:.0}s)");
}

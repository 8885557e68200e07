use std::process::{Command, Output};

use num::{BigInt, BigRational, ToPrimitive};
use pbe_core::{iterate_ahpetm, CoagKernel, PolyExp1D, ProblemSpec};

fn pbe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbe")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = pbe(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

/// Exit status and the single stderr line of a failing run.
fn fails(args: &[&str]) -> (i32, String) {
    let out = pbe(args);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert_eq!(stderr.lines().count(), 1, "{args:?}: {stderr:?}");
    assert!(out.stdout.is_empty());
    (out.status.code().unwrap(), stderr)
}

/// Column name → values, skipping `#` lines.
fn columns(csv: &str) -> Vec<(String, Vec<String>)> {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let mut cols: Vec<(String, Vec<String>)> = header.into_iter().map(|h| (h, Vec::new())).collect();
    for line in lines {
        for (i, field) in line.split(',').enumerate() {
            cols[i].1.push(field.to_string());
        }
    }
    cols
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    columns(csv)
        .into_iter()
        .find(|(h, _)| h == name)
        .unwrap_or_else(|| panic!("no column {name} in\n{csv}"))
        .1
        .iter()
        .map(|v| v.parse().unwrap())
        .collect()
}

fn summary(csv: &str, key: &str) -> f64 {
    let prefix = format!("# {key}=");
    csv.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap().parse().unwrap()
}

const CONSTANT: [&str; 6] = ["--model", "coag", "--kernel", "constant", "--u0", "exp:1"];

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

#[test]
fn density_against_exact_solution() {
    let csv = ok(&with(&["density"], &with(&CONSTANT, &["--terms", "3", "--t", "2", "--x", "0:10:0.1", "--compare", "exact"])));
    let (x, psi, exact, err) = (column(&csv, "x"), column(&csv, "psi_3"), column(&csv, "exact"), column(&csv, "abs_error"));
    assert_eq!(x.len(), 101);
    for i in 0..x.len() {
        let oracle = 4.0 / 16.0 * (-2.0 * x[i] / 4.0).exp();
        assert!((exact[i] - oracle).abs() <= 1e-15, "x={}: {} vs {oracle}", x[i], exact[i]);
        assert_eq!(err[i], (psi[i] - exact[i]).abs());
    }
}

#[test]
fn zero_terms_reproduces_initial_data() {
    let csv = ok(&with(&["density"], &with(&CONSTANT, &["--terms", "0", "--t", "0,1", "--x", "0:5:0.5"])));
    let (t, x, psi) = (column(&csv, "t"), column(&csv, "x"), column(&csv, "psi_0"));
    assert_eq!(psi.len(), 22);
    // t-major ordering.
    assert!(t[..11].iter().all(|v| *v == 0.0) && t[11..].iter().all(|v| *v == 1.0));
    for (x, p) in x.iter().zip(&psi) {
        assert!((p - (-x).exp()).abs() <= 1e-16, "{x}: {p}");
    }
}

#[test]
fn mixed_rates_are_engine_errors() {
    let (code, msg) = fails(&["density", "--model", "coag", "--kernel", "sum", "--u0", "exp:1+exp:2", "--t", "1", "--x", "1"]);
    assert_eq!(code, 3);
    assert!(msg.contains("mixed rates"), "{msg}");
}

#[test]
fn l1_table_layout_and_scale() {
    let csv = ok(&with(&["error-table"], &with(&CONSTANT, &["--orders", "3:6:1", "--t", "0.5,1,1.5,2"])));
    let lines: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "n,t=0.5,t=1,t=1.5,t=2");
    assert_eq!(lines.len(), 5);
    let cell = column(&csv, "t=0.5")[0];
    assert!(cell > 0.0014 / 2.0 && cell < 0.0014 * 2.0, "{cell}");
}

#[test]
fn pointwise_table_starts_at_printed_value() {
    let csv = ok(&["error-table", "--model", "coag", "--kernel", "sum", "--u0", "exp:1", "--terms", "4", "--x", "5", "--t", "0.2:1.6:0.2"]);
    let exact = column(&csv, "exact");
    assert_eq!(exact.len(), 8);
    assert_eq!(format!("{:.4}", exact[0]), "0.0129");
}

#[test]
fn empty_time_list_is_a_config_error() {
    let (code, _) = fails(&with(&["error-table"], &with(&CONSTANT, &["--t", ""])));
    assert_eq!(code, 2);
}

#[test]
fn zeroth_moment_is_the_taylor_polynomial() {
    // The classical partial sum is exactly the Taylor polynomial; the AHPETM
    // one carries additional t^4..t^7 terms.
    let csv = ok(&with(&["moments"], &with(&CONSTANT, &["--method", "classical", "--terms", "3", "--j", "0,1", "--t", "0:2:0.25"])));
    let (t, mu0, mu1) = (column(&csv, "t"), column(&csv, "mu0_psi_3"), column(&csv, "mu1_psi_3"));
    assert_eq!(t.len(), 9);
    for (i, m) in mu0.iter().enumerate() {
        // t = i/4 exactly; 1 − t/2 + t²/4 − t³/8 in exact arithmetic, rounded once.
        let t = BigRational::new(BigInt::from(i), BigInt::from(4));
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let one = BigRational::from_integer(BigInt::from(1));
        let poly = &one - &t * &half + &t * &t * &half * &half - &t * &t * &t * &half * &half * &half;
        assert_eq!(*m, poly.to_f64().unwrap(), "t = {i}/4");
    }
    assert!(mu1.iter().all(|m| *m == 1.0));

    let ahpetm = ok(&with(&["moments"], &with(&CONSTANT, &["--terms", "3", "--j", "0", "--t", "0.01"])));
    let classical = ok(&with(&["moments"], &with(&CONSTANT, &["--method", "classical", "--terms", "3", "--j", "0", "--t", "0.01"])));
    let gap = (column(&ahpetm, "mu0_psi_3")[0] - column(&classical, "mu0_psi_3")[0]).abs();
    assert!(gap > 0.0 && gap < 1e-8, "{gap:e}");
}

#[test]
fn bivariate_moment_trajectories() {
    let csv = ok(&[
        "moments", "--model", "coag2d", "--u0", "monoexp2:6250000,1,1,50,50", "--terms", "3", "--j", "0:0,1:0,2:0",
        "--t", "0:1:0.5", "--compare", "exact",
    ]);
    for j in ["0_0", "1_0", "2_0"] {
        let (approx, exact) = (column(&csv, &format!("mu{j}_psi_3")), column(&csv, &format!("mu{j}_exact")));
        assert_eq!(approx.len(), 3);
        assert!((approx[0] - exact[0]).abs() <= 1e-12 * exact[0].abs());
    }
    // Mass along x is conserved exactly.
    assert!(column(&csv, "mu1_0_psi_3").iter().all(|m| *m == 0.04));
}

#[test]
fn coagulation_bound_matches_arithmetic() {
    let csv = ok(&with(&["bounds"], &with(&CONSTANT, &["--t0", "0.05", "--horizon", "1", "--m", "3"])));
    let (l, delta, v1, bound) = (column(&csv, "L")[0], column(&csv, "Delta")[0], column(&csv, "v1_norm")[0], column(&csv, "bound")[0]);
    let t0: f64 = 0.05;
    let expected = t0 * t0 * (2.0 * t0 * 2.0f64).exp() * (1.0 + 2.0 * t0 * 4.0 + 2.0 * t0 * 2.0);
    assert_eq!(l, 2.0);
    assert!((delta - expected).abs() <= 1e-15);
    assert!((delta - 4.886e-3).abs() < 1e-6);
    assert!((bound - delta.powi(3) / (1.0 - delta) * v1).abs() <= 1e-15 * bound);
    assert!(csv.contains(",Contractive,"));
}

#[test]
fn large_t0_is_reported_in_band() {
    let out = ok(&with(&["bounds"], &with(&CONSTANT, &["--t0", "2"])));
    assert!(out.contains(",NotContractive,inf"));
}

#[test]
fn breakage_constant() {
    let csv = ok(&["bounds", "--model", "frag", "--frag", "2,1,1,1", "--u0", "exp:1", "--t0", "0.5", "--lambda", "1"]);
    assert_eq!(column(&csv, "theta")[0], 0.25);
}

#[test]
fn reference_check_agrees_with_series() {
    let csv = ok(&with(&["reference-check"], &with(&CONSTANT, &["--terms", "4", "--t", "0.25"])));
    assert!(summary(&csv, "max_deviation") <= 5e-4);
    assert_eq!(column(&csv, "deviation").len(), 2001);

    let csv = ok(&with(&["reference-check"], &with(&CONSTANT, &["--terms", "4", "--t", "0"])));
    assert!(summary(&csv, "max_deviation") <= 1e-12);
}

#[test]
fn reference_check_rejects_two_dimensional_problems() {
    let (code, msg) = fails(&["reference-check", "--model", "coag2d", "--u0", "monoexp2:1,1,1,1,1", "--t", "0.1"]);
    assert_eq!(code, 2);
    assert!(msg.contains("two-dimensional"));
}

#[test]
fn symbolic_dump_round_trips() {
    let text = ok(&with(&["dump-symbolic"], &with(&CONSTANT, &["--terms", "3"])));
    let parsed = PolyExp1D::from_dump(&text).unwrap();
    let problem = ProblemSpec::coag(CoagKernel::Constant, PolyExp1D::exponential(pbe_core::polyexp::integer(1))).unwrap();
    let series = iterate_ahpetm::<1>(&problem, 3).unwrap();
    assert_eq!(&parsed, series.truncated(3).unwrap());
    let v2 = ok(&with(&["dump-symbolic"], &with(&CONSTANT, &["--component", "2"])));
    assert_eq!(&PolyExp1D::from_dump(&v2).unwrap(), series.component(2).unwrap());
}

#[test]
fn output_is_deterministic_and_file_matches_stdout() {
    let args = with(&["density"], &with(&CONSTANT, &["--terms", "4", "--t", "0.5,1", "--x", "0:3:0.25", "--compare", "exact"]));
    let first = ok(&args);
    assert_eq!(first, ok(&args));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let path_str = path.to_str().unwrap();
    assert!(ok(&with(&args, &["--out", path_str])).is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), first);
}

#[test]
fn json_mirrors_columns() {
    let text = ok(&with(&["density"], &with(&CONSTANT, &["--terms", "1", "--t", "1", "--x", "0,1", "--format", "json"])));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["columns"]["x"], serde_json::json!([0.0, 1.0]));
    assert_eq!(v["columns"]["psi_1"].as_array().unwrap().len(), 2);
    assert_eq!(v["meta"]["model"], "coag");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# constant kernel\nmodel = coag\nkernel = constant\nu0 = exp:1\nterms = 2\nt = 1\nx = 0,1\n").unwrap();
    let conf = path.to_str().unwrap();
    let from_file = ok(&["density", "--config", conf]);
    assert!(from_file.lines().any(|l| l.starts_with("x,t,psi_2")));
    let overridden = ok(&["density", "--config", conf, "--terms", "3"]);
    assert!(overridden.lines().any(|l| l.starts_with("x,t,psi_3")));

    std::fs::write(&path, "model = coag\ncolour = blue\n").unwrap();
    assert_eq!(fails(&["density", "--config", conf]).0, 2);
    assert_eq!(fails(&["density", "--config", dir.path().join("missing").to_str().unwrap()]).0, 4);
}

#[test]
fn error_paths_emit_one_line() {
    let cases: &[(&[&str], i32)] = &[
        (&["density"], 2),
        (&["density", "--bogus"], 2),
        (&[], 2),
        (&["density", "--model", "coag", "--u0", "gauss:1", "--t", "1", "--x", "1"], 2),
        (&["density", "--model", "coag", "--u0", "exp:1", "--t", "1", "--x", "1", "--format", "xml"], 2),
        (&["density", "--model", "frag", "--u0", "exp:1", "--t", "1", "--x", "1"], 2),
        (&["density", "--model", "coag", "--u0", "exp:1", "--t", "1", "--x", "1", "--out", "/nonexistent/dir/out.csv"], 4),
    ];
    for (args, code) in cases {
        assert_eq!(fails(args).0, *code, "{args:?}");
    }
}

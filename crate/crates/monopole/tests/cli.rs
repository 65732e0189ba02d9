//! End-to-end behaviour of the command-line front end and its report formats.

use std::process::Command;

use monopole::cli::run;
use monopole::curve::MonopoleIndex;
use monopole::report::{self, ProfileRow, ScanRow, VerifyReport};

fn call(args: &[&str]) -> (i32, String, String) {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let mut full = vec!["monopole"];
    full.extend_from_slice(args);
    let code = run(full, &mut o, &mut e);
    (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("monopole-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_monopole");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(code(&["verify", "0", "1"]), 0);
    assert_eq!(code(&["verify", "1", "2"]), 1);
    assert_eq!(code(&["verify", "2", "1"]), 2);
    assert_eq!(code(&["verify", "1", "2", "--tol", "-1"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn verify_json_round_trips_exactly() {
    let (code, out, _) = call(&["verify", "1", "2"]);
    assert_eq!(code, 1);
    let r: VerifyReport = report::from_json(&out).unwrap();
    assert_eq!(r.vanishing.zero_count, 2);
    assert_eq!(report::to_json(&r).unwrap(), out.trim_end());
    let again: VerifyReport = report::from_json(&report::to_json(&r).unwrap()).unwrap();
    assert_eq!(again.pipeline.curve.b.to_bits(), r.pipeline.curve.b.to_bits());
    assert_eq!(again.pipeline.periods.modulus, r.pipeline.periods.modulus);
}

#[test]
fn verify_writes_to_out_file() {
    let path = scratch("verify.json");
    let (code, out, _) = call(&["verify", "1", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let r: VerifyReport = report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!((r.index.m(), r.index.n()), (1, 1));
}

#[test]
fn verify_csv_lists_zeros() {
    let (code, out, _) = call(&["verify", "1", "3", "--format", "csv"]);
    assert_eq!(code, 1);
    let zeros = report::zeros_from_csv(&out).unwrap();
    assert_eq!(zeros.len(), 4);
    assert!(zeros.iter().all(|z| z.lambda > 0.0 && z.lambda < 2.0));
}

#[test]
fn scan_rows_match_admissible_set_and_are_deterministic() {
    let (code, first, _) = call(&["scan", "--max-abs", "3", "--grid", "512"]);
    assert_eq!(code, 0);
    let (_, second, _) = call(&["scan", "--max-abs", "3", "--grid", "512"]);
    assert_eq!(first, second);
    let rows: Vec<ScanRow> = report::from_json(&first).unwrap();
    let got: Vec<(i64, i64)> = rows.iter().map(|r| (r.m, r.n)).collect();
    let want: Vec<(i64, i64)> = MonopoleIndex::admissible_up_to(3).iter().map(|i| (i.m(), i.n())).collect();
    assert_eq!(got, want);

    let (_, csv, _) = call(&["scan", "--max-abs", "3", "--grid", "512", "--format", "csv"]);
    assert_eq!(report::scan_from_csv(&csv).unwrap(), rows);
}

#[test]
fn plot_profile_has_expected_shape() {
    let (code, out, _) = call(&["plot", "1", "2", "H"]);
    assert_eq!(code, 0);
    let rows = report::profile_from_csv(&out).unwrap();
    assert_eq!(rows.len(), 2048);
    assert_eq!(report::profile_dips(&rows, 1e-2).len(), 2);

    let (_, out, _) = call(&["plot", "0", "1", "H"]);
    let rows: Vec<ProfileRow> = report::profile_from_csv(&out).unwrap();
    let interior = rows.iter().filter(|r| r.lambda > 0.25 && r.lambda < 1.75);
    let floor = interior.map(|r| r.big_h).fold(f64::INFINITY, f64::min);
    assert!(floor > 1e-2, "interior minimum {floor}");
    assert!(report::profile_dips(&rows, 1e-2).is_empty());
}

#[test]
fn plot_svg_and_branches() {
    let path = scratch("h.svg");
    assert_eq!(call(&["plot", "1", "2", "hk", "--out", path.to_str().unwrap()]).0, 0);
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));

    let (code, out, _) = call(&["plot", "0", "1", "branches", "--rmin", "1.5", "--rmax", "6", "--rsteps", "46"]);
    assert_eq!(code, 0);
    let pts = report::branches_from_csv(&out).unwrap();
    assert!(pts.iter().all(|p| (1.5..=6.0).contains(&p.r_abs)));
    assert!(pts.iter().any(|p| p.vertical_tangent));
    assert_eq!(call(&["plot", "0", "1", "branches", "--rmin", "3", "--rmax", "2"]).0, 2);
}

#[test]
fn selftest_passes_and_injections_fail() {
    let (code, out, _) = call(&["selftest"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = call(&["selftest", "--inject", "theta"]);
    assert_eq!(code, 4);
    assert!(out.contains("identity_residuals"));
    let (code, out, _) = call(&["selftest", "--inject", "symplectic"]);
    assert_eq!(code, 4);
    assert!(out.contains("cyclic_basis"));
}

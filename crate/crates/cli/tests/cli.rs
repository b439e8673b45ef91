use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn rydberg(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydberg"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = rydberg(dir, args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn csv_rows(path: PathBuf) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|x| x.unwrap().iter().map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn f(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn eigenstate_csv_has_units_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["eigenstate", "--n-bar", "6", "--r-max", "120", "--points", "2401"]);
    let (h, rows) = csv_rows(d.path().join("eigenstate.csv"));
    assert_eq!(h, ["r_au", "R_au", "r2R2_per_au"]);
    assert_eq!(rows.len(), 2401);
    let m = json(d.path().join("eigenstate.csv.manifest.json"));
    assert_eq!(m["command"], "eigenstate");
    assert_eq!(m["inputs"]["n_bar"], 6);
    assert!(m["wall_seconds"].as_f64().unwrap() >= 0.0);
    assert!(m["version"].is_string());
}

#[test]
fn classical_reports_period_and_apsides() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["classical", "--n-bar", "20", "-o", "c.json"]);
    let v = json(d.path().join("c.json"));
    let period = v["period_au"].as_f64().unwrap();
    assert!((period - 2.0 * std::f64::consts::PI * 8000.0).abs() < 1e-6);
    assert!((v["period_quadrature_au"].as_f64().unwrap() / period - 1.0).abs() < 1e-9);
    assert!(v["r_outer_au"].as_f64().unwrap() > 790.0);
    ok(d.path(), &["classical", "--n-bar", "20", "--format", "csv", "-o", "c.csv"]);
    let (h, _) = csv_rows(d.path().join("c.csv"));
    assert_eq!(h[0], "theta_rad");
}

#[test]
fn perturb_writes_one_column_per_time() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &["perturb", "--n-bar", "15", "--tau-ps", "0.5", "--points", "801", "-o", "p.csv"],
    );
    let (h, rows) = csv_rows(d.path().join("p.csv"));
    assert_eq!(h.len(), 5);
    assert_eq!(h[0], "r_au");
    assert!(h[1].starts_with("f_t") && h[1].ends_with("ps"));
    assert_eq!(rows.len(), 801);
    let peak = rows.iter().map(|r| f(&r[1])).fold(0.0, f64::max);
    assert!((peak - 1.0).abs() < 1e-12);
}

#[test]
fn rss_init_and_density() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["rss-init", "--atom", "potassium", "--n-bar", "20", "-o", "k.json"]);
    let v = json(d.path().join("k.json"));
    assert!(v["alpha"].as_f64().unwrap() > 0.0);
    assert!(v["product"].as_f64().unwrap() >= 0.5);
    assert!(v["residual_h"].as_f64().unwrap().abs() < 1e-8);
    let (alpha, gamma0) = (v["alpha"].as_f64().unwrap(), v["gamma0"].as_f64().unwrap());
    assert!((v["r0_au"].as_f64().unwrap() - (alpha + 1.0) / gamma0).abs() < 1e-9);
    assert!(v["c0_per_au2"].as_f64().unwrap() < 0.0);
    ok(d.path(), &["rss-density", "--n-bar", "20", "--points", "1001", "-o", "rho.csv"]);
    let (h, rows) = csv_rows(d.path().join("rho.csv"));
    assert_eq!(h, ["r_au", "r2psi2_per_au"]);
    let dr = f(&rows[1][0]) - f(&rows[0][0]);
    let total: f64 = rows.iter().map(|r| f(&r[1])).sum::<f64>() * dr;
    assert!((total - 1.0).abs() < 1e-3, "{total}");
}

#[test]
fn decompose_and_evolve() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["decompose", "--n-bar", "20", "--format", "json", "-o", "d.json"]);
    let v = json(d.path().join("d.json"));
    assert!(v["captured_norm"].as_f64().unwrap() > 0.999);
    assert_eq!(v["table"]["columns"][0], "n");
    ok(d.path(), &["evolve", "--n-bar", "20", "--times", "0,1T", "--points", "1601", "-o", "e.csv"]);
    let (h, rows) = csv_rows(d.path().join("e.csv"));
    assert_eq!(h.len(), 3);
    assert_eq!(rows.len(), 1601);
}

#[test]
fn autocorr_writes_trace_and_peaks() {
    let d = tempfile::tempdir().unwrap();
    ok(d.path(), &["autocorr", "--n-bar", "20", "-o", "a.csv"]);
    let (h, rows) = csv_rows(d.path().join("a.csv"));
    assert_eq!(h, ["t_ps", "A"]);
    assert!((f(&rows[0][1]) - 1.0).abs() < 1e-9);
    let (ph, peaks) = csv_rows(d.path().join("a.peaks.csv"));
    assert_eq!(ph, ["t_ps", "A"]);
    assert!(peaks.len() >= 3);
    let m = json(d.path().join("a.csv.manifest.json"));
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn revivals_schedule() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &["revivals", "--atom", "rubidium", "--n-bar", "20", "--delta-n", "3", "--verbose", "-o", "r.json"],
    );
    let v = json(d.path().join("r.json"));
    let t_rev = v["t_revival_au"].as_f64().unwrap();
    let n_star = v["n_bar_star"].as_f64().unwrap();
    let t_cl = v["t_classical_au"].as_f64().unwrap();
    assert!((t_rev - n_star * t_cl / 3.0).abs() < 1e-9 * t_rev);
    assert_eq!(v["fractional"].as_array().unwrap().len(), 4);
    assert!(v["fractional_grid"].as_array().unwrap().len() > 4);
    // estimated spread when none is given
    ok(d.path(), &["revivals", "--n-bar", "20", "-o", "r2.json"]);
    let v = json(d.path().join("r2.json"));
    assert!(v["delta_n_rms"].as_f64().unwrap() > 0.0);
}

#[test]
fn crosscheck_small_scenario() {
    let d = tempfile::tempdir().unwrap();
    ok(
        d.path(),
        &[
            "crosscheck", "--n-bar", "12", "--r-max", "900", "--dr", "0.1", "--t-end", "1/4T",
            "--steps", "2000", "--snapshots", "4", "-o", "x.csv",
        ],
    );
    let (h, rows) = csv_rows(d.path().join("x.csv"));
    assert_eq!(h, ["t_ps", "l2_distance", "norm_drift"]);
    assert_eq!(rows.len(), 5);
    assert!(f(&rows[0][1]) < 1e-4);
    for r in &rows {
        assert!(f(&r[1]) < 1e-2, "{r:?}");
        assert!(f(&r[2]).abs() < 1e-10);
    }
}

#[test]
fn config_file_with_flag_override() {
    let d = tempfile::tempdir().unwrap();
    std::fs::write(d.path().join("s.conf"), "# scenario\natom = rubidium\nn_bar = 30\n").unwrap();
    ok(d.path(), &["rss-init", "--config", "s.conf", "--n-bar", "18", "-o", "o.json"]);
    let v = json(d.path().join("o.json"));
    assert_eq!(v["atom"], "rubidium");
    assert_eq!(v["n_bar"], 18);
}

#[test]
fn identical_runs_give_identical_files() {
    let d = tempfile::tempdir().unwrap();
    let args = |o: &'static str| ["autocorr", "--n-bar", "15", "--threads", "2", "-o", o];
    ok(d.path(), &args("a.csv"));
    ok(d.path(), &args("b.csv"));
    let read = |p: &str| std::fs::read(d.path().join(p)).unwrap();
    assert_eq!(read("a.csv"), read("b.csv"));
    assert_eq!(read("a.peaks.csv"), read("b.peaks.csv"));
}

#[test]
fn exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| rydberg(d.path(), args).status.code();
    assert_eq!(code(&["rss-init", "--atom", "cesium", "--n-bar", "20"]), Some(2));
    assert_eq!(code(&["rss-init", "--n-bar", "abc"]), Some(2));
    assert_eq!(code(&["rss-init"]), Some(2));
    assert_eq!(code(&["evolve", "--n-bar", "20", "--times", "-3ps"]), Some(2));
    assert_eq!(code(&["rss-init", "--n-bar", "20", "-o", "/nonexistent/dir/x.json"]), Some(2));
    // a window far from the packet cannot reach the edge criterion
    let out = rydberg(d.path(), &["decompose", "--n-bar", "20", "--window", "200-201"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim().lines().count(), 1, "{err}");
}

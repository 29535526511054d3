//! End-to-end runs of the `threebody` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.toml"))
}

fn threebody(args: &[&str], scenario: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_threebody"))
        .args(args)
        .arg("--scenario")
        .arg(scenario)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Rows of a CSV file as floats, skipping the header and any text columns.
fn rows(path: &Path) -> Vec<Vec<f64>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').filter_map(|v| v.parse().ok()).collect())
        .collect()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn circular_radius_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["approximate"], &scenario("circular"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = dir.path().join("body1_approx.csv");
    assert_eq!(header(&csv), "t,theta,r,x,y,method");
    assert!(fs::read_to_string(&csv)
        .unwrap()
        .lines()
        .nth(1)
        .unwrap()
        .ends_with(",closed-form"));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 501);
    for r in &rows {
        assert!((r[2] - 0.5).abs() < 1e-9, "r = {}", r[2]);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = threebody(&["compare"], &scenario("hierarchical"), dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 10);
    for name in names {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn degenerate_body_fails_alone() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["approximate"], &scenario("degenerate"), dir.path());
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("body 2") && err.contains("DegenerateRotation"), "{err}");
    assert!(!err.contains("body 1") && !err.contains("body 3"), "{err}");
    assert!(dir.path().join("body1_approx.csv").exists());
    assert!(dir.path().join("body3_approx.csv").exists());
    assert!(!dir.path().join("body2_approx.csv").exists());
}

#[test]
fn integrate_reports_conservation() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["integrate"], &scenario("circular"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(header(&dir.path().join("body2_oracle.csv")), "t,theta,r,x,y");
    let report = json(&dir.path().join("conservation.json"));
    let drift = report["conservation"]["relative_energy_drift"].as_f64().unwrap();
    assert!(drift < 1e-8, "{drift}");
    assert!(report["aborted"].is_null());
}

#[test]
fn collision_truncates_series() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["integrate"], &scenario("collision"), dir.path());
    assert_eq!(o.status.code(), Some(3));
    let err = stderr(&o);
    assert!(err.contains("Collision") && err.contains("bodies 1 and 2"), "{err}");
    // free fall from rest at separation 2 with total mass 2 meets at t = π/2
    let contact = std::f64::consts::FRAC_PI_2 * 2f64.sqrt();
    let rows = rows(&dir.path().join("body1_oracle.csv"));
    let last = rows.last().unwrap()[0];
    assert!(last < contact && last > contact - 0.1, "last sample at {last}");
    let report = json(&dir.path().join("conservation.json"));
    assert!(report["aborted"].as_str().unwrap().starts_with("Collision"));
}

fn with_text(dir: &Path, text: &str) -> PathBuf {
    let path = dir.join("scenario.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn sample_interval_beyond_horizon_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let text =
        fs::read_to_string(scenario("circular")).unwrap() + "\n[integrator]\nhorizon = 1.0\nsample_interval = 2.0\n";
    let path = with_text(dir.path(), &text);
    let o = threebody(&["integrate"], &path, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("exceeds horizon"));
}

#[test]
fn parse_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("circular"))
        .unwrap()
        .replace("mass = 0.0", "mass = zero");
    let line = text.lines().position(|l| l.contains("mass = zero")).unwrap() + 1;
    let path = with_text(dir.path(), &text);
    let o = threebody(&["approximate"], &path, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(&format!("scenario.toml:{line}:")), "{}", stderr(&o));
}

#[test]
fn missing_scenario_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["approximate"], &dir.path().join("nope.toml"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn two_body_limit_through_compare() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["compare"], &scenario("circular"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&dir.path().join("report.json"));
    let err = report["per_body"][0]["comparison"]["max_rel_radial_error"]
        .as_f64()
        .unwrap();
    assert!(err < 1e-6, "{err}");
    assert_eq!(header(&dir.path().join("body1_error.csv")), "t,err_radial_rel,err_pos");
}

#[test]
fn report_schema() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(&["compare"], &scenario("hierarchical"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = json(&dir.path().join("report.json"));
    let keys: Vec<_> = report.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys.len(), 4);
    for key in ["per_body", "collinearity", "regime_flags", "conservation"] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    let per_body = report["per_body"].as_array().unwrap();
    assert_eq!(per_body.len(), 3);
    for (i, b) in per_body.iter().enumerate() {
        assert_eq!(b["body"], i + 1);
        assert!(b["comparison"]["max_rel_radial_error"].as_f64().unwrap().is_finite());
    }
}

#[test]
fn sweep_writes_one_directory_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = threebody(
        &["compare", "--sweep", "q3=1e-6,1e-4,1e-2"],
        &scenario("hierarchical"),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for v in ["1e-6", "1e-4", "1e-2"] {
        assert!(dir.path().join(format!("q3={v}")).join("report.json").exists(), "{v}");
    }
}

#[test]
fn bad_sweep_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    for sweep in ["m7=1", "q3=1.5"] {
        let o = threebody(&["compare", "--sweep", sweep], &scenario("hierarchical"), dir.path());
        assert_eq!(o.status.code(), Some(2), "{sweep}: {}", stderr(&o));
    }
}

#[test]
fn theta_grid_sweeps_from_initial_angle() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("circular"))
        .unwrap()
        .replace("kind = \"time\"", "kind = \"theta\"")
        .replace("stop = 44.42882938158366", "stop = 6.283185307179586")
        .replace("samples = 501", "samples = 5");
    let path = with_text(dir.path(), &text);
    let o = threebody(&["approximate"], &path, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = rows(&dir.path().join("out").join("body2_approx.csv"));
    let period = std::f64::consts::TAU / 2f64.sqrt();
    for (i, r) in rows.iter().enumerate() {
        assert!((r[0] - period * i as f64 / 4.0).abs() < 1e-9, "t = {}", r[0]);
        assert!((r[1] - (std::f64::consts::PI + std::f64::consts::FRAC_PI_2 * i as f64)).abs() < 1e-12);
    }
    // a θ grid gives no time grid for the reference run
    let o = threebody(&["integrate"], &path, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dimensionless_flag_overrides_si() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(scenario("circular"))
        .unwrap()
        .replace("\"dimensionless\"", "\"si\"");
    let path = with_text(dir.path(), &text);
    let o = threebody(&["approximate", "--dimensionless"], &path, &dir.path().join("a"));
    assert_eq!(o.status.code(), Some(0));
    let o = threebody(&["approximate"], &path, &dir.path().join("b"));
    assert_eq!(o.status.code(), Some(0));
    let a = rows(&dir.path().join("a").join("body1_approx.csv"));
    let b = rows(&dir.path().join("b").join("body1_approx.csv"));
    // with SI gravity the same velocities are far above escape speed
    assert_eq!(a[0], b[0]);
    assert!((a[10][2] - 0.5).abs() < 1e-9);
    assert!(b[10][2] > 0.7, "r = {}", b[10][2]);
}

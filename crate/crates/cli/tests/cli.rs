use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn eit4(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eit4"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    let mut full: Vec<&str> = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--out", out]);
    eit4(&full)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(eit4(&["--help"]).status.code(), Some(0));
    assert_eq!(eit4(&["--version"]).status.code(), Some(0));
    assert_eq!(eit4(&["spectrum", "--help"]).status.code(), Some(0));
}

#[test]
fn bad_usage_and_config_exit_one() {
    assert_eq!(eit4(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(eit4(&["preset", "fig9"]).status.code(), Some(1));
    assert_eq!(
        eit4(&["spectrum", "--delta-points", "1"]).status.code(),
        Some(1)
    );
    assert_eq!(
        eit4(&["spectrum", "--gamma-ratio", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        eit4(&["spectrum", "--delta-min", "1", "--delta-max", "-1"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        eit4(&["spectrum", "--config", "/nonexistent/scenario.toml"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "omega_c = 1.0\nunknown_key = 3\n").unwrap();
    let o = eit4(&["spectrum", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown_key"));
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = run_in(&blocker, &["spectrum", "--delta-points", "3"]);
    assert_ne!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("error"));
}

#[test]
fn spectrum_writes_all_formats() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "spectrum",
            "--omega-c",
            "1",
            "--omega-r",
            "0.1",
            "--delta-points",
            "21",
            "--format",
            "csv",
            "--format",
            "json",
            "--format",
            "svg",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "delta,re_chi_x,im_chi_x,re_chi_y,im_chi_y,re_chi_psi,im_chi_psi,re_delta_chi,im_delta_chi,f_abs,n_eff"
    );
    assert_eq!(lines.len(), 22);
    assert!(!csv.contains('\r'));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 11));

    let j = json(&dir.path().join("spectrum.json"));
    assert_eq!(j["config"]["omega_c"].as_f64(), Some(1.0));
    assert_eq!(j["config"]["delta_points"].as_u64(), Some(21));
    assert_eq!(j["points"].as_array().unwrap().len(), 21);

    let svg = std::fs::read_to_string(dir.path().join("spectrum.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.contains("stroke-dasharray"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.toml");
    std::fs::write(
        &cfg,
        "omega_c = 2.0\nomega_r = 0.2\npsi = 0.7\ndelta_points = 11\noutputs = [\"json\"]\n",
    )
    .unwrap();
    let o = run_in(
        dir.path(),
        &[
            "spectrum",
            "--config",
            cfg.to_str().unwrap(),
            "--psi",
            "0.25",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = json(&dir.path().join("spectrum.json"));
    assert_eq!(j["config"]["omega_c"].as_f64(), Some(2.0));
    assert_eq!(j["config"]["psi"].as_f64(), Some(0.25));
    assert_eq!(j["points"].as_array().unwrap().len(), 11);
}

#[test]
fn preset_output_is_repeatable_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let read = |sub: &str, workers: &str| {
        let d = dir.path().join(sub);
        let o = run_in(
            &d,
            &[
                "preset",
                "fig3a",
                "--delta-points",
                "61",
                "--format",
                "csv",
                "--format",
                "json",
                "--workers",
                workers,
            ],
        );
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        (
            std::fs::read(d.join("fig3a.csv")).unwrap(),
            std::fs::read(d.join("fig3a.json")).unwrap(),
        )
    };
    let a = read("a", "1");
    let b = read("b", "4");
    let c = read("c", "4");
    assert_eq!(a, b);
    assert_eq!(b, c);
}

#[test]
fn zero_workers_rejected() {
    assert_eq!(
        eit4(&["spectrum", "--workers", "0", "--delta-points", "3"])
            .status
            .code(),
        Some(1)
    );
}

fn kinds(point: &Value) -> Vec<String> {
    point["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["kind"].as_str().unwrap().to_owned())
        .collect()
}

#[test]
fn darkstates_perpendicular_geometry_is_non_raman_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "darkstates",
            "--omega-c",
            "4",
            "--omega-r",
            "1",
            "--psi",
            "0",
            "--delta-points",
            "21",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = json(&dir.path().join("darkstates.json"));
    let points = j["points"].as_array().unwrap();
    assert_eq!(points.len(), 21);
    for p in points {
        assert!(
            kinds(p).iter().any(|k| k == "non_raman"),
            "Δ = {}",
            p["delta"]
        );
        assert_eq!(p["records"].as_array().unwrap().len(), 5);
    }
}

#[test]
fn darkstates_generic_geometry_has_raman_at_resonance() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "darkstates",
            "--omega-c",
            "4",
            "--omega-r",
            "1",
            "--psi",
            "0.3",
            "--deltas",
            "0,0.37",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = json(&dir.path().join("darkstates.json"));
    let points = j["points"].as_array().unwrap();
    assert!(kinds(&points[0]).iter().any(|k| k == "raman"));
    assert!(kinds(&points[1]).iter().all(|k| k == "bright"));
}

#[test]
fn darkstates_probe_off_warns_and_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "darkstates",
            "--probe",
            "0",
            "--omega-r",
            "1",
            "--deltas",
            "0",
        ],
    );
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("warning"));
    let j = json(&dir.path().join("darkstates.json"));
    assert!(!j["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn angle_scan_reports_root_and_prediction() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "angle-scan",
            "--omega-c",
            "1",
            "--omega-r",
            "0.1",
            "--psi-points",
            "31",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = json(&dir.path().join("angle_scan_root.json"));
    let (n, a) = (
        j["numeric"].as_f64().unwrap(),
        j["analytic"].as_f64().unwrap(),
    );
    assert!((n - a).abs() / a < 0.01, "{n} vs {a}");
    assert!(stdout(&o).contains("relative difference"));
    let csv = std::fs::read_to_string(dir.path().join("angle_scan.csv")).unwrap();
    assert_eq!(csv.lines().count(), 32);
}

#[test]
fn angle_scan_weak_rf_has_no_transparency_angle() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &["angle-scan", "--omega-c", "1", "--omega-r", "0.005"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("no transparency angle"));
    let j = json(&dir.path().join("angle_scan_root.json"));
    assert!(j["numeric"].is_null());
    assert!((j["rhs"].as_f64().unwrap() - 4.0).abs() < 1e-12);
}

#[test]
fn angle_scan_without_rf_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        dir.path(),
        &[
            "angle-scan",
            "--omega-c",
            "1",
            "--omega-r",
            "0",
            "--format",
            "json",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("no transparency angle"));
    let j = json(&dir.path().join("angle_scan.json"));
    let im: Vec<f64> = j["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["im_chi_psi"].as_f64().unwrap())
        .collect();
    let spread =
        im.iter().cloned().fold(f64::MIN, f64::max) - im.iter().cloned().fold(f64::MAX, f64::min);
    assert!(spread <= 1e-10 * im[0].abs(), "{spread:e}");
}

#[test]
fn steady_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(dir.path(), &["steady", "--omega-c", "4", "--omega-r", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let j = json(&dir.path().join("steady.json"));
    assert!(j["max_abs_difference"].as_f64().unwrap() < 1e-9);
    let rho = &j["numeric"];
    let trace: f64 = (0..5).map(|i| rho[i][i][0].as_f64().unwrap()).sum();
    assert!((trace - 1.0).abs() < 1e-12);
}

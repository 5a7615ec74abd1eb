//! End-to-end checks of the `qbnet` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qbnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbnet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Metadata block plus column header, without the toolkit line.
fn header(csv: &str) -> String {
    let mut out = String::new();
    for line in csv.lines() {
        if line.starts_with("# toolkit:") {
            continue;
        }
        out.push_str(line);
        out.push('\n');
        if !line.starts_with('#') {
            break;
        }
    }
    out
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.header"));
    fs::read_to_string(path).unwrap()
}

fn figure(id: &str, dir: &Path) -> String {
    let o = qbnet(&["figure", id, "--out", dir.to_str().unwrap(), "--deterministic"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    fs::read_to_string(dir.join(format!("{id}.csv"))).unwrap()
}

#[test]
fn figure_headers_match_golden_files() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["fig2b", "fig2f", "fig3a", "fig4c"] {
        let csv = figure(id, dir.path());
        assert_eq!(header(&csv), golden(id), "{id}");
        assert!(csv.contains(&format!("# toolkit: qbnet {}\n", env!("CARGO_PKG_VERSION"))));
        assert!(!csv.contains("# generated:"));
    }
}

#[test]
fn deterministic_figures_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for id in ["fig2b", "fig2f", "fig3d"] {
        assert_eq!(figure(id, a.path()), figure(id, b.path()), "{id}");
    }
}

#[test]
fn timestamp_only_without_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let o = qbnet(&["figure", "fig2f", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("fig2f.csv")).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("# generated: unix ")));
}

#[test]
fn exported_rows_are_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let csv = figure("fig2b", dir.path());
    let rows: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 301);
    for row in rows {
        let cells: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.is_finite() && *c >= 0.0));
    }
}

#[test]
fn steady_prints_terminal_energy() {
    let o = qbnet(&["steady", "--n", "3", "--gb", "0.01"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let value: f64 = text.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(text.starts_with("E/ω [b3] = "), "{text}");
    assert!((value - 0.2056756186979704).abs() <= 1e-12 * value);
}

#[test]
fn exit_codes() {
    assert_eq!(qbnet(&["--help"]).status.code(), Some(0));
    assert_eq!(qbnet(&["steady", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(qbnet(&["figure", "fig9z"]).status.code(), Some(2));
    assert_eq!(
        qbnet(&["steady", "--config", "/nonexistent/run.json"]).status.code(),
        Some(2)
    );
    let o = qbnet(&["steady", "--variant", "r1", "--gamma", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn validate_reports_config_paths() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    fs::write(
        &good,
        r#"{"topology": {"family": "parallel", "variant": "nr", "n": 2, "gb": 0.01,
            "gamma": 0.1, "big_gamma": 0.1, "xi": [1, 0]}}"#,
    )
    .unwrap();
    let o = qbnet(&["validate", "--config", good.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).ends_with("ok\n"));

    let bad = dir.path().join("bad.json");
    fs::write(
        &bad,
        r#"{"sweep": {"variable": "gb", "start": 0, "stop": 1, "points": 3, "step": 2}}"#,
    )
    .unwrap();
    let o = qbnet(&["validate", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sweep"));
}

#[test]
fn sweep_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"topology": {"family": "cascaded", "variant": "nr", "n": 3, "gb": 0.01,
            "gamma": 0.1, "big_gamma": 0.1, "xi": [1, 0]},
            "sweep": {"variable": "gb", "start": 0.001, "stop": 0.1, "points": 5, "scale": "log"},
            "observables": ["steady_energy", "gain"]}"#,
    )
    .unwrap();
    let o = qbnet(&["sweep", "--config", cfg.to_str().unwrap(), "--deterministic"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let head = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(head, "gb,E_b3,E_nr_b3,E_r1_b3,E_r2_b3,G1_b3,G2_b3");
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 6);

    let o = qbnet(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--deterministic",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.is_object());
}

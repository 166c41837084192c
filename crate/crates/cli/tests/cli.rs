use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quartic(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quartic"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_quartics_at_level_six() {
    for curve in ["klein", "fermat"] {
        let dir = tempfile::tempdir().unwrap();
        let o = quartic(&["verify", "--curve", curve, "--level", "6"], dir.path());
        assert!(o.status.success(), "{curve}: {}", stderr(&o));
        let r = json(&dir.path().join("verify.json"));
        assert_eq!(r["passed"], true);
        let expected: Vec<&str> =
            r["checks"].as_array().unwrap().iter().map(|c| c["expected"].as_str().unwrap()).collect();
        for want in ["16π", "48π", "-8π"] {
            assert!(expected.contains(&want), "{curve}: {want} missing from {expected:?}");
        }
        assert_eq!(r["mesh"]["content_hash"].as_str().unwrap().len(), 40);
    }
}

#[test]
fn corrupted_mesh_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let o = quartic(&["verify", "--level", "2", "--no-such-flag"], dir.path());
    assert_eq!(o.status.code(), Some(2), "unknown flags are usage errors");

    // level 2 is too coarse for the area check but still writes the mesh
    let _ = quartic(&["verify", "--level", "2"], dir.path());
    let mesh_path = dir.path().join("mesh.json");
    let mut mesh = json(&mesh_path);
    mesh["triangles"].as_array_mut().unwrap().pop();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, mesh.to_string()).unwrap();
    let o = quartic(&["verify", "--mesh", bad.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Euler characteristic"), "{}", stderr(&o));
}

#[test]
fn failing_check_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let o = quartic(&["verify", "--level", "2"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAILED: area"), "{}", stderr(&o));
}

#[test]
fn scan_energy_locates_minimum() {
    let dir = tempfile::tempdir().unwrap();
    let o = quartic(&["scan-energy", "--level", "6"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("scan_energy.json"));
    assert_eq!(r["f_min_exact"], "(64 - 16√7)π");
    assert!((r["a_min_mesh"].as_f64().unwrap() - 0.1505).abs() < 5e-4);
    assert!((r["a_min_closed"].as_f64().unwrap() - 0.1505).abs() < 5e-4);
    assert!((r["f_at_zero_over_pi"].as_f64().unwrap() - 24.0).abs() < 0.24);
    assert!(r["max_rel_diff"].as_f64().unwrap() < 1e-2);

    let mut csv = csv::Reader::from_path(dir.path().join("scan_energy.csv")).unwrap();
    let headers: Vec<String> = csv.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(headers, ["a", "closed_form_energy", "mesh_energy", "F_closed", "F_mesh"]);
    assert_eq!(csv.records().count(), 201);
    let svg = std::fs::read_to_string(dir.path().join("scan_energy.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("minimum a = 0.1505"));
}

#[test]
fn outputs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = quartic(&["scan-energy", "--level", "3", "--metric", "random", "--seed", "5", "--step", "0.1"], dir.path());
        assert!(o.status.code().is_some());
        let o = quartic(&["balance", "--level", "3", "--metric", "random", "--seed", "5"], dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
    }
    for f in ["scan_energy.csv", "scan_energy.json", "scan_energy.svg", "balance.json"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between identical runs");
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"curve": "fermat", "level": 6, "tolerances": {"area_rel": 0.5}}"#).unwrap();
    let o = quartic(&["verify", "--config", cfg.to_str().unwrap(), "--level", "2"], dir.path());
    // loose area tolerance from the file, level from the flag
    let r = json(&dir.path().join("verify.json"));
    assert_eq!(r["mesh"]["curve"], "fermat");
    assert_eq!(r["mesh"]["level"], 2);
    let area = r["checks"].as_array().unwrap().iter().find(|c| c["name"] == "area").unwrap();
    assert_eq!(area["passed"], true);
    assert!(o.status.code().is_some());

    std::fs::write(&cfg, r#"{"curve": "fermat", "mesh_level": 2}"#).unwrap();
    let o = quartic(&["bound-report", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("mesh_level"), "{}", stderr(&o));
}

#[test]
fn bound_report_has_exact_constants() {
    let dir = tempfile::tempdir().unwrap();
    let o = quartic(&["bound-report"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let md = std::fs::read_to_string(dir.path().join("bounds.md")).unwrap();
    for s in ["(64 - 16√7)π", "24π", "16π", "8π", "(8/3)√3π^2", "-16π", "(48 - 16√7)π", "4/9 - (1/9)√7"] {
        assert!(md.contains(s), "{s} missing");
    }
    let rows = json(&dir.path().join("bounds.json"));
    assert!(rows.as_array().unwrap().len() >= 10);
    assert!(dir.path().join("bounds.csv").exists());
}

#[test]
fn spectrum_and_uniformize() {
    let dir = tempfile::tempdir().unwrap();
    let o = quartic(&["uniformize", "--level", "4"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("uniformize.json"));
    assert!(r["area_rel_error"].as_f64().unwrap() < 1e-3);
    assert!(r["residual_norm"].as_f64().unwrap() < 1e-8);

    let factor = dir.path().join("factor.json");
    let o = quartic(&["spectrum", "--level", "4", "--metric", factor.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(&dir.path().join("spectrum.json"));
    assert!((s["area"].as_f64().unwrap() - 8.0 * std::f64::consts::PI).abs() < 1e-6);
    let l = s["lambda1_area_over_pi"].as_f64().unwrap();
    assert!((l - 21.37).abs() < 0.05, "{l}");

    let o = quartic(&["uniformize", "--curve", "conic", "--level", "3", "--targetK", "-1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Gauss-Bonnet"), "{}", stderr(&o));
}

#[test]
fn full_theorem_chains() {
    let dir = tempfile::tempdir().unwrap();
    let o = quartic(&["full-theorem", "--level", "5"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("full_theorem.json"));
    assert_eq!(r["bound"], "(64 - 16√7)π");
    assert_eq!(r["all_hold"], true);

    let o = quartic(&["full-theorem", "--level", "5", "--metric", "hyperbolic"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let run = &json(&dir.path().join("full_theorem.json"))["runs"][0];
    let l = run["lambda1_area_over_pi"].as_f64().unwrap();
    assert!((l - 21.414).abs() < 0.1, "{l}");
    assert!(21.668 - l > 0.2);

    let o = quartic(&["full-theorem", "--level", "4", "--metric", "random", "--batch", "20"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("full_theorem.json"));
    assert_eq!(r["runs"].as_array().unwrap().len(), 20);
    assert_eq!(r["all_hold"], true);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

const SCENES: [&str; 6] = ["kepler_foci_circle", "kepler_string_construction", "hooke_cassini_oval", "hooke_directrices_r095", "hooke_directrices_r110", "hooke_directrices_r200"];

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn billiard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_billiard"))
        .args(args)
        .env_remove("BILLIARD_TOL")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn shipped(name: &str) -> Value {
    let text = std::fs::read_to_string(crate_dir().join("configs").join(format!("{name}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn write_config(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn scenes_match_goldens() {
    let dir = tempfile::tempdir().unwrap();
    let update = std::env::var_os("UPDATE_GOLDENS").is_some();
    for name in SCENES {
        let cfg = crate_dir().join("configs").join(format!("{name}.json"));
        let golden = crate_dir().join("tests/goldens").join(format!("{name}.svg"));
        let out = dir.path().join(format!("{name}.svg"));
        let o = billiard(&["render", "-c", s(&cfg), "-o", s(&out)]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let got = std::fs::read(&out).unwrap();
        if update {
            std::fs::write(&golden, &got).unwrap();
            continue;
        }
        assert!(got == std::fs::read(&golden).unwrap(), "{name} differs from its golden");
    }
}

#[test]
fn render_is_deterministic_and_defaults_to_stdout() {
    let cfg = crate_dir().join("configs/hooke_cassini_oval.json");
    let a = billiard(&["render", "-c", s(&cfg)]);
    let b = billiard(&["render", "-c", s(&cfg)]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    for id in ["boundary", "flight-ellipses", "foci-curve", "envelopes"] {
        assert!(text.contains(&format!("id=\"{id}\"")), "missing layer {id}");
    }
}

#[test]
fn simulate_writes_table_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = shipped("hooke_cassini_oval");
    v["bounces"] = json!(1000);
    v["outputs"] = json!({ "csv": "out/run.csv", "json": "out/run.json" });
    let cfg = write_config(dir.path(), "hooke.json", &v);
    let o = billiard(&["simulate", "-c", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let table = std::fs::read_to_string(dir.path().join("out/run.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next().unwrap(), "bounce,Px,Py,Fx,Fy,cassini_residual,aH,E_over_k");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1001);
    assert!(rows[1000].starts_with("1000,"));

    let written = std::fs::read_to_string(dir.path().join("out/run.json")).unwrap();
    assert_eq!(written.as_bytes(), o.stdout.as_slice());
    let summary: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(summary["bounces_completed"], json!(1000));
    assert!(summary["error"].is_null());
    assert!(summary["invariants"].get("aH").is_none());
    for key in ["cassini_residual", "E_over_k"] {
        let drift = summary["invariants"][key]["drift"].as_f64().unwrap();
        assert!(drift <= 1e-9, "{key} drift {drift}");
    }
}

#[test]
fn kepler_summary_tracks_the_foci_circle() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = shipped("kepler_foci_circle");
    v["bounces"] = json!(1000);
    v["outputs"] = json!({ "csv": "k.csv" });
    let cfg = write_config(dir.path(), "k.json", &v);
    let o = billiard(&["simulate", "-c", s(&cfg)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["R", "D", "focal_distance_defect"] {
        let drift = summary["invariants"][key]["drift"].as_f64().unwrap();
        assert!(drift <= 1e-9, "{key} drift {drift}");
    }
    let table = std::fs::read_to_string(dir.path().join("k.csv")).unwrap();
    assert!(table.starts_with("bounce,Px,Py,Fx,Fy,R,a,D\n"));
}

#[test]
fn zero_bounces_gives_only_the_start() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = shipped("kepler_foci_circle");
    v["bounces"] = json!(0);
    v["outputs"] = json!({ "csv": "z.csv" });
    let cfg = write_config(dir.path(), "z.json", &v);
    let o = billiard(&["simulate", "-c", s(&cfg)]);
    assert_eq!(code(&o), 0);
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["bounces_completed"], json!(0));
    let table = std::fs::read_to_string(dir.path().join("z.csv")).unwrap();
    assert_eq!(table.lines().count(), 2);
}

#[test]
fn malformed_config_names_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"system\": \"kepler\",\n  \"boundary\": { \"a\": 1, \"c\": \"half\" },\n  \"start\": {}\n}").unwrap();
    let o = billiard(&["simulate", "-c", s(&p)]);
    assert_eq!(code(&o), 2);
    let msg = stderr(&o);
    assert!(msg.contains("boundary.c") && msg.contains("line 3"), "{msg}");

    let mut v = shipped("kepler_foci_circle");
    v["physics"] = json!({ "alpha": 1.0 });
    let cfg = write_config(dir.path(), "repulsive.json", &v);
    let o = billiard(&["simulate", "-c", s(&cfg)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("alpha"));

    let mut v = shipped("kepler_foci_circle");
    v["bounce"] = json!(3);
    let cfg = write_config(dir.path(), "typo.json", &v);
    assert_eq!(code(&billiard(&["simulate", "-c", s(&cfg)])), 2);

    assert_eq!(code(&billiard(&["simulate", "-c", s(&dir.path().join("missing.json"))])), 2);
}

#[test]
fn invalid_tolerance_override_is_a_config_error() {
    let cfg = crate_dir().join("configs/kepler_foci_circle.json");
    let o = Command::new(env!("CARGO_BIN_EXE_billiard"))
        .args(["simulate", "-c", s(&cfg)])
        .env("BILLIARD_TOL", "-1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("BILLIARD_TOL"));
    let o = Command::new(env!("CARGO_BIN_EXE_billiard"))
        .args(["simulate", "-c", s(&cfg)])
        .env("BILLIARD_TOL", "1e-7")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_passes_on_shipped_configs() {
    for name in ["kepler_foci_circle", "hooke_cassini_oval", "admissible_kepler"] {
        let cfg = crate_dir().join("configs").join(format!("{name}.json"));
        let o = billiard(&["verify", "-c", s(&cfg)]);
        assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
        let report: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(report["passed"], json!(true));
        assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == json!(true)));
    }
}

#[test]
fn admissible_verify_covers_the_focal_angles() {
    let cfg = crate_dir().join("configs/admissible_kepler.json");
    let o = billiard(&["verify", "-c", s(&cfg)]);
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let names: Vec<&str> = report["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    for n in ["second_focus_membership", "focal_angle_monotone", "focal_angle_recurrence"] {
        assert!(names.contains(&n), "{n} missing from {names:?}");
    }
}

#[test]
fn perturbed_reference_radius_fails_verify() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = shipped("admissible_kepler");
    v["expect"] = json!({ "radius": 2.0 + 1e-3 });
    let cfg = write_config(dir.path(), "perturbed.json", &v);
    let o = billiard(&["verify", "-c", s(&cfg)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("foci_circle_drift"), "{}", stderr(&o));

    let mut v = shipped("hooke_cassini_oval");
    v["expect"] = json!({ "radius": 1.189207115002721 + 1e-3 });
    let cfg = write_config(dir.path(), "perturbed_h.json", &v);
    let o = billiard(&["verify", "-c", s(&cfg)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("cassini_residual"), "{}", stderr(&o));
}

#[test]
fn grazing_start_is_a_step_error() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        json!({"system": "hooke", "boundary": {"a": 1.5, "c": 1.0},
               "start": {"focus": [1.2, 0.0], "e_over_k": 1.53, "point": [1.5, 0.0]}, "bounces": 5}),
        json!({"system": "kepler", "boundary": {"a": 1.25, "c": 0.5},
               "start": {"focus": [1.2, 0.0], "a": 1.15, "point": [1.75, 0.0]}, "bounces": 5}),
    ];
    for (i, v) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("graze{i}.json"), v);
        let o = billiard(&["simulate", "-c", s(&cfg)]);
        assert_eq!(code(&o), 3, "{}", stderr(&o));
        assert!(stderr(&o).contains("tangentially"), "{}", stderr(&o));
    }
}

#[test]
fn collision_limit_is_reported_with_partial_summary() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = shipped("admissible_kepler");
    v["bounces"] = json!(200);
    v["outputs"] = json!({ "csv": "partial.csv" });
    let cfg = write_config(dir.path(), "long.json", &v);
    let o = billiard(&["simulate", "-c", s(&cfg)]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.contains("collision segment"), "{err}");
    let table = std::fs::read_to_string(dir.path().join("partial.csv")).unwrap();
    assert!(table.lines().count() > 2);
}

#[test]
fn sweep_keeps_order_and_reports_the_worst_code() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "good.json", &shipped("kepler_foci_circle"));
    let mut graze = shipped("kepler_foci_circle");
    graze["start"] = json!({"focus": [1.2, 0.0], "a": 1.15, "point": [1.75, 0.0]});
    graze["boundary"] = json!({"a": 1.25, "c": 0.5});
    let list = json!([
        good.file_name().unwrap().to_str().unwrap(),
        shipped("hooke_cassini_oval"),
        graze,
        shipped("hooke_directrices_r110"),
    ]);
    let listp = write_config(dir.path(), "list.json", &list);
    let o = billiard(&["sweep", "-c", s(&listp), "-j", "2"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let report: Value = serde_json::from_slice(&o.stdout).unwrap();
    let entries = report["entries"].as_array().unwrap();
    let got: Vec<(u64, u64)> = entries
        .iter()
        .map(|e| (e["index"].as_u64().unwrap(), e["exit_code"].as_u64().unwrap()))
        .collect();
    assert_eq!(got, vec![(0, 0), (1, 0), (2, 3), (3, 0)]);

    let single = billiard(&["sweep", "-c", s(&listp), "-j", "1"]);
    assert_eq!(single.stdout, o.stdout);

    let bad = write_config(dir.path(), "bad_list.json", &json!([{"system": "kepler"}, shipped("hooke_cassini_oval")]));
    let o = billiard(&["sweep", "-c", s(&bad)]);
    assert_eq!(code(&o), 2);

    assert_eq!(code(&billiard(&["sweep", "-c", s(&listp), "-j", "0"])), 2);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use vortex_images_cli::parse_config;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vortex-images"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(format!("{name}.json")).display().to_string()
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.display().to_string()
}

#[test]
fn shipped_configs_round_trip() {
    let mut count = 0;
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let c = parse_config(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(parse_config(&c.to_json()).unwrap(), c, "{}", path.display());
        count += 1;
    }
    assert!(count >= 9);
}

#[test]
fn check_reports_two_cylinder_separation() {
    let o = run(&["check", "--config", &config("two_cylinders")]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["q"], 0.25);
    assert_eq!(v["converges"], true);
    assert!(v["recommendedLevel"].as_u64().unwrap() >= 1);
}

#[test]
fn eval_reproduces_reference_values() {
    let o = run(&["eval", "--config", &config("two_cylinders"), "--velocity"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let expected = [-0.174608512540543, -0.047561219605849, -0.073398543207433, -0.020268684918721];
    for (p, e) in v["points"].as_array().unwrap().iter().zip(expected) {
        assert!((p["psi"].as_f64().unwrap() - e).abs() < 5e-6);
        assert!(p["u"].as_f64().is_some());
    }
}

#[test]
fn eval_marks_points_inside_cylinders() {
    let o = run(&["eval", "--config", &config("two_cylinders"), "--points", "[[0.1,0.1],[5,5]]", "--level", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["points"][0]["masked"], true);
    assert!(v["points"][0]["psi"].is_null());
    assert!(v["points"][1]["psi"].is_f64());
}

#[test]
fn grid_csv_layout() {
    let o = run(&["grid", "--config", &config("pair_no_circulation"), "--res", "5,4", "--bbox", "-4,4,-3,3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,psi,mask");
    assert_eq!(lines.len(), 1 + 20);
    let first: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(first[0].parse::<f64>().unwrap(), -3.2);
    assert_eq!(first[1].parse::<f64>().unwrap(), -2.25);
    // row-major: x varies fastest
    assert_eq!(lines[2].split(',').nth(1), lines[1].split(',').nth(1));

    let o = run(&["grid", "--config", &config("pair_no_circulation"), "--res", "3,3", "--bbox", "-4,4,-3,3", "--velocity"]);
    assert_eq!(stdout(&o).lines().next(), Some("x,y,u,v,mask"));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["grid", "--config", &config("uneven_triple_circulation"), "--res", "30,30", "--level", "6"];
    let a = run(&args);
    let b = run(&args);
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    let c = run(&with_threads);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);

    let args = ["advect", "--config", &config("pair_dynamics"), "--steps", "50"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn circulation_matches_prediction() {
    let o = run(&["circulation", "--config", &config("pair_opposite_circulation")]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for c in v["cylinders"].as_array().unwrap() {
        assert!(c["difference"].as_f64().unwrap().abs() < 1e-6);
    }
    assert!(v["infinity"]["difference"].as_f64().unwrap().abs() < 1e-4);
}

#[test]
fn limitset_accepts_touching_cylinders() {
    let o = run(&["limitset", "--config", &config("limitset_touching"), "--level", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,level");
    assert_eq!(lines.len() - 1, 3 + 6 + 12);
    // flow commands refuse the same domain
    let o = run(&["check", "--config", &config("limitset_touching")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn advect_writes_trajectories() {
    let o = run(&["advect", "--config", &config("pair_dynamics"), "--steps", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("t,vortex,x,y"));
    assert_eq!(text.lines().count(), 1 + 4 * 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = run(&["check", "--config", &config("two_cylinders"), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["cylinders"], 2);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let overlap = write_config(
        &dir,
        "overlap.json",
        r#"{"cylinders": [{"center": [0, 0], "radius": 1}, {"center": [1, 0], "radius": 1}]}"#,
    );
    let syntax = write_config(&dir, "syntax.json", "{\"cylinders\": [");
    let unknown = write_config(&dir, "unknown.json", r#"{"vortexes": []}"#);
    let both = write_config(
        &dir,
        "both.json",
        r#"{"cylinders": [{"center": [0, 0], "radius": 1}], "circulations": [0], "centerStrengths": [0]}"#,
    );
    for (args, key) in [
        (vec!["eval", "--config", &overlap, "--points", "[[5,5]]"], "overlap"),
        (vec!["check", "--config", &syntax], "line"),
        (vec!["check", "--config", &unknown], "vortexes"),
        (vec!["check", "--config", &both], "centerStrengths"),
        (vec!["check"], "--config"),
        (vec!["eval", "--config", &config("pair_no_circulation")], "--points"),
        (vec!["grid", "--config", &config("two_cylinders"), "--bbox", "1,0,0,1"], "bbox"),
        (vec!["check", "--config", "/nonexistent/config.json"], "nonexistent"),
        (vec!["frobnicate"], "frobnicate"),
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(o.stderr).unwrap();
        assert!(err.contains(key), "{args:?}: {err}");
    }
}

#[test]
fn computation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    // P close to 1: (K - 1) P^2 > 1
    let crowded = write_config(
        &dir,
        "crowded.json",
        r#"{"cylinders": [{"center": [0, 0], "radius": 1}, {"center": [2.1, 0], "radius": 1},
                          {"center": [4.2, 0], "radius": 1}],
            "vortices": [{"position": [2.1, 3], "circulation": 1}]}"#,
    );
    let o = run(&["check", "--config", &crowded]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stderr).unwrap().contains("warning"));
    let o = run(&["check", "--config", &crowded, "--strict"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["eval", "--config", &crowded, "--strict", "--points", "[[2.1,5]]"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["eval", "--config", &crowded, "--tol", "1e-6", "--points", "[[2.1,5]]"]);
    assert_eq!(o.status.code(), Some(1));

    let grazing = write_config(
        &dir,
        "grazing.json",
        r#"{"cylinders": [{"center": [0, 0], "radius": 1}],
            "vortices": [{"position": [1.0005, 0], "circulation": 1}]}"#,
    );
    let o = run(&["advect", "--config", &grazing, "--dt", "0.01", "--steps", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("t,vortex,x,y\n"));
}

#[test]
fn validate_reports_every_fixture_point() {
    let o = run(&["validate"]);
    let code = o.status.code().unwrap();
    assert!(code == 0 || code == 1);
    let text = stdout(&o);
    assert!(text.contains("gammaInfinity = 0 (assumed)"));
    let lines: Vec<&str> = text.lines().filter(|l| l.trim_start().starts_with("z =")).collect();
    assert_eq!(lines.len(), 7);
    // the two-cylinder rows are reproduced
    assert!(lines[..4].iter().all(|l| l.ends_with("ok")), "{text}");
    assert_eq!(code == 0, !text.contains("FAIL"));
}

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cdt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdt")).args(args).output().expect("spawn cdt")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn point(v: &Value) -> String {
    format!("{},{}", v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

/// Plain PGM (0 free, 255 occupied) with a full-height wall splitting the
/// map in two.
fn split_pgm(path: &Path) {
    let (w, h) = (40, 30);
    let mut text = format!("P2\n{w} {h}\n255\n");
    for _ in 0..h {
        let row: Vec<&str> = (0..w).map(|c| if (18..22).contains(&c) { "255" } else { "0" }).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn genmaps_init_and_plan() {
    let dir = tempfile::tempdir().unwrap();
    let out = cdt(&["genmaps", "--all", "--out", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["cluttered", "trap", "maze", "maze-loops", "floorplan"] {
        assert!(dir.path().join(format!("{name}.pgm")).exists());
        assert!(dir.path().join(format!("{name}.task.json")).exists());
    }

    let pgm = dir.path().join("floorplan.pgm");
    let art = dir.path().join("floorplan.json");
    let svg = dir.path().join("floorplan.svg");
    let out = cdt(&["init", "--map", s(&pgm), "--out", s(&art), "--svg", s(&svg), "--format", "json"]);
    assert!(out.status.success());
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["cells"].as_u64().unwrap() > 1);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let task: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("floorplan.task.json")).unwrap()).unwrap();
    let (start, goal) = (point(&task["start"]), point(&task["goal"]));
    let args = ["plan", "--map", s(&art), "--start", &start, "--goal", &goal, "--iterations", "500", "--seed", "3", "--no-timing"];
    let a = cdt(&args);
    let b = cdt(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(r["best"]["length"].as_f64().unwrap() > 0.0);
    assert!(!r["classes"].as_array().unwrap().is_empty());

    // the grid works as well as the artifact
    let c = cdt(&["plan", "--map", s(&pgm), "--start", &start, "--goal", &goal, "--iterations", "500", "--seed", "3", "--no-timing"]);
    assert_eq!(c.stdout, a.stdout);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("split.pgm");
    split_pgm(&pgm);
    let m = s(&pgm);

    let out = cdt(&["plan", "--map", m, "--start", "5,5", "--goal", "35,25"]);
    assert_eq!(out.status.code(), Some(2));
    let out = cdt(&["plan", "--map", m, "--start", "5,5", "--goal", "10,25"]);
    assert_eq!(out.status.code(), Some(0));
    let out = cdt(&["plan", "--map", s(&dir.path().join("missing.pgm")), "--start", "5,5", "--goal", "10,25"]);
    assert_eq!(out.status.code(), Some(3));
    let out = cdt(&["plan", "--map", m, "--start", "20,5", "--goal", "10,25"]);
    assert_eq!(out.status.code(), Some(4));
    let out = cdt(&["plan", "--map", m, "--start", "5,5", "--goal", "10,25", "--beta", "1.5"]);
    assert_eq!(out.status.code(), Some(4));
    let bad = dir.path().join("bad.pgm");
    std::fs::write(&bad, "P2\n2 2\n").unwrap();
    let out = cdt(&["init", "--map", s(&bad), "--out", s(&dir.path().join("x.json"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn encode_reports_codes_and_bad_vertices() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("split.pgm");
    split_pgm(&pgm);
    let line = dir.path().join("line.txt");
    std::fs::write(&line, "2,2\n10 20\n15,28\n").unwrap();
    let out = cdt(&["encode", "--map", s(&pgm), "--polyline", s(&line)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(!String::from_utf8(out.stdout).unwrap().trim().is_empty());

    std::fs::write(&line, "[[2, 2], [20, 15], [30, 15]]").unwrap();
    let out = cdt(&["encode", "--map", s(&pgm), "--polyline", s(&line)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertex 1"));
}

#[test]
fn bench_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"map": {"generated": {"archetype": "floorplan", "width": 80, "height": 80, "obstacles": 1, "seed": 2}},
            "planners": ["cdt", "rrt-star"], "repetitions": 2, "iterations": 300, "rrt_iterations": 3000}"#,
    )
    .unwrap();
    let out = cdt(&["bench", "--spec", s(&spec), "--format", "csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("task,planner,beta,runs"));
    assert_eq!(lines.count(), 2);

    let json = dir.path().join("report.json");
    let out = cdt(&["bench", "--spec", s(&spec), "--out", s(&json)]);
    assert!(out.status.success());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["runs"].as_array().unwrap().len(), 4);
    assert!(r["metadata"]["c_opt_definition"].as_str().unwrap().contains("Dijkstra"));

    std::fs::write(&spec, r#"{"map": {"generated": {"archetype": "maze", "width": 40, "height": 40}}, "planners": [], "repetitions": 0, "iterations": 10}"#).unwrap();
    assert_eq!(cdt(&["bench", "--spec", s(&spec)]).status.code(), Some(4));
}

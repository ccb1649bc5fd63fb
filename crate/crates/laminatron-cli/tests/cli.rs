use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("laminatron-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_laminatron")).args(args).current_dir(dir).output().unwrap()
}

fn config(dir: &Path, body: &str) -> String {
    let p = dir.join("run.json");
    std::fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn default_pipeline_passes() {
    let d = scratch("default");
    let o = run(&["all", "--out", "a"], &d);
    assert!(o.status.success(), "{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    for f in ["sequence.json", "intersections.csv", "verify.json", "sandwich.csv", "trace.csv", "timeline.csv"] {
        assert!(d.join("a").join(f).exists(), "missing {f}");
    }
}

#[test]
fn runs_are_deterministic() {
    let d = scratch("det");
    for out in ["x", "y"] {
        assert!(run(&["all", "--out", out], &d).status.success());
    }
    let mut names: Vec<_> = std::fs::read_dir(d.join("x")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        let a = std::fs::read(d.join("x").join(&n)).unwrap();
        let b = std::fs::read(d.join("y").join(&n)).unwrap();
        assert_eq!(a, b, "{n:?} differs");
    }
}

#[test]
fn corrupt_config_reports_position() {
    let d = scratch("corrupt");
    let c = config(&d, "{\n  \"family\": {\"kind\": \"s05\"},\n  \"max_index\": ,\n}");
    let o = run(&["verify", "--config", &c], &d);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3 column"), "{err}");
}

#[test]
fn injected_twist_power_fails_verification() {
    let d = scratch("inject");
    let c = config(
        &d,
        r#"{"family": {"kind": "s05"}, "eseq": {"a": "576", "e0": "1", "mode": "geometric", "inject": [1, "7"]},
            "max_index": 6}"#,
    );
    let o = run(&["verify", "--config", &c], &d);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("local conditions             FAIL"));
}

#[test]
fn synthetic_trace_is_cyclic() {
    let d = scratch("synthetic");
    let c = config(
        &d,
        r#"{"family": {"kind": "synthetic", "m": 3, "b": "2"},
            "eseq": {"a": "8", "e0": "64", "mode": "geometric"}, "max_index": 30}"#,
    );
    let o = run(&["trace", "--config", &c, "--out", "t"], &d);
    assert!(o.status.success(), "{}", stdout(&o));
    let j: serde_json::Value = serde_json::from_slice(&std::fs::read(d.join("t/trace.json")).unwrap()).unwrap();
    let from = j["cyclic_from"].as_u64().unwrap() as usize;
    let edges = j["edges"].as_array().unwrap();
    let tail: Vec<_> = edges.iter().filter(|e| e["window"].as_u64().unwrap() as usize >= from).collect();
    assert!(tail.len() >= 6);
    for e in tail {
        let k = e["window"].as_u64().unwrap();
        assert_eq!(e["from"].as_u64().unwrap(), k % 3);
        assert_eq!(e["to"].as_u64().unwrap(), (k + 1) % 3);
    }
}

#[test]
fn profile_grid_written() {
    let d = scratch("grid");
    let o = run(&["timeline", "--grid", "0:4:0.5", "--out", "g"], &d);
    assert!(o.status.success(), "{}", stdout(&o));
    let csv = std::fs::read_to_string(d.join("g/profile.csv")).unwrap();
    assert!(csv.starts_with("t,k,width"));
    assert!(csv.lines().count() > 9);
}

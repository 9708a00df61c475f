use std::path::{Path, PathBuf};

use ncergo::report::{render_csv, render_json};
use ncergo::{emit_report, run_scenario, OutputFormat, RunOptions, Scenario, Status, Task};

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> Scenario {
    Scenario::load(&scenarios().join(name)).unwrap()
}

const IDENTITY: &str = r#"
name = "identity"
dimension = 2

[algebra]
blocks = [2, 1]
weights = [1.0, 0.25]

[[contractions]]
kind = "identity"

[[contractions]]
kind = "identity"

[x]
kind = "text"
text = """
blocks: 2,1; weights: 1,0.25
2,0 0,1
0,-1 3,0
0.5,0
"""

[average]
upper = [4, 4]
"#;

#[test]
fn identity_maps_reproduce_x() {
    let s = Scenario::parse(IDENTITY, ".").unwrap();
    let r = run_scenario(&s, &[Task::Average], &RunOptions::default());
    assert!(!r.failed());
    let names: Vec<_> = r.tasks.iter().map(|t| t.task.as_str()).collect();
    assert_eq!(names, ["verify", "average"]);
    let t = r.table("averages").unwrap();
    assert_eq!(t.rows.len(), 16);
    let x_norm = (4.0f64 + 1.0 + 1.0 + 9.0 + 0.25 * 0.25).sqrt();
    for row in &t.rows {
        match (&row[2], &row[3]) {
            (ncergo::report::Cell::Float(n), ncergo::report::Cell::Float(d)) => {
                assert!((n - x_norm).abs() < 1e-13, "{n} vs {x_norm}");
                assert!(*d < 1e-13);
            }
            other => panic!("unexpected cells {other:?}"),
        }
    }
    let csv = render_csv(t);
    assert_eq!(csv.lines().count(), 17);
    assert!(csv.starts_with("N1,N2,norm_l2,dist_limit_l2,evaluator\n"));
}

#[test]
fn invalid_kraus_fails_verify_and_skips_dependents() {
    let src = IDENTITY.replacen(
        "[[contractions]]\nkind = \"identity\"",
        "[[contractions]]\nkind = \"kraus\"\noperators = [{ kind = \"scalar\", value = 1.5 }]",
        1,
    );
    let s = Scenario::parse(&src, ".").unwrap();
    let r = run_scenario(&s, &[Task::Verify, Task::Average], &RunOptions::default());
    assert!(r.failed());
    let verify = r.task("verify").unwrap();
    assert_eq!(verify.status, Status::Failed);
    let msg = verify.error.as_deref().unwrap();
    assert!(msg.contains("subunital") || msg.contains("trace-decreasing"), "{msg}");
    let avg = r.task("average").unwrap();
    assert_eq!(avg.status, Status::Skipped);
    assert!(r.table("averages").is_none());
}

#[test]
fn besicovitch_runs_without_contractions_check() {
    let s = load("harmonic_1d.toml");
    let r = run_scenario(&s, &[Task::Besicovitch], &RunOptions::default());
    let names: Vec<_> = r.tasks.iter().map(|t| t.task.as_str()).collect();
    assert_eq!(names, ["besicovitch"]);
    let sum = &r.task("besicovitch").unwrap().summary;
    assert_eq!(sum["observed_onset"], 105);
}

#[test]
fn certify_pulls_in_prerequisites() {
    let s = load("pinching_2d.toml");
    let r = run_scenario(&s, &[Task::Certify], &RunOptions::default());
    let names: Vec<_> = r.tasks.iter().map(|t| t.task.as_str()).collect();
    assert_eq!(names, ["verify", "average", "certify"]);
    assert!(!r.failed());
    assert_eq!(r.artifacts.len(), 3);
    let e = ncergo::format::read_element(&r.artifacts[0].1).unwrap();
    assert!(e.is_hermitian(0.0));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let s = load("kraus_rotation.toml");
    let tasks = ncergo::configured_tasks(&s);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let r = run_scenario(&s, &tasks, &RunOptions::default());
        emit_report(&r, dir.path(), OutputFormat::Both).unwrap();
    }
    let mut compared = 0;
    for entry in std::fs::read_dir(a.path()).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "timing.json" {
            continue;
        }
        let x = std::fs::read(a.path().join(&name)).unwrap();
        let y = std::fs::read(b.path().join(&name)).unwrap();
        assert_eq!(x, y, "{name:?} differs");
        compared += 1;
    }
    assert_eq!(compared, 5);
}

#[test]
fn seed_override_changes_digest_and_draws() {
    let s = load("kraus_rotation.toml");
    let base = run_scenario(&s, &[Task::Average], &RunOptions::default());
    let opts = RunOptions {
        seed_override: Some(8),
        ..RunOptions::default()
    };
    let other = run_scenario(&s, &[Task::Average], &opts);
    assert_ne!(base.digest, other.digest);
    assert_ne!(base.table("averages"), other.table("averages"));
    assert_eq!(other.seed, Some(8));
}

#[test]
fn emitted_report_round_trips() {
    let s = load("pinching_2d.toml");
    let r = run_scenario(&s, &[Task::Average], &RunOptions::default());
    let text = render_json(&r.to_json());
    let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(render_json(&parsed), text);
}

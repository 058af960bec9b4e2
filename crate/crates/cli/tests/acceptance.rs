//! Acceptance criterion 7: determinism of `check --deterministic` across
//! repeated runs and worker counts.

use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run_check(out: &std::path::Path, workers: &str) {
    let status = Command::new(env!("CARGO_BIN_EXE_rulemon"))
        .args([
            "check",
            "--map",
            fixture("motorway.json").to_str().unwrap(),
            "--traj",
            fixture("tailgate.csv").to_str().unwrap(),
            "--rules",
            "all",
            "--deterministic",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ])
        .status()
        .expect("binary runs");
    assert!(status.success());
}

#[test]
fn acceptance_7_deterministic_reports() {
    let base = std::env::temp_dir().join(format!("rulemon-acc7-{}", std::process::id()));
    let mut renders: Vec<(String, String, String)> = Vec::new();
    for (tag, workers) in [("w1a", "1"), ("w1b", "1"), ("w8a", "8"), ("w8b", "8")] {
        let out = base.join(tag);
        std::fs::create_dir_all(&out).unwrap();
        run_check(&out, workers);
        renders.push((
            std::fs::read_to_string(out.join("report.json")).unwrap(),
            std::fs::read_to_string(out.join("report.csv")).unwrap(),
            std::fs::read_to_string(out.join("metrics.csv")).unwrap(),
        ));
    }
    std::fs::remove_dir_all(&base).ok();
    for other in &renders[1..] {
        assert_eq!(renders[0], *other, "reports differ across runs/workers");
    }
    println!("ACCEPTANCE 7 deterministic-reports: PASS (2 runs x workers 1 and 8)");
}

//! Exit-code and surface checks for the command-line interface.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_flowjam"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("flowjam-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn code(out: &std::process::Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn ingest_malformed_file_exits_2() {
    let dir = tmp_dir("ingest");
    std::fs::write(dir.join("bad.txt"), "a\tb\n").unwrap();
    let out = bin()
        .args(["ingest", "bad.txt", "out.json"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 1"), "stderr: {stderr}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn missing_scenario_exits_2() {
    let out = bin().args(["det", "no-such-file.json"]).output().unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn det_on_robust_scenario_exits_2() {
    let out = bin()
        .args(["det", fixture("example_robust.json").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn truncated_oracle_exits_4() {
    let out = bin()
        .args([
            "det",
            fixture("example_det.json").to_str().unwrap(),
            "--depth",
            "1",
            "--oracle",
            "--oracle-cap",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 4);
}

#[test]
fn det_reference_reports_ratio_one() {
    let out = bin()
        .args([
            "det",
            fixture("example_det.json").to_str().unwrap(),
            "--depth",
            "2",
            "--oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"achieved\":4"), "stdout: {stdout}");
    assert!(stdout.contains("\"oracle\":4"), "stdout: {stdout}");
    assert!(stdout.contains("\"ratio\":1"), "stdout: {stdout}");
}

#[test]
fn det_depth_zero_ratio_at_most_one() {
    let out = bin()
        .args([
            "det",
            fixture("example_det.json").to_str().unwrap(),
            "--depth",
            "0",
            "--oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let ratio_field = stdout.split("\"ratio\":").nth(1).unwrap();
    let ratio: f64 = ratio_field
        .chars()
        .take_while(|c| c.is_ascii_digit() || *c == '.' || *c == '-')
        .collect::<String>()
        .parse()
        .unwrap();
    assert!((0.0..=1.0 + 1e-9).contains(&ratio), "ratio {ratio}");
}

#[test]
fn bench_empty_glob_writes_header_only() {
    let dir = tmp_dir("bench-empty");
    let out = bin()
        .args(["bench", "nothing-*.json", "--out", "rows.csv"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let rows = std::fs::read_to_string(dir.join("rows.csv")).unwrap();
    assert_eq!(
        rows,
        "scenario,algorithm,depth,anchors,epsilon,n0,k,xi,achieved,oracle,ratio,wall_ms,evals\n"
    );
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bench_rows_and_summary_agree() {
    let dir = tmp_dir("bench-rows");
    // Three scenarios at two depths gives six rows.
    for seed in [1u64, 2, 3] {
        let out = bin()
            .args([
                "generate",
                &format!("sc{seed}.json"),
                "--synthetic",
                "5,3",
                "--k",
                "3",
                "--disjoint",
                "--seed",
                &seed.to_string(),
                "--max-paths",
                "500",
                "--min-paths",
                "5",
            ])
            .current_dir(&dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    let out = bin()
        .args([
            "bench", "sc*.json", "--out", "rows.csv", "--depths", "2,3", "--oracle",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rows = std::fs::read_to_string(dir.join("rows.csv")).unwrap();
    let lines: Vec<&str> = rows.lines().collect();
    assert_eq!(lines.len(), 1 + 6, "rows: {rows}");

    // Summary means must equal a hand recomputation from the rows.
    let mut by_depth: std::collections::BTreeMap<&str, Vec<f64>> = Default::default();
    for line in &lines[1..] {
        let fields: Vec<&str> = line.split(',').collect();
        let depth = fields[2];
        if let Ok(ratio) = fields[10].parse::<f64>() {
            by_depth.entry(depth).or_default().push(ratio);
        }
    }
    let summary = std::fs::read_to_string(dir.join("rows.summary.csv")).unwrap();
    for line in summary.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        let depth = fields[1];
        let count: usize = fields[5].parse().unwrap();
        let mean: f64 = fields[6].parse().unwrap();
        let expect = &by_depth[depth];
        assert_eq!(count, expect.len());
        let hand = expect.iter().sum::<f64>() / expect.len() as f64;
        assert!((mean - hand).abs() < 1e-12, "depth {depth}: {mean} vs {hand}");
    }
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn bad_anchor_count_exits_2() {
    for cmd in ["det", "robust"] {
        let out = bin()
            .args([
                cmd,
                fixture("example_det.json").to_str().unwrap(),
                "--anchors",
                "1",
            ])
            .output()
            .unwrap();
        assert_eq!(code(&out), 2, "{cmd} accepted one anchor");
    }
}

#[test]
fn robust_on_deterministic_scenario_collapses() {
    // A deterministic scenario runs as a single-candidate uncertainty set;
    // the achieved worst case must match the known optimum.
    let out = bin()
        .args([
            "robust",
            fixture("example_det.json").to_str().unwrap(),
            "--depth",
            "3",
            "--n0",
            "1",
            "--oracle",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"achieved\":4"), "stdout: {stdout}");
    assert!(stdout.contains("\"oracle\":4"), "stdout: {stdout}");
}

#[test]
fn medium_synthetic_pipeline_smoke() {
    // A 60-node layered network end to end: generate, search, verify ratio.
    let dir = tmp_dir("medium");
    let out = bin()
        .args([
            "generate", "sc.json", "--synthetic", "10,6,0.4,0.05", "--k", "6", "--disjoint",
            "--seed", "77", "--max-paths", "1500", "--min-paths", "40",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let out = bin()
        .args(["det", "sc.json", "--depth", "2", "--oracle"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    let ratio_field = stdout.split("\"ratio\":").nth(1).unwrap();
    assert!(!ratio_field.starts_with("null"), "no ratio in {stdout}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn generate_requires_exactly_one_input() {
    let dir = tmp_dir("gen-input");
    let out = bin()
        .args(["generate", "out.json", "--k", "1"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn threads_env_is_respected() {
    // Functional smoke check: capped workers still produce identical CSVs.
    let dir = tmp_dir("threads");
    let gen = bin()
        .args([
            "generate", "sc.json", "--synthetic", "4,3", "--k", "2", "--seed", "5",
            "--max-paths", "200",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&gen), 0);
    let run = |threads: &str| -> String {
        let out = bin()
            .args(["bench", "sc.json", "--out", &format!("r{threads}.csv"), "--depths", "1,2"])
            .env("FLOWJAM_THREADS", threads)
            .current_dir(&dir)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        let text = std::fs::read_to_string(dir.join(format!("r{threads}.csv"))).unwrap();
        // Timing varies; compare rows with the wall column blanked.
        text.lines()
            .map(|l| {
                let mut f: Vec<&str> = l.split(',').collect();
                if f.len() == 13 && f[0] != "scenario" {
                    f[11] = "-";
                }
                f.join(",")
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(run("1"), run("4"));
    let _ = std::fs::remove_dir_all(&dir);
}

fn exists(p: &Path) -> bool {
    std::fs::metadata(p).is_ok()
}

#[test]
fn ingest_generate_pipeline() {
    let dir = tmp_dir("pipeline");
    std::fs::write(dir.join("edges.txt"), "0\t1\n1\t2\n2\t0\n0\t2\n").unwrap();
    let out = bin()
        .args(["ingest", "edges.txt", "skel.json"])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(exists(&dir.join("skel.json")));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"removed_edges\":1"), "stdout: {stdout}");

    let out = bin()
        .args([
            "generate", "sc.json", "--skeleton", "skel.json", "--k", "1", "--seed", "3",
        ])
        .current_dir(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(exists(&dir.join("sc.json")));
    let _ = std::fs::remove_dir_all(&dir);
}

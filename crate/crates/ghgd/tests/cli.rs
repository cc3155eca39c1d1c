//! End-to-end tests of the `ghgd` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ghgd::{ExactOverlapDistribution, SampleReport};

fn ghgd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ghgd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn fixture_lists() -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/gene_lists");
    ["list_a.txt", "list_b.txt", "list_c.txt", "list_d.txt"]
        .iter()
        .map(|name| dir.join(name).to_string_lossy().into_owned())
        .collect()
}

fn write_lines(dir: &Path, name: &str, lines: &[&str]) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, lines.join("\n")).unwrap();
    path
}

#[test]
fn report_golden_path() {
    let lists = fixture_lists();
    let mut args = vec!["report"];
    args.extend(lists.iter().map(|s| s.as_str()));
    args.extend(["--universe-size", "19815"]);
    let out = ghgd(&args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    let text = stdout(&out);
    assert!(text.contains("universe N=19815"));
    for needle in [
        "0.000017",
        "0.012717",
        "3.505980",
        "426.949821",
        "0.012734",
        "3.518714",
        "430.468535",
        "100.00%",
        "86.75%",
    ] {
        assert!(text.contains(needle), "missing {needle} in:\n{text}");
    }
    // Exactly rows come first, each kind from the deepest level down.
    let pos = |s: &str| text.find(s).unwrap();
    assert!(pos("LO = 4") < pos("LO = 1"));
    assert!(pos("LO = 1") < pos("LO >= 4"));
}

#[test]
fn report_json_is_machine_readable() {
    let lists = fixture_lists();
    let mut args = vec!["report"];
    args.extend(lists.iter().map(|s| s.as_str()));
    args.extend(["--universe-size", "19815", "--format", "json"]);
    let out = ghgd(&args);
    assert!(out.status.success());

    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["n"], 19815);
    assert_eq!(doc["alpha"], 0.05);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0]["feature"]["kind"], "exactly");
    assert_eq!(rows[0]["feature"]["t"], 4);
    assert_eq!(rows[0]["noess"], 14);
    assert_eq!(rows[0]["shn"], 14);
    assert_eq!(rows[7]["feature"]["kind"], "at_least");
    assert_eq!(rows[7]["feature"]["t"], 1);
    assert_eq!(rows[7]["direction"], "below_mean");
    assert!(rows[7]["shn"].is_null());
}

#[test]
fn report_exact_tails_small_case() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_lines(dir.path(), "a.txt", &["e1", "e2"]);
    let b = write_lines(dir.path(), "b.txt", &["e1", "e3"]);
    let out = ghgd(&[
        "report",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--universe-size",
        "5",
        "--exact",
        "--format",
        "tsv",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let header: Vec<&str> = text.lines().next().unwrap().split('\t').collect();
    let col = header.iter().position(|h| *h == "exact_tail").unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), header.len());
        assert_ne!(fields[col], "n/a", "exact tail missing in {line}");
    }
}

#[test]
fn report_duplicate_warning_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_lines(dir.path(), "a.txt", &["e1", "e1", "e2"]);
    let b = write_lines(dir.path(), "b.txt", &["e2", "e3"]);
    let out = ghgd(&[
        "report",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--universe-size",
        "10",
    ]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("duplicate identifier"));
    assert!(stdout(&out).contains("M=[2, 2]"));
}

#[test]
fn report_fold_case_merges_variants() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_lines(dir.path(), "a.txt", &["Gene1", "GENE1", "gene2"]);
    let b = write_lines(dir.path(), "b.txt", &["gene1"]);
    let out = ghgd(&[
        "report",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--universe-size",
        "10",
        "--fold-case",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("M=[2, 1]"));
}

#[test]
fn report_universe_file_membership() {
    let dir = tempfile::tempdir().unwrap();
    let universe = write_lines(dir.path(), "universe.txt", &["e1", "e2", "e3", "e4"]);
    let a = write_lines(dir.path(), "a.txt", &["e1", "e9"]);
    let out = ghgd(&[
        "report",
        a.to_str().unwrap(),
        "--universe-file",
        universe.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not in the universe"));
    assert!(stderr(&out).contains("e9"));
}

#[test]
fn report_zmin_rule_alias() {
    let lists = fixture_lists();
    let mut args = vec!["report"];
    args.extend(lists.iter().map(|s| s.as_str()));
    args.extend(["--universe-size", "19815", "--zmin-rule", "strict"]);
    let out = ghgd(&args);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("strict_ceil"));
}

#[test]
fn stats_all_levels_text() {
    let out = ghgd(&["stats", "--n", "19815", "--m", "127,110,87,110"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("426.949821"));
    assert!(text.contains("13.682894"));
    let rows = text
        .lines()
        .filter(|l| l.starts_with("exactly:") || l.starts_with("at_least:"))
        .count();
    assert_eq!(rows, 8);
}

#[test]
fn stats_single_feature_tsv_has_exact_fractions() {
    let out = ghgd(&[
        "stats",
        "--n",
        "5",
        "--m",
        "2,2",
        "--feature",
        "exactly:2",
        "--format",
        "tsv",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("4/5"), "want exact mean 4/5 in:\n{text}");
    assert!(text.contains("9/25"), "want exact variance 9/25 in:\n{text}");
}

#[test]
fn dist_json_golden() {
    let out = ghgd(&[
        "dist",
        "--n",
        "5",
        "--m",
        "2,2",
        "--feature",
        "exactly:2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out).trim_end(),
        r#"{"n":5,"m":[2,2],"feature":{"kind":"exactly","t":2},"normalizer":"100","counts":{"0":"30","1":"60","2":"10"}}"#
    );
}

#[test]
fn dist_json_round_trips_through_library() {
    let out = ghgd(&[
        "dist",
        "--n",
        "9",
        "--m",
        "4,3,2",
        "--feature",
        "at_least:2",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let dist = ExactOverlapDistribution::from_json_str(&stdout(&out)).unwrap();
    assert_eq!(dist.spec().n(), 9);
    assert_eq!(dist.to_json_string(), stdout(&out).trim_end());
}

#[test]
fn sample_seed_reproducibility() {
    let args = [
        "sample", "--n", "30", "--m", "6,8,5", "--feature", "at_least:1", "--draws", "2000",
        "--seed", "99", "--format", "json",
    ];
    let first = ghgd(&args);
    let second = ghgd(&args);
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&second));

    let report = SampleReport::from_json_str(&stdout(&first)).unwrap();
    assert_eq!(report.draws(), 2000);
    assert_eq!(report.seed(), 99);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dist.json");
    let out = ghgd(&[
        "dist",
        "--n",
        "6",
        "--m",
        "3,3",
        "--feature",
        "exactly:2",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    let dist = ExactOverlapDistribution::from_json_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(dist.spec().m(), &[3, 3]);
}

#[test]
fn usage_error_exits_1() {
    let out = ghgd(&["dist", "--n", "5"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("required"));

    let out = ghgd(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn validation_error_exits_2() {
    let out = ghgd(&["dist", "--n", "5", "--m", "9,2", "--feature", "exactly:1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"));

    let out = ghgd(&["stats", "--n", "5", "--m", "2,2", "--feature", "exactly:7"]);
    assert_eq!(out.status.code(), Some(2));

    let out = ghgd(&["stats", "--n", "5", "--m", "2,2", "--feature", "exactly:x"]);
    assert_eq!(out.status.code(), Some(1)); // malformed value is a usage error
}

#[test]
fn budget_error_exits_3() {
    let out = ghgd(&[
        "dist",
        "--n",
        "60",
        "--m",
        "20,20,20,20",
        "--feature",
        "exactly:4",
        "--exact-budget",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("budget"));
}

#[test]
fn help_exits_0() {
    let out = ghgd(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("report"));
    assert!(stdout(&out).contains("sample"));
}

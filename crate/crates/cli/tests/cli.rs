//! End-to-end tests of the `groundsplit` binary: flags, exit codes, and
//! output layout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_groundsplit"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

const TRIANGLE_FIXTURE: &str = "{g(X,Y)} :- e(X,Y).\n:- g(X1,X2), g(X1,X3), g(X2,X3).\n";

fn complete_digraph(n: i64) -> String {
    let mut text = String::new();
    for i in 1..=n {
        for j in 1..=n {
            if i != j {
                text.push_str(&format!("e({i},{j}).\n"));
            }
        }
    }
    text
}

#[test]
fn split_writes_annotated_program_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let instance = write(dir.path(), "k7.lp", &complete_digraph(7));
    let out = bin().args(["split"]).arg(&fixture).arg(&instance).output().unwrap();
    assert!(out.status.success(), "{}", stderr(&out));

    let annotated = fs::read_to_string(dir.path().join("prog.lp.annotated.lp")).unwrap();
    assert_eq!(annotated.matches("%!marker: bdg").count(), 1);
    assert!(annotated.contains(":- g(X1,X2), g(X1,X3), g(X2,X3)."));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("prog.lp.report.json")).unwrap())
            .unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["records"].as_array().unwrap().len(), 2);
    assert_eq!(report["summary"]["bdg_rules"], 1);
    let digest = report["input_digest"].as_str().unwrap();
    assert_eq!(digest.len(), "sha256:".len() + 64, "{digest}");
}

#[test]
fn output_flag_relocates_the_split_files() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let instance = write(dir.path(), "k4.lp", &complete_digraph(4));
    let base = dir.path().join("out/result");
    fs::create_dir(dir.path().join("out")).unwrap();
    let out = bin()
        .args(["split"])
        .arg(&fixture)
        .arg(&instance)
        .arg("--output")
        .arg(&base)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("out/result.annotated.lp").exists());
    assert!(dir.path().join("out/result.report.json").exists());
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.lp", "p(1]. ");
    let out = bin().args(["split"]).arg(&broken).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("syntax error"), "{}", stderr(&out));
}

#[test]
fn aggregates_exit_three_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let agg = write(dir.path(), "agg.lp", "p(1).\n:- #count { X : p(X) } > 0.\n");
    let out = bin().args(["estimate"]).arg(&agg).output().unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    let msg = stderr(&out);
    assert!(msg.contains("aggregate"), "{msg}");
    assert!(msg.contains("line 2"), "{msg}");
}

#[test]
fn blown_ground_cap_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let instance = write(dir.path(), "k7.lp", &complete_digraph(7));
    let out = bin()
        .args(["ground", "--mode", "naive", "--ground-cap", "10"])
        .arg(&fixture)
        .arg(&instance)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
}

#[test]
fn gen_is_deterministic_and_sized_right() {
    let run = || {
        let out = bin()
            .args(["gen", "4", "--density", "100", "--seed", "9"])
            .output()
            .unwrap();
        assert!(out.status.success());
        stdout(&out)
    };
    let first = run();
    assert_eq!(first, run(), "same arguments must reproduce byte-identically");
    assert_eq!(first.lines().count(), 13, "seed fact + 12 edges");
    assert!(first.starts_with("seed(9).\n"));
}

#[test]
fn gen_path_topology_emits_a_path() {
    let out = bin().args(["gen", "100", "--topology", "path", "--pred", "g"]).output().unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("g(")).count(), 99);
    assert!(text.contains("g(1,2).\n"));
    assert!(text.contains("g(99,100).\n"));
}

#[test]
fn gen_validates_density() {
    let out = bin().args(["gen", "4", "--density", "150"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn ground_prints_the_count_on_stderr() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "r2.lp", ":- g(X1,X2), g(X1,X3), g(X2,X3).\n");
    let path = bin().args(["gen", "100", "--topology", "path", "--pred", "g"]).output().unwrap();
    let instance = write(dir.path(), "path.lp", &stdout(&path));
    let out = bin()
        .args(["ground", "--mode", "bottom-up"])
        .arg(&fixture)
        .arg(&instance)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stderr(&out).trim(), "0", "path instances ground to nothing");
    let text = stdout(&out);
    assert!(text.contains("g(1,2)."), "facts are still printed");
    assert!(!text.contains(":-"), "no ground constraints on a path");
}

#[test]
fn estimate_csv_for_facts_only_input_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let facts = write(dir.path(), "facts.lp", "e(1,2). e(2,3).\n");
    let out = bin().args(["estimate", "--csv"]).arg(&facts).output().unwrap();
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "rule_id,num_vars,max_arity,phi,sota_estimate,bdg_estimate,decision,rule\n"
    );
}

#[test]
fn estimate_table_shows_the_frozen_pair() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let instance = write(dir.path(), "k4.lp", &complete_digraph(4));
    let out = bin().args(["estimate"]).arg(&fixture).arg(&instance).output().unwrap();
    assert!(out.status.success());
    let row = stdout(&out);
    let row = row.lines().find(|l| l.contains(":- g(")).unwrap();
    assert!(row.contains("27.00") && row.contains("74.00") && row.contains("SOTA"), "{row}");
}

#[test]
fn profile_reproduces_the_frozen_sweep_rows() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let csv = dir.path().join("sweep.csv");
    let out = bin()
        .args(["profile", "--sizes", "4,7", "--densities", "100", "--actual-cap", "7"])
        .arg(&fixture)
        .arg("--output")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out), "", "--output consumed the table");
    assert_eq!(
        fs::read_to_string(&csv).unwrap(),
        "n,density,sota_estimate,bdg_estimate,actual_sota\n\
         4,100,27.00,74.00,24\n\
         7,100,216.00,191.00,210\n"
    );
}

#[test]
fn td_strategy_flag_is_accepted_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let instance = write(dir.path(), "k4.lp", &complete_digraph(4));
    for strategy in ["min-fill", "min-degree", "exact"] {
        let out = bin()
            .args(["estimate", "--td-strategy", strategy])
            .arg(&fixture)
            .arg(&instance)
            .output()
            .unwrap();
        assert!(out.status.success(), "{strategy}: {}", stderr(&out));
    }
}

#[test]
fn annotated_output_feeds_back_into_the_tool() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = write(dir.path(), "prog.lp", TRIANGLE_FIXTURE);
    let instance = write(dir.path(), "k7.lp", &complete_digraph(7));
    let out = bin().args(["split"]).arg(&fixture).arg(&instance).output().unwrap();
    assert!(out.status.success());
    let annotated = dir.path().join("prog.lp.annotated.lp");
    let again = bin().args(["estimate"]).arg(&annotated).output().unwrap();
    assert!(again.status.success(), "{}", stderr(&again));
    assert!(stdout(&again).contains("BDG"), "decisions persist across a round trip");
}

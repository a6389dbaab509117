use std::path::Path;
use std::process::{Command, Output};

use ifdetect::io;
use ifdetect::BankReport;

fn ifdetect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifdetect")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Simulates a scenario and trains on it; returns the directory.
fn pipeline(kind: &str, seed: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    let o = ifdetect(&["simulate", kind, "--seed", seed, "--out", s(dir.path())]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = ifdetect(&["train", "--input", s(&dir.path().join("train.csv")), "--output", s(&dir.path().join("model.json"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    dir
}

#[test]
fn trained_model_reloads_bit_for_bit() {
    let dir = pipeline("numerical", "11");
    let table = io::read_samples(&dir.path().join("train.csv"), None).unwrap();
    assert_eq!(table.rows.len(), 5000);
    let fitted = ifdetect::Model::fit(&table.rows).unwrap();
    let loaded = io::load_model(&dir.path().join("model.json")).unwrap();
    assert_eq!(loaded.model, fitted);
    assert_eq!(loaded.columns, vec!["var_1", "var_2"]);
}

#[test]
fn gaussian_example_verdict() {
    let dir = pipeline("numerical", "0");
    let model = dir.path().join("model.json");
    let o = ifdetect(&[
        "detectability", "--model", s(&model), "--xi", "0.2425,0.9701", "--f", "4",
        "--tau-on", "10", "--tau-off-prev", "10", "--tau-off-next", "10", "--alpha", "0.01", "--lower-bounds", "--json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: ifdetect::DetectabilityReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(rep.detectable);
    assert_eq!((rep.admissible_windows.lo, rep.admissible_windows.hi), (7, 10));
    assert_eq!(rep.w_star, Some(7));
    assert_eq!(rep.w_sharp, 10);
}

#[test]
fn cstr_verdict_from_generated_config() {
    let dir = pipeline("cstr", "0");
    let o = ifdetect(&[
        "--config", s(&dir.path().join("fault.toml")), "detectability", "--model", s(&dir.path().join("model.json")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("admissible windows: [5, 10]"), "{}", stdout(&o));
}

#[test]
fn undetectable_fault_has_its_own_exit_code() {
    let dir = pipeline("numerical", "1");
    let o = ifdetect(&["detectability", "--model", s(&dir.path().join("model.json")), "--xi", "1,0", "--f", "0.5", "--tau", "10"]);
    assert_eq!(o.status.code(), Some(5));
    assert!(stdout(&o).contains("admissible windows: none"));
}

#[test]
fn monitor_and_report_end_to_end() {
    let dir = pipeline("numerical", "2");
    let p = |f: &str| dir.path().join(f);
    let o = ifdetect(&[
        "--config", s(&p("fault.toml")), "monitor", "--model", s(&p("model.json")), "--stream", s(&p("stream.csv")),
        "--report", s(&p("report.json")), "--series", s(&p("series.csv")),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: BankReport = serde_json::from_str(&std::fs::read_to_string(p("report.json")).unwrap()).unwrap();
    assert_eq!(rep.confirmed().count(), 7);
    let series = std::fs::read_to_string(p("series.csv")).unwrap();
    assert!(series.starts_with("k,W,t2,limit,alarm\n"));
    // four windows, each reporting once its window is full
    assert_eq!(series.lines().count() - 1, (500 - 6) + (500 - 7) + (500 - 8) + (500 - 9));

    let o = ifdetect(&["report", "--report", s(&p("report.json")), "--truth", s(&p("truth.csv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("truth: 7 episodes"), "{}", stdout(&o));
}

#[test]
fn fault_free_stream_has_no_episodes() {
    let dir = pipeline("numerical", "3");
    let p = |f: &str| dir.path().join(f);
    let o = ifdetect(&["--config", s(&p("fault.toml")), "monitor", "--model", s(&p("model.json")), "--stream", s(&p("clean.csv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: BankReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep.episodes.len(), 0);
}

#[test]
fn truncated_stream_leaves_last_episode_unconfirmed() {
    let dir = pipeline("numerical", "4");
    let p = |f: &str| dir.path().join(f);
    let truth = io::read_truth_file(&p("truth.csv")).unwrap();
    let table = io::read_samples(&p("stream.csv"), None).unwrap();
    // cut a few samples into the third episode, once every window has fired
    let cut = (truth[2].mu + 12).min(truth[2].nu - 1) as usize;
    io::write_samples_file(&p("short.csv"), &table.columns, &table.rows[..cut]).unwrap();
    let o = ifdetect(&["--config", s(&p("fault.toml")), "monitor", "--model", s(&p("model.json")), "--stream", s(&p("short.csv"))]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rep: BankReport = serde_json::from_slice(&o.stdout).unwrap();
    let last = rep.episodes.last().unwrap();
    assert!(!last.confirmed);
    assert!(last.nu_hi.is_none());
}

#[test]
fn identical_rows_are_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    std::fs::write(&csv, "a\n1.5\n1.5\n1.5\n").unwrap();
    let o = ifdetect(&["train", "--input", s(&csv), "--output", s(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("singular"), "{}", stderr(&o));
    // two variables need at least four rows
    std::fs::write(&csv, "a,b\n1,2\n1,2\n1,2\n").unwrap();
    let o = ifdetect(&["train", "--input", s(&csv), "--output", s(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn stream_missing_a_model_column_is_named() {
    let dir = pipeline("numerical", "5");
    let csv = dir.path().join("renamed.csv");
    std::fs::write(&csv, "var_1,pressure\n1,2\n3,4\n").unwrap();
    let o = ifdetect(&["--config", s(&dir.path().join("fault.toml")), "monitor", "--model", s(&dir.path().join("model.json")), "--stream", s(&csv)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("missing column 'var_2'"), "{}", stderr(&o));
}

#[test]
fn dimension_mismatch_is_a_model_error() {
    let dir = pipeline("numerical", "6");
    let csv = dir.path().join("wide.csv");
    std::fs::write(&csv, "var_1,var_2,var_3\n1,2,3\n").unwrap();
    let o = ifdetect(&["--config", s(&dir.path().join("fault.toml")), "monitor", "--model", s(&dir.path().join("model.json")), "--stream", s(&csv)]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn bad_cell_is_a_parse_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    std::fs::write(&csv, "a,b\n1,2\n3,oops\n").unwrap();
    let o = ifdetect(&["train", "--input", s(&csv), "--output", s(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("row 3, column b"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(ifdetect(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ifdetect(&["simulate", "numerical", "--out", "/nonexistent-never"]).status.code(), Some(2));
    assert_eq!(ifdetect(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulation_is_seeded() {
    let a = pipeline("numerical", "9");
    let b = pipeline("numerical", "9");
    for f in ["train.csv", "stream.csv", "truth.csv", "model.json"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

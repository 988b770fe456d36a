use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wsd-games"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures/river_bank")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn wsd-games")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn assoc_single_table() {
    let out = run(&["assoc", "--table", "10,20,20,100", "--measure", "dice"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).trim(), "0.5");

    let out = run(&["assoc", "--table", "10,20,20,100", "--measure", "chi-s"]);
    assert_eq!(stdout(&out).trim(), "14.0625");
}

#[test]
fn assoc_rejects_bad_input() {
    let out = run(&["assoc", "--table", "30,20,20,100", "--measure", "dice"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("error"));

    let out = run(&["assoc", "--table", "1,2,3", "--measure", "dice"]);
    assert!(!out.status.success());

    let out = run(&["assoc", "--table", "1,2,3,10", "--measure", "cosine"]);
    assert!(!out.status.success());
}

#[test]
fn assoc_scores_every_pair_in_the_store() {
    let out = run(&[
        "assoc",
        "--unigrams",
        path(&fixture("unigrams.tsv")),
        "--counts",
        path(&fixture("counts.tsv")),
        "--measure",
        "mdice",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().any(|l| l.starts_with("bank\triver\t")));
}

#[test]
fn disambiguate_fixture_writes_answers_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let answers = dir.path().join("answers.tsv");
    let report = dir.path().join("report.tsv");
    let out = run(&[
        "--config",
        path(&fixture("config.conf")),
        "disambiguate",
        "--answers",
        path(&answers),
        "--report",
        path(&report),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&answers).unwrap();
    assert!(text.contains("d1.t4\tbank.n.01"));
    assert_eq!(text.lines().count(), 5);
    let tsv = fs::read_to_string(&report).unwrap();
    assert!(tsv.starts_with("scope\tanswered\tcorrect\ttotal\tprecision\trecall\tf1\n"));
    assert!(tsv.contains("all\t5\t5\t5\t100.0000\t100.0000\t100.0000"));
    assert!(stderr(&out).contains("precision = recall"));
}

#[test]
fn flags_override_the_config_file() {
    let out = run(&[
        "--config",
        path(&fixture("config.conf")),
        "disambiguate",
        "--ngram",
        "0",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("d1.t4\tbank.n.02"));
}

#[test]
fn graph_round_trip_gives_the_same_answers() {
    let dir = tempfile::tempdir().unwrap();
    let graph = dir.path().join("graph.tsv");
    let config = path(&fixture("config.conf")).to_string();
    let out = run(&["--config", &config, "build-graph", "--output", path(&graph)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let edges = fs::read_to_string(&graph).unwrap();
    assert!(edges.lines().all(|l| {
        let f: Vec<&str> = l.split('\t').collect();
        f.len() == 3 && f[0].parse::<usize>().unwrap() < f[1].parse::<usize>().unwrap()
    }));

    let direct = run(&["--config", &config, "disambiguate"]);
    let loaded = run(&["--config", &config, "disambiguate", "--graph", path(&graph)]);
    assert!(loaded.status.success(), "{}", stderr(&loaded));
    assert_eq!(stdout(&direct), stdout(&loaded));
}

#[test]
fn workers_flag_keeps_output_identical() {
    let config = path(&fixture("config.conf")).to_string();
    let one = run(&["--config", &config, "--workers", "1", "disambiguate"]);
    let four = run(&["--config", &config, "--workers", "4", "disambiguate"]);
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
}

#[test]
fn missing_input_fails_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let answers = dir.path().join("answers.tsv");
    let out = run(&[
        "--config",
        path(&fixture("config.conf")),
        "disambiguate",
        "--glosses",
        path(&dir.path().join("absent.tsv")),
        "--answers",
        path(&answers),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("absent.tsv"));
    assert!(!answers.exists());
}

#[test]
fn malformed_config_reports_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "# comment\nngram = 1\nmeasure = cosine\n").unwrap();
    let out = run(&["--config", path(&cfg), "disambiguate"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("bad.conf:3"), "{}", stderr(&out));
}

#[test]
fn malformed_occurrences_report_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let occ = dir.path().join("occ.tsv");
    fs::write(&occ, "d1\t0\triver\tn\tt0\nd1\tseven\tbank\tn\tt1\n").unwrap();
    let out = run(&[
        "--config",
        path(&fixture("config.conf")),
        "disambiguate",
        "--occurrences",
        path(&occ),
    ]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("occ.tsv:2"), "{}", stderr(&out));
}

#[test]
fn score_subcommand_with_pos_breakdown() {
    let dir = tempfile::tempdir().unwrap();
    let answers = dir.path().join("answers.tsv");
    fs::write(&answers, "d1.t1\tfinancial.a.01\nd1.t3\triver.n.01\nd1.t4\tbank.n.02\n").unwrap();
    let out = run(&[
        "score",
        "--answers",
        path(&answers),
        "--gold",
        path(&fixture("gold.tsv")),
        "--occurrences",
        path(&fixture("occurrences.tsv")),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let tsv = stdout(&out);
    // 3 answered, 2 correct, 5 in gold: P 66.67, R 40
    assert!(tsv.contains("all\t3\t2\t5\t66.6667\t40.0000\t50.0000"), "{tsv}");
    assert!(tsv.contains("pos:n\t"));
}

#[test]
fn mfs_baseline_answers_the_first_sense() {
    let out = run(&["--config", path(&fixture("config.conf")), "disambiguate", "--mfs"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("d1.t4\tbank.n.02"));
    assert!(text.contains("d1.t0\tbe.v.01"));
}

#[test]
fn demo_pd_prints_the_cooperation_curve() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("pd.tsv");
    let out = run(&["demo-pd", "--trajectory", path(&traj)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let second = text.lines().nth(2).unwrap();
    assert_eq!(second, "1\t0.416667\t0.583333");
    let recorded = fs::read_to_string(&traj).unwrap();
    assert!(recorded.lines().any(|l| l.starts_with("1\t0\tdont-confess\t")));
}

#[test]
fn trajectory_flag_writes_the_fixture_trace() {
    let dir = tempfile::tempdir().unwrap();
    let traj = dir.path().join("trace.tsv");
    let out = run(&[
        "--config",
        path(&fixture("config.conf")),
        "--trajectory",
        path(&traj),
        "disambiguate",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = fs::read_to_string(&traj).unwrap();
    assert!(text.lines().any(|l| l.starts_with("0\t4\tbank.n.01\t0.25")));
}

#[test]
fn version_flag() {
    let out = run(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("wsd-games "));
}

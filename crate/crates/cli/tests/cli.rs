use std::path::Path;
use std::process::{Command, Output};

use rdsnet::format::{self, Provenance};
use rdsnet::pipeline;
use rdsnet::RunConfig;
use rdsnet_core::rng::split;

fn rdsnet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rdsnet")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = rdsnet(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["generate-graph", "--nodes", "120", "--m", "3", "--seed", "5", "--out", "g.edges"]);
    dir
}

fn read(p: impl AsRef<Path>) -> String {
    std::fs::read_to_string(p).unwrap()
}

fn strip_provenance(s: &str) -> String {
    s.lines().filter(|l| !l.starts_with("config ") && !l.starts_with("seed ")).collect::<Vec<_>>().join("\n")
}

#[test]
fn simulate_is_deterministic_and_reports_early_termination() {
    let d = setup();
    let p = d.path();
    let args = |out: &'static str| ["simulate", "--graph", "g.edges", "--n", "30", "--coupons", "3", "--rate", "1", "--seed", "7", "--out", out];
    ok(p, &args("a"));
    ok(p, &args("b"));
    assert_eq!(read(p.join("a/observed.txt")), read(p.join("b/observed.txt")));
    assert_eq!(read(p.join("a/truth.txt")), read(p.join("b/truth.txt")));
    let out = rdsnet(p, &["simulate", "--graph", "g.edges", "--n", "10000", "--out", "c"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("early termination"));
}

#[test]
fn infer_and_eval_round_trip() {
    let d = setup();
    let p = d.path();
    ok(p, &["simulate", "--graph", "g.edges", "--n", "25", "--seed", "3", "--out", "s"]);
    ok(p, &["infer", "--observed", "s/observed.txt", "--out", "s"]);
    let upper = read(p.join("s/inference.txt"));
    assert!(upper.lines().any(|l| l == "bound grow" || l == "bound shrink" || l == "bound bar"));
    ok(p, &["infer", "--observed", "s/observed.txt", "--bound", "lower", "--output", "s/lower.txt"]);
    assert!(read(p.join("s/lower.txt")).lines().any(|l| l == "bound lower"));
    ok(p, &["infer", "--observed", "s/observed.txt", "--out", "s"]);
    assert_eq!(read(p.join("s/inference.txt")), upper, "inference output is not byte-stable");

    let line = ok(p, &["eval", "--inference", "s/inference.txt", "--truth", "s/truth.txt", "--out", "e"]);
    for key in ["auc_vine=", "auc_gr=", "min_corner=", "convention=standard"] {
        assert!(line.contains(key), "{line}");
    }
    let csv = read(p.join("e/roc.csv"));
    assert!(csv.starts_with("# rdsnet ") && csv.lines().nth(1) == Some("zeta,fpr,tpr"));
    assert!(read(p.join("e/roc.svg")).contains(r#"width="640" height="480""#));
    let lit = ok(p, &["eval", "--inference", "s/inference.txt", "--truth", "s/truth.txt", "--out", "f", "--convention", "paper-literal"]);
    assert!(lit.contains("convention=paper-literal"));
    assert_ne!(read(p.join("f/roc.csv")).lines().nth(3), csv.lines().nth(3));

    let missing = rdsnet(p, &["eval", "--inference", "s/inference.txt", "--truth", "nope.txt"]);
    assert!(!missing.status.success());
    let no_flag = rdsnet(p, &["eval", "--inference", "s/inference.txt"]);
    assert_eq!(no_flag.status.code(), Some(2));
}

#[test]
fn invalid_inputs_exit_with_validation_code() {
    let d = setup();
    let p = d.path();
    ok(p, &["simulate", "--graph", "g.edges", "--n", "12", "--seed", "3", "--out", "s"]);
    let text = read(p.join("s/observed.txt"));
    // swap two entry times so they are no longer increasing
    let times = text.lines().find(|l| l.starts_with("times ")).unwrap();
    let mut t: Vec<&str> = times.split_whitespace().collect();
    t.swap(3, 4);
    std::fs::write(p.join("bad.txt"), text.replace(times, &t.join(" "))).unwrap();
    assert_eq!(rdsnet(p, &["infer", "--observed", "bad.txt"]).status.code(), Some(2));
    std::fs::write(p.join("trunc.txt"), &text[..text.len() / 2]).unwrap();
    assert_eq!(rdsnet(p, &["infer", "--observed", "trunc.txt"]).status.code(), Some(2));
    assert_eq!(rdsnet(p, &["pipeline", "--omega", "-1", "--graph", "g.edges"]).status.code(), Some(2));
    assert_eq!(rdsnet(p, &["pipeline", "--graph", "missing.edges"]).status.code(), Some(2));
}

#[test]
fn config_file_with_flag_override() {
    let d = setup();
    let p = d.path();
    std::fs::write(p.join("run.cfg"), "# protocol\ngraph = g.edges\nn = 20\nreplicates = 2\nomega = 10\nout = first\n").unwrap();
    ok(p, &["pipeline", "--config", "run.cfg", "--out", "second"]);
    assert!(!p.join("first").exists());
    let cfg = read(p.join("second/config.txt"));
    assert!(cfg.contains("omega = 10\n") && cfg.contains("n = 20\n") && cfg.contains("out = second\n"));
}

#[test]
fn pipeline_seeds_resume_and_bytes() {
    let d = setup();
    let p = d.path();
    let args = ["pipeline", "--graph", "g.edges", "--n", "20", "--replicates", "3", "--seed", "11", "--out", "run", "--jobs", "2"];
    ok(p, &args);
    let summary = read(p.join("run/summary.csv"));
    assert!(summary.lines().nth(1).unwrap().starts_with("statistic,auc_vine,auc_gr"));
    assert!(summary.lines().any(|l| l.starts_with("median,")));

    // replicate k is the simulate command under seed split(master, k)
    let seed = split(11, 2).to_string();
    ok(p, &["simulate", "--graph", "g.edges", "--n", "20", "--seed", &seed, "--out", "single"]);
    let rep = read(p.join("run/rep-002/observed.txt"));
    assert!(rep.lines().any(|l| l == format!("seed {seed}")));
    assert_eq!(strip_provenance(&rep), strip_provenance(&read(p.join("single/observed.txt"))));

    // completed replicates are skipped, missing ones recomputed
    let marker = p.join("run/rep-000/inference.txt");
    std::fs::write(&marker, "kept").unwrap();
    let before = read(p.join("run/rep-001/inference.txt"));
    std::fs::remove_dir_all(p.join("run/rep-001")).unwrap();
    ok(p, &args);
    assert_eq!(read(&marker), "kept");
    assert_eq!(read(p.join("run/rep-001/inference.txt")), before);
    assert_eq!(read(p.join("run/summary.csv")), summary);
}

#[test]
fn formats_roundtrip_bit_exactly() {
    let d = setup();
    let g = pipeline::load_graph(&d.path().join("g.edges")).unwrap();
    let mut cfg = RunConfig::default();
    cfg.n = 30;
    cfg.rounds = 2;
    let prov = Provenance::new("h", 9);
    let (obs, truth) = pipeline::draw(&g, &cfg, 9).unwrap();
    let text = format::write_observed(&obs, &prov);
    let (back, prov2) = format::read_observed(Path::new("o"), &text).unwrap();
    assert_eq!((&back, &prov2), (&obs, &prov));
    let text = format::write_truth(&truth, &prov);
    assert_eq!(format::read_truth(Path::new("t"), &text).unwrap().0, truth);
    let (res, alt) = pipeline::run_inference(&cfg, &obs, None).unwrap();
    assert!(alt.is_some());
    let text = format::write_inference(&res, alt.as_ref(), &prov);
    let (r2, a2, _) = format::read_inference(Path::new("i"), &text).unwrap();
    assert_eq!((&r2, &a2), (&res, &alt));
    assert_eq!(format::write_inference(&r2, a2.as_ref(), &prov), text);
}

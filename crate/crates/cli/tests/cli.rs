use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn chdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chdyn")).args(args).env_remove("HD_WORKERS").output().expect("spawn chdyn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout).lines().map(|l| serde_json::from_str(l).expect("json line")).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn dyn_writes_an_image() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("fig.ppm");
    let out = chdyn(&[
        "dyn",
        "--family",
        "O",
        "--n",
        "3",
        "--alpha",
        "10+0i",
        "--window",
        "-10,10,-10,10",
        "--size",
        "80x60",
        "-o",
        path_str(&img),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let bytes = std::fs::read(&img).unwrap();
    assert!(bytes.starts_with(b"P6\n80 60\n255\n"));
    assert_eq!(bytes.len(), 13 + 80 * 60 * 3);
    let recs = lines(&out);
    assert_eq!(recs[0]["header"]["command"], "dyn");
    assert_eq!(recs[0]["header"]["window"], serde_json::json!([-10.0, 10.0, -10.0, 10.0]));
    let hist = recs[1]["histogram"].as_object().unwrap();
    assert_eq!(hist.values().map(|v| v.as_u64().unwrap()).sum::<u64>(), 80 * 60);
    assert!(hist.contains_key("root[0]") && hist.contains_key("root[1]") && hist.contains_key("root[2]"));
}

#[test]
fn dyn_rejects_degenerate_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let out =
        chdyn(&["dyn", "--family", "O", "--n", "3", "--alpha", "0.5+0i", "-o", path_str(&dir.path().join("x.ppm"))]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn dyn_newton_and_missing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("n.ppm");
    let ok = chdyn(&["dyn", "--family", "newton", "--n", "3", "--size", "40x40", "-o", path_str(&img)]);
    assert_eq!(code(&ok), 0);
    let missing = chdyn(&["dyn", "--family", "O", "--n", "3", "-o", path_str(&img)]);
    assert_eq!(code(&missing), 2);
    let bad_window = chdyn(&["dyn", "--family", "newton", "--n", "3", "--window", "1,0,0,1", "-o", path_str(&img)]);
    assert_eq!(code(&bad_window), 2);
}

#[test]
fn dyn_output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut images = Vec::new();
    let mut reports = Vec::new();
    for w in ["1", "2", "8"] {
        let img = dir.path().join(format!("w{w}.ppm"));
        let rep = dir.path().join(format!("w{w}.jsonl"));
        let out = chdyn(&[
            "dyn",
            "--family",
            "B",
            "--a",
            "16",
            "--window",
            "-40,40,-40,40",
            "--size",
            "90x90",
            "--workers",
            w,
            "-o",
            path_str(&img),
            "--report",
            path_str(&rep),
        ]);
        assert_eq!(code(&out), 0);
        images.push(std::fs::read(&img).unwrap());
        // the output path differs by name only; compare everything else
        let text = std::fs::read_to_string(&rep).unwrap().replace(&format!("w{w}"), "wN");
        reports.push(text);
    }
    assert_eq!(images[0], images[1]);
    assert_eq!(images[0], images[2]);
    assert_eq!(reports[0], reports[1]);
    assert_eq!(reports[0], reports[2]);
}

#[test]
fn workers_env_var_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_chdyn"))
        .args(["dyn", "--family", "newton", "--n", "3", "--size", "16x16", "-o"])
        .arg(dir.path().join("e.ppm"))
        .env("HD_WORKERS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn param_plane() {
    let dir = tempfile::tempdir().unwrap();
    let img = dir.path().join("p.ppm");
    let out = chdyn(&["param", "--n", "3", "--window", "-1,4,-2.5,2.5", "--size", "50x50", "-o", path_str(&img)]);
    assert_eq!(code(&out), 0);
    assert!(std::fs::read(&img).unwrap().starts_with(b"P6\n50 50\n255\n"));
    let out5 = chdyn(&["param", "--n", "5", "--size", "30x30", "-o", path_str(&img)]);
    assert_eq!(code(&out5), 0);
    let bad = chdyn(&["param", "--n", "1", "-o", path_str(&img)]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn probe_verdicts_and_exit_codes() {
    let out = chdyn(&["probe", "--n", "2", "--alpha", "9+0i", "--resolution", "512"]);
    assert_eq!(code(&out), 0);
    let recs = lines(&out);
    assert_eq!(recs[1]["verdict"], "InfinitelyConnected");
    assert_eq!(recs[1]["evidence"]["critical_in_immediate"], "yes");
    let degenerate = chdyn(&["probe", "--n", "3", "--alpha", "1.25+0i"]);
    assert_eq!(code(&degenerate), 2);
}

#[test]
fn verify_single_lemmas() {
    let out = chdyn(&["verify", "--lemma", "escape-b", "--a", "20"]);
    assert_eq!(code(&out), 0);
    assert_eq!(lines(&out)[1]["pass"], true);
    let z = chdyn(&["verify", "--lemma", "zero-interval", "--n", "3", "--alpha", "10"]);
    assert_eq!(code(&z), 0);
    let z0 = lines(&z)[1]["values"]["z0"].as_f64().unwrap();
    assert!(17.9 < z0 && z0 < 18.0);
}

#[test]
fn verify_all_at_large_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("all.jsonl");
    let out = chdyn(&["verify", "--all", "--n", "3", "--alpha", "1000", "--report", path_str(&rep)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let recs = lines(&out);
    assert_eq!(recs.len(), 7);
    assert!(recs[1..].iter().all(|r| r["pass"] == true));
    assert_eq!(std::fs::read(&rep).unwrap(), out.stdout);
}

#[test]
fn verify_reports_failure_with_exit_one() {
    // alpha far below where the escape bound for R holds
    let out = chdyn(&["verify", "--lemma", "escape-r", "--n", "3", "--alpha", "0.1", "--samples", "100"]);
    assert_eq!(code(&out), 1);
    assert_eq!(lines(&out)[1]["pass"], false);
}

#[test]
fn verify_needs_a_lemma() {
    assert_eq!(code(&chdyn(&["verify"])), 2);
    assert_eq!(code(&chdyn(&["verify", "--lemma", "zero-interval", "--alpha", "10+1i"])), 2);
}

#[test]
fn verify_is_reproducible() {
    let a = chdyn(&["verify", "--lemma", "conjugacies", "--n", "3", "--alpha", "10", "--samples", "200"]);
    let b = chdyn(&["verify", "--lemma", "conjugacies", "--n", "3", "--alpha", "10", "--samples", "200"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
}

fn roots(out: &Output) -> Vec<(f64, f64, u64)> {
    lines(out)[1..]
        .iter()
        .map(|r| (r["root"][0].as_f64().unwrap(), r["root"][1].as_f64().unwrap(), r["multiplicity"].as_u64().unwrap()))
        .collect()
}

#[test]
fn preimages_of_b() {
    let pole = chdyn(&["preimages", "--family", "B", "--a", "5", "--w", "inf"]);
    assert_eq!(code(&pole), 0);
    assert_eq!(roots(&pole), vec![(0.2, 0.0, 1)]);
    let zero = chdyn(&["preimages", "--family", "B", "--a", "5", "--w", "0"]);
    assert_eq!(roots(&zero), vec![(0.0, 0.0, 3), (5.0, 0.0, 1)]);
}

#[test]
fn preimages_of_one_under_o() {
    let out = chdyn(&["preimages", "--family", "O", "--n", "2", "--alpha", "3", "--w", "1"]);
    assert_eq!(code(&out), 0);
    let rs = roots(&out);
    assert_eq!(rs.len(), 2);
    assert!(rs.iter().any(|&(re, im, m)| (re - 1.0).abs() < 1e-9 && im.abs() < 1e-9 && m == 3));
    assert!(rs.iter().any(|&(_, _, m)| m == 1));
}

#[test]
fn complex_flag_syntax() {
    let out = chdyn(&["preimages", "--family", "O", "--n", "3", "--alpha", "-1-2i", "--w", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(lines(&out)[0]["header"]["alpha"], serde_json::json!([-1.0, -2.0]));
    assert_eq!(code(&chdyn(&["preimages", "--family", "O", "--n", "3", "--alpha", "1+2j", "--w", "1"])), 2);
}

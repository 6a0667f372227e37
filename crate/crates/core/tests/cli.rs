use std::path::Path;
use std::process::Command;

use decat::report::VerificationReport;

fn decat(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_decat")).args(args).output().expect("spawn decat");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn run_in_process(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["decat"];
    full.extend_from_slice(args);
    let code = decat::cli::run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap())
}

/// Reports with durations removed, one JSON document per line.
fn untimed(json_lines: &str) -> Vec<String> {
    json_lines
        .lines()
        .map(|l| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v.as_object_mut().unwrap().remove("millis");
            v.to_string()
        })
        .collect()
}

const CONVENTION: &str = "c1 = 1\nc2 = 0\ntwist = -1\nroot_scale = 1 0\nroot_ratio = -1 1\nf_root_scale = 1 0\nf_root_ratio = -1 -1\n";

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(decat(&["--help"]).0, 0);
    assert_eq!(decat(&["--version"]).0, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(decat(&[]).0, 2);
    assert_eq!(decat(&["frobnicate"]).0, 2);
    assert_eq!(decat(&["verify", "--seed", "x"]).0, 2);
    assert_eq!(decat(&["verify", "--n", "7"]).0, 2);
    assert_eq!(decat(&["verify", "--graph", "A2", "--n", "4"]).0, 2);
    assert_eq!(decat(&["verify", "--graph", "Q9"]).0, 2);
    assert_eq!(decat(&["cache", "stats"]).0, 2);
    assert_eq!(decat(&["rewrite", "E1 E1 +"]).0, 2);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("bad.conf");
    write(&conf, "no_such_key = 1\n");
    let (code, _, err) = decat(&["verify", "--config", conf.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("no_such_key"), "{err}");
    let missing = dir.path().join("missing.conf");
    assert_eq!(decat(&["verify", "--config", missing.to_str().unwrap()]).0, 2);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("c.conf");
    write(&conf, "# rewrite only\nchecks = rewrite\nseed = 3\nrewrite_words = 5\nconfluence_words = 5\n");
    let (code, out, _) = decat(&["verify", "--config", conf.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("(seed 9)"), "{out}");
    assert!(out.lines().all(|l| !l.starts_with("PASS") || l.contains("rewrite_")));
}

#[test]
fn passing_verify_exits_zero() {
    let (code, out, _) = decat(&["verify", "--n", "2", "--N", "2"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("0 failed"));
}

#[test]
fn wrong_persisted_convention_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    write(&dir.path().join("convention.txt"), &CONVENTION.replace("c1 = 1", "c1 = 0"));
    let (code, out, _) = decat(&["verify", "--n", "3", "--N", "2", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code, 1, "{out}");
    assert!(out.lines().any(|l| l.starts_with("FAIL")));
}

#[test]
fn rewrite_prints_normal_form() {
    let (code, out, _) = decat(&["rewrite", "E1 E1", "@", "(2,1)", "--oracle", "2", "3"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    let nf: decat::rewrite::FormalSum = {
        let cartan = std::sync::Arc::new(decat::cartan::CartanData::type_a(1));
        decat::rewrite::parse_sum(&format!("{} @ (2,1)", lines.next().unwrap()), cartan, None).unwrap()
    };
    assert_eq!(nf.len(), 1);
    assert_eq!(nf.coefficient(&decat::rewrite::FormalWord::new(vec![decat::tensor_rep::Letter::e(1, 2)])), "q + q^-1".parse().unwrap());
    assert_eq!(lines.next(), Some("oracle: equal"));
}

#[test]
fn rewrite_json_output() {
    let (code, out) = run_in_process(&["--json", "rewrite", "F1 E1 + E1 F1", "@", "(1,1)"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["anchor"], "(1,1)");
    assert!(v["normal_form"].as_str().unwrap().contains("F1 E1"));
}

#[test]
fn verify_is_deterministic_for_fixed_seed() {
    let args = ["--json", "verify", "--n", "3", "--N", "2", "--seed", "11", "--jobs", "3"];
    let (c1, a) = run_in_process(&args);
    let (c2, b) = run_in_process(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(untimed(&a), untimed(&b));
    assert!(untimed(&a).iter().all(|l| l.contains("\"seed\":11")));
}

#[test]
fn warm_and_cold_cache_agree() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["--json", "verify", "--n", "3", "--N", "3", "--cache-dir", cache];
    let cold = untimed(&run_in_process(&args).1);
    let (code, stats) = run_in_process(&["cache", "stats", "--cache-dir", cache]);
    assert_eq!(code, 0);
    assert!(!stats.starts_with("0 matrix files"), "{stats}");
    let warm = untimed(&run_in_process(&args).1);
    assert_eq!(cold, warm);
    let none = untimed(&run_in_process(&["--json", "verify", "--n", "3", "--N", "3"]).1);
    let strip = |v: &[String]| -> Vec<String> { v.iter().filter(|l| !l.contains("convention_derivation")).cloned().collect() };
    assert_eq!(strip(&cold), strip(&none));
    let (code, cleared) = run_in_process(&["cache", "clear", "--cache-dir", cache]);
    assert_eq!(code, 0);
    assert!(cleared.starts_with("removed"));
    let (_, stats) = run_in_process(&["cache", "stats", "--cache-dir", cache]);
    assert!(stats.starts_with("0 matrix files"), "{stats}");
}

#[test]
fn derive_convention_persists_and_is_reused() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let (code, out) = run_in_process(&["derive-convention", "--cache-dir", cache]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("chosen:"));
    let saved = std::fs::read_to_string(dir.path().join("convention.txt")).unwrap();
    assert_eq!(saved, CONVENTION);
    let (code, out) = run_in_process(&["--json", "verify", "--n", "2", "--N", "2", "--cache-dir", cache]);
    assert_eq!(code, 0);
    let derivation: VerificationReport = out
        .lines()
        .map(|l| serde_json::from_str::<VerificationReport>(l).unwrap())
        .find(|r| r.check == "convention_derivation")
        .unwrap();
    assert!(derivation.note.unwrap().starts_with("loaded"));
}

#[test]
fn derive_convention_without_candidates_exits_one() {
    let (code, out) = run_in_process(&["derive-convention", "--search-bound", "0"]);
    assert_eq!(code, 1);
    assert!(out.contains("no convention"));
}

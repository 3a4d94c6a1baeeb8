//! Exit codes and outputs of the `s3tower` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(cache: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_s3tower"));
    cmd.env_remove("S3TOWER_CACHE_DIR");
    match cache {
        Some(dir) => cmd.arg("--cache-dir").arg(dir),
        None => cmd.arg("--no-cache"),
    };
    cmd.args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn usage_errors() {
    for args in [
        &["certify", "-p", "3", "-q", "5"][..],
        &["certify", "-p", "4", "-q", "5"],
        &["certify", "-p", "7", "-q", "7"],
        &["certify", "-p", "79"],
        &["frobnicate"],
        &["inspect"],
        &["inspect", "--pure-cubic", "2", "--sextic", "2"],
        &["search", "-p", "79", "--q-max", "100", "--count", "0"],
        &["certify", "-p", "79", "-q", "97", "--radius", "0"],
    ] {
        let o = run(None, args);
        assert_eq!(code(&o), 64, "{args:?}: {}", stderr(&o));
    }
    assert_eq!(code(&run(None, &["--help"])), 0);
}

#[test]
fn small_class_number_is_rejected() {
    let o = run(None, &["certify", "-p", "2", "-q", "5"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("h = 1 < 6"), "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["stage"], "class-number");
    assert_eq!(r["reason"], "h = 1 < 6");

    let o = run(None, &["search", "-p", "2", "--q-max", "100"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["scanned"], 0);
}

#[test]
fn inspect_reports() {
    let o = run(None, &["inspect", "--pure-cubic", "79", "--no-class-group"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["discriminant"], "-168507");
    assert_eq!(r["factorization_of_3"], serde_json::json!([{ "e": 3, "f": 1 }]));
    assert_eq!(r["lemma"]["agree"], true);

    let o = run(None, &["inspect", "--pure-cubic", "10"]);
    let r = json(&o);
    assert_eq!(r["discriminant"], "-300");
    assert_eq!(r["basis_denominator"], "3");
    assert_eq!(r["class_group"]["h"], "1");
    assert_eq!(r["lemma"]["predicts_total_ramification"], false);

    let o = run(None, &["inspect", "--sextic", "7663", "--no-class-group", "--format", "text"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("root disc.       1400.36"));

    let o = run(None, &["inspect", "--poly", "1,0,1"]);
    assert_eq!(json(&o)["discriminant"], "-4");
}

#[test]
fn corrupt_cache_is_a_miss() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["inspect", "--sextic", "7"];
    let cold = run(Some(dir.path()), &args);
    assert_eq!(code(&cold), 0, "{}", stderr(&cold));
    let entries: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(entries.len(), 1);
    let warm = run(Some(dir.path()), &args);
    assert_eq!(warm.stdout, cold.stdout);

    let text = fs::read_to_string(&entries[0]).unwrap();
    let damaged: String =
        text.lines().map(|l| if l.starts_with("rel ") { l.replacen(':', ":9", 1) } else { l.to_string() }).collect::<Vec<_>>().join("\n");
    assert_ne!(damaged, text);
    fs::write(&entries[0], damaged).unwrap();
    let again = run(Some(dir.path()), &args);
    assert_eq!(code(&again), 0);
    assert_eq!(again.stdout, cold.stdout);
    assert!(stderr(&again).contains("ignoring cache entry"), "{}", stderr(&again));

    fs::write(&entries[0], "garbage").unwrap();
    let again = run(Some(dir.path()), &args);
    assert_eq!(again.stdout, cold.stdout);
}

#[test]
fn search_for_79() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(Some(dir.path()), &["search", "-p", "79", "--q-max", "10"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    assert_eq!(r["certificates"], serde_json::json!([]));
    assert_eq!(r["predicted_density"], "1/72");

    let o = run(Some(dir.path()), &["search", "-p", "79", "--q-max", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    let qs: Vec<u64> = r["certificates"].as_array().unwrap().iter().map(|c| c["q"].as_u64().unwrap()).collect();
    assert!(qs.contains(&97), "{qs:?}");
    assert!(stderr(&o).contains("predicted density 1/72"));

    let o = run(Some(dir.path()), &["certify", "-p", "79", "-q", "97", "--format", "text"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("7663"), "{text}");

    // 5 fails the splitting pre-filter
    let o = run(Some(dir.path()), &["certify", "-p", "79", "-q", "5"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["stage"], "splitting-prefilter");
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn triality(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triality")).args(args).output().expect("binary runs")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn verify_q2_passes_and_ends_with_alpha_rho() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("q2.txt");
    let o = triality(&["verify", "--case", "q2", "--quiet", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.ends_with("alpha(rho) = 3\n"), "{text}");
    assert!(text.contains("verdict: pass"));
    assert!(text.contains("alpha(vrho) = 2"));

    // the JSON artifact beside --out, checked against the report schema
    let json: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("q2.q2.json")).unwrap()).unwrap();
    let obj = json.as_object().unwrap();
    for key in ["case", "seed", "stages", "verdict"] {
        assert!(obj.contains_key(key), "missing {key}");
    }
    assert_eq!(obj["case"], "q2");
    assert_eq!(obj["verdict"], "pass");
    assert!(obj["seed"].is_u64());
    for stage in obj["stages"].as_array().unwrap() {
        let s = stage.as_object().unwrap();
        for key in ["name", "expected", "actual"] {
            assert!(s[key].is_string(), "{key} in {stage}");
        }
        assert!(s["seconds"].is_f64() || s["seconds"].is_u64());
        assert!(["pass", "fail", "heuristic-pass", "heuristic-fail"].contains(&s["status"].as_str().unwrap()));
    }

    let table = dir.path().join("table.md");
    let json_path = dir.path().join("q2.q2.json");
    let args = ["report", json_path.to_str().unwrap(), "--out", table.to_str().unwrap()];
    assert_eq!(triality(&args).status.code(), Some(0));
    let first = std::fs::read(&table).unwrap();
    assert_eq!(triality(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&table).unwrap());
    let md = String::from_utf8(first).unwrap();
    assert!(md.contains("A4 | 2^2.3 | 63 (x3)"), "{md}");
    let text = triality(&["report", "--format", "text", json_path.to_str().unwrap()]);
    assert!(stdout(&text).starts_with("Structure | Order | Orbit sizes (q2)\n"));
}

#[test]
fn mutated_table_fails_naming_the_row() {
    let table = fixture("q2_table_mutated.txt");
    let o = triality(&["verify", "--case", "q2", "--quiet", "--stage", "pairs", "--table", table.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("[FAIL] pairs: A4"), "{text}");
    assert!(text.contains("verdict: fail"));
}

#[test]
fn missing_q3_data_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/manifest.json");
    std::fs::copy(data, dir.path().join("manifest.json")).unwrap();
    let o = triality(&[
        "verify",
        "--case",
        "q3",
        "--stage",
        "pairs",
        "--offline",
        "--data-dir",
        dir.path().to_str().unwrap(),
        "--cache-dir",
        dir.path().join("cache").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fetch-data"), "{}", stderr(&o));
}

#[test]
fn configuration_problems_exit_with_two() {
    assert_eq!(triality(&["verify", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(triality(&["verify", "--case", "q5"]).status.code(), Some(2));
    let o = triality(&["verify", "--case", "q2", "--table", "/nonexistent/table.txt"]);
    assert_eq!(o.status.code(), Some(2));
    let o = triality(&["report", "/nonexistent/report.q2.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("MissingArtifact"));
}

#[test]
fn selftest_is_clean_and_deterministic() {
    let a = triality(&["selftest"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert!(stdout(&a).ends_with("selftest: pass\n"));
    let b = triality(&["selftest"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn duplicated_catalog_entry_is_ambiguous() {
    let catalog = fixture("catalog_duplicate.txt");
    let o = triality(&["selftest", "--catalog", catalog.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("AmbiguousMatch"), "{}", stdout(&o));
}

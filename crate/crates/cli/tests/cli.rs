use std::path::PathBuf;
use std::process::{Command, Output};

fn qmzv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmzv"))
        .args(args)
        .env_remove("QMZV_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

#[test]
fn hsum_weight_one_residue() {
    let o = qmzv(&["hsum", "--variant", "plain", "--p", "5", "--n", "1", "--index", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["residue"], "2-2q");
    assert_eq!(v["at_one"]["value"], "0");
}

#[test]
fn verify_passes_and_reports() {
    let o = qmzv(&["verify", "--id", "wt1", "--p", "5", "--n", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["pass"], true);
    let o = qmzv(&["verify", "--id", "cyclic", "--p", "7", "--n", "2", "--index", "2,1,1", "--star"]);
    assert!(o.status.success());
    let o = qmzv(&["verify", "--id", "theta", "--l", "2", "--k", "3", "--m", "4"]);
    assert!(o.status.success());
}

#[test]
fn verify_duality_rejects_two() {
    let o = qmzv(&["verify", "--id", "duality", "--p", "2", "--n", "1", "--index", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn dims_csv_row() {
    let o = qmzv(&["dims", "--family", "O", "--weights", "1..4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "weight,1,2,3,4");
    assert_eq!(lines[1], "dim_tilde,0,0,1,0");
    assert_eq!(lines[4], "stabilized,true,true,true,true");
}

#[test]
fn dims_json_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache").display().to_string();
    let a = qmzv(&["dims", "--family", "Q", "--weights", "2..3", "--format", "json"]);
    let b = qmzv(&["--cache-dir", &cache, "dims", "--family", "Q", "--weights", "2..3", "--format", "json"]);
    let c = qmzv(&["--cache-dir", &cache, "dims", "--family", "Q", "--weights", "2..3", "--format", "json"]);
    assert!(a.status.success() && b.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(b.stdout, c.stdout);
    assert!(std::fs::read_dir(dir.path().join("cache")).unwrap().count() > 0);
}

#[test]
fn explicit_primes_and_bad_primes() {
    let o = qmzv(&["dims", "--family", "O", "--weights", "3", "--primes", "11,13,17"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("dim_tilde,1"));
    let o = qmzv(&["dims", "--family", "O", "--weights", "3", "--primes", "11,15"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qmzv(&["dims", "--family", "X", "--weights", "3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn mine_emits_relations() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rel.json");
    let o = qmzv(&["mine", "--family", "O", "--weight", "1", "--emit", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rels = v["relations"].as_array().unwrap();
    assert_eq!(rels.len(), 1);
    assert_eq!(rels[0]["coeffs"].as_array().unwrap().len(), 3);
    assert!(stdout(&o).starts_with("1 relation(s)"));
}

#[test]
fn member_with_expectation() {
    let o = qmzv(&["member", "--target", &data("wt1_target.json"), "--span", &data("wt1_span.json"), "--expect", "member"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["over"], "S");
    assert_eq!(v["result"]["certificate"]["coeffs"], serde_json::json!(["-1/2", "1/2"]));
    let o = qmzv(&["member", "--target", &data("wt1_target.json"), "--span", &data("wt1_span.json"), "--expect", "nonmember"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn limits_report_monotone() {
    let o = qmzv(&["limits", "--index", "2", "--m", "100,200,400", "--digits", "30"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["checks"][0]["monotone"], true);
}

#[test]
fn tables_write_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    let o = qmzv(&[
        "tables", "--out-dir", out.to_str().unwrap(), "--o-max", "3", "--word-max", "4", "--q-max", "2", "--o2-max", "2",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("dim_O.csv")).unwrap();
    assert!(csv.contains("\n3,1,1,match,true\n"));
    assert!(csv.contains("\n12,19,,not_computed,\n"));
    let a = std::fs::read_to_string(out.join("dim_A.csv")).unwrap();
    assert!(a.contains("\n12,5,,reference,\n"));
    assert!(out.join("summary.json").exists());
}

#[test]
fn output_file_and_unwritable_cache() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sub/hsum.json");
    let o = qmzv(&["--out", path.to_str().unwrap(), "hsum", "--p", "7", "--index", "2,1"]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().contains("\"p\": 7"));
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let bad = blocker.join("cache");
    let o = qmzv(&["--cache-dir", bad.to_str().unwrap(), "dims", "--family", "O", "--weights", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn invalid_flags() {
    let o = qmzv(&["dims", "--family", "O"]);
    assert!(!o.status.success());
    let o = qmzv(&["verify", "--id", "reversal", "--p", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

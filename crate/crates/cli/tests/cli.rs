use std::process::{Command, Output};

fn qrsid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qrsid")).args(args).env_remove("QRSID_CATALOG").output().expect("run qrsid")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn verify_single_record() {
    let o = qrsid(&["verify", "--id", "I-rr-1", "--cap", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with("I-rr-1 PASS cap=30"), "{first}");
    assert!(first.ends_with(" ms)"), "{first}");
}

#[test]
fn unknown_identity_exits_2() {
    let o = qrsid(&["verify", "--id", "no-such"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown identity"));
}

#[test]
fn bad_flags_exit_2() {
    for args in [
        &["verify", "--bogus"][..],
        &["verify", "--id", "I-rr-1", "--cap", "x"],
        &["verify"],
        &["verify", "--all", "--assign", "u=q"],
        &["verify", "--id", "I-11-sq", "--assign", "u"],
        &["verify", "--id", "I-11-sq", "--assign", "u=q^("],
        &["verify", "--all", "--status", "proven"],
        &["sample", "--family", "nope"],
        &["expand", "--expr", "X: 1"],
    ] {
        assert_eq!(qrsid(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn proved_records_pass() {
    let o = qrsid(&["verify", "--all", "--cap", "40", "--status", "proved-in-paper", "--no-timing"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.contains(" PASS cap=40")).count() >= 30);
    assert!(out.lines().last().unwrap().contains("FAIL 0  SKIP 0  ERROR 0"));
}

#[test]
fn failing_assignment_exits_1() {
    let dir = std::env::temp_dir().join(format!("qrsid-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    let mut records: serde_json::Value = serde_json::from_str(&stdout(&qrsid(&["catalog", "export"]))).unwrap();
    let rec = records.as_array_mut().unwrap().iter_mut().find(|r| r["id"] == "I-12-b-c2").unwrap();
    rec["product_side"]["terms"][0]["factors"][0]["power"] = serde_json::json!(-2);
    std::fs::write(&path, records.to_string()).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qrsid"))
        .args(["verify", "--all", "--cap", "12", "--no-timing"])
        .env("QRSID_CATALOG", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("first difference at q^"));
}

#[test]
fn jobs_do_not_change_output() {
    let base = qrsid(&["verify", "--all", "--cap", "20", "--no-timing", "--jobs", "1"]);
    for jobs in ["2", "5", "16"] {
        let o = qrsid(&["verify", "--all", "--cap", "20", "--no-timing", "--jobs", jobs]);
        assert_eq!(o.stdout, base.stdout, "--jobs {jobs}");
    }
    let a = qrsid(&["verify", "--all", "--cap", "15", "--json", "--no-timing", "--jobs", "1"]);
    let b = qrsid(&["verify", "--all", "--cap", "15", "--json", "--no-timing", "--jobs", "8"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_reports_round_trip() {
    let o = qrsid(&["verify", "--all", "--cap", "15", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let reports: Vec<qrsid::report::VerifyReport> = serde_json::from_str(&text).unwrap();
    assert!(reports.len() > 100);
    assert!(reports.iter().all(|r| r.wall_ms.is_some()));
    assert_eq!(serde_json::to_string_pretty(&reports).unwrap(), text.trim_end());
}

#[test]
fn expand_product() {
    let o = qrsid(&["expand", "--expr", "P: (q,q^4;q^5)^-1", "--cap", "6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1 + q + q^2 + q^3 + 2*q^4 + 2*q^5 + 3*q^6");
}

#[test]
fn expand_sum_side_and_series() {
    let s = qrsid(&["expand", "--expr", "S: I-rr-1", "--cap", "6"]);
    let p = qrsid(&["expand", "--expr", "P: (q,q^4;q^5)^-1", "--cap", "6"]);
    assert_eq!(s.stdout, p.stdout);
    let q = qrsid(&["expand", "--expr", "Q: 1 + q + q^2 + q^9", "--cap", "3"]);
    assert_eq!(stdout(&q).trim(), "1 + q + q^2");
}

#[test]
fn expand_json_sum_side_file() {
    let export = stdout(&qrsid(&["catalog", "export"]));
    let records: serde_json::Value = serde_json::from_str(&export).unwrap();
    let rec = records.as_array().unwrap().iter().find(|r| r["id"] == "I-rr-2").unwrap();
    let path = std::env::temp_dir().join(format!("qrsid-side-{}.json", std::process::id()));
    std::fs::write(&path, serde_json::to_string_pretty(&rec["sum_side"]).unwrap()).unwrap();
    let o = qrsid(&["expand", "--file", path.to_str().unwrap(), "--cap", "8"]);
    let p = qrsid(&["expand", "--expr", "P: (q^2,q^3;q^5)^-1", "--cap", "8"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(o.stdout, p.stdout);
}

#[test]
fn parse_errors_report_position() {
    let o = qrsid(&["expand", "--expr", "P: (q,q^4;q^5", "--cap", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 1, column 14"), "{}", stderr(&o));
    let path = std::env::temp_dir().join(format!("qrsid-bad-{}.txt", std::process::id()));
    std::fs::write(&path, "P:\n  (q;q)^2 *\n  (q;q^)").unwrap();
    let o = qrsid(&["expand", "--file", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3, column 8"), "{}", stderr(&o));
    let o = qrsid(&["expand", "--expr", "{\"k\": 1,\n \"quad\": }"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

#[test]
fn prodmake_rogers_ramanujan() {
    let o = qrsid(&["prodmake", "--expr", "S: I-rr-1", "--cap", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1: 1\n4: 1\n6: 1\n9: 1\n");
}

#[test]
fn oracle_small() {
    let o = qrsid(&["oracle", "--nmax", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("S=T verified for all (u,v,n), n<=12"));
    assert!(!out.contains("mismatch"));
}

#[test]
fn sampling_is_seeded() {
    let a = qrsid(&["sample", "--count", "3", "--cap", "10", "--seed", "7"]);
    let b = qrsid(&["sample", "--count", "3", "--cap", "10", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = qrsid(&["sample", "--family", "summations", "--count", "3", "--cap", "10"]);
    assert_eq!(c.status.code(), Some(0), "{}", stdout(&c));
}

#[test]
fn catalog_env_override() {
    let path = std::env::temp_dir().join(format!("qrsid-cat-{}.json", std::process::id()));
    std::fs::write(&path, "[]").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qrsid"))
        .args(["catalog", "list"])
        .env("QRSID_CATALOG", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    std::fs::write(&path, "[\n  {\"id\": 3 ").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_qrsid"))
        .args(["catalog", "list"])
        .env("QRSID_CATALOG", &path)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
}

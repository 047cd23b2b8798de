use std::path::PathBuf;
use std::process::{Command, Output};

fn isokit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_isokit")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Scratch file under the target directory, unique per test.
fn scratch(name: &str, text: &str) -> String {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const C6: &str = "1 2\n2 3\n3 4\n4 5\n5 6\n6 1\n";
const TWO_TRIANGLES: &str = "1 2\n2 3\n3 1\n4 5\n5 6\n6 4\n";

#[test]
fn gi_exit_codes() {
    let c6 = scratch("c6.edges", C6);
    let tt = scratch("two_triangles.edges", TWO_TRIANGLES);
    let same = isokit(&["gi", &c6, &c6]);
    assert_eq!(same.status.code(), Some(0));
    assert!(stdout(&same).starts_with("ISO\n"));
    let diff = isokit(&["gi", &c6, &tt]);
    assert_eq!(diff.status.code(), Some(1));
    assert_eq!(stdout(&diff), "NONISO\n");
}

#[test]
fn errors_exit_with_two() {
    let c6 = scratch("c6_err.edges", C6);
    assert_eq!(isokit(&["gi", &c6, "/nonexistent/graph"]).status.code(), Some(2));
    let bad = scratch("bad.edges", "1 x\n");
    assert_eq!(isokit(&["gi", &c6, &bad]).status.code(), Some(2));
    assert_eq!(isokit(&["frobnicate"]).status.code(), Some(2));
    let bad_inst = scratch("bad_instance.json", r#"{"group": {"n": 3, "gens": ["(1 4)"]}, "x": "abc", "y": "abc"}"#);
    assert_eq!(isokit(&["si", &bad_inst]).status.code(), Some(2));
}

#[test]
fn si_json_is_reproducible() {
    let inst = scratch("s4.json", r#"{"group": {"n": 4, "gens": ["(1 2 3 4)", "(1 2)"]}, "x": "aabb", "y": "abab"}"#);
    let a = isokit(&["--json", "si", &inst]);
    assert_eq!(a.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["empty"], false);
    assert_eq!(v["aut_gens"].as_array().unwrap().len(), 2);
    assert_eq!(isokit(&["--json", "si", &inst]).stdout, a.stdout);
    let none = scratch("c4.json", r#"{"group": {"n": 4, "gens": ["(1 2 3 4)"]}, "x": "aabb", "y": "abab"}"#);
    assert_eq!(isokit(&["si", &none]).status.code(), Some(1));
}

#[test]
fn aut_of_petersen() {
    let edges = "1 2\n2 3\n3 4\n4 5\n5 1\n1 6\n2 7\n3 8\n4 9\n5 10\n6 8\n8 10\n10 7\n7 9\n9 6\n";
    let p = scratch("petersen.edges", edges);
    let o = isokit(&["--json", "aut", &p]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["order"], "120");
}

#[test]
fn validate_seq_reports() {
    let good = scratch(
        "seq_ok.json",
        r#"{"group": {"n": 4, "gens": ["(1 2 3 4)", "(1 2)"]}, "d": 4, "sequence": [{"n": 4, "blocks": [[1,2,3,4]]}, {"n": 4, "blocks": [[1],[2],[3],[4]]}]}"#,
    );
    let o = isokit(&["validate-seq", &good]);
    assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(0), "VALID\n"));
    let bad = scratch(
        "seq_bad.json",
        r#"{"group": {"n": 4, "gens": ["(1 2 3 4)", "(1 2)"]}, "sequence": {"d": 2, "sequence": [{"n": 4, "blocks": [[1,2,3,4]]}, {"n": 4, "blocks": [[1],[2],[3],[4]]}]}}"#,
    );
    let o = isokit(&["--json", "validate-seq", &bad]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["violations"][0]["level"], 1);
}

#[test]
fn reduce_emits_instance() {
    let inst = scratch("wr.json", r#"{"group": {"n": 4, "gens": ["(1 2)", "(1 3)(2 4)"]}, "x": "abab", "y": "baba"}"#);
    for step in ["one", "two", "full"] {
        let o = isokit(&["--json", "reduce", "--step", step, &inst]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["n"].as_u64().unwrap() >= 4);
        assert_eq!(v["origin"].as_array().unwrap().len() as u64, v["n"].as_u64().unwrap());
    }
}

#[test]
fn certify_a9() {
    let cfg = r#"{"group": {"n": 9, "gens": ["(1 2 3)", "(3 4 5 6 7 8 9)"]}, "x": "aaaaaaaaa",
        "phi": {"k": 9, "images": ["(1 2 3)", "(3 4 5 6 7 8 9)"]}, "test_set": [1,2,3,4,5,6,7,8,9]}"#;
    let p = scratch("a9_const.json", cfg);
    let o = isokit(&["--json", "certify", &p]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["kind"], "full");
    let p = scratch("a9_distinct.json", &cfg.replace("aaaaaaaaa", "abcdefghi"));
    let v: serde_json::Value = serde_json::from_slice(&isokit(&["--json", "certify", &p]).stdout).unwrap();
    assert_eq!(v["kind"], "nonfull");
}

#[test]
fn bench_csv_schema() {
    let o = isokit(&["bench", "--suite", "si", "--count", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("instance_id,n,d,group_order,branch,calls,max_depth,millis"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| r.split(',').count() == 8));
    let o = isokit(&["--json", "bench", "--suite", "gi", "--max-n", "5"]);
    let records: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    // same-order pairs of the 20 classes on at most five vertices
    assert_eq!(records.len(), 1 + 1 + 3 + 21 + 55);
    assert!(records.iter().all(|r| r.get("millis").is_none()));
}

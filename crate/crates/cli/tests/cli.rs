use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const TABLE1: &str = "p cnf 3 4\n1 0\n2 -3 0\n-1 -3 0\n1 2 0\n";
const UNIT: &str = "p cnf 1 1\n1 0\n";

fn cellsat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cellsat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn report(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn phpgen_two_has_six_variables_and_fourteen_clauses() {
    let o = cellsat(&["phpgen", "2"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("p cnf 6 14\n"));
    assert_eq!(stdout(&o).lines().count(), 15);
    let weak = stdout(&cellsat(&["phpgen", "2", "--weak"]));
    assert!(weak.starts_with("p cnf 6 9\n"));
}

#[test]
fn decide_pigeonhole_is_injective() {
    let dir = TempDir::new().unwrap();
    let php = dir.path().join("php1.cnf");
    assert_eq!(code(&cellsat(&["phpgen", "1", "--output", s(&php)])), 0);
    let out = dir.path().join("r.json");
    let o = cellsat(&["decide", s(&php), "--out", s(&out)]);
    assert_eq!(code(&o), 0);
    let r = report(&out);
    assert_eq!(r["command"], "decide");
    assert_eq!(r["exit_code"], 0);
    assert_eq!(r["report"]["verdict"], "injective");
}

#[test]
fn decide_satisfiable_is_negative_verdict() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "t1.cnf", TABLE1);
    let w = dir.path().join("w");
    let o = cellsat(&["decide", s(&cnf), "--witness-dir", s(&w)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("satisfied by 100"));
    let i1 = cellsat(&["step", s(&cnf), s(&w.join("witness1.cfg"))]);
    let i2 = cellsat(&["step", s(&cnf), s(&w.join("witness2.cfg"))]);
    assert_eq!(stdout(&i1), stdout(&i2));
}

#[test]
fn witness_on_unit_clause_collides() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "unit.cnf", UNIT);
    let o = cellsat(&[
        "witness",
        s(&cnf),
        "--assignment",
        "1",
        "--out-dir",
        s(dir.path()),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("verified collision"));
    let c1 = fs::read_to_string(dir.path().join("witness1.cfg")).unwrap();
    let c2 = fs::read_to_string(dir.path().join("witness2.cfg")).unwrap();
    assert_ne!(c1, c2);
    let i1 = stdout(&cellsat(&[
        "step",
        s(&cnf),
        s(&dir.path().join("witness1.cfg")),
    ]));
    let i2 = stdout(&cellsat(&[
        "step",
        s(&cnf),
        s(&dir.path().join("witness2.cfg")),
    ]));
    assert_eq!(i1, i2);
    // the table is its own image
    assert_eq!(i1, c1);
}

#[test]
fn witness_with_falsifying_assignment_is_negative() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "unit.cnf", UNIT);
    assert_eq!(
        code(&cellsat(&[
            "witness",
            s(&cnf),
            "--assignment",
            "0",
            "--out-dir",
            s(dir.path())
        ])),
        1
    );
    assert!(!dir.path().join("witness1.cfg").exists());
}

#[test]
fn emitted_configurations_round_trip() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "t1.cnf", TABLE1);
    let table = stdout(&cellsat(&["table", s(&cnf), "--assignment", "011"]));
    let cfg = file(&dir, "t.cfg", &table);
    assert_eq!(stdout(&cellsat(&["step", s(&cnf), s(&cfg)])), table);
    let colors = stdout(&cellsat(&["color", s(&cnf), s(&cfg)]));
    assert!(
        colors.contains("5 4 red (output 0)\nblue 29, red 1"),
        "{colors}"
    );
    let dec = stdout(&cellsat(&["decompose", s(&cnf), s(&cfg)]));
    assert!(dec.ends_with("blue 29, red 1\n"));
    assert!(!dec.contains("cycle"));
}

#[test]
fn reports_are_reproducible() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "unit.cnf", UNIT);
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = cellsat(&["oracle", s(&cnf), "--samples", "200", "--out", s(out)]);
        assert_eq!(code(&o), 0);
        assert!(stdout(&o).starts_with("seed "));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(report(&a)["report"]["classes"], 200);
}

#[test]
fn refutation_round_trip() {
    let dir = TempDir::new().unwrap();
    let php = dir.path().join("php1.cnf");
    cellsat(&["phpgen", "1", "--output", s(&php)]);
    let refu = dir.path().join("php1.ref");
    assert_eq!(
        code(&cellsat(&["invert", s(&php), "--refutation", s(&refu)])),
        0
    );
    let out = dir.path().join("v.json");
    let o = cellsat(&[
        "verify",
        s(&php),
        s(&refu),
        "--samples",
        "300",
        "--out",
        s(&out),
    ]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(report(&out)["report"]["verdict"], "accepted");

    let other = file(&dir, "t1.cnf", TABLE1);
    let out = dir.path().join("w.json");
    assert_eq!(
        code(&cellsat(&["verify", s(&other), s(&refu), "--out", s(&out)])),
        1
    );
    assert_eq!(report(&out)["report"]["reason"], "state-set");

    let bytes = fs::read(&refu).unwrap();
    let cut = file(&dir, "cut.ref", "");
    fs::write(&cut, &bytes[..bytes.len() - 3]).unwrap();
    assert_eq!(code(&cellsat(&["verify", s(&php), s(&cut)])), 2);
}

#[test]
fn invert_satisfiable_is_negative_verdict() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "t1.cnf", TABLE1);
    let refu = dir.path().join("x.ref");
    let o = cellsat(&["invert", s(&cnf), "--refutation", s(&refu)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("cycle of length 30"));
    assert!(!refu.exists());
}

#[test]
fn malformed_inputs_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.cnf", "p cnf 2 1\n1 -1 0\n");
    let out = dir.path().join("e.json");
    assert_eq!(code(&cellsat(&["decide", s(&bad), "--out", s(&out)])), 2);
    assert!(report(&out)["report"]["error"]
        .as_str()
        .unwrap()
        .contains("both"));
    assert_eq!(
        code(&cellsat(&["decide", s(&dir.path().join("missing.cnf"))])),
        2
    );
    assert_eq!(code(&cellsat(&["frobnicate"])), 2);
    let cnf = file(&dir, "unit.cnf", UNIT);
    let cfg = file(&dir, "c.cfg", "config 1 1\n0 0 | nonsense\n");
    assert_eq!(code(&cellsat(&["step", s(&cnf), s(&cfg)])), 2);
    assert_eq!(
        code(&cellsat(&[
            "compile",
            s(&cnf),
            "--emit-table",
            s(&dir.path().join("t")),
            "--row-budget",
            "1000"
        ])),
        2
    );
}

#[test]
fn compile_reports_table_dimensions() {
    let dir = TempDir::new().unwrap();
    let cnf = file(&dir, "unit.cnf", UNIT);
    let out = dir.path().join("c.json");
    assert_eq!(code(&cellsat(&["compile", s(&cnf), "--out", s(&out)])), 0);
    let r = report(&out)["report"].clone();
    assert_eq!(r["states"], 39);
    assert_eq!(r["rows"], 39u64.pow(5));
    assert_eq!(r["encoded_bits"], 39u64.pow(5) * 6);
}

#[test]
fn translate_and_scan() {
    let o = cellsat(&[
        "translate",
        "(forall i n (exists j n (R i j)))",
        "--let",
        "n=1",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        stdout(&o).trim(),
        "((r_{0,0} ∨ r_{0,1}) ∧ (r_{1,0} ∨ r_{1,1}))"
    );
    let o = cellsat(&[
        "translate",
        "(forall i n (exists j n (R i j)))",
        "--scan",
        "n",
        "1",
        "3",
    ]);
    assert_eq!(stdout(&o).lines().count(), 4);
    assert_eq!(code(&cellsat(&["translate", "(R x 1)"])), 2);
}

#[test]
fn sizes_table() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("s.json");
    assert_eq!(
        code(&cellsat(&["sizes", "--k-max", "2", "--out", s(&out)])),
        0
    );
    let rows = report(&out)["report"]["rows"].clone();
    assert_eq!(rows[0]["mu"], 77);
    assert_eq!(rows[0]["region"], 24);
    assert_eq!(rows.as_array().unwrap().len(), 2);
}

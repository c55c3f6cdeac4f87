use std::path::PathBuf;
use std::process::{Command, Output};

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/golden").join(name);
    p.to_string_lossy().into_owned()
}

fn objlift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_objlift")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("objlift-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn parse_skip() {
    let o = objlift(&["parse", &golden("skip.krn")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "skip");
}

#[test]
fn transform_add() {
    let o = objlift(&["transform", &golden("add.oo")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("// varMapping: ivar sum: int -> var sum: object -> int"), "{out}");
    assert!(out.contains("proc add(this: object, x: int) { sum[this] := sum[this] + x }"), "{out}");
    assert!(out.contains("if y /= null -> add(y, 1) fi; if y /= null -> add(y, 2) fi"), "{out}");
}

#[test]
fn transform_output_reparses() {
    let out = scratch("add.rec", "");
    assert_eq!(objlift(&["transform", &golden("add.oo"), "-o", &out]).status.code(), Some(0));
    let o = objlift(&["parse", &out]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("var sum: object -> int;"));
}

#[test]
fn run_find_over_chain() {
    let o = objlift(&["run", &golden("find.oo"), "--state", &golden("chain3.state")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "state { this=o1; z=o3; o1.next=o2; o2.next=o3; }");
}

#[test]
fn run_out_of_fuel_is_inconclusive() {
    let p = scratch("spin.krn", "var x: int; while true do x := x + 1 od");
    let o = objlift(&["run", &p, "--fuel", "50"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("OUT-OF-FUEL"));
}

#[test]
fn run_failure_prints_fail() {
    let o = objlift(&["run", &golden("null_call.oo")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "FAIL");
}

#[test]
fn check_proof_exit_codes() {
    let small = ["--int-range", "-2..2", "--objects", "2"];
    let run = |proof: &str, system: &str, program: &str| {
        let (proof, program) = (golden(proof), golden(program));
        let mut args = vec!["check-proof", &proof, "--system", system, "--program", &program];
        args.extend(small);
        objlift(&args)
    };
    let o = run("null_false.prf", "PO+", "null_call.oo");
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().last().unwrap().starts_with("verdict\taccepted"));
    assert_eq!(run("null_true_strong.prf", "SPO+", "null_call.oo").status.code(), Some(2));
    let o = run("fail_in_spk.prf", "SPK", "counter.krn");
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("rejected"));
}

#[test]
fn check_proof_translation() {
    let (proof, program) = (golden("inc_partial.prf"), golden("inc.oo"));
    let args = ["check-proof", &proof, "--system", "PO+", "--program", &program, "--translate", "--int-range", "-2..2", "--objects", "2"];
    let o = objlift(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("translated derivation (PR+)"));
}

#[test]
fn wp_semantic_and_symbolic() {
    let p = scratch("inc.krn", "var x: int; x := x + 1");
    let o = objlift(&["wp", &p, "--post", "x = 1", "--int-range", "-2..2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "state { }\n1 of 5 states, 0 unknown\n");
    let o = objlift(&["wp", &p, "--post", "x = 1", "--symbolic"]);
    assert_eq!(stdout(&o).trim(), "x + 1 = 1");
}

#[test]
fn suites_are_deterministic() {
    let a = objlift(&["suite", "substitution", "--cases", "100", "--seed", "7"]);
    let b = objlift(&["suite", "substitution", "--cases", "100", "--seed", "7"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).starts_with("suite substitution seed 7\n"));
}

#[test]
fn usage_errors() {
    assert_eq!(objlift(&["suite", "nope"]).status.code(), Some(1));
    assert_eq!(objlift(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(objlift(&["parse", "/nonexistent.oo"]).status.code(), Some(1));
    let bad = scratch("bad.krn", "x := ");
    assert_eq!(objlift(&["parse", &bad]).status.code(), Some(2));
}

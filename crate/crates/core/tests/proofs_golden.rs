use std::path::PathBuf;

use objlift::assertions::Universe;
use objlift::parser::{parse_program, parse_proof, render_proof, with_aux};
use objlift::proofs::{check, translate_proof, CheckOptions, Derivation, System};
use objlift::syntax::Program;

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

fn load(prog: &str, proof: &str) -> (Program, Derivation) {
    let p = parse_program(&golden(prog), prog).unwrap();
    let f = parse_proof(&golden(proof), proof, &p).unwrap_or_else(|e| panic!("{e}"));
    (with_aux(&p, &f.aux), f.derivation)
}

fn opts() -> CheckOptions {
    CheckOptions::with_universe(Universe::new(-2, 2, 2))
}

#[test]
fn false_precondition_call_on_null() {
    let (p, d) = load("null_call.oo", "null_false.prf");
    let v = check(&d, System::POPlus, &p, &opts());
    assert!(v.is_accepted() && v.all_valid(), "{v}");
    assert_eq!(v.exit_code(), 0);
}

#[test]
fn strong_call_on_null_has_counterexample() {
    let (p, d) = load("null_call.oo", "null_true_strong.prf");
    let v = check(&d, System::SPOPlus, &p, &opts());
    assert!(v.is_accepted(), "{v}");
    assert!(v.has_counterexample(), "{v}");
    assert_eq!(v.exit_code(), 2);
}

#[test]
fn partial_failure_rule_is_gated() {
    let (p, d) = load("counter.krn", "fail_in_spk.prf");
    assert!(!check(&d, System::SPK, &p, &opts()).is_accepted());
    let v = check(&d, System::PK, &p, &opts());
    assert!(v.is_accepted() && v.all_valid(), "{v}");
}

#[test]
fn accepted_proofs() {
    for (prog, proof, sys) in [
        ("inc.oo", "inc_strong.prf", System::SPOPlus),
        ("inc.oo", "inc_partial.prf", System::POPlus),
        ("countdown.oo", "countdown.prf", System::POPlus),
        ("countdown.oo", "countdown_strong.prf", System::SPOPlus),
    ] {
        let (p, d) = load(prog, proof);
        let v = check(&d, sys, &p, &opts());
        assert!(v.is_accepted() && v.all_valid(), "{proof}\n{v}");
    }
}

#[test]
fn translations_are_accepted() {
    for (prog, proof, sys) in [
        ("null_call.oo", "null_false.prf", System::POPlus),
        ("null_call.oo", "null_true_strong.prf", System::SPOPlus),
        ("inc.oo", "inc_strong.prf", System::SPOPlus),
        ("inc.oo", "inc_partial.prf", System::POPlus),
        ("countdown.oo", "countdown.prf", System::POPlus),
        ("countdown.oo", "countdown_strong.prf", System::SPOPlus),
    ] {
        let (p, d) = load(prog, proof);
        let src = check(&d, sys, &p, &opts());
        let t = translate_proof(&d, sys, &p, &opts()).unwrap_or_else(|e| panic!("{proof}: {e}"));
        let v = check(&t.derivation, t.system, &t.program, &opts());
        let text = render_proof(&t.derivation).unwrap();
        assert!(v.is_accepted(), "{proof}\n{v}\n{text}");
        assert_eq!(src.all_valid(), v.all_valid(), "{proof}\n{v}");
        assert_eq!(src.has_counterexample(), v.has_counterexample(), "{proof}\n{v}");
    }
}

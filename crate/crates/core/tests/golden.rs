use std::path::PathBuf;

use objlift::interp::{run, RunResult};
use objlift::parser::{parse_program, parse_state, render_program};
use objlift::state::states_equal;
use objlift::syntax::typecheck;
use objlift::transform::{transform_program, transform_state};

fn golden(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn transformed_programs_match_goldens() {
    for (oo, rec) in [("add.oo", "add.rec"), ("find.oo", "find.rec")] {
        let p = parse_program(&golden(oo), oo).unwrap();
        assert!(typecheck(&p).is_empty());
        let image = transform_program(&p).unwrap().program;
        assert_eq!(render_program(&image).unwrap(), golden(rec), "{oo}");
        assert_eq!(parse_program(&golden(rec), rec).unwrap(), image, "{rec}");
        assert!(typecheck(&image).is_empty(), "{rec}");
    }
}

#[test]
fn find_over_golden_lists() {
    let p = parse_program(&golden("find.oo"), "find.oo").unwrap();
    let image = transform_program(&p).unwrap().program;
    let expect = [("chain3.state", "terminated"), ("chain_null.state", "failed"), ("chain_cycle.state", "out of fuel")];
    for (file, want) in expect {
        let s = parse_state(&golden(file), file).unwrap();
        let source = run(&p, &s, 10_000).unwrap();
        let target = run(&image, &transform_state(&s), 20_000).unwrap();
        let got = match (&source, &target) {
            (RunResult::Terminated(a), RunResult::Terminated(b)) => {
                assert!(states_equal(&transform_state(a), b), "{file}");
                assert!(states_equal(a, &s), "{file}: find changes nothing");
                "terminated"
            }
            (RunResult::Failed, RunResult::Failed) => "failed",
            (RunResult::OutOfFuel(_), RunResult::OutOfFuel(_)) => "out of fuel",
            _ => panic!("{file}: {source} vs {target}"),
        };
        assert_eq!(got, want, "{file}");
    }
}

#[test]
fn add_accumulates_on_the_receiver() {
    let p = parse_program(&golden("add.oo"), "add.oo").unwrap();
    let s = parse_state("state { this=o1; y=o2; }", "<inline>").unwrap();
    let RunResult::Terminated(t) = run(&p, &s, 100).unwrap() else { panic!() };
    assert_eq!(t, parse_state("state { this=o1; y=o2; o2.sum=3; }", "<inline>").unwrap());
    let s = parse_state("state { this=o1; }", "<inline>").unwrap();
    assert_eq!(run(&p, &s, 100).unwrap(), RunResult::Failed);
}

use std::collections::BTreeSet;

use proptest::prelude::*;

use objlift::assertions::{eval_assertion, simplify, substitute, Universe};
use objlift::gen::{Gen, Shape};
use objlift::interp::{run, RunResult};
use objlift::parser::{parse_expr, parse_program, parse_state, render_expr, render_program};
use objlift::state::{eval, eval_with, states_equal, Slot, State, Value};
use objlift::syntax::{analyze_vars, change_decls, typecheck, Ident, Target};
use objlift::transform::{transform_expr, transform_program, transform_state};
use objlift::wp::{wp_semantic, Mode, StateSpace};

fn universe() -> Universe {
    Universe::new(-2, 2, 2)
}

fn declarations() -> objlift::syntax::Program {
    let g = Gen::new(0);
    objlift::syntax::Program {
        flavor: objlift::syntax::Flavor::ObjectOriented,
        globals: g.vocab.globals(true),
        decls: vec![],
        main: objlift::syntax::Stmt::Skip,
    }
}

proptest! {
    #[test]
    fn programs_round_trip(seed in any::<u64>()) {
        let p = Gen::new(seed).oo_program(&Shape::default());
        prop_assert!(typecheck(&p).is_empty());
        let text = render_program(&p).unwrap();
        prop_assert_eq!(parse_program(&text, "<rendered>").unwrap(), p);
    }

    #[test]
    fn transformed_programs_round_trip(seed in any::<u64>()) {
        let p = Gen::new(seed).oo_program(&Shape::default());
        let image = transform_program(&p).unwrap().program;
        prop_assert!(typecheck(&image).is_empty());
        let mut back = parse_program(&render_program(&image).unwrap(), "<rendered>").unwrap();
        if image.decls.is_empty() {
            // Without procedures the text does not mark a recursive program.
            back.flavor = image.flavor;
        }
        prop_assert_eq!(back, image);
    }

    #[test]
    fn assertions_round_trip(seed in any::<u64>()) {
        let decls = declarations();
        let p = Gen::new(seed).assertion(true);
        prop_assert_eq!(parse_expr(&render_expr(&p), "<rendered>", &decls).unwrap(), p);
    }

    #[test]
    fn states_round_trip(seed in any::<u64>()) {
        let s = Gen::new(seed).state(true);
        prop_assert_eq!(parse_state(&s.to_string(), "<rendered>").unwrap(), s);
    }

    #[test]
    fn lookup_after_update(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (target, _) = g.assignment(true);
        let s = g.state(true);
        let d = match eval(&s, &target.to_expr()) {
            Value::Int(n) => Value::Int(n + 1),
            Value::Bool(b) => Value::Bool(!b),
            Value::Obj(_) => Value::oid(2),
        };
        let loc = s.resolve(&target);
        let mut t = s.clone();
        t.assign(&target, d.clone());
        prop_assert_eq!(t.read(&loc, target.var.ty.value_type()), d);
        let old = s.read(&loc, target.var.ty.value_type());
        t.write(&loc, old);
        prop_assert!(states_equal(&t, &s));
    }

    #[test]
    fn simplification_preserves_meaning(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (target, t) = g.assignment(true);
        let p = substitute(&g.assertion(true), &target, &t).unwrap();
        let s = g.state(true);
        let u = universe();
        prop_assert_eq!(eval_with(&s, &u, &p), eval_with(&s, &u, &simplify(&p)));
    }

    #[test]
    fn substitution_agrees_with_update(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let (target, t) = g.assignment(true);
        let p = g.assertion(true);
        let s = g.state(true);
        let u = universe();
        let mut updated = s.clone();
        updated.assign(&target, eval(&s, &t));
        prop_assert_eq!(eval_assertion(&s, &substitute(&p, &target, &t).unwrap(), &u), eval_assertion(&updated, &p, &u));
    }

    #[test]
    fn lifting_preserves_truth(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let p = g.assertion(true);
        let s = g.state(true);
        let u = universe();
        prop_assert_eq!(eval_assertion(&s, &p, &u), eval_assertion(&transform_state(&s), &transform_expr(&p), &u));
    }

    #[test]
    fn runs_only_change_changed_variables(seed in any::<u64>()) {
        let mut g = Gen::new(seed);
        let p = g.oo_program(&Shape::default());
        let s = g.state(true);
        if let RunResult::Terminated(t) = run(&p, &s, 4000).unwrap() {
            let mut allowed = analyze_vars(&p.main).change;
            allowed.extend(change_decls(&p.decls));
            for name in differing(&s, &t) {
                prop_assert!(allowed.contains(&name), "{} changed", name);
            }
        }
    }

    #[test]
    fn strong_preconditions_are_smaller(seed in any::<u64>()) {
        let decls = parse_program("var x: int; var y: int; var z: int; var b: bool; skip", "<wp>").unwrap();
        let vars: Vec<_> = decls.globals.clone();
        let mut g = Gen::new(seed);
        let stmt = g.kernel_stmt(&vars[..3], &vars[3..], &[], 3);
        let post = g.kernel_assertion(&vars[..3], &vars[3..], &[]);
        let space = StateSpace::over(Universe::new(-1, 1, 0), &vars, &[]);
        let strong = wp_semantic(&stmt, &[], &post, &space, 1000, Mode::StrongPartial);
        let partial = wp_semantic(&stmt, &[], &post, &space, 1000, Mode::Partial);
        prop_assert_eq!(strong.subset_of(&partial), Some(true));
    }
}

/// Names of normal variables and instance variables whose contents differ.
fn differing(a: &State, b: &State) -> BTreeSet<Ident> {
    let (a, b) = (a.normalized(), b.normalized());
    let mut out = BTreeSet::new();
    let mut compare = |x: Option<&Slot>, y: Option<&Slot>, name: &Ident| {
        if x != y {
            out.insert(name.clone());
        }
    };
    for name in a.normals.keys().chain(b.normals.keys()) {
        compare(a.normals.get(name), b.normals.get(name), name);
    }
    let objects: BTreeSet<_> = a.locals.keys().chain(b.locals.keys()).copied().collect();
    for o in objects {
        let (la, lb) = (a.locals.get(&o).cloned().unwrap_or_default(), b.locals.get(&o).cloned().unwrap_or_default());
        for name in la.keys().chain(lb.keys()) {
            compare(la.get(name), lb.get(name), name);
        }
    }
    out
}

#[test]
fn target_lookup_uses_current_object() {
    let p = declarations();
    let s = parse_state("state { this=o2; o2.f=4; }", "<inline>").unwrap();
    let f = p.globals.iter().find(|v| &*v.name == "f").unwrap();
    assert_eq!(eval(&s, &Target::simple(f).to_expr()), Value::int(4));
}

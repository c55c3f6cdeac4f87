//! Small-step operational semantics and fuel-bounded runs.

use std::fmt;

use thiserror::Error;

use crate::state::{eval, ObjRef, Outcome, State, StateError, Value};
use crate::syntax::{Decl, Expr, Flavor, Program, Stmt, Var};

pub const DEFAULT_FUEL: u64 = 1_000_000;

/// `⟨S, σ⟩`; `Empty` marks termination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub stmt: Stmt,
    pub out: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    Terminated(State),
    Failed,
    /// Budget exhausted after this many transitions.
    OutOfFuel(u64),
}

impl RunResult {
    pub fn is_out_of_fuel(&self) -> bool {
        matches!(self, RunResult::OutOfFuel(_))
    }

    /// Outcome of the strong partial semantics, `None` for divergence.
    pub fn outcome(&self) -> Option<Outcome> {
        match self {
            RunResult::Terminated(s) => Some(Outcome::Proper(s.clone())),
            RunResult::Failed => Some(Outcome::Fail),
            RunResult::OutOfFuel(_) => None,
        }
    }
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunResult::Terminated(s) => s.fmt(f),
            RunResult::Failed => f.write_str("FAIL"),
            RunResult::OutOfFuel(n) => write!(f, "OUT-OF-FUEL after {n} steps"),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuntimeError {
    #[error("call of undeclared `{0}`")]
    Unresolved(String),
    #[error("`{0}` called with {1} arguments, declared with {2}")]
    Arity(String, usize, usize),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("object-oriented runs must start with `this` different from null")]
    NullThis,
}

fn find_decl<'a>(decls: &'a [Decl], name: &str, nargs: usize) -> Result<&'a Decl, RuntimeError> {
    let d = decls.iter().find(|d| &*d.name == name).ok_or_else(|| RuntimeError::Unresolved(name.to_string()))?;
    if d.formals.len() != nargs {
        return Err(RuntimeError::Arity(name.to_string(), nargs, d.formals.len()));
    }
    Ok(d)
}

/// One transition of a non-empty statement from a proper state. Returns the
/// next statement, or `None` when the transition leads to `fail`.
fn step_in_place(s: Stmt, st: &mut State, decls: &[Decl]) -> Result<Option<Stmt>, RuntimeError> {
    Ok(Some(match s {
        Stmt::Empty => unreachable!("terminated configurations have no successor"),
        Stmt::Skip => Stmt::Empty,
        Stmt::Assign(t, e) => {
            let d = eval(st, &e);
            st.assign(&t, d);
            Stmt::Empty
        }
        Stmt::ParAssign(vs, es) => {
            let ds: Vec<Value> = es.iter().map(|e| eval(st, e)).collect();
            st.assign_parallel(&vs, ds)?;
            Stmt::Empty
        }
        Stmt::Seq(a, b) => match step_in_place(*a, st, decls)? {
            None => return Ok(None),
            Some(a2) => Stmt::seq(a2, *b),
        },
        Stmt::If(g, a, b) => {
            if eval(st, &g).as_bool() {
                *a
            } else {
                *b
            }
        }
        Stmt::FailIf(g, a) => {
            if eval(st, &g).as_bool() {
                *a
            } else {
                return Ok(None);
            }
        }
        Stmt::While(g, body) => {
            if eval(st, &g).as_bool() {
                let again = Stmt::While(g, body.clone());
                Stmt::seq(*body, again)
            } else {
                Stmt::Empty
            }
        }
        Stmt::Block { locals, inits, body } => {
            let saved: Vec<Value> = locals.iter().map(|v| eval(st, &Expr::var(v))).collect();
            let restore = Stmt::Restore(locals.clone(), saved);
            Stmt::seq(Stmt::par_assign(locals, inits), Stmt::seq(*body, restore))
        }
        Stmt::MethodCall(callee, m, args) => {
            let d = find_decl(decls, &m, args.len())?;
            let mut locals = vec![Var::this()];
            locals.extend(d.formals.iter().cloned());
            let mut inits = vec![callee.clone()];
            inits.extend(args);
            Stmt::fail_if(Expr::ne(callee, Expr::Null), Stmt::block(locals, inits, d.body.clone()))
        }
        Stmt::ProcCall(p, args) => {
            let d = find_decl(decls, &p, args.len())?;
            Stmt::block(d.formals.clone(), args, d.body.clone())
        }
        Stmt::Restore(vs, values) => {
            st.assign_parallel(&vs, values)?;
            Stmt::Empty
        }
    }))
}

/// The transition relation: `None` exactly for terminated configurations.
pub fn step(cfg: &Config, decls: &[Decl]) -> Result<Option<Config>, RuntimeError> {
    let Outcome::Proper(st) = &cfg.out else { return Ok(None) };
    if cfg.stmt == Stmt::Empty {
        return Ok(None);
    }
    let mut st = st.clone();
    Ok(Some(match step_in_place(cfg.stmt.clone(), &mut st, decls)? {
        Some(next) => Config { stmt: next, out: Outcome::Proper(st) },
        None => Config { stmt: Stmt::Empty, out: Outcome::Fail },
    }))
}

/// Runs `stmt` from `start`, calling `observe` after every transition with
/// the new statement and outcome.
pub fn run_stmt_observed(
    stmt: &Stmt,
    decls: &[Decl],
    start: &State,
    fuel: u64,
    observe: &mut dyn FnMut(&Stmt, &Outcome),
) -> Result<RunResult, RuntimeError> {
    let mut st = start.clone();
    let mut cur = stmt.clone();
    let mut steps = 0;
    while cur != Stmt::Empty {
        if steps == fuel {
            return Ok(RunResult::OutOfFuel(steps));
        }
        steps += 1;
        match step_in_place(cur, &mut st, decls)? {
            Some(next) => {
                cur = next;
                observe(&cur, &Outcome::Proper(st.clone()));
            }
            None => {
                observe(&Stmt::Empty, &Outcome::Fail);
                return Ok(RunResult::Failed);
            }
        }
    }
    Ok(RunResult::Terminated(st))
}

pub fn run_stmt(stmt: &Stmt, decls: &[Decl], start: &State, fuel: u64) -> Result<RunResult, RuntimeError> {
    let mut st = start.clone();
    let mut cur = stmt.clone();
    let mut steps = 0;
    while cur != Stmt::Empty {
        if steps == fuel {
            return Ok(RunResult::OutOfFuel(steps));
        }
        steps += 1;
        match step_in_place(cur, &mut st, decls)? {
            Some(next) => cur = next,
            None => return Ok(RunResult::Failed),
        }
    }
    Ok(RunResult::Terminated(st))
}

fn check_start(program: &Program, start: &State) -> Result<(), RuntimeError> {
    if program.flavor == Flavor::ObjectOriented && start.this() == ObjRef::Null {
        return Err(RuntimeError::NullThis);
    }
    Ok(())
}

/// Runs the main statement of a well-typed program.
pub fn run(program: &Program, start: &State, fuel: u64) -> Result<RunResult, RuntimeError> {
    check_start(program, start)?;
    run_stmt(&program.main, &program.decls, start, fuel)
}

pub fn run_observed(
    program: &Program,
    start: &State,
    fuel: u64,
    observe: &mut dyn FnMut(&Stmt, &Outcome),
) -> Result<RunResult, RuntimeError> {
    check_start(program, start)?;
    run_stmt_observed(&program.main, &program.decls, start, fuel, observe)
}

/// Final state with every declared simple normal variable and `this`
/// shown, defaults included.
pub fn render_footprint(program: &Program, state: &State) -> String {
    let text = state.to_string();
    let mut out = text.trim_end_matches('}').trim_end().to_string();
    for v in std::iter::once(Var::this()).chain(program.normal_globals().cloned()) {
        if v.is_simple() && !state.normals.contains_key(&v.name) {
            out.push_str(&format!(" {}={};", v.name, v.ty.value_type().default_value()));
        }
    }
    out.push_str(" }");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_program, parse_state, parse_stmt};

    fn prog(src: &str) -> Program {
        parse_program(src, "<inline>").unwrap()
    }

    #[test]
    fn false_failure_guard_fails() {
        let p = prog("skip");
        let s = parse_stmt("if false -> skip fi", "<inline>", &p).unwrap();
        let cfg = Config { stmt: s, out: Outcome::Proper(State::new()) };
        let next = step(&cfg, &[]).unwrap().unwrap();
        assert_eq!(next, Config { stmt: Stmt::Empty, out: Outcome::Fail });
        assert_eq!(step(&next, &[]).unwrap(), None);
    }

    #[test]
    fn block_injects_restore() {
        let p = prog("var x: int; skip");
        let s = parse_stmt("begin local x := 1; skip end", "<inline>", &p).unwrap();
        let mut st = State::new();
        st.set_normal("x", Value::int(9));
        let cfg = Config { stmt: s, out: Outcome::Proper(st.clone()) };
        let next = step(&cfg, &[]).unwrap().unwrap();
        let x = p.globals[0].clone();
        let want = Stmt::seq_all([
            Stmt::Assign(crate::syntax::Target::simple(&x), Expr::int(1)),
            Stmt::Skip,
            Stmt::Restore(vec![x], vec![Value::int(9)]),
        ]);
        assert_eq!(next, Config { stmt: want, out: Outcome::Proper(st) });
    }

    #[test]
    fn procedure_call_handles_clash() {
        // P(u + 1) with P(u) :: S becomes  u := u + 1; S; restore u
        let p = prog("var y: int; proc P(u: int) { y := u } P(2)");
        let u = p.decls[0].formals[0].clone();
        let mut st = State::new();
        st.set_normal("u", Value::int(5));
        let call = parse_stmt("P(u + 1)", "<inline>", &p).unwrap();
        let mut cfg = Config { stmt: call, out: Outcome::Proper(st) };
        for _ in 0..3 {
            cfg = step(&cfg, &p.decls).unwrap().unwrap();
        }
        let Outcome::Proper(s) = &cfg.out else { panic!() };
        assert_eq!(eval(s, &Expr::var(&u)), Value::int(6));
        let want = Stmt::seq(p.decls[0].body.clone(), Stmt::Restore(vec![u], vec![Value::int(5)]));
        assert_eq!(cfg.stmt, want);
    }

    const FIND: &str = "var z: object; ivar next: object;\n\
        method find(u: object) { if u /= this -> next.find(u) fi' }\n\
        this.find(z)";

    #[test]
    fn find_on_chain_terminates() {
        let p = prog(FIND);
        let st = parse_state("state { this=o1; o1.next=o2; o2.next=o3; z=o3; }", "<inline>").unwrap();
        let r = run(&p, &st, DEFAULT_FUEL).unwrap();
        assert_eq!(r, RunResult::Terminated(st));
    }

    #[test]
    fn find_through_null_fails() {
        let p = prog(FIND);
        let st = parse_state("state { this=o1; o1.next=o2; z=o3; }", "<inline>").unwrap();
        assert_eq!(run(&p, &st, DEFAULT_FUEL).unwrap(), RunResult::Failed);
    }

    #[test]
    fn find_on_cycle_diverges() {
        let p = prog(FIND);
        let st = parse_state("state { this=o1; o1.next=o2; o2.next=o1; z=o3; }", "<inline>").unwrap();
        assert_eq!(run(&p, &st, 10_000).unwrap(), RunResult::OutOfFuel(10_000));
    }

    #[test]
    fn null_this_rejected_for_object_programs() {
        let p = prog(FIND);
        assert_eq!(run(&p, &State::new(), 10), Err(RuntimeError::NullThis));
    }

    #[test]
    fn fuel_monotone() {
        let p = prog("var x: int; while x < 5 do x := x + 1 od");
        let r = run(&p, &State::new(), 100).unwrap();
        assert!(matches!(r, RunResult::Terminated(_)));
        assert_eq!(run(&p, &State::new(), 1000).unwrap(), r);
        assert!(run(&p, &State::new(), 3).unwrap().is_out_of_fuel());
    }
}

//! Weakest preconditions: exact membership by running the statement from
//! every state of a finite space, and a symbolic calculator for loop-free,
//! call-free statements.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::assertions::{eval_assertion, substitute, substitute_parallel, SubstError, Universe};
use crate::interp::{run_stmt, RunResult};
use crate::state::{Location, ObjRef, State, Value};
use crate::syntax::{free_vars, Decl, Expr, Flavor, Program, Stmt, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Partial,
    StrongPartial,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Partial => "p",
            Mode::StrongPartial => "sp",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "p" | "partial" => Ok(Mode::Partial),
            "sp" | "strong" => Ok(Mode::StrongPartial),
            _ => Err(format!("unknown mode `{s}` (expected p or sp)")),
        }
    }
}

/// One enumerated location and the values it ranges over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Access {
    pub loc: Location,
    pub values: Vec<Value>,
}

/// A finite set of states: the cartesian product of the access ranges over
/// a shared base state.
#[derive(Clone, Debug)]
pub struct StateSpace {
    pub universe: Universe,
    pub base: State,
    pub footprint: Vec<Access>,
}

impl StateSpace {
    pub fn new(universe: Universe, base: State, footprint: Vec<Access>) -> StateSpace {
        StateSpace { universe, base, footprint }
    }

    /// Simple normal variables ranging over their universe domains, plus
    /// listed cells of normal arrays.
    pub fn over(universe: Universe, vars: &[Var], cells: &[(Var, Vec<Value>)]) -> StateSpace {
        let mut footprint = Vec::new();
        for v in vars {
            let loc = Location::Normal { name: v.name.clone(), indices: vec![] };
            footprint.push(Access { loc, values: universe.domain(v.ty.value_type()) });
        }
        for (a, ix) in cells {
            let loc = Location::Normal { name: a.name.clone(), indices: ix.clone() };
            footprint.push(Access { loc, values: universe.domain(a.ty.value_type()) });
        }
        StateSpace { universe, base: State::new(), footprint }
    }

    /// Space over the simple normal globals of a program. For
    /// object-oriented programs `this` ranges over the non-null objects.
    pub fn for_program(universe: Universe, program: &Program) -> StateSpace {
        let vars: Vec<Var> = program.normal_globals().filter(|v| v.is_simple()).cloned().collect();
        let mut space = StateSpace::over(universe, &vars, &[]);
        if program.flavor == Flavor::ObjectOriented {
            let values = space.universe.oids.iter().map(|o| Value::Obj(*o)).collect();
            let loc = Location::Normal { name: crate::syntax::THIS.into(), indices: vec![] };
            space.footprint.insert(0, Access { loc, values });
        }
        space
    }

    /// Number of states, `None` on overflow.
    pub fn size(&self) -> Option<usize> {
        self.footprint.iter().try_fold(1usize, |n, a| n.checked_mul(a.values.len()))
    }

    /// The i-th state in enumeration order (last access varies fastest).
    pub fn state(&self, mut i: usize) -> State {
        let mut s = self.base.clone();
        for a in self.footprint.iter().rev() {
            let n = a.values.len();
            s.write(&a.loc, a.values[i % n].clone());
            i /= n;
        }
        s
    }

    pub fn states(&self) -> impl Iterator<Item = State> + '_ {
        (0..self.size().expect("state space too large")).map(|i| self.state(i))
    }

    /// `[[p]]` restricted to the space.
    pub fn satisfying(&self, p: &Expr) -> Vec<bool> {
        let n = self.size().expect("state space too large");
        (0..n).into_par_iter().map(|i| eval_assertion(&self.state(i), p, &self.universe)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Membership {
    In,
    Out,
    /// The run from this state exhausted its fuel.
    Unknown,
}

impl Membership {
    pub fn from_bool(b: bool) -> Membership {
        if b {
            Membership::In
        } else {
            Membership::Out
        }
    }
}

/// Membership of every state of a space, in enumeration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WpSet {
    pub membership: Vec<Membership>,
}

impl WpSet {
    pub fn from_bools(bs: &[bool]) -> WpSet {
        WpSet { membership: bs.iter().map(|b| Membership::from_bool(*b)).collect() }
    }

    pub fn has_unknown(&self) -> bool {
        self.membership.contains(&Membership::Unknown)
    }

    pub fn count(&self, m: Membership) -> usize {
        self.membership.iter().filter(|x| **x == m).count()
    }

    /// `None` when either side has unknown states.
    pub fn same_as(&self, other: &WpSet) -> Option<bool> {
        if self.has_unknown() || other.has_unknown() {
            return None;
        }
        Some(self.membership == other.membership)
    }

    pub fn subset_of(&self, other: &WpSet) -> Option<bool> {
        if self.has_unknown() || other.has_unknown() {
            return None;
        }
        Some(self.membership.iter().zip(&other.membership).all(|(a, b)| *a != Membership::In || *b == Membership::In))
    }
}

/// Whether `σ` belongs to the weakest precondition of `stmt` with respect
/// to the set of final states described by `post`.
pub fn membership(
    stmt: &Stmt,
    decls: &[Decl],
    post: &(dyn Fn(&State) -> Membership + Sync),
    start: &State,
    fuel: u64,
    mode: Mode,
) -> Membership {
    match run_stmt(stmt, decls, start, fuel).expect("statement type-checked") {
        RunResult::Terminated(t) => post(&t),
        RunResult::Failed => Membership::from_bool(mode == Mode::Partial),
        RunResult::OutOfFuel(_) => Membership::Unknown,
    }
}

/// Weakest precondition over a space for an arbitrary postcondition set.
pub fn wp_semantic_with(
    stmt: &Stmt,
    decls: &[Decl],
    post: &(dyn Fn(&State) -> Membership + Sync),
    space: &StateSpace,
    fuel: u64,
    mode: Mode,
) -> WpSet {
    let n = space.size().expect("state space too large");
    let membership =
        (0..n).into_par_iter().map(|i| membership(stmt, decls, post, &space.state(i), fuel, mode)).collect();
    WpSet { membership }
}

pub fn wp_semantic(stmt: &Stmt, decls: &[Decl], post: &Expr, space: &StateSpace, fuel: u64, mode: Mode) -> WpSet {
    let u = &space.universe;
    let pred = |t: &State| Membership::from_bool(eval_assertion(t, post, u));
    wp_semantic_with(stmt, decls, &pred, space, fuel, mode)
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum WpError {
    #[error("no symbolic weakest precondition for {0}")]
    Unsupported(&'static str),
    #[error("block local `{0}` occurs free in the postcondition")]
    LocalInPost(String),
    #[error(transparent)]
    Subst(#[from] SubstError),
}

/// The equational weakest precondition of a loop-free, call-free
/// statement.
pub fn wp_symbolic(stmt: &Stmt, post: &Expr, mode: Mode) -> Result<Expr, WpError> {
    Ok(match stmt {
        Stmt::Skip | Stmt::Empty => post.clone(),
        Stmt::Assign(t, e) if t.indices.is_empty() && !t.var.is_instance() => {
            substitute_parallel(post, std::slice::from_ref(&t.var), std::slice::from_ref(e))?
        }
        Stmt::Assign(t, e) => substitute(post, t, e)?,
        Stmt::ParAssign(vs, es) => substitute_parallel(post, vs, es)?,
        Stmt::Seq(a, b) => wp_symbolic(a, &wp_symbolic(b, post, mode)?, mode)?,
        Stmt::If(g, a, b) => Expr::or(
            Expr::and(g.clone(), wp_symbolic(a, post, mode)?),
            Expr::and(Expr::not(g.clone()), wp_symbolic(b, post, mode)?),
        ),
        Stmt::FailIf(g, a) => {
            let body = Expr::and(g.clone(), wp_symbolic(a, post, mode)?);
            match mode {
                Mode::Partial => Expr::or(body, Expr::not(g.clone())),
                Mode::StrongPartial => body,
            }
        }
        Stmt::Block { locals, inits, body } => {
            let free = free_vars(post);
            if let Some(x) = locals.iter().find(|x| free.contains(&x.name)) {
                return Err(WpError::LocalInPost(x.name.to_string()));
            }
            let expanded = Stmt::seq(Stmt::par_assign(locals.clone(), inits.clone()), (**body).clone());
            wp_symbolic(&expanded, post, mode)?
        }
        Stmt::While(..) => return Err(WpError::Unsupported("loops")),
        Stmt::MethodCall(..) | Stmt::ProcCall(..) => return Err(WpError::Unsupported("calls")),
        Stmt::Restore(..) => return Err(WpError::Unsupported("restore statements")),
    })
}

/// Renders the members of a set, one state literal per line.
pub fn render_members(space: &StateSpace, set: &WpSet) -> String {
    let mut out = String::new();
    for (i, m) in set.membership.iter().enumerate() {
        let tag = match m {
            Membership::In => "",
            Membership::Out => continue,
            Membership::Unknown => "unknown ",
        };
        out.push_str(tag);
        out.push_str(&space.state(i).to_string());
        out.push('\n');
    }
    out
}

/// Integer variables over `lo..=hi` with no objects; handy for kernel
/// programs.
pub fn int_space(lo: i64, hi: i64, vars: &[Var]) -> StateSpace {
    StateSpace::over(Universe { int_lo: lo, int_hi: hi, oids: vec![ObjRef::Oid(1)] }, vars, &[])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_program, parse_stmt};

    fn setup(src: &str) -> Program {
        parse_program(src, "<inline>").unwrap()
    }

    fn sem(p: &Program, s: &str, post: &str, space: &StateSpace, mode: Mode) -> WpSet {
        let s = parse_stmt(s, "<inline>", p).unwrap();
        let post = parse_expr(post, "<inline>", p).unwrap();
        wp_semantic(&s, &p.decls, &post, space, 1000, mode)
    }

    #[test]
    fn increment_example() {
        let p = setup("var x: int; skip");
        let space = int_space(-2, 2, &p.globals);
        let w = sem(&p, "x := x + 1", "x = 1", &space, Mode::Partial);
        let members: Vec<State> = space.states().zip(&w.membership).filter(|(_, m)| **m == Membership::In).map(|(s, _)| s).collect();
        assert_eq!(members.len(), 1);
        assert_eq!(crate::state::eval(&members[0], &Expr::var(&p.globals[0])), Value::int(0));
    }

    #[test]
    fn skip_is_identity_and_failure_is_strong() {
        let p = setup("var x: int; var b: bool; skip");
        let space = int_space(-1, 1, &p.globals);
        let post = parse_expr("x > 0 or b", "<inline>", &p).unwrap();
        assert_eq!(sem(&p, "skip", "x > 0 or b", &space, Mode::StrongPartial), WpSet::from_bools(&space.satisfying(&post)));
        let guard = parse_expr("x /= 0", "<inline>", &p).unwrap();
        let g = space.satisfying(&guard);
        let inner = sem(&p, "x := x * 2", "x > 0 or b", &space, Mode::StrongPartial);
        let both: Vec<bool> = g.iter().zip(&inner.membership).map(|(a, m)| *a && *m == Membership::In).collect();
        assert_eq!(sem(&p, "if x /= 0 -> x := x * 2 fi", "x > 0 or b", &space, Mode::StrongPartial), WpSet::from_bools(&both));
    }

    #[test]
    fn symbolic_clauses() {
        let p = setup("var x, y: int; var b: bool; skip");
        let post = parse_expr("x = y", "<inline>", &p).unwrap();
        let s = parse_stmt("x := y + 1", "<inline>", &p).unwrap();
        assert_eq!(wp_symbolic(&s, &post, Mode::Partial).unwrap(), parse_expr("y + 1 = y", "<inline>", &p).unwrap());
        let s = parse_stmt("if b -> skip fi", "<inline>", &p).unwrap();
        assert_eq!(
            wp_symbolic(&s, &post, Mode::Partial).unwrap(),
            parse_expr("(b and x = y) or not b", "<inline>", &p).unwrap()
        );
        let s = parse_stmt("begin local x := 0; y := x end", "<inline>", &p).unwrap();
        let q = parse_expr("y = 0", "<inline>", &p).unwrap();
        assert_eq!(wp_symbolic(&s, &q, Mode::Partial).unwrap(), parse_expr("0 = 0", "<inline>", &p).unwrap());
        assert_eq!(wp_symbolic(&s, &post, Mode::Partial), Err(WpError::LocalInPost("x".into())));
        let s = parse_stmt("while b do skip od", "<inline>", &p).unwrap();
        assert!(matches!(wp_symbolic(&s, &post, Mode::Partial), Err(WpError::Unsupported(_))));
    }

    #[test]
    fn divergence_is_unknown() {
        let p = setup("var x: int; skip");
        let space = int_space(0, 1, &p.globals);
        let w = sem(&p, "while x = 0 do skip od", "true", &space, Mode::Partial);
        assert_eq!(w.membership, vec![Membership::Unknown, Membership::In]);
        assert_eq!(w.same_as(&w), None);
    }

    #[test]
    fn graph_of_a_program() {
        // wp(S, x = x0 and y = y0) holds exactly where (x0, y0) is the
        // output of S on (x, y).
        let p = setup("var x, y, x0, y0: int; skip");
        let space = int_space(-1, 1, &p.globals);
        let w = sem(&p, "x, y := y, x", "x = x0 and y = y0", &space, Mode::Partial);
        assert_eq!(w.count(Membership::In), 9);
        let swapped = parse_expr("x0 = y and y0 = x", "<inline>", &p).unwrap();
        assert_eq!(w, WpSet::from_bools(&space.satisfying(&swapped)));
    }
}

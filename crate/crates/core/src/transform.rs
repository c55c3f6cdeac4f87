//! Translation of object-oriented programs into recursive programs whose
//! instance variables become object-indexed normal arrays.

use thiserror::Error;

use crate::proofs::Formula;
use crate::state::{Outcome, Slot, State, Value};
use crate::syntax::{BasicType, Decl, Expr, Flavor, Program, Stmt, Target, Type, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarMapping {
    pub instance: Var,
    pub lifted: Var,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaImage {
    pub program: Program,
    pub var_mapping: Vec<VarMapping>,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("only object-oriented programs can be transformed, got a {0} program")]
    NotObjectOriented(Flavor),
}

/// `x: T` becomes `x: object -> T`; `a: T1 * .. -> T` gains a leading
/// object argument. Normal variables are unchanged.
pub fn lift_var(v: &Var) -> Var {
    if !v.is_instance() {
        return v.clone();
    }
    let ty = match &v.ty {
        Type::Basic(t) => Type::Array { args: vec![BasicType::Object], value: *t },
        Type::Array { args, value } => {
            let mut lifted = vec![BasicType::Object];
            lifted.extend(args.iter().copied());
            Type::Array { args: lifted, value: *value }
        }
    };
    Var::normal(&v.name, ty)
}

fn lifted_access(v: &Var, owner: Expr, indices: &[Expr]) -> Expr {
    let mut ix = vec![owner];
    ix.extend(indices.iter().map(transform_expr));
    Expr::Index(lift_var(v), ix)
}

/// Expressions, global expressions and assertions alike.
pub fn transform_expr(e: &Expr) -> Expr {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Null => e.clone(),
        Expr::Var(v) if v.is_instance() => lifted_access(v, Expr::this(), &[]),
        Expr::Var(_) => e.clone(),
        Expr::Index(v, ix) if v.is_instance() => lifted_access(v, Expr::this(), ix),
        Expr::Index(v, ix) => Expr::Index(v.clone(), ix.iter().map(transform_expr).collect()),
        Expr::Nav(base, v, ix) => lifted_access(v, transform_expr(base), ix),
        Expr::Cond(c, t, f) => Expr::cond(transform_expr(c), transform_expr(t), transform_expr(f)),
        Expr::Not(x) => Expr::not(transform_expr(x)),
        Expr::Bin(op, l, r) => Expr::bin(*op, transform_expr(l), transform_expr(r)),
        Expr::Quant(q, v, body) => Expr::Quant(*q, v.clone(), Box::new(transform_expr(body))),
    }
}

pub fn transform_assertion(p: &Expr) -> Expr {
    transform_expr(p)
}

/// Image of an assignment target; as an expression it equals
/// `transform_expr(target.to_expr())`.
pub fn transform_target(t: &Target) -> Target {
    match transform_expr(&t.to_expr()) {
        Expr::Var(var) => Target { var, indices: vec![] },
        Expr::Index(var, indices) => Target { var, indices },
        other => unreachable!("targets map to variables, got {other:?}"),
    }
}

pub fn transform_stmt(s: &Stmt) -> Stmt {
    let all = |es: &[Expr]| es.iter().map(transform_expr).collect::<Vec<_>>();
    match s {
        Stmt::Skip | Stmt::Empty | Stmt::Restore(..) => s.clone(),
        Stmt::Assign(t, e) => Stmt::Assign(transform_target(t), transform_expr(e)),
        Stmt::ParAssign(vs, es) => Stmt::ParAssign(vs.clone(), all(es)),
        Stmt::Seq(a, b) => Stmt::Seq(Box::new(transform_stmt(a)), Box::new(transform_stmt(b))),
        Stmt::If(g, a, b) => Stmt::If(transform_expr(g), Box::new(transform_stmt(a)), Box::new(transform_stmt(b))),
        Stmt::FailIf(g, a) => Stmt::FailIf(transform_expr(g), Box::new(transform_stmt(a))),
        Stmt::While(g, a) => Stmt::While(transform_expr(g), Box::new(transform_stmt(a))),
        Stmt::Block { locals, inits, body } => {
            Stmt::Block { locals: locals.clone(), inits: all(inits), body: Box::new(transform_stmt(body)) }
        }
        Stmt::MethodCall(callee, m, args) => {
            let callee = transform_expr(callee);
            let mut actuals = vec![callee.clone()];
            actuals.extend(all(args));
            Stmt::fail_if(Expr::ne(callee, Expr::Null), Stmt::ProcCall(m.clone(), actuals))
        }
        Stmt::ProcCall(p, args) => Stmt::ProcCall(p.clone(), all(args)),
    }
}

pub fn transform_decl(d: &Decl) -> Decl {
    let mut formals = vec![Var::this()];
    formals.extend(d.formals.iter().cloned());
    Decl { name: d.name.clone(), formals, body: transform_stmt(&d.body) }
}

pub fn transform_formula(f: &Formula) -> Formula {
    Formula::new(transform_assertion(&f.pre), transform_stmt(&f.stmt), transform_assertion(&f.post))
}

pub fn transform_program(p: &Program) -> Result<ThetaImage, TransformError> {
    if p.flavor != Flavor::ObjectOriented {
        return Err(TransformError::NotObjectOriented(p.flavor));
    }
    let var_mapping: Vec<VarMapping> =
        p.instance_vars().map(|v| VarMapping { instance: v.clone(), lifted: lift_var(v) }).collect();
    let program = Program {
        flavor: Flavor::Recursive,
        globals: p.globals.iter().map(lift_var).collect(),
        decls: p.decls.iter().map(transform_decl).collect(),
        main: transform_stmt(&p.main),
    };
    Ok(ThetaImage { program, var_mapping })
}

/// Moves every object's local state into the lifted arrays.
pub fn transform_state(s: &State) -> State {
    let mut out = State { normals: s.normals.clone(), locals: Default::default() };
    for (obj, local) in &s.locals {
        for (name, slot) in local {
            match slot {
                Slot::Simple(v) => out.set_cell(name, vec![Value::Obj(*obj)], v.clone()),
                Slot::Array(a) => {
                    for (ix, v) in &a.overrides {
                        let mut full = vec![Value::Obj(*obj)];
                        full.extend(ix.iter().cloned());
                        out.set_cell(name, full, v.clone());
                    }
                }
            }
        }
    }
    out
}

pub fn transform_outcome(o: &Outcome) -> Outcome {
    match o {
        Outcome::Proper(s) => Outcome::Proper(transform_state(s)),
        Outcome::Fail => Outcome::Fail,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_program, parse_state, render_program, render_stmt};
    use crate::state::{eval, ObjRef};

    const ADD: &str = "ivar sum: int; var y: object;\n\
        method add(x: int) { sum := sum + x }\n\
        y.add(1); y.add(2)";

    #[test]
    fn add_example() {
        let img = transform_program(&parse_program(ADD, "add.oo").unwrap()).unwrap();
        assert_eq!(render_stmt(&img.program.main).unwrap(), "if y /= null -> add(y, 1) fi; if y /= null -> add(y, 2) fi");
        assert_eq!(
            crate::parser::render_decl(&img.program.decls[0]).unwrap(),
            "add(this, x) :: sum[this] := sum[this] + x"
        );
        assert_eq!(img.var_mapping.len(), 1);
        assert_eq!(img.var_mapping[0].lifted.ty, Type::Array { args: vec![BasicType::Object], value: BasicType::Int });
    }

    #[test]
    fn skip_is_fixed() {
        assert_eq!(transform_stmt(&Stmt::Skip), Stmt::Skip);
    }

    #[test]
    fn kernel_programs_are_refused() {
        let p = parse_program("skip", "<inline>").unwrap();
        assert_eq!(transform_program(&p), Err(TransformError::NotObjectOriented(Flavor::Kernel)));
    }

    #[test]
    fn image_renders_as_recursive_program() {
        let img = transform_program(&parse_program(ADD, "add.oo").unwrap()).unwrap();
        let text = render_program(&img.program).unwrap();
        assert_eq!(parse_program(&text, "<rendered>").unwrap(), img.program);
        assert!(crate::syntax::typecheck(&img.program).is_empty());
    }

    #[test]
    fn state_rehousing() {
        let s = parse_state("state { this=o1; y=o2; o1.sum=3; }", "<inline>").unwrap();
        let t = transform_state(&s);
        let want = parse_state("state { this=o1; y=o2; sum[o1]=3; }", "<inline>").unwrap();
        assert_eq!(t, want);
        assert_eq!(transform_outcome(&Outcome::Fail), Outcome::Fail);
    }

    #[test]
    fn assertion_clauses() {
        let p = parse_program("var x: object; var a: int -> object; ivar next: object; skip", "<inline>").unwrap();
        let e = parse_expr("x.next = null", "<inline>", &p).unwrap();
        let rp = transform_program(&p).unwrap().program;
        assert_eq!(transform_assertion(&e), parse_expr("next[x] = null", "<inline>", &rp).unwrap());
        let e = parse_expr("forall i: int: a[i].next = a[i + 1]", "<inline>", &p).unwrap();
        let want = parse_expr("forall i: int: next[a[i]] = a[i + 1]", "<inline>", &rp).unwrap();
        assert_eq!(transform_assertion(&e), want);
        assert_eq!(transform_assertion(&Expr::this()), Expr::this());
    }

    #[test]
    fn instance_reads_agree() {
        let p = parse_program("ivar next: object; var x: object; skip", "<inline>").unwrap();
        let s = parse_state("state { this=o1; x=o2; o1.next=o3; o2.next=o1; }", "<inline>").unwrap();
        let t = transform_state(&s);
        for src in ["next", "x.next", "x.next.next", "null.next"] {
            let e = parse_expr(src, "<inline>", &p).unwrap();
            assert_eq!(eval(&s, &e), eval(&t, &transform_expr(&e)), "{src}");
        }
        assert_eq!(eval(&s, &parse_expr("x.next", "<inline>", &p).unwrap()).as_obj(), ObjRef::Oid(1));
    }
}

//! `var`, `change` and `free` analyses.
//!
//! Variables are identified by name. A bare instance variable implicitly
//! reads `this`, so `this` is reported whenever one occurs; method calls
//! rebind `this` and count as using it too.

use std::collections::BTreeSet;

use super::ast::{Decl, Expr, Ident, Stmt, Var, THIS};

pub type Names = BTreeSet<Ident>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarSets {
    pub var: Names,
    pub change: Names,
}

fn note_var(v: &Var, out: &mut Names) {
    out.insert(v.name.clone());
    if v.is_instance() {
        out.insert(THIS.into());
    }
}

/// Every variable occurring in `e`, bound quantifier variables included.
pub fn var_expr(e: &Expr, out: &mut Names) {
    e.walk(&mut |sub| match sub {
        Expr::Var(v) | Expr::Index(v, _) => note_var(v, out),
        Expr::Nav(_, v, _) => {
            out.insert(v.name.clone());
        }
        Expr::Quant(_, v, _) => {
            out.insert(v.name.clone());
        }
        _ => {}
    });
}

/// Free variables of an assertion or global expression.
pub fn free_vars(e: &Expr) -> Names {
    let mut out = Names::new();
    free_into(e, &mut Vec::new(), &mut out);
    out
}

fn free_into(e: &Expr, bound: &mut Vec<Ident>, out: &mut Names) {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Null => {}
        Expr::Var(v) | Expr::Index(v, _) => {
            if v.is_instance() {
                out.insert(v.name.clone());
                if !bound.iter().any(|b| &**b == THIS) {
                    out.insert(THIS.into());
                }
            } else if !bound.contains(&v.name) {
                out.insert(v.name.clone());
            }
            if let Expr::Index(_, ix) = e {
                ix.iter().for_each(|i| free_into(i, bound, out));
            }
        }
        Expr::Nav(b, v, ix) => {
            out.insert(v.name.clone());
            free_into(b, bound, out);
            ix.iter().for_each(|i| free_into(i, bound, out));
        }
        Expr::Cond(c, t, f) => {
            free_into(c, bound, out);
            free_into(t, bound, out);
            free_into(f, bound, out);
        }
        Expr::Not(x) => free_into(x, bound, out),
        Expr::Bin(_, l, r) => {
            free_into(l, bound, out);
            free_into(r, bound, out);
        }
        Expr::Quant(_, v, body) => {
            bound.push(v.name.clone());
            free_into(body, bound, out);
            bound.pop();
        }
    }
}

/// `var(S)`: all variables occurring in `s`, block locals included.
pub fn var_stmt(s: &Stmt) -> Names {
    let mut out = Names::new();
    var_stmt_into(s, &mut out);
    out
}

fn var_stmt_into(s: &Stmt, out: &mut Names) {
    match s {
        Stmt::Skip | Stmt::Empty => {}
        Stmt::Assign(t, e) => {
            note_var(&t.var, out);
            t.indices.iter().for_each(|i| var_expr(i, out));
            var_expr(e, out);
        }
        Stmt::ParAssign(vs, es) => {
            vs.iter().for_each(|v| note_var(v, out));
            es.iter().for_each(|e| var_expr(e, out));
        }
        Stmt::Seq(a, b) => {
            var_stmt_into(a, out);
            var_stmt_into(b, out);
        }
        Stmt::If(g, a, b) => {
            var_expr(g, out);
            var_stmt_into(a, out);
            var_stmt_into(b, out);
        }
        Stmt::FailIf(g, a) | Stmt::While(g, a) => {
            var_expr(g, out);
            var_stmt_into(a, out);
        }
        Stmt::Block { locals, inits, body } => {
            locals.iter().for_each(|v| note_var(v, out));
            inits.iter().for_each(|e| var_expr(e, out));
            var_stmt_into(body, out);
        }
        Stmt::MethodCall(callee, _, args) => {
            out.insert(THIS.into());
            var_expr(callee, out);
            args.iter().for_each(|e| var_expr(e, out));
        }
        Stmt::ProcCall(_, args) => args.iter().for_each(|e| var_expr(e, out)),
        Stmt::Restore(vs, _) => vs.iter().for_each(|v| note_var(v, out)),
    }
}

/// `change(S)`: global variables appearing on the left of an assignment
/// outside subscript positions. Block locals are not global.
pub fn change_stmt(s: &Stmt) -> Names {
    let mut out = Names::new();
    change_into(s, &mut Vec::new(), &mut out);
    out
}

fn change_into(s: &Stmt, locals: &mut Vec<Ident>, out: &mut Names) {
    let mut note = |v: &Var, locals: &Vec<Ident>| {
        if v.is_instance() || !locals.contains(&v.name) {
            out.insert(v.name.clone());
        }
    };
    match s {
        Stmt::Assign(t, _) => note(&t.var, locals),
        Stmt::ParAssign(vs, _) | Stmt::Restore(vs, _) => vs.iter().for_each(|v| note(v, locals)),
        Stmt::Seq(a, b) | Stmt::If(_, a, b) => {
            change_into(a, locals, out);
            change_into(b, locals, out);
        }
        Stmt::FailIf(_, a) | Stmt::While(_, a) => change_into(a, locals, out),
        Stmt::Block { locals: ls, body, .. } => {
            let n = locals.len();
            locals.extend(ls.iter().map(|v| v.name.clone()));
            change_into(body, locals, out);
            locals.truncate(n);
        }
        Stmt::Skip | Stmt::Empty | Stmt::MethodCall(..) | Stmt::ProcCall(..) => {}
    }
}

/// `var(D)`: variables of all bodies plus the formals.
pub fn var_decls(decls: &[Decl]) -> Names {
    let mut out = Names::new();
    for d in decls {
        d.formals.iter().for_each(|v| note_var(v, &mut out));
        var_stmt_into(&d.body, &mut out);
    }
    out
}

/// `change(D)`: global variables changed by some body; formals are local.
pub fn change_decls(decls: &[Decl]) -> Names {
    let mut out = Names::new();
    for d in decls {
        let mut locals: Vec<Ident> = d.formals.iter().map(|v| v.name.clone()).collect();
        change_into(&d.body, &mut locals, &mut out);
    }
    out
}

pub fn analyze_vars(s: &Stmt) -> VarSets {
    VarSets { var: var_stmt(s), change: change_stmt(s) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{BasicType, Quantifier, Target, Type};

    fn int(name: &str) -> Var {
        Var::normal(name, Type::Basic(BasicType::Int))
    }

    fn names(xs: &[&str]) -> Names {
        xs.iter().map(|x| Ident::from(*x)).collect()
    }

    #[test]
    fn subscript_position_is_not_changed() {
        let a = Var::normal("a", Type::Array { args: vec![BasicType::Int], value: BasicType::Int });
        let s = Stmt::Assign(Target { var: a, indices: vec![Expr::var(&int("i"))] }, Expr::var(&int("j")));
        let sets = analyze_vars(&s);
        assert_eq!(sets.change, names(&["a"]));
        assert_eq!(sets.var, names(&["a", "i", "j"]));
    }

    #[test]
    fn block_locals_are_not_global() {
        let x = int("x");
        let y = int("y");
        let s = Stmt::block(vec![x.clone()], vec![Expr::int(0)], Stmt::Assign(Target::simple(&y), Expr::var(&x)));
        assert_eq!(change_stmt(&s), names(&["y"]));
    }

    #[test]
    fn bound_variables_are_not_free() {
        let a = Var::normal("a", Type::Array { args: vec![BasicType::Int], value: BasicType::Object });
        let z = Var::normal("z", Type::Basic(BasicType::Object));
        let i = int("i");
        let p = Expr::Quant(
            Quantifier::Exists,
            i.clone(),
            Box::new(Expr::eq(Expr::var(&z), Expr::Index(a, vec![Expr::var(&i)]))),
        );
        assert_eq!(free_vars(&p), names(&["a", "z"]));
    }

    #[test]
    fn bare_instance_variable_reads_this() {
        let x = Var::instance("x", Type::Basic(BasicType::Int));
        assert_eq!(free_vars(&Expr::var(&x)), names(&["this", "x"]));
    }
}

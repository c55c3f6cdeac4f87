//! Substitution `p[u := t]` with explicit alias tests, simultaneous
//! substitution of simple normal variables, and renaming.
//!
//! Bound variables are renamed to `root#n` only when a replacement would
//! otherwise be captured.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::syntax::{free_vars, var_expr, Expr, Ident, Quantifier, Target, Var, VarKind, THIS};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SubstError {
    #[error("cannot substitute for `this` with a single-target substitution")]
    ThisTarget,
    #[error("{0} variables but {1} replacements")]
    Arity(usize, usize),
    #[error("`{0}` listed twice")]
    Duplicate(Ident),
    #[error("replacement for `{0}` has the wrong type")]
    Type(Ident),
    #[error("`{0}` is not a simple normal variable")]
    NotSimple(Ident),
    #[error("target `{0}` has {1} subscripts, expected {2}")]
    Subscripts(Ident, usize, usize),
}

enum Kind<'a> {
    /// Simultaneous, simple normal targets (`this` included).
    Simple(Vec<(Ident, &'a Expr)>),
    NormalCell { name: Ident, indices: &'a [Expr], rep: &'a Expr },
    InstanceSimple { name: Ident, rep: &'a Expr },
    InstanceCell { name: Ident, indices: &'a [Expr], rep: &'a Expr },
}

struct Substituter {
    avoid: BTreeSet<Ident>,
}

/// Smallest `root#n` (n ≥ 1) not in `avoid`, where `root` is `base` with
/// any `#` suffix removed.
pub fn fresh_name(base: &str, avoid: &BTreeSet<Ident>) -> Ident {
    let root = base.split('#').next().unwrap_or(base);
    (1..).map(|n| Ident::from(format!("{root}#{n}"))).find(|c| !avoid.contains(c)).expect("unbounded supply")
}

fn names_of(exprs: &[&Expr]) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    for e in exprs {
        var_expr(e, &mut out);
    }
    out
}

fn check_type(v: &Var, rep: &Expr) -> Result<(), SubstError> {
    if v.ty.value_type().compatible(rep.ty()) {
        Ok(())
    } else {
        Err(SubstError::Type(v.name.clone()))
    }
}

/// `e[target := rep]`. `target` is any simple or subscripted variable
/// except `this`; bare instance variables are read as `this.u`.
pub fn substitute(e: &Expr, target: &Target, rep: &Expr) -> Result<Expr, SubstError> {
    let v = &target.var;
    if v.is_this() {
        return Err(SubstError::ThisTarget);
    }
    check_type(v, rep)?;
    if target.indices.len() != v.ty.arg_types().len() {
        return Err(SubstError::Subscripts(v.name.clone(), target.indices.len(), v.ty.arg_types().len()));
    }
    let name = v.name.clone();
    let kind = match (v.kind, target.indices.is_empty()) {
        (VarKind::Normal, true) => Kind::Simple(vec![(name, rep)]),
        (VarKind::Normal, false) => Kind::NormalCell { name, indices: &target.indices, rep },
        (VarKind::Instance, true) => Kind::InstanceSimple { name, rep },
        (VarKind::Instance, false) => Kind::InstanceCell { name, indices: &target.indices, rep },
    };
    let mut parts: Vec<&Expr> = vec![e, rep];
    parts.extend(target.indices.iter());
    let mut s = Substituter { avoid: names_of(&parts) };
    s.avoid.insert(v.name.clone());
    Ok(s.apply(e, &kind))
}

/// Simultaneous `e[x1, ..., xn := t1, ..., tn]` for distinct simple normal
/// variables. `this` may be among them, which turns every bare instance
/// variable `u` into `t.u`.
pub fn substitute_parallel(e: &Expr, vars: &[Var], reps: &[Expr]) -> Result<Expr, SubstError> {
    if vars.len() != reps.len() {
        return Err(SubstError::Arity(vars.len(), reps.len()));
    }
    for (i, v) in vars.iter().enumerate() {
        if v.is_instance() || !v.is_simple() {
            return Err(SubstError::NotSimple(v.name.clone()));
        }
        if vars[..i].iter().any(|w| w.name == v.name) {
            return Err(SubstError::Duplicate(v.name.clone()));
        }
        check_type(v, &reps[i])?;
    }
    let pairs = vars.iter().zip(reps).map(|(v, r)| (v.name.clone(), r)).collect();
    let mut parts: Vec<&Expr> = vec![e];
    parts.extend(reps.iter());
    let mut s = Substituter { avoid: names_of(&parts) };
    s.avoid.extend(vars.iter().map(|v| v.name.clone()));
    Ok(s.apply(e, &Kind::Simple(pairs)))
}

fn eq_all(lhs: Vec<Expr>, rhs: &[Expr]) -> Vec<Expr> {
    lhs.into_iter().zip(rhs).map(|(l, r)| Expr::eq(l, r.clone())).collect()
}

impl Substituter {
    fn apply(&mut self, e: &Expr, kind: &Kind<'_>) -> Expr {
        match e {
            Expr::Int(_) | Expr::Bool(_) | Expr::Null => e.clone(),
            Expr::Var(v) => match (v.kind, kind) {
                (VarKind::Normal, Kind::Simple(pairs)) => match pairs.iter().find(|(n, _)| *n == v.name) {
                    Some((_, r)) => (*r).clone(),
                    None => e.clone(),
                },
                (VarKind::Instance, Kind::Simple(pairs)) => match this_rep(pairs) {
                    Some(r) => Expr::nav(r.clone(), v, vec![]),
                    None => e.clone(),
                },
                (VarKind::Instance, Kind::InstanceSimple { name, rep }) if *name == v.name => {
                    Expr::cond(Expr::eq(Expr::this(), Expr::this()), (*rep).clone(), e.clone())
                }
                _ => e.clone(),
            },
            Expr::Index(v, ix) => {
                let ix2: Vec<Expr> = ix.iter().map(|i| self.apply(i, kind)).collect();
                match (v.kind, kind) {
                    (VarKind::Normal, Kind::NormalCell { name, indices, rep }) if *name == v.name => {
                        let guard = Expr::conj(eq_all(ix2.clone(), indices));
                        Expr::cond(guard, (*rep).clone(), Expr::Index(v.clone(), ix2))
                    }
                    (VarKind::Instance, Kind::Simple(pairs)) => match this_rep(pairs) {
                        Some(r) => Expr::nav(r.clone(), v, ix2),
                        None => Expr::Index(v.clone(), ix2),
                    },
                    (VarKind::Instance, Kind::InstanceCell { name, indices, rep }) if *name == v.name => {
                        let mut conds = vec![Expr::eq(Expr::this(), Expr::this())];
                        conds.extend(eq_all(ix2.clone(), indices));
                        Expr::cond(Expr::conj(conds), (*rep).clone(), Expr::Index(v.clone(), ix2))
                    }
                    _ => Expr::Index(v.clone(), ix2),
                }
            }
            Expr::Nav(b, v, ix) => {
                let b2 = self.apply(b, kind);
                let ix2: Vec<Expr> = ix.iter().map(|i| self.apply(i, kind)).collect();
                match kind {
                    Kind::InstanceSimple { name, rep } if *name == v.name && ix.is_empty() => {
                        Expr::cond(Expr::eq(b2.clone(), Expr::this()), (*rep).clone(), Expr::nav(b2, v, ix2))
                    }
                    Kind::InstanceCell { name, indices, rep } if *name == v.name => {
                        let mut conds = vec![Expr::eq(b2.clone(), Expr::this())];
                        conds.extend(eq_all(ix2.clone(), indices));
                        Expr::cond(Expr::conj(conds), (*rep).clone(), Expr::nav(b2, v, ix2))
                    }
                    _ => Expr::nav(b2, v, ix2),
                }
            }
            Expr::Cond(c, t, f) => Expr::cond(self.apply(c, kind), self.apply(t, kind), self.apply(f, kind)),
            Expr::Not(x) => Expr::not(self.apply(x, kind)),
            Expr::Bin(op, l, r) => Expr::bin(*op, self.apply(l, kind), self.apply(r, kind)),
            Expr::Quant(q, y, body) => self.apply_quant(*q, y, body, kind),
        }
    }

    fn apply_quant(&mut self, q: Quantifier, y: &Var, body: &Expr, kind: &Kind<'_>) -> Expr {
        let free_body = free_vars(body);
        // Names whose free occurrence in a replacement would be captured by `y`.
        let (inner, captured): (Option<Kind<'_>>, bool) = match kind {
            Kind::Simple(pairs) => {
                let live: Vec<(Ident, &Expr)> = pairs
                    .iter()
                    .filter(|(n, _)| *n != y.name && free_body.contains(n))
                    .cloned()
                    .collect();
                if live.is_empty() {
                    return Expr::Quant(q, y.clone(), Box::new(body.clone()));
                }
                let cap = live.iter().any(|(_, r)| free_vars(r).contains(&y.name));
                (Some(Kind::Simple(live)), cap)
            }
            Kind::NormalCell { indices, rep, .. } | Kind::InstanceCell { indices, rep, .. } => {
                let cap = std::iter::once(*rep)
                    .chain(indices.iter())
                    .any(|r| free_vars(r).contains(&y.name));
                (None, cap)
            }
            Kind::InstanceSimple { rep, .. } => (None, free_vars(rep).contains(&y.name)),
        };
        let kind = inner.as_ref().unwrap_or(kind);
        if !captured {
            return Expr::Quant(q, y.clone(), Box::new(self.apply(body, kind)));
        }
        let fresh = fresh_name(&y.name, &self.avoid);
        self.avoid.insert(fresh.clone());
        let y2 = Var { name: fresh, kind: y.kind, ty: y.ty.clone() };
        let renamed = rename_unchecked(body, &[(y.name.clone(), y2.clone())], &mut self.avoid);
        Expr::Quant(q, y2, Box::new(self.apply(&renamed, kind)))
    }
}

fn this_rep<'a>(pairs: &[(Ident, &'a Expr)]) -> Option<&'a Expr> {
    pairs.iter().find(|(n, _)| &**n == THIS).map(|(_, r)| *r)
}

/// Capture-free simultaneous renaming of normal variables `xs` to `ys`;
/// arrays are renamed wholesale.
pub fn rename(p: &Expr, xs: &[Var], ys: &[Var]) -> Result<Expr, SubstError> {
    if xs.len() != ys.len() {
        return Err(SubstError::Arity(xs.len(), ys.len()));
    }
    for (x, y) in xs.iter().zip(ys) {
        if x.ty != y.ty || x.kind != VarKind::Normal || y.kind != VarKind::Normal {
            return Err(SubstError::Type(x.name.clone()));
        }
    }
    let map: Vec<(Ident, Var)> = xs.iter().zip(ys).map(|(x, y)| (x.name.clone(), y.clone())).collect();
    let mut avoid = names_of(&[p]);
    avoid.extend(ys.iter().map(|y| y.name.clone()));
    Ok(rename_unchecked(p, &map, &mut avoid))
}

fn rename_unchecked(e: &Expr, map: &[(Ident, Var)], avoid: &mut BTreeSet<Ident>) -> Expr {
    let lookup = |v: &Var| -> Option<Var> {
        if v.kind != VarKind::Normal {
            return None;
        }
        map.iter().find(|(n, _)| *n == v.name).map(|(_, y)| y.clone())
    };
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Null => e.clone(),
        Expr::Var(v) => Expr::Var(lookup(v).unwrap_or_else(|| v.clone())),
        Expr::Index(v, ix) => {
            let ix2 = ix.iter().map(|i| rename_unchecked(i, map, avoid)).collect();
            Expr::Index(lookup(v).unwrap_or_else(|| v.clone()), ix2)
        }
        Expr::Nav(b, v, ix) => {
            let ix2 = ix.iter().map(|i| rename_unchecked(i, map, avoid)).collect();
            Expr::nav(rename_unchecked(b, map, avoid), v, ix2)
        }
        Expr::Cond(c, t, f) => Expr::cond(
            rename_unchecked(c, map, avoid),
            rename_unchecked(t, map, avoid),
            rename_unchecked(f, map, avoid),
        ),
        Expr::Not(x) => Expr::not(rename_unchecked(x, map, avoid)),
        Expr::Bin(op, l, r) => Expr::bin(*op, rename_unchecked(l, map, avoid), rename_unchecked(r, map, avoid)),
        Expr::Quant(q, y, body) => {
            let free = free_vars(body);
            let inner: Vec<(Ident, Var)> =
                map.iter().filter(|(n, _)| *n != y.name && free.contains(n)).cloned().collect();
            if inner.is_empty() {
                return e.clone();
            }
            if inner.iter().any(|(_, t)| t.name == y.name) {
                let fresh = fresh_name(&y.name, avoid);
                avoid.insert(fresh.clone());
                let y2 = Var { name: fresh, kind: y.kind, ty: y.ty.clone() };
                let mut inner2 = inner;
                inner2.push((y.name.clone(), y2.clone()));
                Expr::Quant(*q, y2, Box::new(rename_unchecked(body, &inner2, avoid)))
            } else {
                Expr::Quant(*q, y.clone(), Box::new(rename_unchecked(body, &inner, avoid)))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::{eval_assertion, Universe};
    use crate::state::{eval, ObjRef, State, Value};
    use crate::syntax::{BasicType, BinOp, Type};

    fn int(name: &str) -> Var {
        Var::normal(name, Type::Basic(BasicType::Int))
    }

    #[test]
    fn aliasing_array_cell() {
        // min(a[x], y)[a[1] := 2] = min((x = 1 ? 2 : a[x]), y)
        let a = Var::normal("a", Type::Array { args: vec![BasicType::Int], value: BasicType::Int });
        let (x, y) = (int("x"), int("y"));
        let e = Expr::bin(BinOp::Min, Expr::Index(a.clone(), vec![Expr::var(&x)]), Expr::var(&y));
        let t = Target { var: a.clone(), indices: vec![Expr::int(1)] };
        let got = substitute(&e, &t, &Expr::int(2)).unwrap();
        let want = Expr::bin(
            BinOp::Min,
            Expr::cond(Expr::eq(Expr::var(&x), Expr::int(1)), Expr::int(2), Expr::Index(a, vec![Expr::var(&x)])),
            Expr::var(&y),
        );
        assert_eq!(got, want);
    }

    #[test]
    fn instance_self_navigation() {
        let u = Var::instance("u", Type::Basic(BasicType::Int));
        let t = Expr::var(&int("t"));
        let e = Expr::nav(Expr::this(), &u, vec![]);
        let got = substitute(&e, &Target::simple(&u), &t).unwrap();
        let want = Expr::cond(Expr::eq(Expr::this(), Expr::this()), t.clone(), e.clone());
        assert_eq!(got, want);
        let mut s = State::new();
        s.set_normal("this", Value::oid(1));
        s.set_normal("t", Value::int(4));
        assert_eq!(eval(&s, &got), eval(&s, &t));
    }

    #[test]
    fn unrelated_variable_is_untouched() {
        let u = Var::instance("u", Type::Basic(BasicType::Int));
        let z = Expr::var(&int("z"));
        assert_eq!(substitute(&z, &Target::simple(&u), &Expr::int(1)).unwrap(), z);
    }

    #[test]
    fn this_target_rejected() {
        let r = substitute(&Expr::Bool(true), &Target::simple(&Var::this()), &Expr::Null);
        assert_eq!(r, Err(SubstError::ThisTarget));
    }

    #[test]
    fn substituting_this_expands_instance_variables() {
        let x = Var::instance("x", Type::Basic(BasicType::Int));
        let s = Var::normal("s", Type::Basic(BasicType::Object));
        let got = substitute_parallel(&Expr::var(&x), &[Var::this()], &[Expr::var(&s)]).unwrap();
        assert_eq!(got, Expr::nav(Expr::var(&s), &x, vec![]));
    }

    #[test]
    fn capture_is_avoided() {
        // (exists i: i = x)[x := i + 1] must not capture i
        let (i, x) = (int("i"), int("x"));
        let p = Expr::Quant(Quantifier::Exists, i.clone(), Box::new(Expr::eq(Expr::var(&i), Expr::var(&x))));
        let rep = Expr::bin(BinOp::Add, Expr::var(&i), Expr::int(1));
        let got = substitute(&p, &Target::simple(&x), &rep).unwrap();
        let Expr::Quant(_, bound, _) = &got else { panic!() };
        assert_eq!(&*bound.name, "i#1");
        let mut s = State::new();
        s.set_normal("i", Value::int(3));
        assert!(eval_assertion(&s, &got, &Universe::default()));
    }

    #[test]
    fn rename_respects_binding() {
        let (x, z, w) = (int("x"), int("z"), int("w"));
        let p = Expr::Quant(Quantifier::Exists, x.clone(), Box::new(Expr::eq(Expr::var(&x), Expr::var(&z))));
        let got = rename(&p, &[z], std::slice::from_ref(&w)).unwrap();
        let want = Expr::Quant(Quantifier::Exists, x.clone(), Box::new(Expr::eq(Expr::var(&x), Expr::var(&w))));
        assert_eq!(got, want);
        let y = int("y");
        let got = rename(&Expr::eq(Expr::var(&x), Expr::int(1)), &[x], std::slice::from_ref(&y)).unwrap();
        assert_eq!(got, Expr::eq(Expr::var(&y), Expr::int(1)));
    }

    #[test]
    fn navigation_alias_test() {
        // (z.u)[u := 5] is 5 exactly when z is the current object
        let u = Var::instance("u", Type::Basic(BasicType::Int));
        let z = Var::normal("z", Type::Basic(BasicType::Object));
        let e = Expr::nav(Expr::var(&z), &u, vec![]);
        let got = substitute(&e, &Target::simple(&u), &Expr::int(5)).unwrap();
        let mut s = State::new();
        s.set_normal("this", Value::oid(1));
        s.set_normal("z", Value::oid(1));
        assert_eq!(eval(&s, &got), Value::int(5));
        s.set_normal("z", Value::oid(2));
        s.set_field(ObjRef::Oid(2), "u", vec![], Value::int(7));
        assert_eq!(eval(&s, &got), Value::int(7));
    }
}

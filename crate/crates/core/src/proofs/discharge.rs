use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::assertions::{eval_assertion, Universe};
use crate::state::{Location, State, Value};
use crate::syntax::{BasicType, Expr, Ident, Type, Var, VarKind};
use crate::wp::{Access, StateSpace};

/// Largest number of states enumerated for one obligation.
pub const ENUMERATION_CAP: usize = 200_000;

/// An implication a rule application relies on.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Obligation {
    /// `p -> q`, from the consequence rule and the second failure rule.
    Implication(Expr, Expr),
    /// `p -> s /= null`, the extra premises of the strong recursion rule.
    NotNull(Expr, Expr),
}

impl Obligation {
    pub fn assertion(&self) -> Expr {
        match self {
            Obligation::Implication(p, q) => Expr::implies(p.clone(), q.clone()),
            Obligation::NotNull(p, s) => Expr::implies(p.clone(), Expr::ne(s.clone(), Expr::Null)),
        }
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.assertion().fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Discharge {
    Valid,
    Counterexample(State),
    /// Footprint too large to enumerate.
    Unknown(String),
}

impl Discharge {
    pub fn label(&self) -> &'static str {
        match self {
            Discharge::Valid => "valid",
            Discharge::Counterexample(_) => "counterexample",
            Discharge::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Discharge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Discharge::Valid => f.write_str("valid"),
            Discharge::Counterexample(s) => write!(f, "counterexample {s}"),
            Discharge::Unknown(why) => write!(f, "unknown ({why})"),
        }
    }
}

#[derive(Default)]
struct Footprint {
    normals: BTreeMap<Ident, Type>,
    instances: BTreeMap<Ident, Type>,
}

fn collect(e: &Expr, bound: &mut Vec<Ident>, fp: &mut Footprint) {
    let note = |v: &Var, bound: &[Ident], fp: &mut Footprint| match v.kind {
        VarKind::Normal if !bound.contains(&v.name) => {
            fp.normals.insert(v.name.clone(), v.ty.clone());
        }
        VarKind::Normal => {}
        VarKind::Instance => {
            fp.instances.insert(v.name.clone(), v.ty.clone());
        }
    };
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Null => {}
        Expr::Var(v) => {
            note(v, bound, fp);
            if v.is_instance() {
                note(&Var::this(), bound, fp);
            }
        }
        Expr::Index(v, ix) => {
            note(v, bound, fp);
            if v.is_instance() {
                note(&Var::this(), bound, fp);
            }
            ix.iter().for_each(|i| collect(i, bound, fp));
        }
        Expr::Nav(b, v, ix) => {
            note(v, bound, fp);
            collect(b, bound, fp);
            ix.iter().for_each(|i| collect(i, bound, fp));
        }
        Expr::Cond(c, t, f) => {
            collect(c, bound, fp);
            collect(t, bound, fp);
            collect(f, bound, fp);
        }
        Expr::Not(x) => collect(x, bound, fp),
        Expr::Bin(_, l, r) => {
            collect(l, bound, fp);
            collect(r, bound, fp);
        }
        Expr::Quant(_, v, body) => {
            bound.push(v.name.clone());
            collect(body, bound, fp);
            bound.pop();
        }
    }
}

fn index_tuples(u: &Universe, args: &[BasicType]) -> Vec<Vec<Value>> {
    args.iter().fold(vec![vec![]], |acc, t| {
        let dom = u.domain(*t);
        acc.iter().flat_map(|prefix| dom.iter().map(move |d| [prefix.clone(), vec![d.clone()]].concat())).collect()
    })
}

fn cells_of(u: &Universe, ty: &Type) -> usize {
    ty.arg_types().iter().map(|t| u.domain(*t).len()).product()
}

/// Every location an assertion can read, each ranging over its universe
/// domain: free simple variables, all cells of free arrays, and the
/// instance variables of every object including `null`. `None` when the
/// product exceeds `cap`.
pub fn obligation_footprint(p: &Expr, u: &Universe, cap: usize) -> Option<StateSpace> {
    let mut fp = Footprint::default();
    collect(p, &mut Vec::new(), &mut fp);
    let mut size: usize = 1;
    let mut grow = |n: usize, per: usize| -> Option<()> {
        for _ in 0..n {
            size = size.checked_mul(per).filter(|s| *s <= cap)?;
        }
        Some(())
    };
    for ty in fp.normals.values() {
        grow(cells_of(u, ty), u.domain(ty.value_type()).len())?;
    }
    for ty in fp.instances.values() {
        grow(cells_of(u, ty) * u.objects().len(), u.domain(ty.value_type()).len())?;
    }
    let mut footprint = Vec::new();
    for (name, ty) in &fp.normals {
        let values = u.domain(ty.value_type());
        for ix in index_tuples(u, ty.arg_types()) {
            footprint.push(Access { loc: Location::Normal { name: name.clone(), indices: ix }, values: values.clone() });
        }
    }
    for (name, ty) in &fp.instances {
        let values = u.domain(ty.value_type());
        for obj in u.objects() {
            for ix in index_tuples(u, ty.arg_types()) {
                let loc = Location::Instance { obj, name: name.clone(), indices: ix };
                footprint.push(Access { loc, values: values.clone() });
            }
        }
    }
    Some(StateSpace::new(u.clone(), State::new(), footprint))
}

pub fn discharge(ob: &Obligation, u: &Universe) -> Discharge {
    discharge_assertion(&ob.assertion(), u, ENUMERATION_CAP)
}

/// Validity of `p` by exhaustive evaluation over its footprint.
pub fn discharge_assertion(p: &Expr, u: &Universe, cap: usize) -> Discharge {
    let Some(space) = obligation_footprint(p, u, cap) else {
        return Discharge::Unknown(format!("more than {cap} states over {u}"));
    };
    let n = space.size().expect("bounded by cap");
    match (0..n).into_par_iter().find_first(|i| !eval_assertion(&space.state(*i), p, u)) {
        None => Discharge::Valid,
        Some(i) => Discharge::Counterexample(space.state(i)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_expr, parse_program};

    fn expr(decls: &str, src: &str) -> Expr {
        let p = parse_program(&format!("{decls} skip"), "<inline>").unwrap();
        parse_expr(src, "<inline>", &p).unwrap()
    }

    #[test]
    fn small_implication_is_valid() {
        let u = Universe::new(-2, 2, 1);
        let ob = Obligation::Implication(expr("var x: int;", "x = 1"), expr("var x: int;", "x >= 0"));
        assert_eq!(discharge(&ob, &u), Discharge::Valid);
    }

    #[test]
    fn counterexample_has_witness() {
        let u = Universe::new(-2, 2, 1);
        let ob = Obligation::Implication(Expr::Bool(true), expr("var x: int;", "x = 0"));
        let Discharge::Counterexample(s) = discharge(&ob, &u) else { panic!() };
        assert_ne!(crate::state::eval(&s, &expr("var x: int;", "x")), Value::int(0));
    }

    #[test]
    fn not_null_over_bounded_list() {
        let u = Universe::new(0, 2, 2);
        let d = "var a: int -> object;";
        let p = expr(d, "this = a[0] and (forall i: int: a[i] /= null)");
        let ob = Obligation::NotNull(p, expr(d, "a[0]"));
        assert_eq!(discharge(&ob, &u), Discharge::Valid);
    }

    #[test]
    fn large_footprints_are_unknown() {
        let ob = Obligation::Implication(Expr::Bool(true), expr("var a: int -> int;", "a[0] = a[1]"));
        assert!(matches!(discharge(&ob, &Universe::default()), Discharge::Unknown(_)));
    }

    #[test]
    fn instance_variables_of_null_are_enumerated() {
        let u = Universe::new(0, 1, 1);
        let p = expr("ivar f: int;", "null.f = 0");
        assert!(matches!(discharge_assertion(&p, &u, ENUMERATION_CAP), Discharge::Counterexample(_)));
    }
}

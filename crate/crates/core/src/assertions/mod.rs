//! Assertion semantics over a bounded universe and the substitution
//! calculus for normal, subscripted and instance variables.

mod simplify;
mod subst;

use std::fmt;

use crate::state::{eval_with, ObjRef, State, Value};
use crate::syntax::{BasicType, Expr};

pub use simplify::simplify;
pub use subst::{fresh_name, rename, substitute, substitute_parallel, SubstError};

/// Finite bounds for quantifiers and state enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    pub int_lo: i64,
    pub int_hi: i64,
    /// Object identities other than `null`.
    pub oids: Vec<ObjRef>,
}

impl Default for Universe {
    fn default() -> Self {
        Universe::new(-8, 8, 4)
    }
}

impl Universe {
    /// Integers `lo..=hi` and objects `o1..=oN`.
    pub fn new(int_lo: i64, int_hi: i64, objects: u32) -> Universe {
        assert!(int_lo <= int_hi, "empty integer range");
        Universe { int_lo, int_hi, oids: (1..=objects).map(ObjRef::Oid).collect() }
    }

    /// Objects including `null`, which always comes first.
    pub fn objects(&self) -> Vec<ObjRef> {
        std::iter::once(ObjRef::Null).chain(self.oids.iter().copied()).collect()
    }

    pub fn domain(&self, t: BasicType) -> Vec<Value> {
        match t {
            BasicType::Bool => vec![Value::Bool(false), Value::Bool(true)],
            BasicType::Int => (self.int_lo..=self.int_hi).map(Value::int).collect(),
            BasicType::Nat => (self.int_lo.max(0)..=self.int_hi).map(Value::int).collect(),
            BasicType::Object => self.objects().into_iter().map(Value::Obj).collect(),
        }
    }
}

impl fmt::Display for Universe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ints {}..{}, {} objects", self.int_lo, self.int_hi, self.oids.len())
    }
}

/// `σ ⊨ p` with quantifiers ranging over `u`.
pub fn eval_assertion(state: &State, p: &Expr, u: &Universe) -> bool {
    eval_with(state, u, p).as_bool()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{Quantifier, Type, Var};

    #[test]
    fn true_holds_everywhere() {
        assert!(eval_assertion(&State::new(), &Expr::Bool(true), &Universe::default()));
    }

    #[test]
    fn bounded_chain_property() {
        // a[0..2] = o1, o2, o3 with oK.next = oK+1
        let a = Var::normal("a", Type::Array { args: vec![BasicType::Int], value: BasicType::Object });
        let next = Var::instance("next", Type::Basic(BasicType::Object));
        let i = Var::normal("i", Type::Basic(BasicType::Int));
        let mut s = State::new();
        for k in 0..3u32 {
            s.set_cell("a", vec![Value::int(k as i64)], Value::oid(k + 1));
        }
        s.set_field(ObjRef::Oid(1), "next", vec![], Value::oid(2));
        s.set_field(ObjRef::Oid(2), "next", vec![], Value::oid(3));
        let iv = Expr::var(&i);
        let in_range = Expr::and(
            Expr::bin(crate::syntax::BinOp::Ge, iv.clone(), Expr::int(0)),
            Expr::bin(crate::syntax::BinOp::Le, iv.clone(), Expr::int(1)),
        );
        let link = Expr::eq(
            Expr::nav(Expr::Index(a.clone(), vec![iv.clone()]), &next, vec![]),
            Expr::Index(a, vec![Expr::bin(crate::syntax::BinOp::Add, iv, Expr::int(1))]),
        );
        let p = Expr::Quant(Quantifier::Forall, i, Box::new(Expr::implies(in_range, link)));
        assert!(eval_assertion(&s, &p, &Universe::default()));
    }

    #[test]
    fn nat_domain_is_nonnegative() {
        let u = Universe::new(-2, 2, 1);
        assert_eq!(u.domain(BasicType::Nat).len(), 3);
        assert_eq!(u.domain(BasicType::Object)[0], Value::null());
    }
}

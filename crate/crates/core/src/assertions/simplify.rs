//! Optional normalizer for the conditionals produced by substitution.

use crate::syntax::{BinOp, Expr};

/// Bottom-up folding of `(e = e ? t : f)` to `t`, `(c ? x : x)` to `x` and
/// conditionals on literal guards.
pub fn simplify(e: &Expr) -> Expr {
    match e {
        Expr::Int(_) | Expr::Bool(_) | Expr::Null | Expr::Var(_) => e.clone(),
        Expr::Index(v, ix) => Expr::Index(v.clone(), ix.iter().map(simplify).collect()),
        Expr::Nav(b, v, ix) => Expr::nav(simplify(b), v, ix.iter().map(simplify).collect()),
        Expr::Cond(c, t, f) => {
            let (c, t, f) = (simplify(c), simplify(t), simplify(f));
            if t == f || is_trivially_true(&c) {
                return t;
            }
            if c == Expr::Bool(false) {
                return f;
            }
            Expr::cond(c, t, f)
        }
        Expr::Not(x) => Expr::not(simplify(x)),
        Expr::Bin(op, l, r) => Expr::bin(*op, simplify(l), simplify(r)),
        Expr::Quant(q, v, body) => Expr::Quant(*q, v.clone(), Box::new(simplify(body))),
    }
}

/// `true`, reflexive equalities, and conjunctions of those.
fn is_trivially_true(c: &Expr) -> bool {
    match c {
        Expr::Bool(true) => true,
        Expr::Bin(BinOp::Eq, l, r) => l == r,
        Expr::Bin(BinOp::And, l, r) => is_trivially_true(l) && is_trivially_true(r),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{BasicType, Type, Var};

    #[test]
    fn folds_self_alias_test() {
        let u = Var::instance("u", Type::Basic(BasicType::Int));
        let e = Expr::cond(Expr::eq(Expr::this(), Expr::this()), Expr::int(3), Expr::var(&u));
        assert_eq!(simplify(&e), Expr::int(3));
    }

    #[test]
    fn folds_identical_branches() {
        let x = Var::normal("x", Type::Basic(BasicType::Bool));
        let e = Expr::cond(Expr::var(&x), Expr::int(1), Expr::int(1));
        assert_eq!(simplify(&e), Expr::int(1));
    }
}

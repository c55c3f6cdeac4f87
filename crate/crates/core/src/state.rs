//! Proper states, the `fail` outcome, expression evaluation and state
//! updates.
//!
//! A state maps normal variables to values and every object (including
//! `null`) to a local state over the instance variables. Absent entries hold
//! the type default (`0`, `false`, `null`), which keeps the infinite total
//! functions of the semantics finitely representable. All writes keep the
//! representation normalized: no stored entry equals its default.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

use crate::assertions::Universe;
use crate::syntax::{BasicType, BinOp, Expr, Ident, Quantifier, Target, Var, VarKind, THIS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjRef {
    Null,
    Oid(u32),
}

impl fmt::Display for ObjRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjRef::Null => f.write_str("null"),
            ObjRef::Oid(n) => write!(f, "o{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(BigInt),
    Bool(bool),
    Obj(ObjRef),
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn null() -> Value {
        Value::Obj(ObjRef::Null)
    }

    pub fn oid(n: u32) -> Value {
        Value::Obj(ObjRef::Oid(n))
    }

    /// The default of the basic type this value belongs to.
    pub fn default_like(&self) -> Value {
        match self {
            Value::Int(_) => Value::int(0),
            Value::Bool(_) => Value::Bool(false),
            Value::Obj(_) => Value::null(),
        }
    }

    pub fn is_default(&self) -> bool {
        match self {
            Value::Int(n) => n.is_zero(),
            Value::Bool(b) => !b,
            Value::Obj(o) => *o == ObjRef::Null,
        }
    }

    pub fn as_int(&self) -> &BigInt {
        match self {
            Value::Int(n) => n,
            other => panic!("ill-typed evaluation: expected integer, got {other}"),
        }
    }

    pub fn as_bool(&self) -> bool {
        match self {
            Value::Bool(b) => *b,
            other => panic!("ill-typed evaluation: expected Boolean, got {other}"),
        }
    }

    pub fn as_obj(&self) -> ObjRef {
        match self {
            Value::Obj(o) => *o,
            other => panic!("ill-typed evaluation: expected object, got {other}"),
        }
    }

    pub fn to_expr(&self) -> Expr {
        match self {
            Value::Int(n) => Expr::Int(n.clone()),
            Value::Bool(b) => Expr::Bool(*b),
            Value::Obj(ObjRef::Null) => Expr::Null,
            Value::Obj(ObjRef::Oid(_)) => panic!("object identities have no literal expression"),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Obj(o) => write!(f, "{o}"),
        }
    }
}

/// A total function over index tuples: a default plus finitely many
/// overrides, none of which equals the default.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrayVal {
    pub default: Value,
    pub overrides: BTreeMap<Vec<Value>, Value>,
}

impl ArrayVal {
    pub fn new(default: Value) -> ArrayVal {
        ArrayVal { default, overrides: BTreeMap::new() }
    }

    pub fn get(&self, index: &[Value]) -> &Value {
        self.overrides.get(index).unwrap_or(&self.default)
    }

    pub fn set(&mut self, index: Vec<Value>, v: Value) {
        if v == self.default {
            self.overrides.remove(&index);
        } else {
            self.overrides.insert(index, v);
        }
    }

    fn is_trivial(&self) -> bool {
        self.overrides.is_empty() && self.default.is_default()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Simple(Value),
    Array(ArrayVal),
}

pub type LocalState = BTreeMap<Ident, Slot>;

/// A resolved storage location.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Normal { name: Ident, indices: Vec<Value> },
    Instance { obj: ObjRef, name: Ident, indices: Vec<Value> },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct State {
    pub normals: BTreeMap<Ident, Slot>,
    pub locals: BTreeMap<ObjRef, LocalState>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Proper(State),
    Fail,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("parallel update with duplicate target `{0}`")]
    DuplicateTarget(Ident),
    #[error("parallel update arity mismatch: {0} targets, {1} values")]
    Arity(usize, usize),
}

fn read_slot(slot: Option<&Slot>, indices: &[Value], ty: BasicType) -> Value {
    match (slot, indices.is_empty()) {
        (Some(Slot::Simple(v)), true) => v.clone(),
        (Some(Slot::Array(a)), false) => a.get(indices).clone(),
        (None, _) => ty.default_value(),
        (Some(_), _) => panic!("slot shape does not match access"),
    }
}

fn write_slot(map: &mut BTreeMap<Ident, Slot>, name: &Ident, indices: Vec<Value>, v: Value) {
    if indices.is_empty() {
        if v.is_default() {
            map.remove(name);
        } else {
            map.insert(name.clone(), Slot::Simple(v));
        }
        return;
    }
    let default = v.default_like();
    let slot = map.entry(name.clone()).or_insert_with(|| Slot::Array(ArrayVal::new(default)));
    let Slot::Array(arr) = slot else { panic!("slot shape does not match access") };
    arr.set(indices, v);
    if arr.is_trivial() {
        map.remove(name);
    }
}

impl State {
    pub fn new() -> State {
        State::default()
    }

    /// Current object, `σ(this)`.
    pub fn this(&self) -> ObjRef {
        match self.normals.get(THIS) {
            Some(Slot::Simple(Value::Obj(o))) => *o,
            _ => ObjRef::Null,
        }
    }

    pub fn read(&self, loc: &Location, ty: BasicType) -> Value {
        match loc {
            Location::Normal { name, indices } => read_slot(self.normals.get(name), indices, ty),
            Location::Instance { obj, name, indices } => {
                read_slot(self.locals.get(obj).and_then(|l| l.get(name)), indices, ty)
            }
        }
    }

    /// In-place write of a resolved location.
    pub fn write(&mut self, loc: &Location, v: Value) {
        match loc {
            Location::Normal { name, indices } => write_slot(&mut self.normals, name, indices.clone(), v),
            Location::Instance { obj, name, indices } => {
                let local = self.locals.entry(*obj).or_default();
                write_slot(local, name, indices.clone(), v);
                if local.is_empty() {
                    self.locals.remove(obj);
                }
            }
        }
    }

    /// Location denoted by an assignment target; subscripts are evaluated
    /// and instance variables resolved against the current object.
    pub fn resolve(&self, target: &Target) -> Location {
        let indices = target.indices.iter().map(|e| eval(self, e)).collect();
        match target.var.kind {
            VarKind::Normal => Location::Normal { name: target.var.name.clone(), indices },
            VarKind::Instance => Location::Instance { obj: self.this(), name: target.var.name.clone(), indices },
        }
    }

    pub fn assign(&mut self, target: &Target, v: Value) {
        let loc = self.resolve(target);
        self.write(&loc, v);
    }

    /// Simultaneous update of distinct simple normal variables.
    pub fn assign_parallel(&mut self, vars: &[Var], values: Vec<Value>) -> Result<(), StateError> {
        if vars.len() != values.len() {
            return Err(StateError::Arity(vars.len(), values.len()));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(StateError::DuplicateTarget(v.name.clone()));
            }
        }
        for (v, d) in vars.iter().zip(values) {
            let loc = match v.kind {
                VarKind::Normal => Location::Normal { name: v.name.clone(), indices: vec![] },
                VarKind::Instance => Location::Instance { obj: self.this(), name: v.name.clone(), indices: vec![] },
            };
            self.write(&loc, d);
        }
        Ok(())
    }

    pub fn set_normal(&mut self, name: &str, v: Value) {
        self.write(&Location::Normal { name: name.into(), indices: vec![] }, v);
    }

    pub fn set_cell(&mut self, name: &str, indices: Vec<Value>, v: Value) {
        self.write(&Location::Normal { name: name.into(), indices }, v);
    }

    pub fn set_field(&mut self, obj: ObjRef, name: &str, indices: Vec<Value>, v: Value) {
        self.write(&Location::Instance { obj, name: name.into(), indices }, v);
    }

    /// Drops stored entries equal to their defaults.
    pub fn normalized(&self) -> State {
        fn norm_map(m: &BTreeMap<Ident, Slot>) -> BTreeMap<Ident, Slot> {
            let mut out = BTreeMap::new();
            for (k, slot) in m {
                match slot {
                    Slot::Simple(v) if v.is_default() => {}
                    Slot::Simple(v) => {
                        out.insert(k.clone(), Slot::Simple(v.clone()));
                    }
                    Slot::Array(a) => {
                        let mut arr = ArrayVal::new(a.default.clone());
                        for (ix, v) in &a.overrides {
                            arr.set(ix.clone(), v.clone());
                        }
                        if !arr.is_trivial() {
                            out.insert(k.clone(), Slot::Array(arr));
                        }
                    }
                }
            }
            out
        }
        let mut locals = BTreeMap::new();
        for (o, l) in &self.locals {
            let l = norm_map(l);
            if !l.is_empty() {
                locals.insert(*o, l);
            }
        }
        State { normals: norm_map(&self.normals), locals }
    }
}

/// Structural equality of normalized representations.
pub fn states_equal(a: &State, b: &State) -> bool {
    a.normalized() == b.normalized()
}

pub fn outcomes_equal(a: &Outcome, b: &Outcome) -> bool {
    match (a, b) {
        (Outcome::Fail, Outcome::Fail) => true,
        (Outcome::Proper(x), Outcome::Proper(y)) => states_equal(x, y),
        _ => false,
    }
}

/// `out[target := d]`; `fail` is absorbing.
pub fn update(out: &Outcome, target: &Target, d: Value) -> Outcome {
    match out {
        Outcome::Fail => Outcome::Fail,
        Outcome::Proper(s) => {
            let mut s = s.clone();
            s.assign(target, d);
            Outcome::Proper(s)
        }
    }
}

pub fn update_parallel(out: &Outcome, vars: &[Var], values: Vec<Value>) -> Result<Outcome, StateError> {
    match out {
        Outcome::Fail => Ok(Outcome::Fail),
        Outcome::Proper(s) => {
            let mut s = s.clone();
            s.assign_parallel(vars, values)?;
            Ok(Outcome::Proper(s))
        }
    }
}

/// Value of a program or global expression in a proper state.
///
/// Panics on quantifiers (use [`eval_with`]) and on ill-typed input.
pub fn eval(state: &State, e: &Expr) -> Value {
    Evaluator::new(state, None).eval(e)
}

/// Evaluation with quantifiers bounded by `universe`.
pub fn eval_with(state: &State, universe: &Universe, e: &Expr) -> Value {
    Evaluator::new(state, Some(universe)).eval(e)
}

struct Evaluator<'a> {
    state: &'a State,
    universe: Option<&'a Universe>,
    bound: Vec<(Ident, Value)>,
}

impl<'a> Evaluator<'a> {
    fn new(state: &'a State, universe: Option<&'a Universe>) -> Self {
        Evaluator { state, universe, bound: Vec::new() }
    }

    fn lookup_bound(&self, name: &Ident) -> Option<&Value> {
        self.bound.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn owner(&mut self, var: &Var) -> ObjRef {
        debug_assert!(var.is_instance());
        match self.lookup_bound(&Ident::from(THIS)) {
            Some(v) => v.as_obj(),
            None => self.state.this(),
        }
    }

    fn eval(&mut self, e: &Expr) -> Value {
        match e {
            Expr::Int(n) => Value::Int(n.clone()),
            Expr::Bool(b) => Value::Bool(*b),
            Expr::Null => Value::null(),
            Expr::Var(v) => match v.kind {
                VarKind::Normal => match self.lookup_bound(&v.name) {
                    Some(val) => val.clone(),
                    None => self.state.read(&Location::Normal { name: v.name.clone(), indices: vec![] }, v.ty.value_type()),
                },
                VarKind::Instance => {
                    let obj = self.owner(v);
                    self.state.read(&Location::Instance { obj, name: v.name.clone(), indices: vec![] }, v.ty.value_type())
                }
            },
            Expr::Index(v, ix) => {
                let indices: Vec<Value> = ix.iter().map(|i| self.eval(i)).collect();
                let loc = match v.kind {
                    VarKind::Normal => Location::Normal { name: v.name.clone(), indices },
                    VarKind::Instance => Location::Instance { obj: self.owner(v), name: v.name.clone(), indices },
                };
                self.state.read(&loc, v.ty.value_type())
            }
            Expr::Nav(base, v, ix) => {
                let obj = self.eval(base).as_obj();
                let indices: Vec<Value> = ix.iter().map(|i| self.eval(i)).collect();
                self.state.read(&Location::Instance { obj, name: v.name.clone(), indices }, v.ty.value_type())
            }
            Expr::Cond(c, t, f) => {
                if self.eval(c).as_bool() {
                    self.eval(t)
                } else {
                    self.eval(f)
                }
            }
            Expr::Not(x) => Value::Bool(!self.eval(x).as_bool()),
            Expr::Bin(op, l, r) => self.eval_bin(*op, l, r),
            Expr::Quant(q, v, body) => {
                let universe = self.universe.expect("quantified expression needs a universe");
                let domain = universe.domain(v.ty.value_type());
                let mut result = *q == Quantifier::Forall;
                for d in domain {
                    self.bound.push((v.name.clone(), d));
                    let b = self.eval(body).as_bool();
                    self.bound.pop();
                    if b != result {
                        result = b;
                        break;
                    }
                }
                Value::Bool(result)
            }
        }
    }

    fn eval_bin(&mut self, op: BinOp, l: &Expr, r: &Expr) -> Value {
        match op {
            BinOp::And => Value::Bool(self.eval(l).as_bool() && self.eval(r).as_bool()),
            BinOp::Or => Value::Bool(self.eval(l).as_bool() || self.eval(r).as_bool()),
            BinOp::Implies => Value::Bool(!self.eval(l).as_bool() || self.eval(r).as_bool()),
            BinOp::Eq => Value::Bool(self.eval(l) == self.eval(r)),
            BinOp::Ne => Value::Bool(self.eval(l) != self.eval(r)),
            _ => {
                let a = self.eval(l);
                let b = self.eval(r);
                let (a, b) = (a.as_int(), b.as_int());
                match op {
                    BinOp::Add => Value::Int(a + b),
                    BinOp::Sub => Value::Int(a - b),
                    BinOp::Mul => Value::Int(a * b),
                    BinOp::Min => Value::Int(a.min(b).clone()),
                    BinOp::Max => Value::Int(a.max(b).clone()),
                    BinOp::Lt => Value::Bool(a < b),
                    BinOp::Le => Value::Bool(a <= b),
                    BinOp::Gt => Value::Bool(a > b),
                    BinOp::Ge => Value::Bool(a >= b),
                    _ => unreachable!(),
                }
            }
        }
    }
}

impl fmt::Display for State {
    /// State-literal form: `state { this=o1; x=5; o1.next=o2; a[1,2]=7; }`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("state {")?;
        for (name, slot) in &self.normals {
            write_slot_entries(f, "", name, slot)?;
        }
        for (obj, local) in &self.locals {
            for (name, slot) in local {
                write_slot_entries(f, &format!("{obj}."), name, slot)?;
            }
        }
        f.write_str(" }")
    }
}

fn write_slot_entries(f: &mut fmt::Formatter<'_>, prefix: &str, name: &str, slot: &Slot) -> fmt::Result {
    match slot {
        Slot::Simple(v) => write!(f, " {prefix}{name}={v};"),
        Slot::Array(a) => {
            for (ix, v) in &a.overrides {
                let ix: Vec<String> = ix.iter().map(|x| x.to_string()).collect();
                write!(f, " {prefix}{name}[{}]={v};", ix.join(","))?;
            }
            Ok(())
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Proper(s) => s.fmt(f),
            Outcome::Fail => f.write_str("fail"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Type;

    fn int_t() -> Type {
        Type::Basic(BasicType::Int)
    }

    #[test]
    fn instance_variable_reads_current_object() {
        let mut s = State::new();
        s.set_normal("this", Value::oid(1));
        s.set_field(ObjRef::Oid(1), "x", vec![], Value::int(5));
        let x = Var::instance("x", int_t());
        assert_eq!(eval(&s, &Expr::var(&x)), Value::int(5));
    }

    #[test]
    fn null_constant() {
        assert_eq!(eval(&State::new(), &Expr::Null), Value::null());
    }

    #[test]
    fn navigation_reads_other_object() {
        let mut s = State::new();
        s.set_normal("x", Value::oid(2));
        s.set_field(ObjRef::Oid(2), "y", vec![], Value::Bool(true));
        let x = Var::normal("x", Type::Basic(BasicType::Object));
        let y = Var::instance("y", Type::Basic(BasicType::Bool));
        assert_eq!(eval(&s, &Expr::nav(Expr::var(&x), &y, vec![])), Value::Bool(true));
    }

    #[test]
    fn fail_absorbs_updates() {
        let x = Var::normal("x", int_t());
        assert_eq!(update(&Outcome::Fail, &Target::simple(&x), Value::int(3)), Outcome::Fail);
    }

    #[test]
    fn instance_update_through_current_object() {
        let mut s = State::new();
        s.set_normal("this", Value::oid(1));
        let x = Var::instance("x", Type::Basic(BasicType::Bool));
        let Outcome::Proper(t) = update(&Outcome::Proper(s), &Target::simple(&x), Value::Bool(true)) else {
            panic!()
        };
        assert_eq!(eval(&t, &Expr::var(&x)), Value::Bool(true));
        assert_eq!(t.locals[&ObjRef::Oid(1)].len(), 1);
    }

    #[test]
    fn single_cell_override() {
        let a = Var::normal("a", Type::Array { args: vec![BasicType::Int], value: BasicType::Int });
        let mut s = State::new();
        s.assign(&Target { var: a.clone(), indices: vec![Expr::int(1)] }, Value::int(2));
        assert_eq!(eval(&s, &Expr::Index(a.clone(), vec![Expr::int(1)])), Value::int(2));
        assert_eq!(eval(&s, &Expr::Index(a, vec![Expr::int(0)])), Value::int(0));
    }

    #[test]
    fn parallel_update_rejects_duplicates() {
        let x = Var::normal("x", int_t());
        let err = update_parallel(&Outcome::Proper(State::new()), &[x.clone(), x], vec![Value::int(1), Value::int(2)]);
        assert!(matches!(err, Err(StateError::DuplicateTarget(_))));
    }

    #[test]
    fn normalization_drops_defaults() {
        let mut s = State::new();
        s.set_normal("x", Value::int(4));
        let mut raw = s.clone();
        let mut arr = ArrayVal::new(Value::int(0));
        arr.overrides.insert(vec![Value::int(3)], Value::int(0));
        raw.normals.insert("a".into(), Slot::Array(arr));
        assert!(states_equal(&s, &raw));
        assert_ne!(s, raw);
    }

    #[test]
    fn idempotent_update() {
        let mut s = State::new();
        s.set_normal("x", Value::int(7));
        let x = Var::normal("x", int_t());
        let v = eval(&s, &Expr::var(&x));
        let Outcome::Proper(t) = update(&Outcome::Proper(s.clone()), &Target::simple(&x), v) else { panic!() };
        assert!(states_equal(&s, &t));
    }

    #[test]
    fn null_local_state_participates_in_equality() {
        let mut s = State::new();
        s.set_normal("this", Value::oid(1));
        let mut t = s.clone();
        t.set_field(ObjRef::Null, "x", vec![], Value::int(1));
        assert!(!states_equal(&s, &t));
        assert!(outcomes_equal(&Outcome::Fail, &Outcome::Fail));
        assert!(!outcomes_equal(&Outcome::Fail, &Outcome::Proper(s)));
    }
}

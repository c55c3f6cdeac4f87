//! Abstract syntax shared by the kernel, object-oriented and recursive
//! languages, including the assertion language (global expressions with
//! navigation and quantifiers).

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;

use crate::state::Value;

pub type Ident = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasicType {
    Int,
    Bool,
    Object,
    /// Nonnegative integers; shares the integer value domain.
    Nat,
}

impl BasicType {
    /// `int` and `nat` are interchangeable in expressions.
    pub fn compatible(self, other: BasicType) -> bool {
        let norm = |t: BasicType| if t == BasicType::Nat { BasicType::Int } else { t };
        norm(self) == norm(other)
    }

    pub fn default_value(self) -> Value {
        match self {
            BasicType::Int | BasicType::Nat => Value::int(0),
            BasicType::Bool => Value::Bool(false),
            BasicType::Object => Value::null(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Basic(BasicType),
    Array { args: Vec<BasicType>, value: BasicType },
}

impl Type {
    pub fn is_basic(&self) -> bool {
        matches!(self, Type::Basic(_))
    }

    /// Value type for arrays, the type itself for basic types.
    pub fn value_type(&self) -> BasicType {
        match self {
            Type::Basic(t) => *t,
            Type::Array { value, .. } => *value,
        }
    }

    pub fn arg_types(&self) -> &[BasicType] {
        match self {
            Type::Basic(_) => &[],
            Type::Array { args, .. } => args,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Normal,
    Instance,
}

/// A typed variable occurrence. Normal and instance names are disjoint, so
/// the name alone identifies the declaration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var {
    pub name: Ident,
    pub kind: VarKind,
    pub ty: Type,
}

pub const THIS: &str = "this";

impl Var {
    pub fn normal(name: &str, ty: Type) -> Var {
        Var { name: name.into(), kind: VarKind::Normal, ty }
    }

    pub fn instance(name: &str, ty: Type) -> Var {
        Var { name: name.into(), kind: VarKind::Instance, ty }
    }

    pub fn this() -> Var {
        Var::normal(THIS, Type::Basic(BasicType::Object))
    }

    pub fn is_this(&self) -> bool {
        self.kind == VarKind::Normal && &*self.name == THIS
    }

    pub fn is_instance(&self) -> bool {
        self.kind == VarKind::Instance
    }

    pub fn is_simple(&self) -> bool {
        self.ty.is_basic()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Min,
    Max,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Min => "min",
            BinOp::Max => "max",
            BinOp::Eq => "=",
            BinOp::Ne => "/=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Implies => "->",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge)
    }

    pub fn is_arith(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Min | BinOp::Max)
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Expressions, global expressions and assertions.
///
/// `Nav` and `Quant` only occur in assertions; program expressions refer to
/// instance variables of the current object through bare `Var`/`Index`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr {
    Int(BigInt),
    Bool(bool),
    Null,
    /// Simple variable, normal or instance.
    Var(Var),
    /// Subscripted variable, normal or instance.
    Index(Var, Vec<Expr>),
    /// `s.x` (no indices) or `s.a[s1, ..., sn]`.
    Nav(Box<Expr>, Var, Vec<Expr>),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Quant(Quantifier, Var, Box<Expr>),
}

pub type Assertion = Expr;

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Int(BigInt::from(n))
    }

    pub fn var(v: &Var) -> Expr {
        Expr::Var(v.clone())
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Expr {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    pub fn eq(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Eq, l, r)
    }

    pub fn ne(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Ne, l, r)
    }

    pub fn and(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::And, l, r)
    }

    pub fn or(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Or, l, r)
    }

    pub fn implies(l: Expr, r: Expr) -> Expr {
        Expr::bin(BinOp::Implies, l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn cond(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::Cond(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn nav(base: Expr, field: &Var, indices: Vec<Expr>) -> Expr {
        Expr::Nav(Box::new(base), field.clone(), indices)
    }

    pub fn this() -> Expr {
        Expr::Var(Var::this())
    }

    /// Left-nested conjunction of a non-empty list; `true` when empty.
    pub fn conj(mut items: Vec<Expr>) -> Expr {
        if items.is_empty() {
            return Expr::Bool(true);
        }
        let first = items.remove(0);
        items.into_iter().fold(first, Expr::and)
    }

    /// Static type, assuming the expression is well typed.
    pub fn ty(&self) -> BasicType {
        match self {
            Expr::Int(_) => BasicType::Int,
            Expr::Bool(_) => BasicType::Bool,
            Expr::Null => BasicType::Object,
            Expr::Var(v) | Expr::Index(v, _) | Expr::Nav(_, v, _) => v.ty.value_type(),
            Expr::Cond(_, t, _) => t.ty(),
            Expr::Not(_) | Expr::Quant(..) => BasicType::Bool,
            Expr::Bin(op, l, _) => {
                if op.is_arith() {
                    if l.ty() == BasicType::Nat {
                        BasicType::Nat
                    } else {
                        BasicType::Int
                    }
                } else {
                    BasicType::Bool
                }
            }
        }
    }

    /// True for navigation- and quantifier-free expressions.
    pub fn is_program_expr(&self) -> bool {
        let mut ok = true;
        self.walk(&mut |e| {
            if matches!(e, Expr::Nav(..) | Expr::Quant(..)) {
                ok = false;
            }
        });
        ok
    }

    /// Pre-order traversal.
    pub fn walk(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Int(_) | Expr::Bool(_) | Expr::Null | Expr::Var(_) => {}
            Expr::Index(_, ix) => ix.iter().for_each(|e| e.walk(f)),
            Expr::Nav(b, _, ix) => {
                b.walk(f);
                ix.iter().for_each(|e| e.walk(f));
            }
            Expr::Cond(c, t, e) => {
                c.walk(f);
                t.walk(f);
                e.walk(f);
            }
            Expr::Not(e) => e.walk(f),
            Expr::Bin(_, l, r) => {
                l.walk(f);
                r.walk(f);
            }
            Expr::Quant(_, _, b) => b.walk(f),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

/// Left-hand side of an assignment: simple (`indices` empty) or subscripted.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Target {
    pub var: Var,
    pub indices: Vec<Expr>,
}

impl Target {
    pub fn simple(var: &Var) -> Target {
        Target { var: var.clone(), indices: Vec::new() }
    }

    pub fn to_expr(&self) -> Expr {
        if self.indices.is_empty() {
            Expr::Var(self.var.clone())
        } else {
            Expr::Index(self.var.clone(), self.indices.clone())
        }
    }

    pub fn from_expr(e: &Expr) -> Option<Target> {
        match e {
            Expr::Var(v) => Some(Target::simple(v)),
            Expr::Index(v, ix) => Some(Target { var: v.clone(), indices: ix.clone() }),
            _ => None,
        }
    }

    pub fn is_instance(&self) -> bool {
        self.var.is_instance()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Stmt {
    Skip,
    Assign(Target, Expr),
    /// Two or more distinct simple normal targets; single targets use `Assign`.
    ParAssign(Vec<Var>, Vec<Expr>),
    /// Right-nested; build with [`Stmt::seq`].
    Seq(Box<Stmt>, Box<Stmt>),
    If(Expr, Box<Stmt>, Box<Stmt>),
    /// Failure statement `if B -> S fi`.
    FailIf(Expr, Box<Stmt>),
    While(Expr, Box<Stmt>),
    Block { locals: Vec<Var>, inits: Vec<Expr>, body: Box<Stmt> },
    MethodCall(Expr, Ident, Vec<Expr>),
    ProcCall(Ident, Vec<Expr>),
    /// Terminated computation.
    Empty,
    /// Runtime-only restoration of block locals to stored values.
    Restore(Vec<Var>, Vec<Value>),
}

impl Stmt {
    /// Sequential composition normalized to right-nested form, with `Empty`
    /// as unit.
    pub fn seq(first: Stmt, second: Stmt) -> Stmt {
        match (first, second) {
            (Stmt::Empty, s) | (s, Stmt::Empty) => s,
            (Stmt::Seq(a, b), s) => Stmt::seq(*a, Stmt::seq(*b, s)),
            (a, b) => Stmt::Seq(Box::new(a), Box::new(b)),
        }
    }

    pub fn seq_all(items: impl IntoIterator<Item = Stmt>) -> Stmt {
        let items: Vec<Stmt> = items.into_iter().collect();
        items.into_iter().rev().fold(Stmt::Empty, |acc, s| Stmt::seq(s, acc))
    }

    /// `x1, ..., xn := t1, ..., tn`, collapsing to `Assign` for one target.
    pub fn par_assign(vars: Vec<Var>, exprs: Vec<Expr>) -> Stmt {
        if vars.len() == 1 {
            let rhs = exprs.into_iter().next().expect("arity checked by caller");
            Stmt::Assign(Target::simple(&vars[0]), rhs)
        } else {
            Stmt::ParAssign(vars, exprs)
        }
    }

    /// Block statement; without locals it is just its body.
    pub fn block(locals: Vec<Var>, inits: Vec<Expr>, body: Stmt) -> Stmt {
        if locals.is_empty() {
            body
        } else {
            Stmt::Block { locals, inits, body: Box::new(body) }
        }
    }

    /// `if B then S else skip fi`.
    pub fn if_then(guard: Expr, body: Stmt) -> Stmt {
        Stmt::If(guard, Box::new(body), Box::new(Stmt::Skip))
    }

    pub fn fail_if(guard: Expr, body: Stmt) -> Stmt {
        Stmt::FailIf(guard, Box::new(body))
    }

    /// Flattened view of a sequence.
    pub fn components(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Stmt::Seq(a, b) = cur {
            out.push(&**a);
            cur = b;
        }
        out.push(cur);
        out
    }

    pub fn contains(&self, pred: &dyn Fn(&Stmt) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Stmt::Seq(a, b) | Stmt::If(_, a, b) => a.contains(pred) || b.contains(pred),
            Stmt::FailIf(_, s) | Stmt::While(_, s) => s.contains(pred),
            Stmt::Block { body, .. } => body.contains(pred),
            _ => false,
        }
    }

    pub fn has_calls(&self) -> bool {
        self.contains(&|s| matches!(s, Stmt::MethodCall(..) | Stmt::ProcCall(..)))
    }

    pub fn has_loops(&self) -> bool {
        self.contains(&|s| matches!(s, Stmt::While(..)))
    }
}

/// Method (object-oriented flavor) or procedure (recursive flavor)
/// declaration.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Decl {
    pub name: Ident,
    pub formals: Vec<Var>,
    pub body: Stmt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Kernel,
    ObjectOriented,
    Recursive,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Kernel => "kernel",
            Flavor::ObjectOriented => "object-oriented",
            Flavor::Recursive => "recursive",
        })
    }
}

/// A main statement in the context of declarations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub flavor: Flavor,
    /// Declared global normal variables and instance variables.
    pub globals: Vec<Var>,
    pub decls: Vec<Decl>,
    pub main: Stmt,
}

impl Program {
    pub fn decl(&self, name: &str) -> Option<&Decl> {
        self.decls.iter().find(|d| &*d.name == name)
    }

    pub fn instance_vars(&self) -> impl Iterator<Item = &Var> {
        self.globals.iter().filter(|v| v.is_instance())
    }

    pub fn normal_globals(&self) -> impl Iterator<Item = &Var> {
        self.globals.iter().filter(|v| !v.is_instance())
    }

    /// Every normal variable the program binds locally: formals and block
    /// locals, in order of first appearance.
    pub fn local_vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = Vec::new();
        let mut push = |v: &Var| {
            if !out.iter().any(|w| w.name == v.name) {
                out.push(v.clone());
            }
        };
        fn block_locals(s: &Stmt, push: &mut dyn FnMut(&Var)) {
            match s {
                Stmt::Block { locals, body, .. } => {
                    locals.iter().for_each(&mut *push);
                    block_locals(body, push);
                }
                Stmt::Seq(a, b) | Stmt::If(_, a, b) => {
                    block_locals(a, push);
                    block_locals(b, push);
                }
                Stmt::FailIf(_, s) | Stmt::While(_, s) => block_locals(s, push),
                _ => {}
            }
        }
        for d in &self.decls {
            d.formals.iter().for_each(&mut push);
            block_locals(&d.body, &mut push);
        }
        block_locals(&self.main, &mut push);
        out
    }
}

//! Seeded random programs, states, expressions and assertions for the
//! property suites.
//!
//! Every generator draws from a [`ChaCha8Rng`]; [`Gen::for_case`] derives an
//! independent stream per case so suites can run cases in parallel and still
//! reproduce exactly from one seed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assertions::Universe;
use crate::state::{ObjRef, State, Value};
use crate::syntax::{BasicType, BinOp, Decl, Expr, Flavor, Program, Quantifier, Stmt, Target, Type, Var};

fn int_t() -> Type {
    Type::Basic(BasicType::Int)
}

fn int_array() -> Type {
    Type::Array { args: vec![BasicType::Int], value: BasicType::Int }
}

/// Fixed vocabulary shared by all generated programs.
#[derive(Clone, Debug)]
pub struct Vocab {
    pub ints: Vec<Var>,
    pub bools: Vec<Var>,
    pub objs: Vec<Var>,
    pub int_arrays: Vec<Var>,
    pub ivar_ints: Vec<Var>,
    pub ivar_bools: Vec<Var>,
    pub ivar_objs: Vec<Var>,
    pub ivar_arrays: Vec<Var>,
    pub local_int: Var,
    pub local_obj: Var,
    pub formal_int: Var,
    pub formal_obj: Var,
}

impl Default for Vocab {
    fn default() -> Self {
        let b = |t| Type::Basic(t);
        Vocab {
            ints: vec![Var::normal("x", int_t()), Var::normal("y", int_t())],
            bools: vec![Var::normal("b", b(BasicType::Bool))],
            objs: vec![Var::normal("o", b(BasicType::Object)), Var::normal("p", b(BasicType::Object))],
            int_arrays: vec![Var::normal("a", int_array())],
            ivar_ints: vec![Var::instance("f", int_t())],
            ivar_bools: vec![Var::instance("g", b(BasicType::Bool))],
            ivar_objs: vec![Var::instance("next", b(BasicType::Object))],
            ivar_arrays: vec![Var::instance("c", int_array())],
            local_int: Var::normal("u", int_t()),
            local_obj: Var::normal("q", b(BasicType::Object)),
            formal_int: Var::normal("k", int_t()),
            formal_obj: Var::normal("r", b(BasicType::Object)),
        }
    }
}

impl Vocab {
    pub fn globals(&self, oo: bool) -> Vec<Var> {
        let mut out: Vec<Var> = [&self.ints, &self.bools, &self.objs, &self.int_arrays].into_iter().flatten().cloned().collect();
        if oo {
            out.extend([&self.ivar_ints, &self.ivar_bools, &self.ivar_objs, &self.ivar_arrays].into_iter().flatten().cloned());
        }
        out
    }
}

/// Variables visible at a program point.
#[derive(Clone, Debug, Default)]
struct Scope {
    ints: Vec<Var>,
    bools: Vec<Var>,
    objs: Vec<Var>,
    int_arrays: Vec<Var>,
    /// Object-oriented context: `this` and instance variables are usable.
    oo: bool,
    /// Inside a method body guarded by `k > 0`.
    descending: bool,
}

impl Scope {
    fn of(v: &Vocab, oo: bool) -> Scope {
        let mut s = Scope {
            ints: v.ints.clone(),
            bools: v.bools.clone(),
            objs: v.objs.clone(),
            int_arrays: v.int_arrays.clone(),
            oo,
            descending: false,
        };
        if oo {
            s.ints.extend(v.ivar_ints.iter().cloned());
            s.bools.extend(v.ivar_bools.iter().cloned());
            s.objs.extend(v.ivar_objs.iter().cloned());
            s.int_arrays.extend(v.ivar_arrays.iter().cloned());
        }
        s
    }

    fn with(&self, v: &Var) -> Scope {
        let mut s = self.clone();
        match v.ty {
            Type::Basic(BasicType::Int) => s.ints.push(v.clone()),
            Type::Basic(BasicType::Bool) => s.bools.push(v.clone()),
            Type::Basic(BasicType::Object) => s.objs.push(v.clone()),
            _ => s.int_arrays.push(v.clone()),
        }
        s
    }
}

/// Shape limits for generated programs.
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub depth: u32,
    pub max_methods: usize,
    /// Chance a loop body ends by incrementing its guard variable.
    pub loop_progress: f64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { depth: 4, max_methods: 3, loop_progress: 0.8 }
    }
}

pub struct Gen {
    pub rng: ChaCha8Rng,
    pub vocab: Vocab,
    pub universe: Universe,
}

struct MethodSig {
    name: String,
    with_obj: bool,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), vocab: Vocab::default(), universe: Universe::new(-2, 2, 2) }
    }

    /// Independent stream for case `case` of a suite run with `seed`.
    pub fn for_case(seed: u64, case: u64) -> Gen {
        let mut g = Gen::new(seed);
        g.rng.set_stream(case);
        g
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    fn pick<T: Clone>(&mut self, xs: &[T]) -> T {
        xs.choose(&mut self.rng).expect("non-empty choice").clone()
    }

    fn small_int(&mut self) -> Expr {
        Expr::int(self.rng.gen_range(self.universe.int_lo..=self.universe.int_hi))
    }

    // ---- program expressions ----

    fn int_expr(&mut self, sc: &Scope, depth: u32) -> Expr {
        let leaf = depth == 0 || self.chance(0.4);
        if leaf {
            return match self.rng.gen_range(0..4) {
                0 => self.small_int(),
                _ => Expr::var(&self.pick(&sc.ints)),
            };
        }
        match self.rng.gen_range(0..6) {
            0 => {
                let a = self.pick(&sc.int_arrays);
                Expr::Index(a, vec![self.int_expr(sc, depth - 1)])
            }
            1 => Expr::cond(self.bool_expr(sc, depth - 1), self.int_expr(sc, depth - 1), self.int_expr(sc, depth - 1)),
            _ => {
                let op = self.pick(&[BinOp::Add, BinOp::Sub, BinOp::Add, BinOp::Mul, BinOp::Min, BinOp::Max]);
                let l = self.int_expr(sc, depth - 1);
                let r = if op == BinOp::Mul { self.small_int() } else { self.int_expr(sc, depth - 1) };
                Expr::bin(op, l, r)
            }
        }
    }

    fn obj_expr(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.7) {
            return match self.rng.gen_range(0..8) {
                0 => Expr::Null,
                1 | 2 if sc.oo => Expr::this(),
                _ => Expr::var(&self.pick(&sc.objs)),
            };
        }
        Expr::cond(self.bool_expr(sc, depth - 1), self.obj_expr(sc, depth - 1), self.obj_expr(sc, depth - 1))
    }

    fn bool_expr(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.3) {
            return match self.rng.gen_range(0..5) {
                0 => Expr::Bool(self.chance(0.5)),
                1 => Expr::var(&self.pick(&sc.bools)),
                _ => {
                    let op = self.pick(&[BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne, BinOp::Gt]);
                    Expr::bin(op, self.int_expr(sc, 1), self.int_expr(sc, 1))
                }
            };
        }
        match self.rng.gen_range(0..6) {
            0 => Expr::not(self.bool_expr(sc, depth - 1)),
            1 => {
                let op = if self.chance(0.5) { BinOp::Eq } else { BinOp::Ne };
                Expr::bin(op, self.obj_expr(sc, depth - 1), self.obj_expr(sc, depth - 1))
            }
            2 | 3 => {
                let op = self.pick(&[BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne, BinOp::Gt, BinOp::Ge]);
                Expr::bin(op, self.int_expr(sc, depth - 1), self.int_expr(sc, depth - 1))
            }
            _ => {
                let op = self.pick(&[BinOp::And, BinOp::Or, BinOp::Implies]);
                Expr::bin(op, self.bool_expr(sc, depth - 1), self.bool_expr(sc, depth - 1))
            }
        }
    }

    fn expr_of(&mut self, sc: &Scope, ty: BasicType, depth: u32) -> Expr {
        match ty {
            BasicType::Int | BasicType::Nat => self.int_expr(sc, depth),
            BasicType::Bool => self.bool_expr(sc, depth),
            BasicType::Object => self.obj_expr(sc, depth),
        }
    }

    /// A program expression of a random basic type over the object-oriented
    /// vocabulary.
    pub fn program_expr(&mut self, oo: bool) -> Expr {
        let sc = Scope::of(&self.vocab, oo);
        let ty = self.pick(&[BasicType::Int, BasicType::Bool, BasicType::Object]);
        self.expr_of(&sc, ty, 3)
    }

    // ---- statements ----

    fn target(&mut self, sc: &Scope) -> Target {
        match self.rng.gen_range(0..7) {
            0 | 1 => Target::simple(&self.pick(&sc.ints)),
            2 => Target::simple(&self.pick(&sc.bools)),
            3 => Target::simple(&self.pick(&sc.objs)),
            _ => {
                let a = self.pick(&sc.int_arrays);
                Target { var: a, indices: vec![self.int_expr(sc, 1)] }
            }
        }
    }

    fn assign(&mut self, sc: &Scope) -> Stmt {
        let t = self.target(sc);
        let e = self.expr_of(sc, t.var.ty.value_type(), 2);
        Stmt::Assign(t, e)
    }

    fn call(&mut self, sc: &Scope, methods: &[MethodSig]) -> Stmt {
        let m = &methods[self.rng.gen_range(0..methods.len())];
        let callee = if self.chance(0.5) { Expr::this() } else { self.obj_expr(sc, 1) };
        let k = if sc.descending {
            Expr::bin(BinOp::Sub, Expr::var(&self.vocab.formal_int), Expr::int(1))
        } else {
            Expr::int(self.rng.gen_range(0..=2))
        };
        let mut args = vec![k];
        if m.with_obj {
            args.push(self.obj_expr(sc, 1));
        }
        Stmt::MethodCall(callee, m.name.as_str().into(), args)
    }

    fn stmt(&mut self, sc: &Scope, depth: u32, methods: &[MethodSig], shape: &Shape) -> Stmt {
        if depth == 0 || self.chance(0.25) {
            return match self.rng.gen_range(0..6) {
                0 => Stmt::Skip,
                1 if sc.oo && !methods.is_empty() => self.call(sc, methods),
                _ => self.assign(sc),
            };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..10) {
            0..=2 => Stmt::seq(self.stmt(sc, d, methods, shape), self.stmt(sc, d, methods, shape)),
            3 | 4 => Stmt::If(
                self.bool_expr(sc, 2),
                Box::new(self.stmt(sc, d, methods, shape)),
                Box::new(self.stmt(sc, d, methods, shape)),
            ),
            5 => Stmt::fail_if(self.bool_expr(sc, 2), self.stmt(sc, d, methods, shape)),
            6 => {
                let v = self.pick(&sc.ints);
                let bound = self.rng.gen_range(0..=3);
                let guard = Expr::bin(BinOp::Lt, Expr::var(&v), Expr::int(bound));
                let mut body = self.stmt(sc, d.min(2), methods, shape);
                if self.chance(shape.loop_progress) {
                    let t = Target::simple(&v);
                    body = Stmt::seq(body, Stmt::Assign(t, Expr::bin(BinOp::Add, Expr::var(&v), Expr::int(1))));
                }
                Stmt::While(guard, Box::new(body))
            }
            7 => {
                let local = if self.chance(0.6) { self.vocab.local_int.clone() } else { self.vocab.local_obj.clone() };
                let init = self.expr_of(sc, local.ty.value_type(), 1);
                let inner = sc.with(&local);
                Stmt::block(vec![local], vec![init], self.stmt(&inner, d, methods, shape))
            }
            8 if sc.oo && !methods.is_empty() => self.call(sc, methods),
            _ => self.assign(sc),
        }
    }

    fn method_body(&mut self, sc: &Scope, methods: &[MethodSig], shape: &Shape) -> Stmt {
        let depth = shape.depth.saturating_sub(1);
        if self.chance(0.7) {
            let k = Expr::var(&self.vocab.formal_int);
            let down = Scope { descending: true, ..sc.clone() };
            let then = self.stmt(&down, depth, methods, shape);
            let other = self.stmt(&Scope { descending: false, ..sc.clone() }, 1, &[], shape);
            Stmt::If(Expr::bin(BinOp::Gt, k, Expr::int(0)), Box::new(then), Box::new(other))
        } else {
            self.stmt(sc, depth, &[], shape)
        }
    }

    /// A random well-typed object-oriented program.
    pub fn oo_program(&mut self, shape: &Shape) -> Program {
        let n = self.rng.gen_range(0..=shape.max_methods);
        let sigs: Vec<MethodSig> = (0..n).map(|i| MethodSig { name: format!("m{i}"), with_obj: self.chance(0.4) }).collect();
        let base = Scope::of(&self.vocab, true);
        let mut decls = Vec::new();
        for sig in &sigs {
            let mut formals = vec![self.vocab.formal_int.clone()];
            if sig.with_obj {
                formals.push(self.vocab.formal_obj.clone());
            }
            let sc = formals.iter().fold(base.clone(), |s, v| s.with(v));
            let body = self.method_body(&sc, &sigs, shape);
            decls.push(Decl { name: sig.name.as_str().into(), formals, body });
        }
        let main = self.stmt(&base, shape.depth, &sigs, shape);
        Program { flavor: Flavor::ObjectOriented, globals: self.vocab.globals(true), decls, main }
    }

    /// A loop-free, call-free kernel statement over `ints` and `arrays`
    /// (`bools` may be empty).
    pub fn kernel_stmt(&mut self, ints: &[Var], bools: &[Var], arrays: &[Var], depth: u32) -> Stmt {
        let sc = Scope {
            ints: ints.to_vec(),
            bools: if bools.is_empty() { vec![] } else { bools.to_vec() },
            objs: vec![],
            int_arrays: arrays.to_vec(),
            oo: false,
            descending: false,
        };
        self.loop_free(&sc, depth)
    }

    fn kernel_bool(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.4) {
            if !sc.bools.is_empty() && self.chance(0.3) {
                return Expr::var(&self.pick(&sc.bools));
            }
            let op = self.pick(&[BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne]);
            return Expr::bin(op, self.kernel_int(sc, 1), self.kernel_int(sc, 1));
        }
        match self.rng.gen_range(0..3) {
            0 => Expr::not(self.kernel_bool(sc, depth - 1)),
            _ => {
                let op = self.pick(&[BinOp::And, BinOp::Or]);
                Expr::bin(op, self.kernel_bool(sc, depth - 1), self.kernel_bool(sc, depth - 1))
            }
        }
    }

    fn kernel_int(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.5) {
            return if self.chance(0.3) { Expr::int(self.rng.gen_range(-1..=1)) } else { Expr::var(&self.pick(&sc.ints)) };
        }
        if !sc.int_arrays.is_empty() && self.chance(0.3) {
            let a = self.pick(&sc.int_arrays);
            return Expr::Index(a, vec![self.index(sc)]);
        }
        let op = self.pick(&[BinOp::Add, BinOp::Sub, BinOp::Min, BinOp::Max]);
        Expr::bin(op, self.kernel_int(sc, depth - 1), self.kernel_int(sc, depth - 1))
    }

    fn index(&mut self, sc: &Scope) -> Expr {
        if self.chance(0.5) {
            Expr::int(self.rng.gen_range(0..=1))
        } else {
            Expr::var(&self.pick(&sc.ints))
        }
    }

    fn loop_free(&mut self, sc: &Scope, depth: u32) -> Stmt {
        if depth == 0 || self.chance(0.3) {
            return if self.chance(0.1) { Stmt::Skip } else { self.kernel_assign(sc) };
        }
        let d = depth - 1;
        match self.rng.gen_range(0..8) {
            0..=2 => Stmt::seq(self.loop_free(sc, d), self.loop_free(sc, d)),
            3 => Stmt::If(self.kernel_bool(sc, 1), Box::new(self.loop_free(sc, d)), Box::new(self.loop_free(sc, d))),
            4 => Stmt::fail_if(self.kernel_bool(sc, 1), self.loop_free(sc, d)),
            5 if sc.ints.len() >= 2 => {
                let mut vs = sc.ints.clone();
                vs.shuffle(&mut self.rng);
                vs.truncate(2);
                let es = vec![self.kernel_int(sc, 1), self.kernel_int(sc, 1)];
                Stmt::par_assign(vs, es)
            }
            6 => {
                let local = self.vocab.local_int.clone();
                let init = self.kernel_int(sc, 1);
                Stmt::block(vec![local.clone()], vec![init], self.loop_free(&sc.with(&local), d))
            }
            _ => self.kernel_assign(sc),
        }
    }

    fn kernel_assign(&mut self, sc: &Scope) -> Stmt {
        if !sc.int_arrays.is_empty() && self.chance(0.3) {
            let a = self.pick(&sc.int_arrays);
            let ix = self.index(sc);
            return Stmt::Assign(Target { var: a, indices: vec![ix] }, self.kernel_int(sc, 1));
        }
        if !sc.bools.is_empty() && self.chance(0.2) {
            let b = self.pick(&sc.bools);
            return Stmt::Assign(Target::simple(&b), self.kernel_bool(sc, 1));
        }
        let v = self.pick(&sc.ints);
        Stmt::Assign(Target::simple(&v), self.kernel_int(sc, 2))
    }

    /// A postcondition for the kernel fragment.
    pub fn kernel_assertion(&mut self, ints: &[Var], bools: &[Var], arrays: &[Var]) -> Expr {
        let sc = Scope { ints: ints.to_vec(), bools: bools.to_vec(), objs: vec![], int_arrays: arrays.to_vec(), ..Scope::default() };
        self.kernel_bool(&sc, 2)
    }

    // ---- assertions ----

    fn nav_int(&mut self, sc: &Scope, depth: u32) -> Expr {
        let base = self.global_obj(sc, depth.saturating_sub(1));
        if self.chance(0.6) {
            let f = self.pick(&self.vocab.ivar_ints.clone());
            Expr::nav(base, &f, vec![])
        } else {
            let c = self.pick(&self.vocab.ivar_arrays.clone());
            let ix = self.global_int(sc, depth.saturating_sub(1));
            Expr::nav(base, &c, vec![ix])
        }
    }

    fn global_int(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.35) {
            return match self.rng.gen_range(0..5) {
                0 => self.small_int(),
                1 if sc.oo => self.nav_int(sc, 0),
                _ => Expr::var(&self.pick(&sc.ints)),
            };
        }
        match self.rng.gen_range(0..6) {
            0 => {
                let a = self.pick(&sc.int_arrays);
                Expr::Index(a, vec![self.global_int(sc, depth - 1)])
            }
            1 if sc.oo => self.nav_int(sc, depth),
            2 => Expr::cond(self.global_bool(sc, depth - 1), self.global_int(sc, depth - 1), self.global_int(sc, depth - 1)),
            _ => {
                let op = self.pick(&[BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Min, BinOp::Max]);
                Expr::bin(op, self.global_int(sc, depth - 1), self.global_int(sc, depth - 1))
            }
        }
    }

    fn global_obj(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.5) {
            return match self.rng.gen_range(0..6) {
                0 => Expr::Null,
                1 if sc.oo => Expr::this(),
                _ => Expr::var(&self.pick(&sc.objs)),
            };
        }
        if sc.oo && self.chance(0.7) {
            let next = self.pick(&self.vocab.ivar_objs.clone());
            return Expr::nav(self.global_obj(sc, depth - 1), &next, vec![]);
        }
        Expr::cond(self.global_bool(sc, depth - 1), self.global_obj(sc, depth - 1), self.global_obj(sc, depth - 1))
    }

    fn global_bool(&mut self, sc: &Scope, depth: u32) -> Expr {
        if depth == 0 || self.chance(0.3) {
            return match self.rng.gen_range(0..4) {
                0 => Expr::var(&self.pick(&sc.bools)),
                1 if sc.oo => {
                    let g = self.pick(&self.vocab.ivar_bools.clone());
                    Expr::nav(self.global_obj(sc, 0), &g, vec![])
                }
                _ => Expr::bin(BinOp::Le, self.global_int(sc, 0), self.global_int(sc, 0)),
            };
        }
        match self.rng.gen_range(0..8) {
            0 => Expr::not(self.global_bool(sc, depth - 1)),
            1 => {
                let op = if self.chance(0.5) { BinOp::Eq } else { BinOp::Ne };
                Expr::bin(op, self.global_obj(sc, depth - 1), self.global_obj(sc, depth - 1))
            }
            2 | 3 => {
                let op = self.pick(&[BinOp::Lt, BinOp::Le, BinOp::Eq, BinOp::Ne, BinOp::Ge]);
                Expr::bin(op, self.global_int(sc, depth - 1), self.global_int(sc, depth - 1))
            }
            4 => {
                let q = if self.chance(0.5) { Quantifier::Forall } else { Quantifier::Exists };
                let v = if self.chance(0.6) {
                    Var::normal("i", int_t())
                } else {
                    Var::normal("z", Type::Basic(BasicType::Object))
                };
                Expr::Quant(q, v.clone(), Box::new(self.global_bool(&sc.with(&v), depth - 1)))
            }
            _ => {
                let op = self.pick(&[BinOp::And, BinOp::Or, BinOp::Implies]);
                Expr::bin(op, self.global_bool(sc, depth - 1), self.global_bool(sc, depth - 1))
            }
        }
    }

    /// A random assertion; object-oriented ones use navigation and `this`.
    pub fn assertion(&mut self, oo: bool) -> Expr {
        let sc = Scope::of(&self.vocab, oo);
        self.global_bool(&sc, 3)
    }

    /// A global expression of random type.
    pub fn global_expr(&mut self, oo: bool) -> Expr {
        let sc = Scope::of(&self.vocab, oo);
        match self.rng.gen_range(0..3) {
            0 => self.global_int(&sc, 3),
            1 => self.global_obj(&sc, 3),
            _ => self.global_bool(&sc, 3),
        }
    }

    /// Assignment target and a program expression of matching type.
    pub fn assignment(&mut self, oo: bool) -> (Target, Expr) {
        let sc = Scope::of(&self.vocab, oo);
        let t = self.target(&sc);
        let e = self.expr_of(&sc, t.var.ty.value_type(), 2);
        (t, e)
    }

    // ---- states ----

    fn value(&mut self, ty: BasicType) -> Value {
        let dom = self.universe.domain(ty);
        self.pick(&dom)
    }

    /// A random proper state over the vocabulary with a non-null `this`.
    pub fn state(&mut self, oo: bool) -> State {
        let mut s = State::new();
        let oids = self.universe.oids.clone();
        if oo {
            let this = self.pick(&oids);
            s.set_normal(crate::syntax::THIS, Value::Obj(this));
        }
        let vocab = self.vocab.clone();
        for v in vocab.ints.iter().chain(&vocab.bools).chain(&vocab.objs) {
            let d = self.value(v.ty.value_type());
            s.set_normal(&v.name, d);
        }
        for a in &vocab.int_arrays {
            for i in self.universe.int_lo..=self.universe.int_hi {
                if self.chance(0.5) {
                    let d = self.value(BasicType::Int);
                    s.set_cell(&a.name, vec![Value::int(i)], d);
                }
            }
        }
        if oo {
            for obj in self.universe.objects() {
                self.fill_object(&mut s, obj, &vocab);
            }
        }
        s
    }

    fn fill_object(&mut self, s: &mut State, obj: ObjRef, vocab: &Vocab) {
        for v in vocab.ivar_ints.iter().chain(&vocab.ivar_bools).chain(&vocab.ivar_objs) {
            let d = self.value(v.ty.value_type());
            s.set_field(obj, &v.name, vec![], d);
        }
        for c in &vocab.ivar_arrays {
            for i in self.universe.int_lo..=self.universe.int_hi {
                if self.chance(0.3) {
                    let d = self.value(BasicType::Int);
                    s.set_field(obj, &c.name, vec![Value::int(i)], d);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::typecheck;

    #[test]
    fn programs_typecheck() {
        for case in 0..200 {
            let p = Gen::for_case(7, case).oo_program(&Shape::default());
            let diags = typecheck(&p);
            assert!(diags.is_empty(), "case {case}: {diags:?}");
        }
    }

    #[test]
    fn deterministic_per_case() {
        let a = Gen::for_case(42, 3).oo_program(&Shape::default());
        let b = Gen::for_case(42, 3).oo_program(&Shape::default());
        assert_eq!(a, b);
        assert_eq!(Gen::for_case(42, 3).state(true), Gen::for_case(42, 3).state(true));
    }

    #[test]
    fn states_have_current_object() {
        for case in 0..50 {
            assert_ne!(Gen::for_case(1, case).state(true).this(), ObjRef::Null);
        }
    }
}

//! Well-formedness and typing of programs, assertions and intermediate
//! configurations.
//!
//! The AST has no source spans, so a diagnostic is located by the
//! declaration it occurs in and a structural path, e.g.
//! `method find/body/if.then/call`.

use std::collections::BTreeMap;
use std::fmt;

use super::ast::*;
use super::vars::free_vars;
use crate::state::Value;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub location: String,
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.location, self.rule, self.message)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    /// Source programs.
    Surface,
    /// Statements reached by execution: `this` may be a block local and
    /// restore nodes may occur.
    Runtime,
}

struct Checker<'a> {
    program: &'a Program,
    mode: Mode,
    env: BTreeMap<Ident, (VarKind, Type)>,
    bound: Vec<Var>,
    path: Vec<String>,
    diags: Vec<Diagnostic>,
}

/// Diagnostics for a parsed program; empty iff it is well formed.
pub fn typecheck(program: &Program) -> Vec<Diagnostic> {
    let mut c = Checker::new(program, Mode::Surface);
    c.check_program();
    c.diags
}

/// Checks a statement produced by the interpreter from a well-formed
/// program.
pub fn typecheck_runtime(stmt: &Stmt, program: &Program) -> Vec<Diagnostic> {
    let mut c = Checker::new(program, Mode::Runtime);
    c.path.push("config".into());
    c.stmt(stmt);
    c.diags
}

/// Reusable checker for many intermediate statements of one program.
pub struct RuntimeChecker<'a> {
    program: &'a Program,
    env: BTreeMap<Ident, (VarKind, Type)>,
}

impl<'a> RuntimeChecker<'a> {
    pub fn new(program: &'a Program) -> Self {
        let c = Checker::new(program, Mode::Runtime);
        RuntimeChecker { program, env: c.env }
    }

    pub fn check(&self, stmt: &Stmt) -> Vec<Diagnostic> {
        let mut c = Checker {
            program: self.program,
            mode: Mode::Runtime,
            env: self.env.clone(),
            bound: Vec::new(),
            path: vec!["config".into()],
            diags: Vec::new(),
        };
        c.stmt(stmt);
        c.diags
    }
}

/// Checks a correctness formula `{pre} stmt {post}` against the ambient
/// program's declarations. Statements may be blocks binding `this`, as in
/// the premises of the recursion rules.
pub fn typecheck_formula(pre: &Expr, stmt: &Stmt, post: &Expr, program: &Program) -> Vec<Diagnostic> {
    let mut c = Checker::new(program, Mode::Runtime);
    c.path.push("pre".into());
    c.assertion(pre);
    c.path = vec!["stmt".into()];
    c.stmt(stmt);
    c.path = vec!["post".into()];
    c.assertion(post);
    c.diags
}

impl<'a> Checker<'a> {
    fn new(program: &'a Program, mode: Mode) -> Self {
        let mut c = Checker { program, mode, env: BTreeMap::new(), bound: Vec::new(), path: Vec::new(), diags: Vec::new() };
        c.build_env();
        c
    }

    fn report(&mut self, rule: &'static str, message: impl Into<String>) {
        let location = if self.path.is_empty() { "program".to_string() } else { self.path.join("/") };
        self.diags.push(Diagnostic { location, rule, message: message.into() });
    }

    fn at<R>(&mut self, seg: impl Into<String>, f: impl FnOnce(&mut Self) -> R) -> R {
        self.path.push(seg.into());
        let r = f(self);
        self.path.pop();
        r
    }

    fn declare(&mut self, v: &Var) {
        match self.env.get(&v.name) {
            Some((k, t)) if *k != v.kind || *t != v.ty => {
                let msg = format!("`{}` declared with conflicting kinds or types", v.name);
                self.report("conflicting declaration", msg);
            }
            Some(_) => {}
            None => {
                self.env.insert(v.name.clone(), (v.kind, v.ty.clone()));
            }
        }
    }

    fn build_env(&mut self) {
        self.path.push("declarations".into());
        self.env.insert(THIS.into(), (VarKind::Normal, Type::Basic(BasicType::Object)));
        let program = self.program;
        for v in &program.globals {
            if &*v.name == THIS {
                self.report("reserved name", "`this` cannot be declared");
                continue;
            }
            if self.env.contains_key(&v.name) {
                self.report("duplicate declaration", format!("`{}` declared twice", v.name));
            }
            if let Type::Array { args, .. } = &v.ty {
                if args.is_empty() {
                    self.report("array arity", format!("array `{}` needs an argument type", v.name));
                }
            }
            self.env.insert(v.name.clone(), (v.kind, v.ty.clone()));
        }
        for v in program.local_vars() {
            if v.is_this() {
                continue;
            }
            if program.globals.iter().any(|g| g.name == v.name) {
                self.report("name clash", format!("local `{}` also declared global", v.name));
                continue;
            }
            self.declare(&v);
        }
        self.path.pop();
    }

    fn check_program(&mut self) {
        let program = self.program;
        if program.flavor == Flavor::Kernel && !program.decls.is_empty() {
            self.report("flavor", "kernel programs have no declarations");
        }
        if program.flavor != Flavor::ObjectOriented {
            for v in program.instance_vars() {
                let msg = format!("instance variable `{}` outside an object-oriented program", v.name);
                self.report("flavor", msg);
            }
        }
        for (i, d) in program.decls.iter().enumerate() {
            let kind = if program.flavor == Flavor::ObjectOriented { "method" } else { "procedure" };
            self.at(format!("{kind} {}", d.name), |c| {
                if program.decls[..i].iter().any(|e| e.name == d.name) {
                    c.report("duplicate declaration", format!("`{}` declared more than once", d.name));
                }
                for (j, f) in d.formals.iter().enumerate() {
                    if d.formals[..j].iter().any(|g| g.name == f.name) {
                        c.report("distinct formals", format!("formal `{}` repeated", f.name));
                    }
                    if f.is_instance() || !f.is_simple() {
                        c.report("formal kind", format!("formal `{}` must be a simple normal variable", f.name));
                    }
                    if f.is_this() && program.flavor == Flavor::ObjectOriented {
                        c.report("reserved name", "methods bind `this` implicitly");
                    }
                }
                c.at("body", |c| c.stmt(&d.body));
                c.check_scoping(&d.body, d.formals.iter().map(|f| f.name.clone()).collect());
            });
        }
        self.at("main", |c| {
            c.stmt(&program.main);
            c.check_scoping(&program.main, Vec::new());
        });
    }

    /// Locals and formals may not occur outside the construct binding them.
    fn check_scoping(&mut self, s: &Stmt, scope: Vec<Ident>) {
        let locals: Vec<Ident> = self.program.local_vars().into_iter().map(|v| v.name).collect();
        let mut offenders = Vec::new();
        scan_scoping(s, &mut scope.clone(), &locals, &mut offenders);
        offenders.sort();
        offenders.dedup();
        for name in offenders {
            self.report("name clash", format!("local variable `{name}` occurs outside its scope"));
        }
    }

    fn lookup(&mut self, v: &Var) {
        if let Some(b) = self.bound.iter().rev().find(|b| b.name == v.name) {
            if b != v {
                self.report("type mismatch", format!("bound variable `{}` used at another type", v.name));
            }
            return;
        }
        match self.env.get(&v.name) {
            None => self.report("undeclared variable", format!("`{}` is not declared", v.name)),
            Some((k, t)) => {
                if *k != v.kind || *t != v.ty {
                    self.report("type mismatch", format!("`{}` used inconsistently with its declaration", v.name));
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr, program_ctx: bool) -> Option<BasicType> {
        match e {
            Expr::Int(_) => Some(BasicType::Int),
            Expr::Bool(_) => Some(BasicType::Bool),
            Expr::Null => Some(BasicType::Object),
            Expr::Var(v) => {
                self.lookup(v);
                self.check_instance_allowed(v);
                if !v.is_simple() {
                    self.report("array access", format!("array `{}` used without subscripts", v.name));
                    return None;
                }
                Some(v.ty.value_type())
            }
            Expr::Index(v, ix) => {
                self.lookup(v);
                self.check_instance_allowed(v);
                self.subscripts(v, ix, program_ctx)
            }
            Expr::Nav(base, v, ix) => {
                if program_ctx {
                    self.report("navigation in program", "navigation expressions occur only in assertions");
                }
                let bt = self.expr(base, program_ctx);
                if bt.is_some_and(|t| t != BasicType::Object) {
                    self.report("type mismatch", "navigation base must be an object");
                }
                if !v.is_instance() {
                    self.report("navigation target", format!("`{}` is not an instance variable", v.name));
                }
                self.lookup(v);
                if ix.is_empty() {
                    if !v.is_simple() {
                        self.report("array access", format!("array `{}` used without subscripts", v.name));
                        return None;
                    }
                    Some(v.ty.value_type())
                } else {
                    self.subscripts(v, ix, program_ctx)
                }
            }
            Expr::Cond(g, t, f) => {
                self.expect_bool(g, program_ctx);
                let a = self.expr(t, program_ctx);
                let b = self.expr(f, program_ctx);
                match (a, b) {
                    (Some(a), Some(b)) if !a.compatible(b) => {
                        self.report("type mismatch", "conditional branches differ in type");
                        None
                    }
                    (Some(a), Some(_)) => Some(a),
                    _ => None,
                }
            }
            Expr::Not(x) => {
                self.expect_bool(x, program_ctx);
                Some(BasicType::Bool)
            }
            Expr::Bin(op, l, r) => {
                let a = self.expr(l, program_ctx);
                let b = self.expr(r, program_ctx);
                let (Some(a), Some(b)) = (a, b) else { return if op.is_arith() { None } else { Some(BasicType::Bool) } };
                match op {
                    BinOp::Eq | BinOp::Ne => {
                        if !a.compatible(b) {
                            self.report("type mismatch", format!("operands of `{}` differ in type", op.symbol()));
                        }
                        Some(BasicType::Bool)
                    }
                    op if op.is_logical() => {
                        if a != BasicType::Bool || b != BasicType::Bool {
                            self.report("type mismatch", format!("`{}` needs Boolean operands", op.symbol()));
                        }
                        Some(BasicType::Bool)
                    }
                    op => {
                        let int = |t: BasicType| t.compatible(BasicType::Int);
                        if !int(a) || !int(b) {
                            self.report("type mismatch", format!("`{}` needs integer operands", op.symbol()));
                        }
                        Some(if op.is_arith() { e.ty() } else { BasicType::Bool })
                    }
                }
            }
            Expr::Quant(_, v, body) => {
                if program_ctx {
                    self.report("quantifier in program", "quantifiers occur only in assertions");
                }
                if v.is_instance() || !v.is_simple() {
                    self.report("quantified variable", "only simple normal variables can be quantified");
                }
                if v.is_this() {
                    self.report("quantified variable", "`this` cannot be quantified");
                }
                self.bound.push(v.clone());
                self.expect_bool(body, program_ctx);
                self.bound.pop();
                Some(BasicType::Bool)
            }
        }
    }

    fn subscripts(&mut self, v: &Var, ix: &[Expr], program_ctx: bool) -> Option<BasicType> {
        let Type::Array { args, value } = &v.ty else {
            self.report("array access", format!("`{}` is not an array", v.name));
            return None;
        };
        if args.len() != ix.len() {
            let msg = format!("`{}` expects {} subscripts, got {}", v.name, args.len(), ix.len());
            self.report("array arity", msg);
        }
        for (i, (t, e)) in args.iter().zip(ix).enumerate() {
            if let Some(et) = self.expr(e, program_ctx) {
                if !et.compatible(*t) {
                    self.report("type mismatch", format!("subscript {} of `{}` has the wrong type", i + 1, v.name));
                }
            }
        }
        for e in ix.iter().skip(args.len()) {
            self.expr(e, program_ctx);
        }
        Some(*value)
    }

    fn check_instance_allowed(&mut self, v: &Var) {
        if v.is_instance() && self.program.flavor != Flavor::ObjectOriented {
            let msg = format!("instance variable `{}` outside an object-oriented program", v.name);
            self.report("flavor", msg);
        }
    }

    fn expect_bool(&mut self, e: &Expr, program_ctx: bool) {
        if let Some(t) = self.expr(e, program_ctx) {
            if t != BasicType::Bool {
                self.report("type mismatch", "expected a Boolean expression");
            }
        }
    }

    fn expect(&mut self, e: &Expr, ty: BasicType, what: &str) {
        if let Some(t) = self.expr(e, true) {
            if !t.compatible(ty) {
                self.report("type mismatch", format!("{what} has the wrong type"));
            }
        }
    }

    fn assertion(&mut self, p: &Expr) {
        self.expect_bool(p, false);
    }

    fn check_target_var(&mut self, v: &Var) {
        if v.is_this() && self.mode == Mode::Surface {
            self.report("assignment to this", "`this` cannot be assigned");
        }
        self.lookup(v);
        self.check_instance_allowed(v);
    }

    fn stmt(&mut self, s: &Stmt) {
        match s {
            Stmt::Skip => {}
            Stmt::Empty => {
                if self.mode == Mode::Surface {
                    self.report("internal statement", "the empty statement is not a source statement");
                }
            }
            Stmt::Assign(t, e) => self.at("assign", |c| {
                c.check_target_var(&t.var);
                let ty = if t.indices.is_empty() {
                    if !t.var.is_simple() {
                        c.report("array access", format!("array `{}` assigned without subscripts", t.var.name));
                        None
                    } else {
                        Some(t.var.ty.value_type())
                    }
                } else {
                    c.subscripts(&t.var, &t.indices, true)
                };
                if let Some(ty) = ty {
                    c.expect(e, ty, "right-hand side");
                } else {
                    c.expr(e, true);
                }
            }),
            Stmt::ParAssign(vs, es) => self.at("parallel-assign", |c| {
                c.parallel(vs, es, "parallel assignment");
            }),
            Stmt::Seq(..) => {
                for (i, part) in s.components().into_iter().enumerate() {
                    self.at(format!("seq[{i}]"), |c| c.stmt(part));
                }
            }
            Stmt::If(g, a, b) => self.at("if", |c| {
                c.at("guard", |c| c.expect_bool(g, true));
                c.at("then", |c| c.stmt(a));
                c.at("else", |c| c.stmt(b));
            }),
            Stmt::FailIf(g, a) => self.at("failure", |c| {
                c.at("guard", |c| c.expect_bool(g, true));
                c.at("body", |c| c.stmt(a));
            }),
            Stmt::While(g, a) => self.at("while", |c| {
                c.at("guard", |c| c.expect_bool(g, true));
                c.at("body", |c| c.stmt(a));
            }),
            Stmt::Block { locals, inits, body } => self.at("block", |c| {
                for v in locals {
                    if v.is_instance() || !v.is_simple() {
                        c.report("block local", format!("local `{}` must be a simple normal variable", v.name));
                    }
                }
                c.parallel(locals, inits, "block locals");
                c.stmt(body);
            }),
            Stmt::MethodCall(callee, m, args) => self.at("call", |c| {
                if c.program.flavor != Flavor::ObjectOriented {
                    c.report("flavor", "method calls need an object-oriented program");
                }
                c.expect(callee, BasicType::Object, "callee");
                c.call_args(m, args);
            }),
            Stmt::ProcCall(p, args) => self.at("call", |c| {
                if c.program.flavor != Flavor::Recursive {
                    c.report("flavor", "procedure calls need a recursive program");
                }
                c.call_args(p, args);
            }),
            Stmt::Restore(vs, values) => self.at("restore", |c| {
                if c.mode == Mode::Surface {
                    c.report("internal statement", "restore nodes are produced only by execution");
                }
                if vs.len() != values.len() {
                    c.report("arity", "restore arity mismatch");
                }
                for (v, d) in vs.iter().zip(values) {
                    c.lookup(v);
                    if !value_fits(d, v.ty.value_type()) {
                        c.report("type mismatch", format!("stored value for `{}` has the wrong type", v.name));
                    }
                }
            }),
        }
    }

    fn parallel(&mut self, vs: &[Var], es: &[Expr], what: &str) {
        if vs.len() != es.len() {
            self.report("arity", format!("{what}: {} targets but {} values", vs.len(), es.len()));
        }
        for (i, v) in vs.iter().enumerate() {
            if vs[..i].iter().any(|w| w.name == v.name) {
                self.report("distinct targets", format!("`{}` assigned twice", v.name));
            }
            self.check_target_var(v);
            if !v.is_simple() {
                self.report("array access", format!("`{}` must be simple", v.name));
            }
        }
        for (v, e) in vs.iter().zip(es) {
            self.expect(e, v.ty.value_type(), &format!("value for `{}`", v.name));
        }
        for e in es.iter().skip(vs.len()) {
            self.expr(e, true);
        }
    }

    fn call_args(&mut self, name: &Ident, args: &[Expr]) {
        let Some(decl) = self.program.decl(name) else {
            self.report("unresolved call", format!("no declaration of `{name}`"));
            args.iter().for_each(|a| {
                self.expr(a, true);
            });
            return;
        };
        if decl.formals.len() != args.len() {
            let msg = format!("`{name}` takes {} arguments, got {}", decl.formals.len(), args.len());
            self.report("call arity", msg);
        }
        for (f, a) in decl.formals.iter().zip(args) {
            self.expect(a, f.ty.value_type(), &format!("argument for `{}`", f.name));
        }
    }
}

fn value_fits(v: &Value, t: BasicType) -> bool {
    match v {
        Value::Int(_) => t.compatible(BasicType::Int),
        Value::Bool(_) => t == BasicType::Bool,
        Value::Obj(_) => t == BasicType::Object,
    }
}

fn scan_scoping(s: &Stmt, scope: &mut Vec<Ident>, locals: &[Ident], out: &mut Vec<Ident>) {
    let check_expr = |e: &Expr, scope: &Vec<Ident>, out: &mut Vec<Ident>| {
        for n in free_vars(e) {
            if &*n != THIS && locals.contains(&n) && !scope.contains(&n) {
                out.push(n);
            }
        }
    };
    let check_var = |v: &Var, scope: &Vec<Ident>, out: &mut Vec<Ident>| {
        if !v.is_this() && locals.contains(&v.name) && !scope.contains(&v.name) {
            out.push(v.name.clone());
        }
    };
    match s {
        Stmt::Skip | Stmt::Empty => {}
        Stmt::Assign(t, e) => {
            check_var(&t.var, scope, out);
            t.indices.iter().for_each(|i| check_expr(i, scope, out));
            check_expr(e, scope, out);
        }
        Stmt::ParAssign(vs, es) => {
            vs.iter().for_each(|v| check_var(v, scope, out));
            es.iter().for_each(|e| check_expr(e, scope, out));
        }
        Stmt::Restore(vs, _) => vs.iter().for_each(|v| check_var(v, scope, out)),
        Stmt::Seq(a, b) => {
            scan_scoping(a, scope, locals, out);
            scan_scoping(b, scope, locals, out);
        }
        Stmt::If(g, a, b) => {
            check_expr(g, scope, out);
            scan_scoping(a, scope, locals, out);
            scan_scoping(b, scope, locals, out);
        }
        Stmt::FailIf(g, a) | Stmt::While(g, a) => {
            check_expr(g, scope, out);
            scan_scoping(a, scope, locals, out);
        }
        Stmt::Block { locals: ls, inits, body } => {
            inits.iter().for_each(|e| check_expr(e, scope, out));
            let n = scope.len();
            scope.extend(ls.iter().map(|v| v.name.clone()));
            scan_scoping(body, scope, locals, out);
            scope.truncate(n);
        }
        Stmt::MethodCall(callee, _, args) => {
            check_expr(callee, scope, out);
            args.iter().for_each(|e| check_expr(e, scope, out));
        }
        Stmt::ProcCall(_, args) => args.iter().for_each(|e| check_expr(e, scope, out)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(name: &str) -> Var {
        Var::normal(name, Type::Basic(BasicType::Object))
    }

    fn find_program() -> Program {
        let z = obj("z");
        let u = obj("u");
        let next = Var::instance("next", Type::Basic(BasicType::Object));
        let body = Stmt::if_then(
            Expr::ne(Expr::var(&u), Expr::this()),
            Stmt::MethodCall(Expr::var(&next), "find".into(), vec![Expr::var(&u)]),
        );
        Program {
            flavor: Flavor::ObjectOriented,
            globals: vec![z.clone(), next],
            decls: vec![Decl { name: "find".into(), formals: vec![u], body }],
            main: Stmt::MethodCall(Expr::this(), "find".into(), vec![Expr::var(&z)]),
        }
    }

    #[test]
    fn find_program_is_well_typed() {
        assert_eq!(typecheck(&find_program()), vec![]);
    }

    #[test]
    fn assignment_to_this_is_rejected() {
        let p = Program { flavor: Flavor::Kernel, globals: vec![], decls: vec![], main: Stmt::Assign(Target::simple(&Var::this()), Expr::Null) };
        let d = typecheck(&p);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].rule, "assignment to this");
    }

    #[test]
    fn empty_program_is_well_typed() {
        let p = Program { flavor: Flavor::Kernel, globals: vec![], decls: vec![], main: Stmt::Skip };
        assert!(typecheck(&p).is_empty());
    }

    #[test]
    fn local_outside_scope_is_a_clash() {
        let x = Var::normal("x", Type::Basic(BasicType::Int));
        let main = Stmt::seq(
            Stmt::block(vec![x.clone()], vec![Expr::int(0)], Stmt::Skip),
            Stmt::Assign(Target::simple(&x), Expr::int(1)),
        );
        let p = Program { flavor: Flavor::Kernel, globals: vec![], decls: vec![], main };
        let d = typecheck(&p);
        assert!(d.iter().any(|d| d.rule == "name clash"), "{d:?}");
    }

    #[test]
    fn call_arity_is_checked() {
        let mut p = find_program();
        p.main = Stmt::MethodCall(Expr::this(), "find".into(), vec![]);
        let d = typecheck(&p);
        assert!(d.iter().any(|d| d.rule == "call arity"));
        assert!(d[0].location.starts_with("main"));
    }

    #[test]
    fn diagnostics_are_deterministic() {
        let mut p = find_program();
        p.main = Stmt::ProcCall("nope".into(), vec![Expr::Bool(true)]);
        assert_eq!(typecheck(&p), typecheck(&p));
    }
}

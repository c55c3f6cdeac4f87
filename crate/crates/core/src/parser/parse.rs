use std::collections::BTreeMap;

use super::lexer::{tokenize, Tok, Token};
use super::ParseError;
use crate::proofs::{Derivation, Formula, Rule, Side};
use crate::state::{ObjRef, State, Value};
use crate::syntax::*;

/// A parsed proof file: auxiliary variable declarations and one derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct ProofFile {
    pub aux: Vec<Var>,
    pub derivation: Derivation,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    origin: String,
    env: BTreeMap<String, Var>,
    scopes: Vec<Vec<Var>>,
    /// Top-level `->` is not an operator inside statement guards.
    no_arrow: bool,
    assumptions: Vec<Vec<Formula>>,
}

type PResult<T> = Result<T, ParseError>;

const KEYWORDS: &[&str] = &[
    "skip", "if", "then", "else", "fi", "while", "do", "od", "begin", "local", "end", "var", "ivar", "method", "proc",
    "true", "false", "null", "and", "or", "not", "forall", "exists", "min", "max", "this",
];

pub fn parse_program(src: &str, origin: &str) -> PResult<Program> {
    let mut p = Parser::new(src, origin)?;
    let prog = p.program()?;
    p.expect_eof()?;
    Ok(prog)
}

/// Assertion or global expression over the declarations of `program`.
pub fn parse_expr(src: &str, origin: &str, program: &Program) -> PResult<Expr> {
    let mut p = Parser::new(src, origin)?;
    p.load_program(program);
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

pub fn parse_stmt(src: &str, origin: &str, program: &Program) -> PResult<Stmt> {
    let mut p = Parser::new(src, origin)?;
    p.load_program(program);
    let s = p.stmts()?;
    p.expect_eof()?;
    Ok(s)
}

/// `{p} S {q}`, optionally preceded by `var` declarations of auxiliary
/// variables.
pub fn parse_formula(src: &str, origin: &str, program: &Program) -> PResult<Formula> {
    let mut p = Parser::new(src, origin)?;
    p.load_program(program);
    p.var_decls(&mut Vec::new())?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

pub fn parse_proof(src: &str, origin: &str, program: &Program) -> PResult<ProofFile> {
    let mut p = Parser::new(src, origin)?;
    p.load_program(program);
    let mut aux = Vec::new();
    p.var_decls(&mut aux)?;
    let derivation = p.derivation()?;
    p.expect_eof()?;
    Ok(ProofFile { aux, derivation })
}

/// `state { this=o1; x=5; o1.next=o2; a[1,2]=7; null.x=1; }`
pub fn parse_state(src: &str, origin: &str) -> PResult<State> {
    let mut p = Parser::new(src, origin)?;
    let s = p.state()?;
    p.expect_eof()?;
    Ok(s)
}

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

impl Parser {
    fn new(src: &str, origin: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: tokenize(src, origin)?,
            pos: 0,
            origin: origin.to_string(),
            env: BTreeMap::new(),
            scopes: Vec::new(),
            no_arrow: false,
            assumptions: Vec::new(),
        })
    }

    fn load_program(&mut self, program: &Program) {
        for v in program.globals.iter().chain(program.local_vars().iter()) {
            if !v.is_this() {
                self.env.entry(v.name.to_string()).or_insert_with(|| v.clone());
            }
        }
    }

    // ---- token helpers ----

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError { origin: self.origin.clone(), line: t.line, col: t.col, message: message.into() })
    }

    fn expected<T>(&self, what: &str) -> PResult<T> {
        self.err(format!("expected {what}, found {}", self.peek()))
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.expected(&format!("`{s}`"))
        }
    }

    fn kw(&mut self, k: &str) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            self.expected(&format!("`{k}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.expected("an identifier"),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.expected("end of input")
        }
    }

    // ---- declarations ----

    fn basic_type(&mut self) -> PResult<BasicType> {
        let t = match self.peek() {
            Tok::Ident(s) if s == "int" => BasicType::Int,
            Tok::Ident(s) if s == "bool" => BasicType::Bool,
            Tok::Ident(s) if s == "object" => BasicType::Object,
            Tok::Ident(s) if s == "nat" => BasicType::Nat,
            _ => return self.expected("a type (`int`, `bool`, `object`, `nat`)"),
        };
        self.bump();
        Ok(t)
    }

    /// `T` or `T1 * ... * Tn -> T`.
    fn ty(&mut self) -> PResult<Type> {
        let mut args = vec![self.basic_type()?];
        while self.eat_sym("*") {
            args.push(self.basic_type()?);
        }
        if self.eat_sym("->") {
            let value = self.basic_type()?;
            Ok(Type::Array { args, value })
        } else if args.len() == 1 {
            Ok(Type::Basic(args[0]))
        } else {
            self.expected("`->`")
        }
    }

    fn declare(&mut self, v: Var) -> PResult<()> {
        if &*v.name == THIS {
            return self.err("`this` cannot be declared");
        }
        if self.env.contains_key(&*v.name) {
            return self.err(format!("`{}` declared twice", v.name));
        }
        self.env.insert(v.name.to_string(), v);
        Ok(())
    }

    /// `var x, y: T;` and `ivar u: T;` items.
    fn var_item(&mut self, kind: VarKind, out: &mut Vec<Var>) -> PResult<()> {
        let mut names = vec![self.ident()?];
        while self.eat_sym(",") {
            names.push(self.ident()?);
        }
        self.sym(":")?;
        let ty = self.ty()?;
        self.sym(";")?;
        for n in names {
            let v = Var { name: n.as_str().into(), kind, ty: ty.clone() };
            self.declare(v.clone())?;
            out.push(v);
        }
        Ok(())
    }

    fn var_decls(&mut self, out: &mut Vec<Var>) -> PResult<()> {
        while self.eat_kw("var") {
            self.var_item(VarKind::Normal, out)?;
        }
        Ok(())
    }

    fn formals(&mut self) -> PResult<Vec<Var>> {
        self.sym("(")?;
        let mut out = Vec::new();
        if !self.is_sym(")") {
            loop {
                let name = if self.eat_kw("this") { THIS.to_string() } else { self.ident()? };
                self.sym(":")?;
                let ty = self.ty()?;
                out.push(Var { name: name.as_str().into(), kind: VarKind::Normal, ty });
                if !self.eat_sym(",") {
                    break;
                }
            }
        }
        self.sym(")")?;
        Ok(out)
    }

    fn program(&mut self) -> PResult<Program> {
        let mut globals = Vec::new();
        let mut decls = Vec::new();
        let (mut methods, mut procs, mut ivars) = (false, false, false);
        loop {
            if self.eat_kw("var") {
                self.var_item(VarKind::Normal, &mut globals)?;
            } else if self.eat_kw("ivar") {
                ivars = true;
                self.var_item(VarKind::Instance, &mut globals)?;
            } else if self.is_kw("method") || self.is_kw("proc") {
                let is_method = self.is_kw("method");
                if (is_method && procs) || (!is_method && methods) {
                    return self.err("methods and procedures cannot be mixed");
                }
                methods |= is_method;
                procs |= !is_method;
                self.bump();
                let name = self.ident()?;
                let formals = self.formals()?;
                self.sym("{")?;
                self.scopes.push(formals.clone());
                let body = self.stmts()?;
                self.scopes.pop();
                self.sym("}")?;
                decls.push(Decl { name: name.as_str().into(), formals, body });
            } else {
                break;
            }
        }
        let main = if *self.peek() == Tok::Eof { Stmt::Skip } else { self.stmts()? };
        let flavor = if procs {
            Flavor::Recursive
        } else if methods || ivars || main.contains(&|s| matches!(s, Stmt::MethodCall(..))) {
            Flavor::ObjectOriented
        } else {
            Flavor::Kernel
        };
        Ok(Program { flavor, globals, decls, main })
    }

    // ---- statements ----

    fn stmts(&mut self) -> PResult<Stmt> {
        let mut items = vec![self.stmt()?];
        while self.eat_sym(";") {
            items.push(self.stmt()?);
        }
        Ok(Stmt::seq_all(items))
    }

    fn guard(&mut self) -> PResult<Expr> {
        let saved = self.no_arrow;
        self.no_arrow = true;
        let g = self.expr();
        self.no_arrow = saved;
        g
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.eat_kw("skip") {
            return Ok(Stmt::Skip);
        }
        if self.eat_kw("if") {
            let g = self.guard()?;
            if self.eat_sym("->") {
                let body = self.stmts()?;
                return match self.bump() {
                    Tok::Ident(s) if s == "fi" => Ok(Stmt::fail_if(g, body)),
                    Tok::FiPrime => Ok(Stmt::if_then(g, body)),
                    _ => {
                        self.pos -= 1;
                        self.expected("`fi` or `fi'`")
                    }
                };
            }
            self.kw("then")?;
            let a = self.stmts()?;
            let b = if self.eat_kw("else") { self.stmts()? } else { Stmt::Skip };
            self.kw("fi")?;
            return Ok(Stmt::If(g, Box::new(a), Box::new(b)));
        }
        if self.eat_kw("while") {
            let g = self.guard()?;
            self.kw("do")?;
            let body = self.stmts()?;
            self.kw("od")?;
            return Ok(Stmt::While(g, Box::new(body)));
        }
        if self.eat_kw("begin") {
            if !self.eat_kw("local") {
                let body = self.stmts()?;
                self.kw("end")?;
                return Ok(body);
            }
            let mut names = vec![self.local_name()?];
            while self.eat_sym(",") {
                names.push(self.local_name()?);
            }
            self.sym(":=")?;
            let inits = self.expr_list()?;
            if inits.len() != names.len() {
                return self.err(format!("{} locals but {} initial values", names.len(), inits.len()));
            }
            let locals: Vec<Var> = names.iter().zip(&inits).map(|(n, e)| self.local_var(n, e)).collect();
            self.sym(";")?;
            self.scopes.push(locals.clone());
            let body = self.stmts();
            self.scopes.pop();
            let body = body?;
            self.kw("end")?;
            return Ok(Stmt::Block { locals, inits, body: Box::new(body) });
        }
        if let Tok::Ident(name) = self.peek().clone() {
            if !is_keyword(&name) && *self.peek_at(1) == Tok::Sym("(") {
                self.bump();
                let args = self.args()?;
                return Ok(Stmt::ProcCall(name.as_str().into(), args));
            }
        }
        // assignment or method call
        let first = self.postfix(true)?;
        if self.is_sym(".") {
            self.bump();
            let m = self.ident()?;
            let args = self.args()?;
            return Ok(Stmt::MethodCall(first, m.as_str().into(), args));
        }
        let mut targets = vec![first];
        while self.eat_sym(",") {
            targets.push(self.postfix(true)?);
        }
        if !self.is_sym(":=") {
            return self.expected("`:=` or a method call");
        }
        self.bump();
        let rhs = self.expr_list()?;
        if targets.len() == 1 {
            if rhs.len() != 1 {
                return self.err("one target but several values");
            }
            let Some(t) = Target::from_expr(&targets[0]) else { return self.err("invalid assignment target") };
            return Ok(Stmt::Assign(t, rhs.into_iter().next().expect("one value")));
        }
        let mut vars = Vec::new();
        for t in &targets {
            match t {
                Expr::Var(v) => vars.push(v.clone()),
                _ => return self.err("parallel assignment targets must be simple variables"),
            }
        }
        if vars.len() != rhs.len() {
            return self.err(format!("{} targets but {} values", vars.len(), rhs.len()));
        }
        Ok(Stmt::ParAssign(vars, rhs))
    }

    fn local_name(&mut self) -> PResult<String> {
        if self.eat_kw("this") {
            Ok(THIS.to_string())
        } else {
            self.ident()
        }
    }

    fn local_var(&self, name: &str, init: &Expr) -> Var {
        if name == THIS {
            return Var::this();
        }
        match self.env.get(name) {
            Some(v) if v.kind == VarKind::Normal && v.ty.is_basic() && v.ty.value_type().compatible(init.ty()) => {
                v.clone()
            }
            _ => Var::normal(name, Type::Basic(init.ty())),
        }
    }

    fn args(&mut self) -> PResult<Vec<Expr>> {
        self.sym("(")?;
        let out = if self.is_sym(")") { Vec::new() } else { self.expr_list()? };
        self.sym(")")?;
        Ok(out)
    }

    fn expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut out = vec![self.expr()?];
        while self.eat_sym(",") {
            out.push(self.expr()?);
        }
        Ok(out)
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantified();
        }
        let lhs = self.or()?;
        if !self.no_arrow && self.eat_sym("->") {
            let rhs = self.expr()?;
            return Ok(Expr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn quantified(&mut self) -> PResult<Expr> {
        let q = if self.eat_kw("forall") { Quantifier::Forall } else { self.kw("exists").map(|_| Quantifier::Exists)? };
        let name = self.ident()?;
        self.sym(":")?;
        let ty = self.basic_type()?;
        self.sym(":")?;
        let v = Var::normal(&name, Type::Basic(ty));
        self.scopes.push(vec![v.clone()]);
        let body = self.expr();
        self.scopes.pop();
        Ok(Expr::Quant(q, v, Box::new(body?)))
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut e = self.and()?;
        while self.eat_kw("or") {
            let r = self.and()?;
            e = Expr::or(e, r);
        }
        Ok(e)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut e = self.not()?;
        while self.eat_kw("and") {
            let r = self.not()?;
            e = Expr::and(e, r);
        }
        Ok(e)
    }

    fn not(&mut self) -> PResult<Expr> {
        if self.eat_kw("not") {
            return Ok(Expr::not(self.not()?));
        }
        if self.is_kw("forall") || self.is_kw("exists") {
            return self.quantified();
        }
        self.comparison()
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let l = self.additive()?;
        let op = match self.peek() {
            Tok::Sym("=") => BinOp::Eq,
            Tok::Sym("/=") => BinOp::Ne,
            Tok::Sym("<") => BinOp::Lt,
            Tok::Sym("<=") => BinOp::Le,
            Tok::Sym(">") => BinOp::Gt,
            Tok::Sym(">=") => BinOp::Ge,
            _ => return Ok(l),
        };
        self.bump();
        let r = self.additive()?;
        Ok(Expr::bin(op, l, r))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut e = self.multiplicative()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Sub
            } else {
                return Ok(e);
            };
            self.bump();
            let r = self.multiplicative()?;
            e = Expr::bin(op, e, r);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        while self.eat_sym("*") {
            let r = self.unary()?;
            e = Expr::bin(BinOp::Mul, e, r);
        }
        Ok(e)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat_sym("-") {
            if let Tok::Int(n) = self.peek().clone() {
                self.bump();
                return Ok(Expr::Int(-n));
            }
            let e = self.unary()?;
            return Ok(Expr::bin(BinOp::Sub, Expr::int(0), e));
        }
        self.postfix(false)
    }

    /// Primary followed by navigations. In statement position a `.m(`
    /// suffix is left for the method call.
    fn postfix(&mut self, stmt_pos: bool) -> PResult<Expr> {
        let mut e = self.primary()?;
        while self.is_sym(".") {
            if stmt_pos && *self.peek_at(2) == Tok::Sym("(") {
                break;
            }
            self.bump();
            let name = self.ident()?;
            let field = match self.env.get(&name) {
                Some(v) if v.is_instance() => v.clone(),
                _ => return self.err(format!("`{name}` is not an instance variable")),
            };
            let ix = if self.is_sym("[") { self.subscripts()? } else { Vec::new() };
            e = Expr::Nav(Box::new(e), field, ix);
        }
        Ok(e)
    }

    fn subscripts(&mut self) -> PResult<Vec<Expr>> {
        self.sym("[")?;
        let saved = self.no_arrow;
        self.no_arrow = false;
        let ix = self.expr_list();
        self.no_arrow = saved;
        let ix = ix?;
        self.sym("]")?;
        Ok(ix)
    }

    fn resolve(&self, name: &str) -> Option<Var> {
        for scope in self.scopes.iter().rev() {
            if let Some(v) = scope.iter().rev().find(|v| &*v.name == name) {
                return Some(v.clone());
            }
        }
        self.env.get(name).cloned()
    }

    fn primary(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Int(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let saved = self.no_arrow;
                self.no_arrow = false;
                let r = self.paren_tail();
                self.no_arrow = saved;
                r
            }
            Tok::Ident(s) => match s.as_str() {
                "true" => {
                    self.bump();
                    Ok(Expr::Bool(true))
                }
                "false" => {
                    self.bump();
                    Ok(Expr::Bool(false))
                }
                "null" => {
                    self.bump();
                    Ok(Expr::Null)
                }
                "this" => {
                    self.bump();
                    Ok(Expr::this())
                }
                "min" | "max" => {
                    self.bump();
                    let op = if s == "min" { BinOp::Min } else { BinOp::Max };
                    self.sym("(")?;
                    let saved = self.no_arrow;
                    self.no_arrow = false;
                    let parts = self.expr_list();
                    self.no_arrow = saved;
                    let parts = parts?;
                    self.sym(")")?;
                    if parts.len() != 2 {
                        return self.err(format!("`{s}` takes two arguments"));
                    }
                    let mut it = parts.into_iter();
                    Ok(Expr::bin(op, it.next().expect("two"), it.next().expect("two")))
                }
                _ if is_keyword(&s) => self.expected("an expression"),
                _ => {
                    let Some(v) = self.resolve(&s) else { return self.err(format!("undeclared variable `{s}`")) };
                    self.bump();
                    if self.is_sym("[") {
                        let ix = self.subscripts()?;
                        Ok(Expr::Index(v, ix))
                    } else {
                        Ok(Expr::Var(v))
                    }
                }
            },
            _ => self.expected("an expression"),
        }
    }

    /// After `(`: parenthesized expression or `(B ? t : e)`.
    fn paren_tail(&mut self) -> PResult<Expr> {
        let e = self.expr()?;
        if self.eat_sym("?") {
            let t = self.expr()?;
            self.sym(":")?;
            let f = self.expr()?;
            self.sym(")")?;
            return Ok(Expr::cond(e, t, f));
        }
        self.sym(")")?;
        Ok(e)
    }

    // ---- formulas and proofs ----

    fn braced_assertion(&mut self) -> PResult<Expr> {
        self.sym("{")?;
        let saved = self.no_arrow;
        self.no_arrow = false;
        let e = self.expr();
        self.no_arrow = saved;
        let e = e?;
        self.sym("}")?;
        Ok(e)
    }

    fn formula(&mut self) -> PResult<Formula> {
        let pre = self.braced_assertion()?;
        let stmt = self.stmts()?;
        let post = self.braced_assertion()?;
        Ok(Formula { pre, stmt, post })
    }

    fn rule_name(&mut self) -> PResult<String> {
        let mut name = match self.bump() {
            Tok::Ident(s) => s,
            _ => {
                self.pos -= 1;
                return self.expected("a rule name");
            }
        };
        while self.is_sym("-") && matches!(self.peek_at(1), Tok::Ident(_)) {
            self.bump();
            if let Tok::Ident(s) = self.bump() {
                name.push('-');
                name.push_str(&s);
            }
        }
        Ok(name)
    }

    fn derivation(&mut self) -> PResult<Derivation> {
        self.sym("(")?;
        if self.eat_kw("assume") {
            let i = match self.bump() {
                Tok::Int(n) => usize::try_from(n).ok().filter(|i| *i >= 1),
                _ => None,
            };
            let Some(i) = i else {
                self.pos -= 1;
                return self.expected("a positive assumption index");
            };
            let conclusion = if self.is_sym("{") {
                self.formula()?
            } else {
                match self.assumptions.last().and_then(|a| a.get(i - 1)) {
                    Some(f) => f.clone(),
                    None => return self.err(format!("no assumption {i} in scope")),
                }
            };
            self.sym(")")?;
            return Ok(Derivation::leaf(Rule::Assume(i), conclusion));
        }
        self.kw_loose("rule")?;
        let name = self.rule_name()?;
        let Some(rule) = Rule::from_name(&name) else { return self.err(format!("unknown rule `{name}`")) };
        self.sym("(")?;
        self.kw_loose("conclusion")?;
        let conclusion = self.formula()?;
        self.sym(")")?;
        let mut side = Side::None;
        if self.is_sym("(") && matches!(self.peek_at(1), Tok::Ident(s) if s == "side") {
            self.bump();
            self.bump();
            side = self.side()?;
            self.sym(")")?;
        }
        let pushed = if let Side::Assumptions(a) = &side {
            self.assumptions.push(a.clone());
            true
        } else {
            false
        };
        let mut premises = Vec::new();
        let mut result = Ok(());
        while self.is_sym("(") {
            match self.derivation() {
                Ok(d) => premises.push(d),
                Err(e) => {
                    result = Err(e);
                    break;
                }
            }
        }
        if pushed {
            self.assumptions.pop();
        }
        result?;
        self.sym(")")?;
        Ok(Derivation { rule, conclusion, side, premises })
    }

    fn kw_loose(&mut self, k: &str) -> PResult<()> {
        match self.peek() {
            Tok::Ident(s) if s == k => {
                self.bump();
                Ok(())
            }
            _ => self.expected(&format!("`{k}`")),
        }
    }

    fn side(&mut self) -> PResult<Side> {
        self.sym("(")?;
        let side = if matches!(self.peek(), Tok::Ident(s) if s == "assumptions") {
            self.bump();
            let mut fs = Vec::new();
            while self.is_sym("{") {
                fs.push(self.formula()?);
            }
            Side::Assumptions(fs)
        } else if matches!(self.peek(), Tok::Ident(s) if s == "subst") {
            self.bump();
            let mut vars = Vec::new();
            let mut exprs = Vec::new();
            loop {
                let name = self.ident()?;
                let Some(v) = self.resolve(&name) else { return self.err(format!("undeclared variable `{name}`")) };
                self.sym(":=")?;
                vars.push(v);
                exprs.push(self.expr()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            Side::Subst(vars, exprs)
        } else {
            return self.expected("`assumptions` or `subst`");
        };
        self.sym(")")?;
        Ok(side)
    }

    // ---- state literals ----

    fn value(&mut self) -> PResult<Value> {
        match self.bump() {
            Tok::Int(n) => Ok(Value::Int(n)),
            Tok::Sym("-") => match self.bump() {
                Tok::Int(n) => Ok(Value::Int(-n)),
                _ => {
                    self.pos -= 1;
                    self.expected("an integer")
                }
            },
            Tok::Ident(s) if s == "true" => Ok(Value::Bool(true)),
            Tok::Ident(s) if s == "false" => Ok(Value::Bool(false)),
            Tok::Ident(s) if s == "null" => Ok(Value::null()),
            Tok::Ident(s) => match object_id(&s) {
                Some(o) => Ok(Value::Obj(o)),
                None => {
                    self.pos -= 1;
                    self.expected("a value")
                }
            },
            _ => {
                self.pos -= 1;
                self.expected("a value")
            }
        }
    }

    fn value_list(&mut self) -> PResult<Vec<Value>> {
        self.sym("[")?;
        let mut out = vec![self.value()?];
        while self.eat_sym(",") {
            out.push(self.value()?);
        }
        self.sym("]")?;
        Ok(out)
    }

    fn state(&mut self) -> PResult<State> {
        self.kw_loose("state")?;
        self.sym("{")?;
        let mut s = State::new();
        while !self.is_sym("}") {
            let first = match self.bump() {
                Tok::Ident(x) => x,
                _ => {
                    self.pos -= 1;
                    return self.expected("a variable or object");
                }
            };
            let owner = if self.is_sym(".") {
                let o = if first == "null" { Some(ObjRef::Null) } else { object_id(&first) };
                let Some(o) = o else { return self.err(format!("`{first}` is not an object")) };
                self.bump();
                Some(o)
            } else {
                None
            };
            let name = if owner.is_some() { self.ident()? } else { first };
            let ix = if self.is_sym("[") { self.value_list()? } else { Vec::new() };
            self.sym("=")?;
            let v = self.value()?;
            match owner {
                Some(o) => s.set_field(o, &name, ix, v),
                None => s.set_cell(&name, ix, v),
            }
            self.sym(";")?;
        }
        self.sym("}")?;
        Ok(s)
    }
}

/// `o<n>` object identities.
fn object_id(s: &str) -> Option<ObjRef> {
    let digits = s.strip_prefix('o')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse::<u32>().ok().map(ObjRef::Oid)
}

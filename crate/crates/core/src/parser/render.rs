use std::fmt::{self, Write};

use thiserror::Error;

use crate::proofs::{Derivation, Formula, Rule, Side};
use crate::syntax::*;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("restore statements exist only at run time and have no concrete syntax")]
    Restore,
    #[error("the empty statement has no concrete syntax")]
    Empty,
}

// Binding strength; a subexpression is parenthesized when it binds less
// tightly than its position requires.
const QUANT: u8 = 0;
const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;
const CMP: u8 = 5;
const ADD: u8 = 6;
const MUL: u8 = 7;
const ATOM: u8 = 8;

fn basic_name(t: BasicType) -> &'static str {
    match t {
        BasicType::Int => "int",
        BasicType::Bool => "bool",
        BasicType::Object => "object",
        BasicType::Nat => "nat",
    }
}

pub fn render_type(t: &Type) -> String {
    match t {
        Type::Basic(b) => basic_name(*b).to_string(),
        Type::Array { args, value } => {
            let args: Vec<&str> = args.iter().map(|a| basic_name(*a)).collect();
            format!("{} -> {}", args.join(" * "), basic_name(*value))
        }
    }
}

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Quant(..) => QUANT,
        Expr::Bin(op, ..) => match op {
            BinOp::Implies => IMPLIES,
            BinOp::Or => OR,
            BinOp::And => AND,
            BinOp::Add | BinOp::Sub => ADD,
            BinOp::Mul => MUL,
            BinOp::Min | BinOp::Max => ATOM,
            _ => CMP,
        },
        Expr::Not(_) => NOT,
        _ => ATOM,
    }
}

fn write_list(out: &mut String, items: &[Expr]) {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, e, QUANT);
    }
}

fn write_expr(out: &mut String, e: &Expr, min: u8) {
    let lv = level(e);
    let paren = lv < min;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Expr::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Expr::Null => out.push_str("null"),
        Expr::Var(v) => out.push_str(&v.name),
        Expr::Index(v, ix) => {
            out.push_str(&v.name);
            out.push('[');
            write_list(out, ix);
            out.push(']');
        }
        Expr::Nav(b, v, ix) => {
            // A negative literal would read as a subtraction.
            let base_min = if matches!(**b, Expr::Int(_)) { u8::MAX } else { ATOM };
            write_expr(out, b, base_min);
            out.push('.');
            out.push_str(&v.name);
            if !ix.is_empty() {
                out.push('[');
                write_list(out, ix);
                out.push(']');
            }
        }
        Expr::Cond(c, t, f) => {
            out.push('(');
            write_expr(out, c, QUANT);
            out.push_str(" ? ");
            write_expr(out, t, QUANT);
            out.push_str(" : ");
            write_expr(out, f, QUANT);
            out.push(')');
        }
        Expr::Not(x) => {
            out.push_str("not ");
            write_expr(out, x, NOT);
        }
        Expr::Bin(op, l, r) => match op {
            BinOp::Min | BinOp::Max => {
                out.push_str(op.symbol());
                out.push('(');
                write_expr(out, l, QUANT);
                out.push_str(", ");
                write_expr(out, r, QUANT);
                out.push(')');
            }
            BinOp::Implies => {
                write_expr(out, l, OR);
                out.push_str(" -> ");
                write_expr(out, r, IMPLIES);
            }
            _ => {
                let (lmin, rmin) = match lv {
                    CMP => (ADD, ADD),
                    l => (l, l + 1),
                };
                write_expr(out, l, lmin);
                let _ = write!(out, " {} ", op.symbol());
                write_expr(out, r, rmin);
            }
        },
        Expr::Quant(q, v, body) => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            let _ = write!(out, "{kw} {}: {}: ", v.name, basic_name(v.ty.value_type()));
            write_expr(out, body, QUANT);
        }
    }
    if paren {
        out.push(')');
    }
}

pub fn render_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, QUANT);
    out
}

/// Guards stop at a top-level `->`, so implications and quantifiers are
/// parenthesized there.
fn render_guard(out: &mut String, e: &Expr) {
    write_expr(out, e, OR);
}

fn write_stmt(out: &mut String, s: &Stmt, lenient: bool) -> Result<(), RenderError> {
    match s {
        Stmt::Skip => out.push_str("skip"),
        Stmt::Empty => {
            if !lenient {
                return Err(RenderError::Empty);
            }
            out.push_str("<done>");
        }
        Stmt::Assign(t, e) => {
            write_expr(out, &t.to_expr(), ATOM);
            out.push_str(" := ");
            write_expr(out, e, QUANT);
        }
        Stmt::ParAssign(vs, es) => {
            let names: Vec<&str> = vs.iter().map(|v| &*v.name).collect();
            out.push_str(&names.join(", "));
            out.push_str(" := ");
            write_list(out, es);
        }
        Stmt::Seq(..) => {
            for (i, part) in s.components().into_iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                write_stmt(out, part, lenient)?;
            }
        }
        Stmt::If(g, a, b) => {
            out.push_str("if ");
            render_guard(out, g);
            if **b == Stmt::Skip {
                out.push_str(" -> ");
                write_stmt(out, a, lenient)?;
                out.push_str(" fi'");
            } else {
                out.push_str(" then ");
                write_stmt(out, a, lenient)?;
                out.push_str(" else ");
                write_stmt(out, b, lenient)?;
                out.push_str(" fi");
            }
        }
        Stmt::FailIf(g, a) => {
            out.push_str("if ");
            render_guard(out, g);
            out.push_str(" -> ");
            write_stmt(out, a, lenient)?;
            out.push_str(" fi");
        }
        Stmt::While(g, a) => {
            out.push_str("while ");
            render_guard(out, g);
            out.push_str(" do ");
            write_stmt(out, a, lenient)?;
            out.push_str(" od");
        }
        Stmt::Block { locals, inits, body } => {
            let names: Vec<&str> = locals.iter().map(|v| &*v.name).collect();
            let _ = write!(out, "begin local {} := ", names.join(", "));
            write_list(out, inits);
            out.push_str("; ");
            write_stmt(out, body, lenient)?;
            out.push_str(" end");
        }
        Stmt::MethodCall(callee, m, args) => {
            let base_min = if matches!(callee, Expr::Int(_)) { u8::MAX } else { ATOM };
            write_expr(out, callee, base_min);
            let _ = write!(out, ".{m}(");
            write_list(out, args);
            out.push(')');
        }
        Stmt::ProcCall(p, args) => {
            let _ = write!(out, "{p}(");
            write_list(out, args);
            out.push(')');
        }
        Stmt::Restore(vs, values) => {
            if !lenient {
                return Err(RenderError::Restore);
            }
            let names: Vec<&str> = vs.iter().map(|v| &*v.name).collect();
            let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
            let _ = write!(out, "<restore {} := {}>", names.join(", "), vals.join(", "));
        }
    }
    Ok(())
}

/// Single-line concrete syntax; fails on run-time-only nodes.
pub fn render_stmt(s: &Stmt) -> Result<String, RenderError> {
    let mut out = String::new();
    write_stmt(&mut out, s, false)?;
    Ok(out)
}

fn formals_text(d: &Decl, typed: bool) -> String {
    let parts: Vec<String> = d
        .formals
        .iter()
        .map(|f| if typed { format!("{}: {}", f.name, render_type(&f.ty)) } else { f.name.to_string() })
        .collect();
    parts.join(", ")
}

/// Compact `name(formals) :: body` form.
pub fn render_decl(d: &Decl) -> Result<String, RenderError> {
    Ok(format!("{}({}) :: {}", d.name, formals_text(d, false), render_stmt(&d.body)?))
}

pub fn render_program(p: &Program) -> Result<String, RenderError> {
    let mut out = String::new();
    for v in &p.globals {
        let kw = if v.is_instance() { "ivar" } else { "var" };
        let _ = writeln!(out, "{kw} {}: {};", v.name, render_type(&v.ty));
    }
    let kw = if p.flavor == Flavor::Recursive { "proc" } else { "method" };
    for d in &p.decls {
        let _ = writeln!(out, "{kw} {}({}) {{ {} }}", d.name, formals_text(d, true), render_stmt(&d.body)?);
    }
    out.push_str(&render_stmt(&p.main)?);
    out.push('\n');
    Ok(out)
}

pub fn render_formula(f: &Formula) -> Result<String, RenderError> {
    Ok(format!("{{{}}} {} {{{}}}", render_expr(&f.pre), render_stmt(&f.stmt)?, render_expr(&f.post)))
}

fn write_proof(out: &mut String, d: &Derivation, indent: usize) -> Result<(), RenderError> {
    let pad = "  ".repeat(indent);
    if let Rule::Assume(i) = d.rule {
        let _ = writeln!(out, "{pad}(assume {i} {})", render_formula(&d.conclusion)?);
        return Ok(());
    }
    let _ = writeln!(out, "{pad}(rule {}", d.rule.name());
    let _ = writeln!(out, "{pad}  (conclusion {})", render_formula(&d.conclusion)?);
    match &d.side {
        Side::None => {}
        Side::Assumptions(fs) => {
            let _ = writeln!(out, "{pad}  (side (assumptions");
            for f in fs {
                let _ = writeln!(out, "{pad}    {}", render_formula(f)?);
            }
            let _ = writeln!(out, "{pad}  ))");
        }
        Side::Subst(vs, es) => {
            let parts: Vec<String> =
                vs.iter().zip(es).map(|(v, e)| format!("{} := {}", v.name, render_expr(e))).collect();
            let _ = writeln!(out, "{pad}  (side (subst {}))", parts.join(", "));
        }
    }
    for p in &d.premises {
        write_proof(out, p, indent + 1)?;
    }
    let _ = writeln!(out, "{pad})");
    Ok(())
}

pub fn render_proof(d: &Derivation) -> Result<String, RenderError> {
    let mut out = String::new();
    write_proof(&mut out, d, 0)?;
    Ok(out)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(self))
    }
}

impl fmt::Display for Stmt {
    /// Like [`render_stmt`] but shows run-time-only nodes in angle brackets.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = write_stmt(&mut out, self, true);
        f.write_str(&out)
    }
}

impl fmt::Display for Decl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}) :: {}", self.name, formals_text(self, false), self.body)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}} {} {{{}}}", self.pre, self.stmt, self.post)
    }
}

//! Concrete syntax: programs, assertions, correctness formulas, proof
//! files and state literals, with a deterministic renderer whose output
//! parses back to the same tree.

mod lexer;
mod parse;
mod render;

use std::fmt;

use thiserror::Error;

use crate::proofs::Formula;
use crate::syntax::{Expr, Program, Stmt, Var};

pub use parse::{parse_expr, parse_formula, parse_program, parse_proof, parse_state, parse_stmt, ProofFile};
pub use render::{render_decl, render_expr, render_formula, render_program, render_proof, render_stmt, render_type, RenderError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub struct ParseError {
    pub origin: String,
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.origin, self.line, self.col, self.message)
    }
}

/// Source text with the name it came from.
#[derive(Clone, Debug)]
pub struct SourceText<'a> {
    pub text: &'a str,
    pub origin: &'a str,
}

impl<'a> SourceText<'a> {
    pub fn inline(text: &'a str) -> Self {
        SourceText { text, origin: "<inline>" }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhraseKind {
    Program,
    Assertion,
    Formula,
    Proof,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Phrase {
    Program(Program),
    Assertion(Expr),
    Formula(Formula),
    Proof(ProofFile),
}

/// Parses any phrase kind. Assertions, formulas and proofs are resolved
/// against the declarations of `context` (an empty kernel program when
/// absent).
pub fn parse(src: &SourceText<'_>, kind: PhraseKind, context: Option<&Program>) -> Result<Phrase, ParseError> {
    let empty = Program { flavor: crate::syntax::Flavor::Kernel, globals: vec![], decls: vec![], main: Stmt::Skip };
    let ctx = context.unwrap_or(&empty);
    Ok(match kind {
        PhraseKind::Program => Phrase::Program(parse_program(src.text, src.origin)?),
        PhraseKind::Assertion => Phrase::Assertion(parse_expr(src.text, src.origin, ctx)?),
        PhraseKind::Formula => Phrase::Formula(parse_formula(src.text, src.origin, ctx)?),
        PhraseKind::Proof => Phrase::Proof(parse_proof(src.text, src.origin, ctx)?),
    })
}

/// Program extended with auxiliary variables declared by a proof file.
pub fn with_aux(program: &Program, aux: &[Var]) -> Program {
    let mut p = program.clone();
    for v in aux {
        if !p.globals.iter().any(|g| g.name == v.name) {
            p.globals.push(v.clone());
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{BasicType, Decl, Flavor, Target, Type};

    const FIND: &str = "var z: object; ivar next: object;\n\
        method find(u: object) { if u /= this -> next.find(u) fi' }\n\
        this.find(z)";

    #[test]
    fn find_declaration_uses_guarded_skip() {
        let p = parse_program(FIND, "find.oo").unwrap();
        assert_eq!(p.flavor, Flavor::ObjectOriented);
        let u = Var::normal("u", Type::Basic(BasicType::Object));
        let next = Var::instance("next", Type::Basic(BasicType::Object));
        let body = Stmt::if_then(
            Expr::ne(Expr::var(&u), Expr::this()),
            Stmt::MethodCall(Expr::var(&next), "find".into(), vec![Expr::var(&u)]),
        );
        assert_eq!(p.decls, vec![Decl { name: "find".into(), formals: vec![u], body }]);
    }

    #[test]
    fn skip_program() {
        let p = parse_program("skip", "<inline>").unwrap();
        assert_eq!(p.main, Stmt::Skip);
        assert_eq!(p.flavor, Flavor::Kernel);
        assert_eq!(render_stmt(&p.main).unwrap(), "skip");
    }

    #[test]
    fn formula_with_method_call() {
        let p = parse_program("method m() { skip } skip", "<inline>").unwrap();
        let f = parse_formula("{true} null.m() {false}", "<inline>", &p).unwrap();
        assert_eq!(f.pre, Expr::Bool(true));
        assert_eq!(f.stmt, Stmt::MethodCall(Expr::Null, "m".into(), vec![]));
        assert_eq!(f.post, Expr::Bool(false));
    }

    #[test]
    fn program_round_trip() {
        let p = parse_program(FIND, "find.oo").unwrap();
        let text = render_program(&p).unwrap();
        assert_eq!(parse_program(&text, "<rendered>").unwrap(), p);
        assert_eq!(render_program(&parse_program(&text, "<rendered>").unwrap()).unwrap(), text);
    }

    #[test]
    fn restore_is_not_renderable() {
        let x = Var::normal("x", Type::Basic(BasicType::Int));
        let s = Stmt::Restore(vec![x], vec![crate::state::Value::int(1)]);
        assert_eq!(render_stmt(&s), Err(RenderError::Restore));
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_program("x := 1", "bad.krn").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        assert!(e.message.contains("undeclared"), "{e}");
        let e = parse_program("var x: int;\nx := ", "bad.krn").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("expected an expression"), "{e}");
    }

    #[test]
    fn expression_precedence() {
        let p = parse_program("var x, y: int; var b: bool; skip", "<inline>").unwrap();
        for src in [
            "x + y * 2 = 7 and not b or b -> x < y",
            "(x - (y - 1)) * -3 >= min(x, y)",
            "forall i: int: (i > 0 ? x : y) = x",
            "(forall i: int: i = i) and b",
            "0 - x = -1",
        ] {
            let e = parse_expr(src, "<inline>", &p).unwrap();
            let again = parse_expr(&render_expr(&e), "<inline>", &p).unwrap();
            assert_eq!(again, e, "{src} rendered as {}", render_expr(&e));
        }
    }

    #[test]
    fn guards_stop_at_arrow() {
        let p = parse_program("var b, c: bool; if b -> c := true fi", "<inline>").unwrap();
        assert!(matches!(p.main, Stmt::FailIf(..)));
        let p = parse_program("var b, c: bool; if (b -> c) -> skip fi", "<inline>").unwrap();
        let Stmt::FailIf(g, _) = &p.main else { panic!() };
        assert!(matches!(g, Expr::Bin(crate::syntax::BinOp::Implies, ..)));
    }

    #[test]
    fn state_literal() {
        let s = crate::parser::parse_state("state { this=o1; x=5; o1.next=o2; a[1,2]=7; null.x=-1; }", "<inline>")
            .unwrap();
        assert_eq!(s.this(), crate::state::ObjRef::Oid(1));
        let text = s.to_string();
        assert_eq!(crate::parser::parse_state(&text, "<inline>").unwrap(), s);
    }

    #[test]
    fn block_locals_take_initializer_types() {
        let p = parse_program("var y: int; begin local x := 0; y := x end", "<inline>").unwrap();
        let Stmt::Block { locals, .. } = &p.main else { panic!() };
        assert_eq!(locals[0].ty, Type::Basic(BasicType::Int));
        let Stmt::Block { body, .. } = &p.main else { panic!() };
        assert!(matches!(&**body, Stmt::Assign(Target { .. }, Expr::Var(_))));
    }
}

use thiserror::Error;

use super::check::{check, CheckOptions, Status};
use super::{Derivation, Formula, Rule, Side, System};
use crate::assertions::substitute_parallel;
use crate::syntax::{Expr, Program, Quantifier, Stmt};
use crate::transform::{transform_expr, transform_formula, transform_program, TransformError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("{0} is not an object-oriented proof system")]
    WrongSystem(System),
    #[error("source derivation is not accepted: {0}")]
    NotAccepted(String),
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error("cannot translate: {0}")]
    Shape(String),
}

/// A derivation about the transformed program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translation {
    pub derivation: Derivation,
    pub system: System,
    pub program: Program,
}

struct Translator {
    strong: bool,
}

fn node(rule: Rule, pre: Expr, stmt: Stmt, post: Expr, premises: Vec<Derivation>) -> Derivation {
    Derivation::node(rule, Formula::new(pre, stmt, post), premises)
}

/// Weakens an arbitrary derivation's precondition to `pre`.
fn conseq(pre: Expr, inner: Derivation) -> Derivation {
    let Formula { stmt, post, .. } = inner.conclusion.clone();
    node(Rule::Conseq, pre, stmt, post, vec![inner])
}

/// From a derivation of `{p} if B -> S fi {q}` without the second failure
/// rule, one of `{p and B} S {q}`.
fn normal_form(d: &Derivation, guard: &Expr) -> Result<Derivation, TranslateError> {
    let Formula { pre, stmt, post } = &d.conclusion;
    let Stmt::FailIf(_, body) = stmt else { return Err(TranslateError::Shape("expected a failure statement".into())) };
    let body = (**body).clone();
    let target = Expr::and(pre.clone(), guard.clone());
    let sub = |i: usize| normal_form(&d.premises[i], guard);
    Ok(match d.rule {
        Rule::FailI => d.premises[0].clone(),
        Rule::Conseq => node(Rule::Conseq, target, body, post.clone(), vec![sub(0)?]),
        Rule::Disj => {
            let (a, b) = (sub(0)?, sub(1)?);
            let pre = Expr::or(a.conclusion.pre.clone(), b.conclusion.pre.clone());
            conseq(target, node(Rule::Disj, pre, body, post.clone(), vec![a, b]))
        }
        Rule::Conj => {
            let (a, b) = (sub(0)?, sub(1)?);
            let pre = Expr::and(a.conclusion.pre.clone(), b.conclusion.pre.clone());
            conseq(target, node(Rule::Conj, pre, body, post.clone(), vec![a, b]))
        }
        Rule::ExistsIntro => {
            let Expr::Quant(Quantifier::Exists, x, _) = pre else { unreachable!("checked source") };
            let a = sub(0)?;
            let pre = Expr::Quant(Quantifier::Exists, x.clone(), Box::new(a.conclusion.pre.clone()));
            conseq(target, node(Rule::ExistsIntro, pre, body, post.clone(), vec![a]))
        }
        Rule::Invariance => {
            let Expr::Bin(_, p, _) = pre else { unreachable!("checked source") };
            let a = sub(0)?;
            let inv_pre = Expr::and((**p).clone(), a.conclusion.pre.clone());
            conseq(target, node(Rule::Invariance, inv_pre, body, post.clone(), vec![a]))
        }
        Rule::Subst => {
            let Side::Subst(zs, ts) = &d.side else { unreachable!("checked source") };
            let a = sub(0)?;
            let s = |e: &Expr| substitute_parallel(e, zs, ts).map_err(|e| TranslateError::Shape(e.to_string()));
            let mut inner = node(Rule::Subst, s(&a.conclusion.pre)?, body, s(&a.conclusion.post)?, vec![a]);
            inner.side = d.side.clone();
            conseq(target, inner)
        }
        r => return Err(TranslateError::Shape(format!("{r} cannot conclude a failure statement in a partial proof"))),
    })
}

impl Translator {
    fn assumption_image(f: &Formula) -> Result<Formula, TranslateError> {
        let Stmt::MethodCall(s, m, args) = &f.stmt else {
            return Err(TranslateError::Shape("assumption is not a method call".into()));
        };
        let mut actuals = vec![transform_expr(s)];
        actuals.extend(args.iter().map(transform_expr));
        Ok(Formula::new(transform_expr(&f.pre), Stmt::ProcCall(m.clone(), actuals), transform_expr(&f.post)))
    }

    fn tr(&self, d: &Derivation) -> Result<Derivation, TranslateError> {
        let concl = transform_formula(&d.conclusion);
        let premises = || d.premises.iter().map(|p| self.tr(p)).collect::<Result<Vec<_>, _>>();
        Ok(match d.rule {
            Rule::Assume(i) => {
                let assumed = Self::assumption_image(&d.conclusion)?;
                let leaf = Derivation::leaf(Rule::Assume(i), assumed.clone());
                let Stmt::FailIf(guard, _) = &concl.stmt else { unreachable!("method calls become guarded calls") };
                let inner = if self.strong {
                    leaf
                } else {
                    conseq(Expr::and(assumed.pre.clone(), guard.clone()), leaf)
                };
                let rule = if self.strong { Rule::FailII } else { Rule::FailI };
                Derivation::node(rule, concl, vec![inner])
            }
            Rule::Weaken => {
                let inner = self.tr(&d.premises[0])?;
                let Stmt::FailIf(guard, call) = &concl.stmt else { unreachable!("method calls become guarded calls") };
                let nf = normal_form(&inner, guard)?;
                let strengthened = Expr::and(concl.pre.clone(), guard.clone());
                let c = node(Rule::Conseq, strengthened, (**call).clone(), concl.post.clone(), vec![nf]);
                Derivation::node(Rule::FailI, concl, vec![c])
            }
            Rule::AssignInst => Derivation::node(Rule::Assign, concl, vec![]),
            Rule::RecI | Rule::RecII => {
                let Side::Assumptions(a) = &d.side else { unreachable!("checked source") };
                let a = a.iter().map(Self::assumption_image).collect::<Result<Vec<_>, _>>()?;
                Derivation { rule: Rule::RecIII, conclusion: concl, side: Side::Assumptions(a), premises: premises()? }
            }
            Rule::RecIII => return Err(TranslateError::Shape("procedure recursion in an object-oriented proof".into())),
            rule => {
                let side = match &d.side {
                    Side::Subst(zs, ts) => Side::Subst(zs.clone(), ts.iter().map(transform_expr).collect()),
                    s => s.clone(),
                };
                Derivation { rule, conclusion: concl, side, premises: premises()? }
            }
        })
    }
}

/// Rebuilds an accepted derivation about an object-oriented program as a
/// derivation about its transformed recursive program.
pub fn translate_proof(
    d: &Derivation,
    system: System,
    program: &Program,
    opts: &CheckOptions,
) -> Result<Translation, TranslateError> {
    let target = system.translated().ok_or(TranslateError::WrongSystem(system))?;
    if let Status::Rejected(why) = check(d, system, program, opts).status {
        return Err(TranslateError::NotAccepted(why));
    }
    let image = transform_program(program)?;
    let derivation = Translator { strong: system.is_strong() }.tr(d)?;
    Ok(Translation { derivation, system: target, program: image.program })
}

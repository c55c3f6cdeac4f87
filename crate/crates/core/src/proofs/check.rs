use std::fmt;

use rayon::prelude::*;

use super::discharge::{discharge_assertion, Discharge, Obligation, ENUMERATION_CAP};
use super::{Derivation, Formula, Rule, Side, System};
use crate::assertions::{simplify, substitute, substitute_parallel, Universe};
use crate::syntax::{
    change_decls, change_stmt, free_vars, typecheck_formula, var_decls, var_expr, var_stmt, Expr, Flavor, Program,
    Quantifier, Stmt, Target,
};

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub universe: Universe,
    pub cap: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { universe: Universe::default(), cap: ENUMERATION_CAP }
    }
}

impl CheckOptions {
    pub fn with_universe(universe: Universe) -> Self {
        CheckOptions { universe, cap: ENUMERATION_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Accepted,
    Rejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObligationReport {
    /// Position of the rule instance, e.g. `root.0.1 CONSEQ`.
    pub origin: String,
    pub obligation: Obligation,
    pub result: Discharge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    pub obligations: Vec<ObligationReport>,
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        self.status == Status::Accepted
    }

    pub fn all_valid(&self) -> bool {
        self.obligations.iter().all(|o| o.result == Discharge::Valid)
    }

    pub fn has_counterexample(&self) -> bool {
        self.obligations.iter().any(|o| matches!(o.result, Discharge::Counterexample(_)))
    }

    /// 0 accepted with every obligation valid, 2 rejected or refuted, 3
    /// accepted with undecided obligations.
    pub fn exit_code(&self) -> i32 {
        if !self.is_accepted() || self.has_counterexample() {
            2
        } else if self.all_valid() {
            0
        } else {
            3
        }
    }
}

impl fmt::Display for Verdict {
    /// Line-oriented report: one `origin<TAB>status` line per obligation,
    /// then the overall status.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.obligations {
            writeln!(f, "{}\t{}\t{}", o.origin, o.result, o.obligation)?;
        }
        match &self.status {
            Status::Accepted => writeln!(f, "verdict\taccepted"),
            Status::Rejected(why) => writeln!(f, "verdict\trejected: {why}"),
        }
    }
}

struct Checker<'a> {
    program: &'a Program,
    /// Assumption list of the enclosing recursion rule.
    assumptions: Option<&'a [Formula]>,
    obligations: Vec<(String, Obligation)>,
}

type Check = Result<(), String>;

fn fail<T>(origin: &str, msg: impl fmt::Display) -> Result<T, String> {
    Err(format!("{origin}: {msg}"))
}

/// Equality of assertions up to folding trivial alias conditionals.
fn same(a: &Expr, b: &Expr) -> bool {
    a == b || simplify(a) == simplify(b)
}

fn subst_target(p: &Expr, t: &Target, e: &Expr) -> Result<Expr, String> {
    let r = if t.indices.is_empty() && !t.var.is_instance() {
        substitute_parallel(p, std::slice::from_ref(&t.var), std::slice::from_ref(e))
    } else {
        substitute(p, t, e)
    };
    r.map_err(|err| err.to_string())
}

impl<'a> Checker<'a> {
    fn expect_premises(&self, d: &Derivation, n: usize, origin: &str) -> Check {
        if d.premises.len() != n {
            return fail(origin, format!("{} expects {n} premises, got {}", d.rule, d.premises.len()));
        }
        Ok(())
    }

    fn oblige(&mut self, origin: &str, ob: Obligation) {
        self.obligations.push((origin.to_string(), ob));
    }

    /// `p -> q`, skipped when both sides coincide.
    fn implication(&mut self, origin: &str, p: &Expr, q: &Expr) {
        if p != q {
            self.oblige(origin, Obligation::Implication(p.clone(), q.clone()));
        }
    }

    fn same_stmt(&self, a: &Stmt, b: &Stmt, origin: &str) -> Check {
        if a != b {
            return fail(origin, format!("statement mismatch: `{a}` vs `{b}`"));
        }
        Ok(())
    }

    fn same_assertion(&self, got: &Expr, want: &Expr, what: &str, origin: &str) -> Check {
        if !same(got, want) {
            return fail(origin, format!("{what} is `{got}`, expected `{want}`"));
        }
        Ok(())
    }

    fn check(&mut self, d: &'a Derivation, system: System, path: &str) -> Check {
        let origin = format!("{path} {}", d.rule);
        let Formula { pre, stmt, post } = &d.conclusion;
        let diags = typecheck_formula(pre, stmt, post, self.program);
        if let Some(diag) = diags.first() {
            return fail(&origin, format!("ill-typed formula: {diag}"));
        }
        if let Rule::Assume(i) = d.rule {
            let Some(a) = self.assumptions else {
                return fail(&origin, "assumption cited outside a recursion rule");
            };
            match a.get(i.wrapping_sub(1)) {
                Some(f) if *f == d.conclusion => return self.expect_premises(d, 0, &origin),
                Some(f) => return fail(&origin, format!("cites `{}` but assumption {i} is `{f}`", d.conclusion)),
                None => return fail(&origin, format!("no assumption {i} (list has {})", a.len())),
            }
        }
        if d.rule.is_recursion() && self.assumptions.is_some() {
            return fail(&origin, "recursion rules may not nest");
        }
        if !system.allows(d.rule) {
            return fail(&origin, format!("{} is not a rule of {system}", d.rule));
        }
        if !matches!(d.side, Side::None) && !matches!(d.rule, Rule::Subst | Rule::RecI | Rule::RecII | Rule::RecIII) {
            return fail(&origin, "unexpected side data");
        }
        let prem = |i: usize| &d.premises[i].conclusion;
        match d.rule {
            Rule::Skip => {
                self.expect_premises(d, 0, &origin)?;
                self.same_stmt(stmt, &Stmt::Skip, &origin)?;
                self.same_assertion(pre, post, "precondition", &origin)?;
            }
            Rule::Assign | Rule::AssignInst => {
                self.expect_premises(d, 0, &origin)?;
                let Stmt::Assign(t, e) = stmt else { return fail(&origin, "not an assignment") };
                if t.is_instance() != (d.rule == Rule::AssignInst) {
                    let kind = if t.is_instance() { "an instance" } else { "a normal" };
                    return fail(&origin, format!("{} does not apply to {kind} variable", d.rule));
                }
                let want = subst_target(post, t, e).map_err(|m| format!("{origin}: {m}"))?;
                self.same_assertion(pre, &want, "precondition", &origin)?;
            }
            Rule::ParAssign => {
                self.expect_premises(d, 0, &origin)?;
                let Stmt::ParAssign(vs, es) = stmt else { return fail(&origin, "not a parallel assignment") };
                let want = substitute_parallel(post, vs, es).map_err(|m| format!("{origin}: {m}"))?;
                self.same_assertion(pre, &want, "precondition", &origin)?;
            }
            Rule::Comp => {
                self.expect_premises(d, 2, &origin)?;
                self.same_stmt(stmt, &Stmt::seq(prem(0).stmt.clone(), prem(1).stmt.clone()), &origin)?;
                if matches!(prem(0).stmt, Stmt::Empty) || matches!(prem(1).stmt, Stmt::Empty) {
                    return fail(&origin, "empty component");
                }
                self.same_assertion(&prem(0).pre, pre, "first precondition", &origin)?;
                self.same_assertion(&prem(0).post, &prem(1).pre, "intermediate assertion", &origin)?;
                self.same_assertion(&prem(1).post, post, "second postcondition", &origin)?;
            }
            Rule::Cond => {
                self.expect_premises(d, 2, &origin)?;
                let Stmt::If(b, s1, s2) = stmt else { return fail(&origin, "not a conditional") };
                let yes = Formula::new(Expr::and(pre.clone(), b.clone()), (**s1).clone(), post.clone());
                let no = Formula::new(Expr::and(pre.clone(), Expr::not(b.clone())), (**s2).clone(), post.clone());
                self.same_formula(prem(0), &yes, &origin)?;
                self.same_formula(prem(1), &no, &origin)?;
            }
            Rule::Loop => {
                self.expect_premises(d, 1, &origin)?;
                let Stmt::While(b, body) = stmt else { return fail(&origin, "not a loop") };
                self.same_assertion(post, &Expr::and(pre.clone(), Expr::not(b.clone())), "postcondition", &origin)?;
                let inv = Formula::new(Expr::and(pre.clone(), b.clone()), (**body).clone(), pre.clone());
                self.same_formula(prem(0), &inv, &origin)?;
            }
            Rule::Conseq => {
                self.expect_premises(d, 1, &origin)?;
                self.same_stmt(&prem(0).stmt, stmt, &origin)?;
                let (p1, q1) = (prem(0).pre.clone(), prem(0).post.clone());
                self.implication(&format!("{origin} pre"), pre, &p1);
                self.implication(&format!("{origin} post"), &q1, post);
            }
            Rule::FailI | Rule::FailII => {
                self.expect_premises(d, 1, &origin)?;
                let Stmt::FailIf(b, body) = stmt else { return fail(&origin, "not a failure statement") };
                let premise_pre =
                    if d.rule == Rule::FailI { Expr::and(pre.clone(), b.clone()) } else { pre.clone() };
                self.same_formula(prem(0), &Formula::new(premise_pre, (**body).clone(), post.clone()), &origin)?;
                if d.rule == Rule::FailII {
                    self.implication(&origin, pre, b);
                }
            }
            Rule::Block => {
                self.expect_premises(d, 1, &origin)?;
                let Stmt::Block { locals, inits, body } = stmt else { return fail(&origin, "not a block") };
                let inner = Stmt::seq(Stmt::par_assign(locals.clone(), inits.clone()), (**body).clone());
                self.same_formula(prem(0), &Formula::new(pre.clone(), inner, post.clone()), &origin)?;
                let free = free_vars(post);
                if let Some(x) = locals.iter().find(|x| free.contains(&x.name)) {
                    return fail(&origin, format!("local `{}` is free in the postcondition", x.name));
                }
            }
            Rule::Weaken => {
                self.expect_premises(d, 1, &origin)?;
                let Stmt::MethodCall(s, ..) = stmt else { return fail(&origin, "not a method call") };
                let strengthened = Expr::and(pre.clone(), Expr::ne(s.clone(), Expr::Null));
                self.same_formula(prem(0), &Formula::new(strengthened, stmt.clone(), post.clone()), &origin)?;
            }
            Rule::Disj => {
                self.expect_premises(d, 2, &origin)?;
                let Expr::Bin(crate::syntax::BinOp::Or, p, r) = pre else { return fail(&origin, "precondition is not a disjunction") };
                self.same_formula(prem(0), &Formula::new((**p).clone(), stmt.clone(), post.clone()), &origin)?;
                self.same_formula(prem(1), &Formula::new((**r).clone(), stmt.clone(), post.clone()), &origin)?;
            }
            Rule::Conj => {
                self.expect_premises(d, 2, &origin)?;
                let (Expr::Bin(crate::syntax::BinOp::And, p1, p2), Expr::Bin(crate::syntax::BinOp::And, q1, q2)) = (pre, post)
                else {
                    return fail(&origin, "pre- and postcondition must be conjunctions");
                };
                self.same_formula(prem(0), &Formula::new((**p1).clone(), stmt.clone(), (**q1).clone()), &origin)?;
                self.same_formula(prem(1), &Formula::new((**p2).clone(), stmt.clone(), (**q2).clone()), &origin)?;
            }
            Rule::ExistsIntro => {
                self.expect_premises(d, 1, &origin)?;
                let Expr::Quant(Quantifier::Exists, x, p) = pre else { return fail(&origin, "precondition is not existential") };
                self.same_formula(prem(0), &Formula::new((**p).clone(), stmt.clone(), post.clone()), &origin)?;
                let mut forbidden = var_decls(&self.program.decls);
                forbidden.extend(var_stmt(stmt));
                forbidden.extend(free_vars(post));
                if forbidden.contains(&x.name) {
                    return fail(&origin, format!("`{}` occurs in the declarations, statement or postcondition", x.name));
                }
            }
            Rule::Invariance => {
                self.expect_premises(d, 1, &origin)?;
                let (Expr::Bin(crate::syntax::BinOp::And, p, r), Expr::Bin(crate::syntax::BinOp::And, p2, q)) = (pre, post)
                else {
                    return fail(&origin, "pre- and postcondition must be conjunctions");
                };
                if p != p2 {
                    return fail(&origin, "invariant differs between pre- and postcondition");
                }
                self.same_formula(prem(0), &Formula::new((**r).clone(), stmt.clone(), (**q).clone()), &origin)?;
                let mut changed = change_decls(&self.program.decls);
                changed.extend(change_stmt(stmt));
                if let Some(x) = free_vars(p).iter().find(|x| changed.contains(*x)) {
                    return fail(&origin, format!("invariant mentions changed variable `{x}`"));
                }
            }
            Rule::Subst => {
                self.expect_premises(d, 1, &origin)?;
                let Side::Subst(zs, ts) = &d.side else { return fail(&origin, "missing substitution") };
                let inner = prem(0);
                self.same_stmt(&inner.stmt, stmt, &origin)?;
                let sub = |e: &Expr| substitute_parallel(e, zs, ts).map_err(|m| format!("{origin}: {m}"));
                self.same_assertion(pre, &sub(&inner.pre)?, "precondition", &origin)?;
                self.same_assertion(post, &sub(&inner.post)?, "postcondition", &origin)?;
                let mut used = var_decls(&self.program.decls);
                used.extend(var_stmt(stmt));
                if let Some(z) = zs.iter().find(|z| used.contains(&z.name)) {
                    return fail(&origin, format!("substituted variable `{}` occurs in the program", z.name));
                }
                let mut changed = change_decls(&self.program.decls);
                changed.extend(change_stmt(stmt));
                let mut tvars = Default::default();
                ts.iter().for_each(|t| var_expr(t, &mut tvars));
                if let Some(x) = tvars.iter().find(|x| changed.contains(*x)) {
                    return fail(&origin, format!("substituted term mentions changed variable `{x}`"));
                }
            }
            Rule::RecI | Rule::RecII | Rule::RecIII => return self.recursion(d, system, path, &origin),
            Rule::Assume(_) => unreachable!(),
        }
        for (i, p) in d.premises.iter().enumerate() {
            self.check(p, system, &format!("{path}.{i}"))?;
        }
        Ok(())
    }

    fn same_formula(&self, got: &Formula, want: &Formula, origin: &str) -> Check {
        self.same_stmt(&got.stmt, &want.stmt, origin)?;
        self.same_assertion(&got.pre, &want.pre, "premise precondition", origin)?;
        self.same_assertion(&got.post, &want.post, "premise postcondition", origin)
    }

    fn recursion(&mut self, d: &'a Derivation, system: System, path: &str, origin: &str) -> Check {
        let Side::Assumptions(a) = &d.side else { return fail(origin, "missing assumption list") };
        self.expect_premises(d, a.len() + 1, origin)?;
        self.same_formula(&d.premises[0].conclusion, &d.conclusion, origin)?;
        for (i, f) in a.iter().enumerate() {
            let (name, callee, args) = match (&f.stmt, d.rule) {
                (Stmt::MethodCall(s, m, args), Rule::RecI | Rule::RecII) => (m, Some(s), args),
                (Stmt::ProcCall(p, args), Rule::RecIII) => (p, None, args),
                _ => return fail(origin, format!("assumption {} is not a call of the right kind", i + 1)),
            };
            let Some(decl) = self.program.decl(name) else {
                return fail(origin, format!("assumption {} calls undeclared `{name}`", i + 1));
            };
            let mut locals = Vec::new();
            let mut inits = Vec::new();
            if let Some(s) = callee {
                locals.push(crate::syntax::Var::this());
                inits.push(s.clone());
            }
            locals.extend(decl.formals.iter().cloned());
            inits.extend(args.iter().cloned());
            if locals.len() != inits.len() {
                return fail(origin, format!("assumption {} has the wrong number of arguments", i + 1));
            }
            let body = Formula::new(f.pre.clone(), Stmt::block(locals, inits, decl.body.clone()), f.post.clone());
            if d.premises[i + 1].conclusion != body {
                return fail(origin, format!("premise {} must prove `{body}`", i + 1));
            }
            if let (Rule::RecII, Some(s)) = (d.rule, callee) {
                self.oblige(&format!("{origin} assumption {}", i + 1), Obligation::NotNull(f.pre.clone(), s.clone()));
            }
        }
        let flavor_ok = match d.rule {
            Rule::RecIII => self.program.flavor != Flavor::ObjectOriented,
            _ => self.program.flavor == Flavor::ObjectOriented,
        };
        if !flavor_ok {
            return fail(origin, format!("{} does not fit a {} program", d.rule, self.program.flavor));
        }
        self.assumptions = Some(a);
        let base = system.base();
        let result = d.premises.iter().enumerate().try_for_each(|(i, p)| self.check(p, base, &format!("{path}.{i}")));
        self.assumptions = None;
        result
    }
}

/// Checks a derivation in `system` against the declarations and variables
/// of `program`, then discharges the collected obligations over the
/// universe of `opts`.
pub fn check(d: &Derivation, system: System, program: &Program, opts: &CheckOptions) -> Verdict {
    let mut c = Checker { program, assumptions: None, obligations: Vec::new() };
    let status = match c.check(d, system, "root") {
        Ok(()) => Status::Accepted,
        Err(why) => Status::Rejected(why),
    };
    let obligations = c
        .obligations
        .into_par_iter()
        .map(|(origin, obligation)| {
            let result = discharge_assertion(&obligation.assertion(), &opts.universe, opts.cap);
            ObligationReport { origin, obligation, result }
        })
        .collect();
    Verdict { status, obligations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_formula, parse_program, with_aux, parse_proof};

    fn verdict(program: &str, proof: &str, system: System) -> Verdict {
        let p = parse_program(program, "<inline>").unwrap();
        let pf = parse_proof(proof, "<inline>", &p).unwrap();
        let p = with_aux(&p, &pf.aux);
        check(&pf.derivation, system, &p, &CheckOptions::with_universe(Universe::new(-2, 2, 2)))
    }

    #[test]
    fn skip_axiom() {
        let v = verdict("var x: int; skip", "(rule SKIP (conclusion {x = 1} skip {x = 1}))", System::PK);
        assert_eq!(v.status, Status::Accepted);
        assert!(v.obligations.is_empty());
        let v = verdict("var x: int; skip", "(rule SKIP (conclusion {x = 1} skip {x = 2}))", System::PK);
        assert!(matches!(v.status, Status::Rejected(_)));
    }

    #[test]
    fn assignment_and_consequence() {
        let proof = "(rule CONSEQ (conclusion {x = 0} x := x + 1 {x > 0})
            (rule ASSIGN (conclusion {x + 1 = 1} x := x + 1 {x = 1})))";
        let v = verdict("var x: int; skip", proof, System::PK);
        assert_eq!(v.status, Status::Accepted);
        assert_eq!(v.obligations.len(), 2);
        assert!(v.all_valid());
        assert_eq!(v.exit_code(), 0);
    }

    #[test]
    fn failure_rules_are_gated() {
        let proof = "(rule FAIL-I (conclusion {true} if x = 0 -> skip fi {true})
            (rule SKIP (conclusion {true and x = 0} skip {true and x = 0})))";
        let v = verdict("var x: int; skip", proof, System::SPK);
        let Status::Rejected(why) = &v.status else { panic!("{v}") };
        assert!(why.contains("not a rule of SPK"), "{why}");
    }

    #[test]
    fn fail_two_obligation() {
        let proof = "(rule FAIL-II (conclusion {x = 0} if x = 0 -> skip fi {x = 0})
            (rule SKIP (conclusion {x = 0} skip {x = 0})))";
        let v = verdict("var x: int; skip", proof, System::SPK);
        assert!(v.is_accepted() && v.all_valid(), "{v}");
    }

    #[test]
    fn block_side_condition() {
        let p = parse_program("var x, y: int; skip", "<inline>").unwrap();
        let f = parse_formula("{true} begin local x := 0; y := x end {x = 0}", "<inline>", &p).unwrap();
        let inner = Stmt::seq(
            Stmt::Assign(Target::simple(&p.globals[0]), Expr::int(0)),
            Stmt::Assign(Target::simple(&p.globals[1]), Expr::var(&p.globals[0])),
        );
        let d = Derivation::node(
            Rule::Block,
            f.clone(),
            vec![Derivation::leaf(Rule::Skip, Formula::new(f.pre.clone(), inner, f.post.clone()))],
        );
        let v = check(&d, System::PK, &p, &CheckOptions::default());
        let Status::Rejected(why) = v.status else { panic!() };
        assert!(why.contains("free in the postcondition"), "{why}");
    }

    #[test]
    fn assume_outside_recursion() {
        let p = parse_program("method m() { skip } skip", "<inline>").unwrap();
        let f = parse_formula("{true} null.m() {true}", "<inline>", &p).unwrap();
        let v = check(&Derivation::leaf(Rule::Assume(1), f), System::POPlus, &p, &CheckOptions::default());
        assert!(matches!(v.status, Status::Rejected(_)));
    }
}

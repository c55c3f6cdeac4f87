//! Named property suites, shared by the command line driver and the
//! acceptance test.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::assertions::{eval_assertion, simplify, substitute, Universe};
use crate::gen::{Gen, Shape};
use crate::interp::{run, run_observed, run_stmt, RunResult};
use crate::parser::{parse_expr, parse_program, parse_proof, parse_stmt, render_decl, render_stmt, with_aux};
use crate::proofs::{check, obligation_footprint, translate_proof, CheckOptions, Derivation, System, Verdict};
use crate::state::{eval_with, states_equal, ObjRef, Outcome, State};
use crate::syntax::{var_stmt, Expr, Flavor, Program, RuntimeChecker, Stmt, Target, Var, THIS};
use crate::transform::{transform_expr, transform_program, transform_state, transform_target};
use crate::wp::{membership, wp_semantic, wp_semantic_with, wp_symbolic, Membership, Mode, StateSpace, WpSet};

pub const SUITES: [&str; 11] = [
    "golden-transform",
    "differential",
    "safety",
    "substitution",
    "translation",
    "assertion",
    "homomorphism",
    "wp",
    "proof-goldens",
    "soundness",
    "proof-translation",
];

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: u64,
    pub fuel: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 42, cases: 1000, fuel: 4000 }
    }
}

/// Outcome counts of one suite run. Failure messages are kept in case order.
#[derive(Clone, Debug, Default)]
pub struct SuiteReport {
    pub name: String,
    pub seed: u64,
    pub passed: u64,
    pub failed: u64,
    pub skipped: u64,
    pub counters: Vec<(String, u64)>,
    pub failures: Vec<String>,
    /// Extra requirement beyond zero failures, with its description.
    pub requirement: Option<(bool, String)>,
}

impl SuiteReport {
    fn new(name: &str, seed: u64) -> SuiteReport {
        SuiteReport { name: name.into(), seed, ..SuiteReport::default() }
    }

    fn record(&mut self, r: CaseResult) {
        match r {
            CaseResult::Pass => self.passed += 1,
            CaseResult::Skip => self.skipped += 1,
            CaseResult::Fail(why) => {
                self.failed += 1;
                self.failures.push(why);
            }
        }
    }

    fn extend(&mut self, rs: impl IntoIterator<Item = CaseResult>) {
        rs.into_iter().for_each(|r| self.record(r));
    }

    pub fn counter(&self, name: &str) -> Option<u64> {
        self.counters.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.requirement.as_ref().is_none_or(|(met, _)| *met)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} seed {}", self.name, self.seed)?;
        writeln!(f, "passed {} failed {} skipped {}", self.passed, self.failed, self.skipped)?;
        for (name, v) in &self.counters {
            writeln!(f, "{name} {v}")?;
        }
        if let Some((met, what)) = &self.requirement {
            writeln!(f, "requirement {what}: {}", if *met { "met" } else { "not met" })?;
        }
        for why in self.failures.iter().take(5) {
            writeln!(f, "failure: {why}")?;
        }
        write!(f, "{}", if self.ok() { "PASS" } else { "FAIL" })
    }
}

#[derive(Clone, Debug)]
enum CaseResult {
    Pass,
    Skip,
    Fail(String),
}

fn expect(ok: bool, why: impl FnOnce() -> String) -> CaseResult {
    if ok {
        CaseResult::Pass
    } else {
        CaseResult::Fail(why())
    }
}

fn par_cases(cfg: &SuiteConfig, f: impl Fn(u64, &mut Gen) -> CaseResult + Sync) -> Vec<CaseResult> {
    (0..cfg.cases).into_par_iter().map(|case| f(case, &mut Gen::for_case(cfg.seed, case))).collect()
}

pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Option<SuiteReport> {
    Some(match name {
        "golden-transform" => golden_transform(cfg),
        "differential" => differential(cfg, false),
        "safety" => differential(cfg, true),
        "substitution" => substitution(cfg),
        "translation" => translation(cfg),
        "assertion" => assertion(cfg),
        "homomorphism" => homomorphism(cfg),
        "wp" => wp_suite(cfg),
        "proof-goldens" => proof_goldens(cfg),
        "soundness" => soundness(cfg),
        "proof-translation" => proof_translation(cfg),
        _ => return None,
    })
}

// ---- golden material ----

pub struct GoldenProof {
    pub name: &'static str,
    pub program: &'static str,
    pub proof: &'static str,
    pub system: System,
}

macro_rules! golden {
    ($f:literal) => {
        include_str!(concat!("../tests/golden/", $f))
    };
}

pub const ADD_OO: &str = golden!("add.oo");
const NULL_CALL: &str = golden!("null_call.oo");
const INC: &str = golden!("inc.oo");
const COUNTDOWN: &str = golden!("countdown.oo");
const COUNTER: &str = golden!("counter.krn");

pub const GOLDEN_PROOFS: [GoldenProof; 7] = [
    GoldenProof { name: "null_false", program: NULL_CALL, proof: golden!("null_false.prf"), system: System::POPlus },
    GoldenProof {
        name: "null_true_strong",
        program: NULL_CALL,
        proof: golden!("null_true_strong.prf"),
        system: System::SPOPlus,
    },
    GoldenProof { name: "fail_in_spk", program: COUNTER, proof: golden!("fail_in_spk.prf"), system: System::SPK },
    GoldenProof { name: "inc_strong", program: INC, proof: golden!("inc_strong.prf"), system: System::SPOPlus },
    GoldenProof { name: "inc_partial", program: INC, proof: golden!("inc_partial.prf"), system: System::POPlus },
    GoldenProof { name: "countdown", program: COUNTDOWN, proof: golden!("countdown.prf"), system: System::POPlus },
    GoldenProof {
        name: "countdown_strong",
        program: COUNTDOWN,
        proof: golden!("countdown_strong.prf"),
        system: System::SPOPlus,
    },
];

/// Universe used for golden proof obligations and the soundness audit.
pub fn golden_universe() -> Universe {
    Universe::new(-2, 2, 2)
}

pub fn load_golden(g: &GoldenProof) -> (Program, Derivation) {
    let p = parse_program(g.program, g.name).expect("golden program parses");
    let f = parse_proof(g.proof, g.name, &p).expect("golden proof parses");
    (with_aux(&p, &f.aux), f.derivation)
}

fn squash(s: &str) -> String {
    s.replace('≠', "/=").replace('→', "->").chars().filter(|c| !c.is_whitespace()).collect()
}

fn golden_transform(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("golden-transform", cfg.seed);
    let p = parse_program(ADD_OO, "add.oo").expect("golden program parses");
    let img = transform_program(&p).expect("object-oriented");
    let main = render_stmt(&img.program.main).expect("renders");
    let decl = render_decl(&img.program.decls[0]).expect("renders");
    let want_main = "if y≠null → add(y,1) fi; if y≠null → add(y,2) fi";
    let want_decl = "add(this,x):: sum[this]:=sum[this]+x";
    r.record(expect(squash(&main) == squash(want_main), || format!("main: {main}")));
    r.record(expect(squash(&decl) == squash(want_decl), || format!("declaration: {decl}")));
    r
}

// ---- differential testing of the transformation ----

#[derive(Default)]
struct Safety {
    null_this: AtomicU64,
    ill_typed: AtomicU64,
}

fn differential(cfg: &SuiteConfig, safety_only: bool) -> SuiteReport {
    let name = if safety_only { "safety" } else { "differential" };
    let mut r = SuiteReport::new(name, cfg.seed);
    let counters = Safety::default();
    let shape = Shape::default();
    let results = par_cases(cfg, |case, g| {
        let program = g.oo_program(&shape);
        let start = g.state(true);
        let checker = RuntimeChecker::new(&program);
        let mut observe = |s: &Stmt, o: &Outcome| {
            if let Outcome::Proper(st) = o {
                if st.this() == ObjRef::Null {
                    counters.null_this.fetch_add(1, Ordering::Relaxed);
                }
            }
            if !checker.check(s).is_empty() {
                counters.ill_typed.fetch_add(1, Ordering::Relaxed);
            }
        };
        let source = match run_observed(&program, &start, cfg.fuel, &mut observe) {
            Ok(res) => res,
            Err(e) => return CaseResult::Fail(format!("case {case}: {e}")),
        };
        let image = transform_program(&program).expect("object-oriented");
        let target = match run(&image.program, &transform_state(&start), 2 * cfg.fuel) {
            Ok(res) => res,
            Err(e) => return CaseResult::Fail(format!("case {case}: transformed: {e}")),
        };
        match (&source, &target) {
            (RunResult::OutOfFuel(_), _) | (_, RunResult::OutOfFuel(_)) => CaseResult::Skip,
            (RunResult::Failed, RunResult::Failed) => CaseResult::Pass,
            (RunResult::Terminated(a), RunResult::Terminated(b)) => {
                expect(states_equal(&transform_state(a), b), || format!("case {case}: final states differ"))
            }
            _ => CaseResult::Fail(format!("case {case}: {source} vs {target}")),
        }
    });
    r.extend(results);
    let null_this = counters.null_this.into_inner();
    let ill_typed = counters.ill_typed.into_inner();
    r.counters.push(("null-this".into(), null_this));
    r.counters.push(("ill-typed-configurations".into(), ill_typed));
    if safety_only {
        // Only the counters matter here.
        let mismatches = r.failed;
        r.passed += r.failed;
        r.failed = 0;
        r.failures.clear();
        r.counters.push(("differential-mismatches".into(), mismatches));
        r.requirement = Some((null_this == 0 && ill_typed == 0, "both counters are 0".into()));
    } else {
        let total = r.passed + r.failed + r.skipped;
        let met = r.skipped * 5 <= total;
        r.requirement = Some((met, "at least 80% of pairs compared".into()));
    }
    r
}

// ---- substitution and translation lemmas ----

fn eval_any(s: &State, e: &Expr, u: &Universe) -> crate::state::Value {
    eval_with(s, u, e)
}

fn substitution(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("substitution", cfg.seed);
    let u = Universe::new(-2, 2, 2);
    let results = par_cases(cfg, |case, g| {
        let (target, t) = g.assignment(true);
        let phrase = if case % 2 == 0 { g.assertion(true) } else { g.global_expr(true) };
        let s = g.state(true);
        let substituted = match substitute(&phrase, &target, &t) {
            Ok(e) => e,
            Err(e) => return CaseResult::Fail(format!("case {case}: {e}")),
        };
        let mut updated = s.clone();
        updated.assign(&target, eval_any(&s, &t, &u));
        let lhs = eval_any(&s, &substituted, &u);
        let rhs = eval_any(&updated, &phrase, &u);
        expect(lhs == rhs, || format!("case {case}: {lhs} vs {rhs}"))
    });
    r.extend(results);

    let p = parse_program("var a: int -> int; var x: int; var y: int; ivar v: int; skip", "<examples>").expect("parses");
    let e = |src: &str| parse_expr(src, "<examples>", &p).expect("parses");
    let got = substitute(&e("min(a[x], y)"), &Target { var: p.globals[0].clone(), indices: vec![Expr::int(1)] }, &Expr::int(2));
    r.record(expect(got.as_ref() == Ok(&e("min((x = 1 ? 2 : a[x]), y)")), || format!("array example: {got:?}")));
    let v = &p.globals[3];
    let t = e("x + 1");
    let got = substitute(&e("this.v"), &Target::simple(v), &t);
    r.record(expect(got.as_ref() == Ok(&e("(this = this ? x + 1 : this.v)")), || format!("instance example: {got:?}")));
    if let Ok(inst) = got {
        let agree = (0..cfg.cases.min(200)).all(|case| {
            let s = Gen::for_case(cfg.seed ^ 0x5eed, case).state(true);
            eval_any(&s, &inst, &u) == eval_any(&s, &t, &u)
        });
        r.record(expect(agree, || "instance example does not evaluate to its replacement".into()));
    }
    r
}

fn translation(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("translation", cfg.seed);
    let u = Universe::new(-2, 2, 2);
    let results = par_cases(cfg, |case, g| {
        let e = if case % 2 == 0 { g.global_expr(true) } else { g.program_expr(true) };
        let s = g.state(true);
        let ts = transform_state(&s);
        let (lhs, rhs) = (eval_any(&s, &e, &u), eval_any(&ts, &transform_expr(&e), &u));
        if lhs != rhs {
            return CaseResult::Fail(format!("case {case}: expression {lhs} vs {rhs}"));
        }
        let (target, t) = g.assignment(true);
        let d = eval_any(&s, &t, &u);
        let mut updated = s.clone();
        updated.assign(&target, d.clone());
        let mut lifted = ts.clone();
        lifted.assign(&transform_target(&target), d);
        expect(states_equal(&transform_state(&updated), &lifted), || format!("case {case}: updates differ"))
    });
    r.extend(results);
    r
}

fn assertion(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("assertion", cfg.seed);
    let u = Universe::new(-2, 2, 2);
    let results = par_cases(cfg, |case, g| {
        let p = g.assertion(true);
        let s = g.state(true);
        let (lhs, rhs) = (eval_assertion(&s, &p, &u), eval_assertion(&transform_state(&s), &transform_expr(&p), &u));
        expect(lhs == rhs, || format!("case {case}: {lhs} vs {rhs}"))
    });
    r.extend(results);
    r
}

fn homomorphism(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("homomorphism", cfg.seed);
    let results = par_cases(cfg, |case, g| {
        let p = g.assertion(true);
        let (target, t) = g.assignment(true);
        let lhs = substitute(&p, &target, &t).map(|e| simplify(&transform_expr(&e)));
        let rhs = substitute(&transform_expr(&p), &transform_target(&target), &transform_expr(&t)).map(|e| simplify(&e));
        match (lhs, rhs) {
            (Ok(a), Ok(b)) => expect(a == b, || format!("case {case}: {} vs {}", crate::parser::render_expr(&a), crate::parser::render_expr(&b))),
            (a, b) => CaseResult::Fail(format!("case {case}: {a:?} vs {b:?}")),
        }
    });
    r.extend(results);
    r
}

// ---- weakest preconditions ----

const WP_DECLS: &str = "var x: int; var y: int; var z: int; var b: bool; var a: int -> int; skip";

/// Lists each loop-free, call-free fixture and each terminating loop by
/// source text.
pub const LOOP_FIXTURES: [&str; 10] = [
    "while x < 1 do x := x + 1 od",
    "while x > y do x := x - 1 od",
    "while x < y do x := x + 1; z := z + 1 od",
    "while a[0] < 1 do a[0] := a[0] + 1 od",
    "while x /= 0 do if x > 0 then x := x - 1 else x := x + 1 fi od",
    "while b do b := false; x := y od",
    "while x < 1 and y < 1 do x := x + 1; y := y + 1 od",
    "while z > -1 do z := z - 1; a[1] := a[1] + x od",
    "while x < 1 do if y = 0 -> x := x + 1 fi od",
    "while y < x do y := y + 1; begin local u := y; z := u end od",
];

fn wp_space(program: &Program) -> StateSpace {
    let var = |n: &str| program.globals.iter().find(|v| &*v.name == n).expect("declared").clone();
    let a = var("a");
    let cells = [(a.clone(), vec![crate::state::Value::int(0)]), (a, vec![crate::state::Value::int(1)])];
    StateSpace::over(Universe::new(-1, 1, 0), &[var("x"), var("y"), var("z"), var("b")], &cells)
}

fn same(a: &WpSet, b: &WpSet) -> bool {
    a.same_as(b) == Some(true)
}

fn combine(space: &StateSpace, f: impl Fn(usize, &State) -> bool) -> WpSet {
    let bools: Vec<bool> = space.states().enumerate().map(|(i, s)| f(i, &s)).collect();
    WpSet::from_bools(&bools)
}

fn holds(set: &WpSet, i: usize) -> bool {
    set.membership[i] == Membership::In
}

/// Checks the equation for the top constructor of `stmt`, then recurses.
fn wp_equations(stmt: &Stmt, post: &Expr, space: &StateSpace, fuel: u64, mode: Mode, out: &mut Vec<String>) {
    let u = &space.universe;
    let wp = |s: &Stmt| wp_semantic(s, &[], post, space, fuel, mode);
    let whole = wp(stmt);
    if whole.has_unknown() {
        out.push(format!("unknown states for {}", render_stmt(stmt).unwrap_or_default()));
        return;
    }
    let truth = |e: &Expr, s: &State| eval_assertion(s, e, u);
    let expected = match stmt {
        Stmt::Skip => Some(WpSet::from_bools(&space.satisfying(post))),
        Stmt::Assign(t, e) => substitute(post, t, e).ok().map(|p| WpSet::from_bools(&space.satisfying(&p))),
        Stmt::ParAssign(vs, es) => {
            crate::assertions::substitute_parallel(post, vs, es).ok().map(|p| WpSet::from_bools(&space.satisfying(&p)))
        }
        Stmt::Seq(s1, s2) => {
            let second = |t: &State| membership(s2, &[], &|f: &State| Membership::from_bool(truth(post, f)), t, fuel, mode);
            Some(wp_semantic_with(s1, &[], &second, space, fuel, mode))
        }
        Stmt::If(g, s1, s2) => {
            let (w1, w2) = (wp(s1), wp(s2));
            Some(combine(space, |i, s| if truth(g, s) { holds(&w1, i) } else { holds(&w2, i) }))
        }
        Stmt::FailIf(g, s1) => {
            let w1 = wp(s1);
            Some(combine(space, |i, s| if truth(g, s) { holds(&w1, i) } else { mode == Mode::Partial }))
        }
        Stmt::Block { locals, inits, body } => Some(wp(&Stmt::seq(Stmt::par_assign(locals.clone(), inits.clone()), (**body).clone()))),
        _ => None,
    };
    match expected {
        Some(e) if !same(&e, &whole) => out.push(format!("equation fails for {}", render_stmt(stmt).unwrap_or_default())),
        None if !matches!(stmt, Stmt::Block { .. }) => out.push(format!("no equation for {}", render_stmt(stmt).unwrap_or_default())),
        _ => {}
    }
    if let Ok(sym) = wp_symbolic(stmt, post, mode) {
        if !same(&WpSet::from_bools(&space.satisfying(&sym)), &whole) {
            out.push(format!("symbolic differs for {}", render_stmt(stmt).unwrap_or_default()));
        }
    } else {
        out.push(format!("no symbolic precondition for {}", render_stmt(stmt).unwrap_or_default()));
    }
    match stmt {
        Stmt::Seq(a, b) | Stmt::If(_, a, b) => {
            wp_equations(a, post, space, fuel, mode, out);
            wp_equations(b, post, space, fuel, mode, out);
        }
        Stmt::FailIf(_, a) => wp_equations(a, post, space, fuel, mode, out),
        _ => {}
    }
}

fn loop_equation(stmt: &Stmt, post: &Expr, space: &StateSpace, fuel: u64, mode: Mode) -> Result<(), String> {
    let Stmt::While(g, body) = stmt else { return Err("not a loop".into()) };
    let u = &space.universe;
    let whole = wp_semantic(stmt, &[], post, space, fuel, mode);
    if whole.has_unknown() {
        return Err("loop runs out of fuel".into());
    }
    let again = |t: &State| {
        membership(stmt, &[], &|f: &State| Membership::from_bool(eval_assertion(f, post, u)), t, fuel, mode)
    };
    let through = wp_semantic_with(body, &[], &again, space, fuel, mode);
    let rhs = combine(space, |i, s| if eval_assertion(s, g, u) { holds(&through, i) } else { eval_assertion(s, post, u) });
    if same(&rhs, &whole) {
        Ok(())
    } else {
        Err(format!("loop equation fails for {}", render_stmt(stmt).unwrap_or_default()))
    }
}

fn wp_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("wp", cfg.seed);
    let program = parse_program(WP_DECLS, "<wp>").expect("parses");
    let space = wp_space(&program);
    let var = |n: &str| program.globals.iter().find(|v| &*v.name == n).expect("declared").clone();
    let (ints, bools, arrays) = ([var("x"), var("y"), var("z")], [var("b")], [var("a")]);
    let fuel = cfg.fuel;
    let programs = cfg.cases.clamp(50, 200);
    let results: Vec<CaseResult> = (0..programs)
        .into_par_iter()
        .map(|case| {
            let mut g = Gen::for_case(cfg.seed, case);
            let stmt = g.kernel_stmt(&ints, &bools, &arrays, 3);
            let post = g.kernel_assertion(&ints, &bools, &arrays);
            let mut problems = Vec::new();
            for mode in [Mode::Partial, Mode::StrongPartial] {
                wp_equations(&stmt, &post, &space, fuel, mode, &mut problems);
            }
            let strong = wp_semantic(&stmt, &[], &post, &space, fuel, Mode::StrongPartial);
            let partial = wp_semantic(&stmt, &[], &post, &space, fuel, Mode::Partial);
            if strong.subset_of(&partial) != Some(true) {
                problems.push("strong precondition not contained in partial one".into());
            }
            match problems.first() {
                None => CaseResult::Pass,
                Some(p) => CaseResult::Fail(format!("program {case}: {p}")),
            }
        })
        .collect();
    r.extend(results);
    let loops: Vec<CaseResult> = LOOP_FIXTURES
        .par_iter()
        .enumerate()
        .map(|(i, src)| {
            let stmt = parse_stmt(src, "<loop>", &program).expect("fixture parses");
            let mut g = Gen::for_case(cfg.seed, 1_000_000 + i as u64);
            let posts = [g.kernel_assertion(&ints, &bools, &arrays), parse_expr("x >= y", "<loop>", &program).expect("parses")];
            for post in &posts {
                for mode in [Mode::Partial, Mode::StrongPartial] {
                    if let Err(e) = loop_equation(&stmt, post, &space, fuel, mode) {
                        return CaseResult::Fail(format!("fixture {i}: {e}"));
                    }
                }
            }
            CaseResult::Pass
        })
        .collect();
    r.counters.push(("random-programs".into(), programs));
    r.counters.push(("loop-fixtures".into(), loops.len() as u64));
    r.extend(loops);
    r
}

// ---- proofs ----

fn golden_by_name(name: &str) -> &'static GoldenProof {
    GOLDEN_PROOFS.iter().find(|g| g.name == name).expect("golden proof exists")
}

fn check_golden(g: &GoldenProof) -> Verdict {
    let (p, d) = load_golden(g);
    check(&d, g.system, &p, &CheckOptions::with_universe(golden_universe()))
}

fn proof_goldens(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("proof-goldens", cfg.seed);
    let v = check_golden(golden_by_name("null_false"));
    r.record(expect(v.is_accepted() && v.all_valid(), || format!("null_false: {v}")));
    let v = check_golden(golden_by_name("null_true_strong"));
    let star = v.is_accepted()
        && v.obligations.iter().any(|o| o.origin.contains("REC-II") && matches!(o.result, crate::proofs::Discharge::Counterexample(_)));
    r.record(expect(star, || format!("null_true_strong: {v}")));
    let v = check_golden(golden_by_name("fail_in_spk"));
    r.record(expect(!v.is_accepted(), || format!("fail_in_spk: {v}")));
    r
}

/// Every accepted, fully discharged golden derivation, with its translation
/// where one exists.
fn audited_derivations() -> Vec<(String, Program, Derivation, System)> {
    let opts = CheckOptions::with_universe(golden_universe());
    let mut out = Vec::new();
    for g in &GOLDEN_PROOFS {
        let (p, d) = load_golden(g);
        for system in [g.system, g.system.base(), System::PK] {
            let v = check(&d, system, &p, &opts);
            if v.is_accepted() && v.all_valid() {
                if let Ok(t) = translate_proof(&d, system, &p, &opts) {
                    out.push((format!("{} translated", g.name), t.program, t.derivation, t.system));
                }
                out.push((g.name.to_string(), p.clone(), d.clone(), system));
                break;
            }
        }
    }
    out
}

/// Runs the conclusion of an accepted derivation from every state of the
/// obligation universe and checks the postcondition.
fn audit(program: &Program, d: &Derivation, system: System, fuel: u64) -> Result<u64, String> {
    let f = &d.conclusion;
    let u = golden_universe();
    let oo = program.flavor == Flavor::ObjectOriented;
    let mut parts = vec![f.pre.clone(), f.post.clone()];
    for name in var_stmt(&f.stmt) {
        let known = program.globals.iter().chain(program.local_vars().iter()).find(|v| v.name == name).cloned();
        let v = match known {
            Some(v) if v.ty.is_basic() => v,
            _ if &*name == THIS => Var::this(),
            _ => continue,
        };
        parts.push(Expr::eq(Expr::var(&v), Expr::var(&v)));
    }
    if oo {
        parts.push(Expr::eq(Expr::this(), Expr::this()));
    }
    let space = obligation_footprint(&Expr::conj(parts), &u, crate::proofs::ENUMERATION_CAP)
        .ok_or_else(|| "footprint too large".to_string())?;
    let mut runs = 0;
    for s in space.states() {
        if (oo && s.this() == ObjRef::Null) || !eval_assertion(&s, &f.pre, &u) {
            continue;
        }
        runs += 1;
        match run_stmt(&f.stmt, &program.decls, &s, fuel).map_err(|e| e.to_string())? {
            RunResult::Terminated(t) if !eval_assertion(&t, &f.post, &u) => return Err(format!("postcondition fails from {s}")),
            RunResult::Failed if system.is_strong() => return Err(format!("failure from {s}")),
            _ => {}
        }
    }
    Ok(runs)
}

fn soundness(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("soundness", cfg.seed);
    let derivations = audited_derivations();
    let results: Vec<CaseResult> = derivations
        .par_iter()
        .map(|(name, p, d, system)| match audit(p, d, *system, cfg.fuel) {
            Ok(_) => CaseResult::Pass,
            Err(e) => CaseResult::Fail(format!("{name} under {system}: {e}")),
        })
        .collect();
    r.extend(results);
    r
}

fn proof_translation(cfg: &SuiteConfig) -> SuiteReport {
    let mut r = SuiteReport::new("proof-translation", cfg.seed);
    let opts = CheckOptions::with_universe(golden_universe());
    for g in GOLDEN_PROOFS.iter().filter(|g| g.system.is_object_oriented()) {
        let (p, d) = load_golden(g);
        let source = check(&d, g.system, &p, &opts);
        if !source.is_accepted() {
            r.record(CaseResult::Skip);
            continue;
        }
        let result = match translate_proof(&d, g.system, &p, &opts) {
            Err(e) => CaseResult::Fail(format!("{}: {e}", g.name)),
            Ok(t) => {
                let v = check(&t.derivation, t.system, &t.program, &opts);
                let preserved = v.all_valid() == source.all_valid() && v.has_counterexample() == source.has_counterexample();
                expect(v.is_accepted() && preserved, || format!("{}: {v}", g.name))
            }
        };
        r.record(result);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite() {
        assert!(run_suite("nope", &SuiteConfig::default()).is_none());
    }

    #[test]
    fn small_runs_pass() {
        let cfg = SuiteConfig { seed: 3, cases: 40, fuel: 2000 };
        for name in ["golden-transform", "substitution", "translation", "assertion", "homomorphism", "proof-goldens"] {
            let r = run_suite(name, &cfg).unwrap();
            assert!(r.ok(), "{r}");
        }
    }
}

//! Acceptance criteria 1-9 at full size and within their time limits.
//! Prints one line per criterion; run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use objlift::suites::{run_suite, SuiteConfig, SuiteReport};

struct Line {
    n: u32,
    what: &'static str,
    pass: bool,
    detail: String,
}

fn timed(name: &str, cfg: &SuiteConfig) -> (SuiteReport, Duration) {
    let t = Instant::now();
    let r = run_suite(name, cfg).expect("suite exists");
    (r, t.elapsed())
}

fn summary(r: &SuiteReport, took: Duration) -> String {
    let mut s = format!("{} passed, {} failed, {} skipped, {:.2?}", r.passed, r.failed, r.skipped, took);
    for (k, v) in &r.counters {
        s += &format!(", {k}={v}");
    }
    if let Some(why) = r.failures.first() {
        s += &format!("; first failure: {why}");
    }
    s
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let mut lines = Vec::new();
    let mut push = |n, what, pass, detail| lines.push(Line { n, what, pass, detail });

    let (r, t) = timed("golden-transform", &cfg);
    push(1, "golden transformation", r.ok() && t < Duration::from_secs(1), summary(&r, t));

    let (diff, t) = timed("differential", &cfg);
    let compared = diff.passed + diff.failed;
    let pass = diff.ok() && diff.passed + diff.failed + diff.skipped >= 1000 && t < Duration::from_secs(300);
    push(2, "differential transformation", pass, format!("{compared} compared; {}", summary(&diff, t)));

    let (r, t) = timed("substitution", &cfg);
    push(3, "substitution lemma", r.ok() && r.passed >= 1000 && t < Duration::from_secs(60), summary(&r, t));

    let mut ok4 = true;
    let mut detail = Vec::new();
    let start = Instant::now();
    for name in ["translation", "assertion", "homomorphism"] {
        let (r, t) = timed(name, &cfg);
        ok4 &= r.ok() && r.passed >= 1000;
        detail.push(format!("{name}: {}", summary(&r, t)));
    }
    ok4 &= start.elapsed() < Duration::from_secs(120);
    push(4, "translation, assertion and homomorphism lemmas", ok4, detail.join(" | "));

    let (r, t) = timed("wp", &cfg);
    let enough = r.counter("random-programs").unwrap_or(0) >= 50 && r.counter("loop-fixtures").unwrap_or(0) >= 10;
    push(5, "weakest precondition oracle", r.ok() && enough && t < Duration::from_secs(180), summary(&r, t));

    let (r, t) = timed("proof-goldens", &cfg);
    push(6, "proof checker goldens", r.ok() && r.passed == 3 && t < Duration::from_secs(3), summary(&r, t));

    let (r, t) = timed("soundness", &cfg);
    push(7, "bounded soundness audit", r.ok() && r.passed > 0 && t < Duration::from_secs(120), summary(&r, t));

    let null_this = diff.counter("null-this");
    let ill_typed = diff.counter("ill-typed-configurations");
    push(
        8,
        "safety instrumentation",
        null_this == Some(0) && ill_typed == Some(0),
        format!("null-this={null_this:?}, ill-typed-configurations={ill_typed:?}"),
    );

    let (r, t) = timed("proof-translation", &cfg);
    push(9, "proof translation", r.ok() && r.passed > 0 && t < Duration::from_secs(60), summary(&r, t));

    for l in &lines {
        println!("criterion {} {}: {} ({})", l.n, l.what, if l.pass { "PASS" } else { "FAIL" }, l.detail);
    }
    let failed: Vec<u32> = lines.iter().filter(|l| !l.pass).map(|l| l.n).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}

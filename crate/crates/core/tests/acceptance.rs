//! Acceptance run: one PASS/FAIL line per criterion, followed by indented
//! detail for failing ones. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gac_core::engine::SearchBudget;
use gac_core::gadgets::Family;
use gac_core::suites::{
    engine_laws, gadget_family_fidelity, gadget_sizes, maxgac_semantics, worked_examples, propagator_equivalence,
    reducer_equivalence, smoke_outcome, SuiteConfig, SuiteReport,
};

/// Failing cases shown per criterion.
const SHOWN_FAILURES: usize = 5;

struct Outcome {
    passed: bool,
    summary: String,
    details: Vec<String>,
}

fn from_suite(r: &SuiteReport, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let in_time = limit.is_none_or(|l| elapsed < l);
    let mut details: Vec<String> = r
        .failures()
        .take(SHOWN_FAILURES)
        .map(|c| format!("{} [{} vs {}]: {:?} {}", c.case, c.compared[0], c.compared[1], c.status, c.detail.as_deref().unwrap_or("")))
        .collect();
    if !in_time {
        details.push(format!("runtime {elapsed:?} over the limit {:?}", limit.expect("limit")));
    }
    let t = &r.tallies;
    Outcome {
        passed: r.passed() && in_time,
        summary: format!(
            "{}/{} agree, {} disagree, {} budget-exhausted, {} errors; {:.2?}{}",
            t.agree,
            r.cases.len(),
            t.disagree,
            t.budget_exhausted,
            t.error,
            elapsed,
            limit.map(|l| format!(" (limit {l:?})")).unwrap_or_default()
        ),
        details,
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let out = f();
    (out, t.elapsed())
}

fn criterion_1(cfg: &SuiteConfig) -> Outcome {
    let (mut r, t) = timed(|| worked_examples(cfg));
    r.cases.retain(|c| c.case.starts_with("disjoint"));
    let r = SuiteReport::merge("disjoint", vec![r]);
    from_suite(&r, t, Some(Duration::from_secs(1)))
}

fn criterion_2(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = timed(|| reducer_equivalence(cfg));
    from_suite(&r, t, Some(Duration::from_secs(120)))
}

fn criterion_3(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = timed(|| maxgac_semantics(cfg));
    from_suite(&r, t, None)
}

fn criterion_4(cfg: &SuiteConfig) -> Outcome {
    let started = Instant::now();
    let mut parts = Vec::new();
    let mut per_family = Vec::new();
    for family in Family::ALL {
        let (r, t) = timed(|| gadget_family_fidelity(family, cfg));
        let mark = if r.passed() { "ok  " } else { "FAIL" };
        per_family.push(format!(
            "{mark} {family}: {}/{} agree, {} disagree, {} budget-exhausted, {} errors; {t:.2?}",
            r.tallies.agree,
            r.cases.len(),
            r.tallies.disagree,
            r.tallies.budget_exhausted,
            r.tallies.error
        ));
        parts.push(r);
    }
    let r = SuiteReport::merge("gadget-fidelity", parts);
    let mut out = from_suite(&r, started.elapsed(), Some(Duration::from_secs(600)));
    per_family.extend(out.details);
    out.details = per_family;
    out
}

fn criterion_5() -> Outcome {
    let (r, t) = timed(gadget_sizes);
    from_suite(&r, t, None)
}

fn criterion_6(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = timed(|| propagator_equivalence(cfg));
    from_suite(&r, t, Some(Duration::from_secs(300)))
}

fn criterion_7() -> Outcome {
    let budget = SearchBudget::new(10_000_000).expect("positive");
    let s = smoke_outcome(budget);
    let fast = s.propagator_ms < 1000 && s.propagator_removals == 0;
    let exhausted = s.generic_exhausted_after.is_some();
    Outcome {
        passed: fast && exhausted,
        summary: format!(
            "alldifferent n=d=200: {} ms, {} removals (limit 1000 ms, 0 removals); generic engine {}",
            s.propagator_ms,
            s.propagator_removals,
            match s.generic_exhausted_after {
                Some(n) => format!("budget-exhausted after {n} tuples"),
                None => "finished within 10^7".into(),
            }
        ),
        details: Vec::new(),
    }
}

fn criterion_8(cfg: &SuiteConfig) -> Outcome {
    let (r, t) = timed(|| engine_laws(cfg));
    from_suite(&r, t, None)
}

fn main() -> ExitCode {
    let cfg = SuiteConfig::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("1 disjoint example regression", Box::new(|| criterion_1(&cfg))),
        ("2 reducer equivalence", Box::new(|| criterion_2(&cfg))),
        ("3 maxgac semantics", Box::new(|| criterion_3(&cfg))),
        ("4 gadget iff fidelity", Box::new(|| criterion_4(&cfg))),
        ("5 gadget size formulas", Box::new(criterion_5)),
        ("6 propagator equivalence", Box::new(|| criterion_6(&cfg))),
        ("7 tractability smoke", Box::new(criterion_7)),
        ("8 engine laws", Box::new(|| criterion_8(&cfg))),
    ];
    let mut all = true;
    for (name, run) in criteria {
        let o = run();
        all &= o.passed;
        println!("criterion {name}: {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.summary);
        for d in &o.details {
            println!("    {d}");
        }
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

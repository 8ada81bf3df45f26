//! Acceptance suite: runs every gate criterion at its stated tolerance and
//! prints one pass/fail line per criterion.

use std::time::{Duration, Instant};

use condref_core::corpus::{find_example, laws, run_example, Outcome, RunCfg};
use condref_core::memlang;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn new() -> Gate {
        Gate { failures: Vec::new() }
    }

    fn criterion(&mut self, n: u32, what: &str, ok: bool) {
        println!("criterion {n:2}: {} — {what}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failures.push(format!("criterion {n}: {what}"));
        }
    }
}

fn example_passes(id: &str, budget: Option<Duration>) -> (bool, Duration) {
    let def = find_example(id).expect("known example");
    let t0 = Instant::now();
    let report = run_example(&(def.build)(), &RunCfg::default(), false);
    let elapsed = t0.elapsed();
    let within = budget.map(|b| elapsed <= b).unwrap_or(true);
    (report.passed && within, elapsed)
}

fn obligation_outcome(id: &str, obligation: &str) -> Outcome {
    let def = find_example(id).expect("known example");
    let ex = (def.build)();
    let ob = ex
        .obligations
        .iter()
        .find(|o| o.id == obligation)
        .expect("known obligation");
    (ob.run)(&RunCfg::default())
}

#[test]
fn acceptance() {
    let mut gate = Gate::new();

    // 1. the vertical-framing counterexample: unframed refinement proven,
    //    framed refinement refuted with a replayable counter-trace
    let (ok, t) = example_passes("cex-7.1", Some(Duration::from_secs(10)));
    gate.criterion(
        1,
        &format!("framing counterexample (proven/refuted split, replay) in {t:.2?} < 10s"),
        ok,
    );

    // 2. weak/strong update separation on the derived six-token algebra,
    //    including the per-variant wrapper split and end-to-end falsity
    let (ok, t) = example_passes("cex-appB", Some(Duration::from_secs(60)));
    gate.criterion(
        2,
        &format!("six-token update separation and variant split in {t:.2?} < 60s"),
        ok,
    );

    // 3. condition-algebra laws on ≥ 1000 generated pairs/triples
    let conds = laws::run_suite("conds", 0, 1000).expect("conds suite");
    let checks: u64 = conds.iter().map(|r| r.checks).sum();
    let violations: u64 = conds.iter().map(|r| r.violations).sum();
    gate.criterion(
        3,
        &format!("condition-algebra laws: {checks} checks on 1000 generated triples, {violations} violations"),
        checks >= 1000 && violations == 0,
    );

    // 4. bitset: composed precondition equivalence, same-level collapse to
    //    falsity, both refinement legs proven
    let (ok, t) = example_passes("bitset", None);
    gate.criterion(4, &format!("bitset tower (composition vs conjunction) in {t:.2?}"), ok);

    // 5. the map family: closed double-init distinguisher, lower and upper
    //    refinements, and the three composition steps, within 5 minutes
    let t0 = Instant::now();
    let (ok_lower, _) = example_passes("map-lower", None);
    let (ok_upper, _) = example_passes("map-upper", None);
    let (ok_chain, _) = example_passes("map-chain", None);
    let elapsed = t0.elapsed();
    // the distinguishing counter-trace must end with a print of 0
    let distinguish_ok = match obligation_outcome("map-chain", "closed-distinguish") {
        Outcome::Verdict(condref_core::refine::Verdict::Refuted(r)) => {
            let last = r.counter.events.last().map(|(n, a, _)| (n.clone(), a.clone()));
            last == Some((
                "print".to_string(),
                condref_core::Any::MemV(memlang::Val::Long(0)),
            ))
        }
        _ => false,
    };
    gate.criterion(
        5,
        &format!(
            "map family (distinguisher ending in print 0, both legs, chain) in {elapsed:.2?} < 5min"
        ),
        ok_lower && ok_upper && ok_chain && distinguish_ok && elapsed <= Duration::from_secs(300),
    );

    // 6. modality rule suites, exhaustive on shipped algebras of carrier ≤ 8
    let res = laws::run_suite("res", 0, 200).expect("res suite");
    let violations: u64 = res.iter().map(|r| r.violations).sum();
    let names: Vec<&str> = res.iter().map(|r| r.suite.as_str()).collect();
    gate.criterion(
        6,
        &format!("modality suites {names:?}: {violations} violations"),
        violations == 0,
    );

    // 7. oracle/game agreement on ≥ 10⁴ seeded random tree pairs with
    //    100% counter-trace replay
    let refine = laws::refine_laws(0, 10_000);
    gate.criterion(
        7,
        &format!(
            "oracle/game agreement on 10⁴ pairs: {} checks, {} violations ({})",
            refine.checks,
            refine.violations,
            refine.notes.join("; ")
        ),
        refine.violations == 0,
    );

    // 8. the memory-language stack: the allocation quadruple, the memory
    //    model unit facts, and every relational rule at ≥ 50 samples
    let (snippet_ok, _) = example_passes("snippet-6.1", None);
    let mem = laws::memlang_laws(0, 200);
    let mut fig9_ok = true;
    for rule in memlang::FIG9_RULES {
        let r = memlang::fig9_harness(rule, 50, 0).expect("known rule");
        if r.violations > 0 {
            println!("    fig9 {rule}: {:?}", r.notes);
            fig9_ok = false;
        }
    }
    gate.criterion(
        8,
        "memory language: allocation quadruple, memory-model unit facts, relational rules × 50",
        snippet_ok && mem.ok() && fig9_ok,
    );

    // 9. wrapper elimination on the closed map program with consistent
    //    initial resources
    let (ok, t) = example_passes("wet-instance", None);
    gate.criterion(9, &format!("wrapper elimination instance in {t:.2?}"), ok);

    // 10. self-relatedness of every memory-language module and the
    //     repetition-count equalization
    let (ok_self, _) = example_passes("self-relatedness", None);
    let (ok_pad, _) = example_passes("j-padding", None);
    gate.criterion(10, "self-relatedness and repetition equalization", ok_self && ok_pad);

    assert!(gate.failures.is_empty(), "failed criteria: {:#?}", gate.failures);
}

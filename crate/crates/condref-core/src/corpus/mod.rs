//! The example corpus: each example packages modules, conditions, a
//! universe, and a list of obligations with golden expected outcomes.
//! Running an example reproduces every expected verdict; mismatches are
//! failures, never baseline updates.

pub mod bitset;
pub mod cex71;
pub mod cexappb;
pub mod laws;
pub mod map;
pub mod selfrel;
pub mod snippet61;
pub mod umap;

use std::collections::BTreeMap;
use std::rc::Rc;

use serde::Serialize;

use crate::beh::Trace;
use crate::refine::Verdict;
use crate::res::Ra;
use crate::wrapper::WrapVariant;

/// What an obligation is expected to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Expectation {
    Proven,
    Refuted,
    /// A law-style boolean check.
    Holds,
}

/// What an obligation actually produced.
#[derive(Debug, Clone, Serialize)]
pub enum Outcome {
    Verdict(Verdict),
    Bool(bool),
    Error(String),
}

impl Outcome {
    pub fn matches(&self, e: Expectation) -> bool {
        match (self, e) {
            (Outcome::Verdict(v), Expectation::Proven) => v.is_proven(),
            (Outcome::Verdict(v), Expectation::Refuted) => v.is_refuted(),
            (Outcome::Bool(b), Expectation::Holds) => *b,
            _ => false,
        }
    }

    pub fn counter_trace(&self) -> Option<&Trace> {
        match self {
            Outcome::Verdict(Verdict::Refuted(r)) => Some(&r.counter),
            _ => None,
        }
    }

    pub fn short(&self) -> String {
        match self {
            Outcome::Verdict(v) => v.short().to_string(),
            Outcome::Bool(true) => "Holds".to_string(),
            Outcome::Bool(false) => "Fails".to_string(),
            Outcome::Error(e) => format!("Error({e})"),
        }
    }
}

type RunFn = Rc<dyn Fn(&RunCfg) -> Outcome>;

/// One checkable obligation with its golden expectation and provenance
/// note.
pub struct Obligation {
    pub id: String,
    pub variant: WrapVariant,
    pub expected: Expectation,
    pub note: String,
    pub run: RunFn,
}

impl Obligation {
    pub fn new(
        id: &str,
        variant: WrapVariant,
        expected: Expectation,
        note: &str,
        run: impl Fn(&RunCfg) -> Outcome + 'static,
    ) -> Obligation {
        Obligation {
            id: id.to_string(),
            variant,
            expected,
            note: note.to_string(),
            run: Rc::new(run),
        }
    }
}

/// A corpus example: a universe-backed set of obligations. Building is
/// deferred so listing stays cheap.
pub struct Example {
    pub id: String,
    pub summary: String,
    pub obligations: Vec<Obligation>,
    /// Whether the example supports the one-step universe-growth check.
    pub growable: bool,
}

/// Runner configuration. `grown` asks examples to enlarge their universe
/// by one value (a Proven verdict must not flip).
#[derive(Debug, Clone)]
pub struct RunCfg {
    pub seed: u64,
    pub grown: bool,
    pub variant_filter: Option<WrapVariant>,
    pub max_carrier: u32,
    pub fuel_override: Option<u32>,
    pub universe_cap: Option<usize>,
}

impl Default for RunCfg {
    fn default() -> Self {
        RunCfg {
            seed: 0,
            grown: false,
            variant_filter: None,
            max_carrier: crate::wrapper::WRAP_CARRIER_BOUND,
            fuel_override: None,
            universe_cap: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ObligationReport {
    pub id: String,
    pub variant: String,
    pub expected: Expectation,
    pub outcome: String,
    pub matched: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_trace: Option<Trace>,
    pub note: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExampleReport {
    pub example: String,
    pub seed: u64,
    pub grown: bool,
    pub obligations: Vec<ObligationReport>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u128>,
}

/// Runs an example's obligations (filtered by variant if requested);
/// obligation reports are sorted by id so assembly is order-independent.
pub fn run_example(ex: &Example, cfg: &RunCfg, with_timing: bool) -> ExampleReport {
    let t0 = std::time::Instant::now();
    let mut obs = Vec::new();
    for ob in &ex.obligations {
        if let Some(vf) = cfg.variant_filter {
            if ob.variant != vf {
                continue;
            }
        }
        let outcome = (ob.run)(cfg);
        let matched = outcome.matches(ob.expected);
        obs.push(ObligationReport {
            id: ob.id.clone(),
            variant: format!("{:?}", ob.variant),
            expected: ob.expected,
            outcome: outcome.short(),
            matched,
            counter_trace: outcome.counter_trace().cloned(),
            note: ob.note.clone(),
        });
    }
    obs.sort_by(|a, b| a.id.cmp(&b.id));
    let passed = obs.iter().all(|o| o.matched);
    ExampleReport {
        example: ex.id.clone(),
        seed: cfg.seed,
        grown: cfg.grown,
        obligations: obs,
        passed,
        wall_ms: with_timing.then(|| t0.elapsed().as_millis()),
    }
}

/// The registry of shipped examples.
pub struct ExampleDef {
    pub id: &'static str,
    pub summary: &'static str,
    pub build: fn() -> Example,
}

pub fn registry() -> Vec<ExampleDef> {
    vec![
        ExampleDef {
            id: "map-lower",
            summary: "key-value store: memory implementation refines the \
                      asserting abstraction under the relational condition \
                      with the uninit token",
            build: map::map_lower,
        },
        ExampleDef {
            id: "map-upper",
            summary: "key-value store: asserting abstraction refines the \
                      plain map under per-key points-to conditions",
            build: map::map_upper,
        },
        ExampleDef {
            id: "map-chain",
            summary: "condition-composition chain: vertical composition, \
                      interchange with hypotheses, and the composed \
                      end-to-end refinement",
            build: map::map_chain,
        },
        ExampleDef {
            id: "umap-analogue",
            summary: "compact map variant: proven under the value-range \
                      contract, refuted without it",
            build: umap::umap_analogue,
        },
        ExampleDef {
            id: "bitset",
            summary: "bitset tower: vertical composition of argument-type \
                      translations; ∗ contrasted with ⋉",
            build: bitset::bitset,
        },
        ExampleDef {
            id: "cex-7.1",
            summary: "vertical-framing counterexample: unframed refinement \
                      provable, framed one refuted",
            build: cex71::cex71,
        },
        ExampleDef {
            id: "cex-appB",
            summary: "weak/strong update separation on the six-token \
                      algebra with end-to-end falsity",
            build: cexappb::cexappb,
        },
        ExampleDef {
            id: "wet-instance",
            summary: "wrapper elimination: wrapped closed map program \
                      refines the erased one, with consistent initial \
                      resources",
            build: map::wet_instance,
        },
        ExampleDef {
            id: "snippet-6.1",
            summary: "relational memory-logic quadruple: target-only \
                      allocation steps with a lock-step allocated return",
            build: snippet61::snippet61,
        },
        ExampleDef {
            id: "self-relatedness",
            summary: "every corpus memory-language module is self-related \
                      under the relational condition",
            build: selfrel::self_relatedness,
        },
        ExampleDef {
            id: "j-padding",
            summary: "repetition-count equalization of the relational \
                      condition at the condition-algebra level",
            build: selfrel::j_padding,
        },
    ]
}

pub fn find_example(id: &str) -> Option<ExampleDef> {
    registry().into_iter().find(|e| e.id == id)
}

/// Builds an example universe under the runner's bound flags: the carrier
/// must fit `--max-carrier`, the value count `--universe-cap`, and `--fuel`
/// overrides the default fuel.
pub fn mk_universe(
    cfg: &RunCfg,
    values: Vec<crate::any::Any>,
    ra: &Ra,
    default_fuel: u32,
) -> Result<crate::universe::Universe, String> {
    if ra.size() > cfg.max_carrier {
        return Err(format!(
            "carrier size {} exceeds --max-carrier {}",
            ra.size(),
            cfg.max_carrier
        ));
    }
    if let Some(cap) = cfg.universe_cap {
        if values.len() > cap {
            return Err(format!("universe size {} exceeds --universe-cap {cap}", values.len()));
        }
    }
    let fuel = cfg.fuel_override.unwrap_or(default_fuel);
    Ok(crate::universe::Universe::new(values, ra.clone(), fuel))
}

/// Lifts per-factor elements into a product algebra: `parts` assigns
/// elements to factor positions, everything else is the factor unit.
pub fn prod_elem(ra: &Ra, parts: &[(usize, u32)]) -> u32 {
    let factors = ra.factors_vec().expect("product algebra");
    let mut idx = 0u32;
    for (i, f) in factors.iter().enumerate() {
        let p = parts
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, e)| *e)
            .unwrap_or_else(|| f.unit());
        idx = idx * f.size() + p;
    }
    idx
}

/// Deterministic JSON for a set of example reports.
pub fn reports_to_json(reports: &[ExampleReport]) -> String {
    serde_json::to_string_pretty(&reports).expect("reports serialize")
}

/// Sanity check used by tests: two runs with the same configuration give
/// byte-identical JSON (timings excluded).
pub fn determinism_check(def: &ExampleDef, cfg: &RunCfg) -> bool {
    let a = run_example(&(def.build)(), cfg, false);
    let b = run_example(&(def.build)(), cfg, false);
    reports_to_json(&[a]) == reports_to_json(&[b])
}

fn expectation_summary(ex: &Example) -> BTreeMap<String, String> {
    ex.obligations
        .iter()
        .map(|o| (o.id.clone(), format!("{:?}/{:?}", o.expected, o.variant)))
        .collect()
}

/// `list`-style lines: example ids with obligation expectations.
pub fn list_lines() -> Vec<String> {
    registry()
        .iter()
        .map(|d| {
            let ex = (d.build)();
            let obs: Vec<String> = expectation_summary(&ex)
                .into_iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{}: {}\n    {}", d.id, d.summary, obs.join(" "))
        })
        .collect()
}

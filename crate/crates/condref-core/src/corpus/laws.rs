//! Property-law suites: resource-algebra and modality laws, condition-
//! algebra laws on generated conditions, oracle/game agreement on random
//! tree pairs, and the memory-model unit facts. Exercised by the `laws`
//! subcommand and the acceptance gate.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::any::Any;
use crate::beh::{beh_contains, beh_state, beh_subset, BehCtx};
use crate::conds::{cond_equiv_bounded, cond_sep, cond_vcomp, eps_cond, top_cond, Cond, CondEquiv};
use crate::game::{game_solve_flat, gen_tree, TreeGenCfg};
use crate::memlang::{Mem, Val};
use crate::refine::Verdict;
use crate::res::sprop::{cur_sprops, peek_upd, Strength};
use crate::res::{ra_instances, six_token, unit_ra, Bits, Ra, SProp};
use crate::universe::Universe;

#[derive(Debug, Clone, Serialize)]
pub struct LawReport {
    pub suite: String,
    pub checks: u64,
    pub violations: u64,
    pub notes: Vec<String>,
}

impl LawReport {
    fn new(suite: &str) -> LawReport {
        LawReport { suite: suite.into(), checks: 0, violations: 0, notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, note: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.violations += 1;
            if self.notes.len() < 20 {
                self.notes.push(note());
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.violations == 0
    }
}

fn random_sprop<R: Rng>(rng: &mut R, ra: &Ra) -> SProp {
    let mut bits = Bits::empty(ra.size());
    for i in 0..ra.size() {
        if rng.gen_bool(0.4) {
            bits.set(i);
        }
    }
    SProp::from_bits(ra, bits)
}

/// Resource-algebra axioms re-verified on every shipped instance, plus the
/// update-modality rule suite (exhaustive on carriers ≤ 8) and the
/// weak/strong separation witness.
pub fn res_laws(seed: u64, iters: u64) -> LawReport {
    let mut rep = LawReport::new("res");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for ra in ra_instances() {
        // construction already checked the axioms; spot-check a few here
        let e = ra.unit();
        rep.check(ra.valid(e), || format!("{}: unit invalid", ra.name()));
        for a in ra.elems() {
            rep.check(ra.op(e, a) == a, || format!("{}: unit not identity", ra.name()));
            rep.check(
                !ra.valid(ra.op(a, a)) || ra.valid(a),
                || format!("{}: validity not down-closed", ra.name()),
            );
        }
        // SUPD rules, exhaustively over generated propositions
        let n_props = if ra.size() <= 8 { 1 << ra.size() } else { 0 };
        if n_props > 0 {
            let all_props: Vec<SProp> = (0..n_props)
                .map(|mask| {
                    SProp::from_fn(&ra, |i| mask & (1u32 << i) != 0)
                })
                .collect();
            for p in &all_props {
                let sp = p.supd();
                // SUPD-I: P ⊢ ⊩P
                rep.check(p.entails(&sp), || format!("{}: SUPD-I", ra.name()));
                // SUPD-E: ⊩⊩P ⊢ ⊩P
                rep.check(sp.supd().entails(&sp), || format!("{}: SUPD-E", ra.name()));
                // SUPD-WUPD: ⊩P ⊢ ⊩w P
                rep.check(sp.entails(&p.wupd()), || format!("{}: SUPD-WUPD", ra.name()));
                for q in &all_props {
                    // SUPD-MONO
                    if p.entails(q) {
                        rep.check(sp.entails(&q.supd()), || format!("{}: SUPD-MONO", ra.name()));
                    }
                    // SUPD-FRAME: ⊩P ∗ Q ⊢ ⊩(P ∗ Q)
                    rep.check(
                        sp.sep(q).entails(&p.sep(q).supd()),
                        || format!("{}: SUPD-FRAME", ra.name()),
                    );
                }
            }
            // SUPD-UPD: a ⤳ b implies ⟦a⟧ ⊢ ⊩⟦b⟧
            for a in ra.elems() {
                for b in ra.elems() {
                    if ra.fp_update_idx(a, b) {
                        let owned = SProp::own(&ra.resource(a));
                        let target = SProp::own(&ra.resource(b)).supd();
                        rep.check(owned.entails(&target), || {
                            format!("{}: SUPD-UPD {a}⤳{b}", ra.name())
                        });
                    }
                }
            }
        }
        // Iris structural laws on sampled propositions
        for _ in 0..iters.min(200) {
            let p = random_sprop(&mut rng, &ra);
            let q = random_sprop(&mut rng, &ra);
            let r = random_sprop(&mut rng, &ra);
            rep.check(p.sep(&q) == q.sep(&p), || format!("{}: sep comm", ra.name()));
            rep.check(
                p.sep(&q).sep(&r) == p.sep(&q.sep(&r)),
                || format!("{}: sep assoc", ra.name()),
            );
            let pm = p.mono_closure();
            rep.check(
                pm.sep(&SProp::pure(&ra, true)).equivalent(&pm),
                || format!("{}: sep unit on closed predicates", ra.name()),
            );
            // wand adjunction
            let lhs = p.sep(&r).entails(&q);
            let rhs = r.entails(&p.wand(&q));
            rep.check(lhs == rhs, || format!("{}: wand adjunction", ra.name()));
        }
    }
    // weak/strong separation witness on the six-token algebra
    let ra = six_token::six_token_ra();
    let beta = SProp::own(&ra.resource(six_token::idx(0, 2)));
    let pick = SProp::exists(
        &ra,
        &[
            SProp::own(&ra.resource(six_token::idx(0, 1))),
            SProp::own(&ra.resource(six_token::idx(0, 3))),
        ],
    );
    rep.check(beta.entails(&pick.wupd()), || "six-token: weak update fails".into());
    rep.check(!beta.entails(&pick.supd()), || "six-token: strong update holds".into());
    rep
}

/// cur-sProps rules on generated inputs.
pub fn cur_sprops_laws(seed: u64, iters: u64) -> LawReport {
    let mut rep = LawReport::new("cur-sprops");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x11);
    for ra in ra_instances().into_iter().filter(|r| r.size() <= 32) {
        for _ in 0..iters.min(100) {
            let p = random_sprop(&mut rng, &ra);
            let q = random_sprop(&mut rng, &ra);
            for a in ra.elems() {
                let res = ra.resource(a);
                let cp = cur_sprops(&res, &p).unwrap();
                // MONO
                if p.entails(&q) && cp {
                    rep.check(cur_sprops(&res, &q).unwrap(), || "CUR-SPROPS-MONO".into());
                }
                // PURE (⌜φ⌝ ∗ Q with φ true reduces to ⋆-extension of Q)
                let pure_q = SProp::pure(&ra, true).sep(&q);
                if cur_sprops(&res, &pure_q).unwrap() {
                    rep.check(cur_sprops(&res, &q).unwrap(), || "CUR-SPROPS-PURE".into());
                }
                // FORALL / EXISTS
                let fam = [p.clone(), q.clone()];
                let all = SProp::forall(&ra, &fam);
                if cur_sprops(&res, &all).unwrap() {
                    rep.check(
                        fam.iter().all(|f| cur_sprops(&res, f).unwrap()),
                        || "CUR-SPROPS-FORALL".into(),
                    );
                }
                let any_of = SProp::exists(&ra, &fam);
                rep.check(
                    cur_sprops(&res, &any_of).unwrap()
                        == fam.iter().any(|f| cur_sprops(&res, f).unwrap()),
                    || "CUR-SPROPS-EXISTS".into(),
                );
                // SUPD
                if cur_sprops(&res, &p.supd()).unwrap() {
                    rep.check(cp, || "CUR-SPROPS-SUPD".into());
                }
                // VALID
                for b in ra.elems() {
                    if cur_sprops(&res, &SProp::own(&ra.resource(b))).unwrap() {
                        rep.check(ra.valid(b), || "CUR-SPROPS-VALID".into());
                    }
                }
            }
        }
    }
    rep
}

/// Peeking-modality rules, exhaustive predicate quantifier, carriers ≤ 8,
/// both update strengths.
pub fn peeking_laws(seed: u64, iters: u64) -> LawReport {
    let mut rep = LawReport::new("peeking");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x12);
    for ra in ra_instances().into_iter().filter(|r| r.size() <= 8) {
        for strength in [Strength::Weak, Strength::Strong] {
            for _ in 0..iters.min(12) {
                let p = random_sprop(&mut rng, &ra);
                let q = random_sprop(&mut rng, &ra);
                let r = random_sprop(&mut rng, &ra);
                let s = r.and(&random_sprop(&mut rng, &ra)); // s ⊢ r
                let peek = |rr: &SProp, pp: &SProp| peek_upd(rr, pp, strength, 14).unwrap();
                let rp = peek(&r, &p);
                // PEEKING-MONO (derived)
                if p.entails(&q) {
                    rep.check(rp.entails(&peek(&r, &q)), || "PEEKING-MONO".into());
                }
                // PEEKING-WAND: (P −∗ Q) ∗ (R ⊩ P) ⊢ R ⊩ Q
                rep.check(
                    p.wand(&q).sep(&rp).entails(&peek(&r, &q)),
                    || "PEEKING-WAND".into(),
                );
                // PEEKING-ANTI: S ⊢ R implies R ⊩ P ⊢ S ⊩ P
                rep.check(rp.entails(&peek(&s, &p)), || "PEEKING-ANTI".into());
                // PEEKING-TRUE: ⊤ ⊩ P ⊣⊢ ⊩ P
                rep.check(
                    peek(&SProp::pure(&ra, true), &p).equivalent(&p.upd(strength)),
                    || "PEEKING-TRUE".into(),
                );
                // PEEKING-JOIN: R ⊩ (R ⊩ P) ⊢ R ⊩ P
                rep.check(peek(&r, &rp).entails(&rp), || "PEEKING-JOIN".into());
                // PEEKING-∗ (frame): (R ⊩ P) ∗ Q ⊢ R ⊩ (P ∗ Q)
                rep.check(
                    rp.sep(&q).entails(&peek(&r, &p.sep(&q))),
                    || "PEEKING-∗".into(),
                );
                // PEEKING-E: P ∗ ((P ∗ R) ⊩ Q) ⊢ R ⊩ (P ∗ Q)
                rep.check(
                    p.sep(&peek(&p.sep(&r), &q)).entails(&peek(&r, &p.sep(&q))),
                    || "PEEKING-E".into(),
                );
                // PEEKING-E-FULL (derived): P ∗ (P ⊩ Q) ⊢ ⊩(P ∗ Q)
                rep.check(
                    p.sep(&peek(&p, &q)).entails(&p.sep(&q).upd(strength)),
                    || "PEEKING-E-FULL".into(),
                );
            }
            // PEEKING-I: (p·r) ⤳ (q·r) implies ⟦p⟧ ⊢ ⟦r⟧ ⊩ ⟦q⟧
            for _ in 0..iters.min(16) {
                let p = rng.gen_range(0..ra.size());
                let q = rng.gen_range(0..ra.size());
                let r = rng.gen_range(0..ra.size());
                if ra.fp_update_idx(ra.op(p, r), ra.op(q, r)) {
                    let own = |i: u32| SProp::own(&ra.resource(i));
                    let target = peek_upd(&own(r), &own(q), strength, 14).unwrap();
                    rep.check(own(p).entails(&target), || "PEEKING-I".into());
                }
            }
        }
    }
    rep
}

/// Generates a random condition: aux up to 3, monotone-closed tables.
fn random_cond<R: Rng>(rng: &mut R, ra: &Ra, u: &Universe) -> Cond {
    let aux_n = rng.gen_range(1..=3usize);
    let aux: Vec<Any> = (0..aux_n as i64).map(Any::Int).collect();
    let mut pre_tab: HashMap<(Any, Any, Any), SProp> = HashMap::new();
    let mut post_tab: HashMap<(Any, Any, Any), SProp> = HashMap::new();
    for x in &aux {
        for a in u.values() {
            for b in u.values() {
                pre_tab.insert(
                    (x.clone(), a.clone(), b.clone()),
                    random_sprop(rng, ra).mono_closure(),
                );
                post_tab.insert(
                    (x.clone(), a.clone(), b.clone()),
                    random_sprop(rng, ra).mono_closure(),
                );
            }
        }
    }
    let ra2 = ra.clone();
    let ra3 = ra.clone();
    Cond::new(
        ra,
        aux,
        move |x, a, b| {
            pre_tab
                .get(&(x.clone(), a.clone(), b.clone()))
                .cloned()
                .unwrap_or_else(|| SProp::pure(&ra2, false))
        },
        move |x, a, b| {
            post_tab
                .get(&(x.clone(), a.clone(), b.clone()))
                .cloned()
                .unwrap_or_else(|| SProp::pure(&ra3, false))
        },
    )
}

/// Condition-algebra laws on generated conditions over 4-value universes.
pub fn conds_laws(seed: u64, iters: u64) -> LawReport {
    let mut rep = LawReport::new("conds");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x13);
    let ra = crate::res::exclusive("claws", &["x"]);
    let u = Universe::new(
        vec![Any::Int(0), Any::Int(1), Any::Int(2), Any::Int(3)],
        ra.clone(),
        4,
    );
    let equiv = |a: &Cond, b: &Cond| -> bool {
        !matches!(cond_equiv_bounded(a, b, &u, 27), Ok(CondEquiv::No) | Err(_))
    };
    for i in 0..iters {
        let c = random_cond(&mut rng, &ra, &u);
        let d = random_cond(&mut rng, &ra, &u);
        let e = random_cond(&mut rng, &ra, &u);
        // units
        rep.check(equiv(&cond_sep(&top_cond(&ra), &c), &c), || format!("⊤∗c ≢ c at {i}"));
        rep.check(equiv(&cond_sep(&c, &top_cond(&ra)), &c), || format!("c∗⊤ ≢ c at {i}"));
        rep.check(
            equiv(&cond_vcomp(&eps_cond(&ra), &c, &u), &c),
            || format!("ε⋉c ≢ c at {i}"),
        );
        rep.check(
            equiv(&cond_vcomp(&c, &eps_cond(&ra), &u), &c),
            || format!("c⋉ε ≢ c at {i}"),
        );
        // commutativity of ∗
        rep.check(equiv(&cond_sep(&c, &d), &cond_sep(&d, &c)), || format!("∗ comm at {i}"));
        // associativity
        rep.check(
            equiv(&cond_sep(&cond_sep(&c, &d), &e), &cond_sep(&c, &cond_sep(&d, &e))),
            || format!("∗ assoc at {i}"),
        );
        rep.check(
            equiv(
                &cond_vcomp(&cond_vcomp(&c, &d, &u), &e, &u),
                &cond_vcomp(&c, &cond_vcomp(&d, &e, &u), &u),
            ),
            || format!("⋉ assoc at {i}"),
        );
        // ≡ is an equivalence and the operators respect it
        rep.check(equiv(&c, &c), || format!("≡ not reflexive at {i}"));
        let c2 = cond_sep(&c, &top_cond(&ra)); // c2 ≡ c
        rep.check(
            equiv(&cond_sep(&c2, &d), &cond_sep(&c, &d)),
            || format!("∗ not ≡-proper at {i}"),
        );
        rep.check(
            equiv(&cond_vcomp(&c2, &d, &u), &cond_vcomp(&c, &d, &u)),
            || format!("⋉ not ≡-proper at {i}"),
        );
    }
    rep
}

/// Oracle/game agreement on seeded random tree pairs plus counter-trace
/// replay and oracle-level transitivity.
pub fn refine_laws(seed: u64, iters: u64) -> LawReport {
    let mut rep = LawReport::new("refine");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x14);
    let ra = unit_ra();
    let u = Universe::new(vec![Any::Int(0), Any::Int(1)], ra, 8);
    let cfg = TreeGenCfg { with_state: true, ..TreeGenCfg::default() };
    let ctx = BehCtx::new();
    let mut unknowns = 0u64;
    for i in 0..iters {
        let t = gen_tree(&mut rng, &cfg, cfg.max_depth);
        let s = gen_tree(&mut rng, &cfg, cfg.max_depth);
        let st = Any::Int(0);
        let v = game_solve_flat(&t, &st, &s, &st, &u);
        let bt = beh_state(&ctx, &t.to_tree(), st.clone(), &u).unwrap();
        let bs = beh_state(&ctx, &s.to_tree(), st.clone(), &u).unwrap();
        let included = beh_subset(&ctx, &bt, &bs).is_ok();
        match &v {
            Verdict::Proven => rep.check(included, || format!("game over-proved at {i}")),
            Verdict::Refuted(r) => {
                rep.check(!included, || format!("game over-refuted at {i}"));
                rep.check(
                    beh_contains(&ctx, &bt, &r.counter) && !beh_contains(&ctx, &bs, &r.counter),
                    || format!("counter-trace does not replay at {i}"),
                );
            }
            Verdict::Unknown(_) => {
                unknowns += 1;
                rep.check(included, || format!("unknown on a non-inclusion at {i}"));
            }
        }
    }
    rep.notes.push(format!("unknown rate: {unknowns}/{iters}"));
    // transitivity at the oracle level on sampled triples
    for i in 0..iters.min(500) {
        let a = gen_tree(&mut rng, &cfg, 3);
        let b = gen_tree(&mut rng, &cfg, 3);
        let c = gen_tree(&mut rng, &cfg, 3);
        let st = Any::Int(0);
        let ba = beh_state(&ctx, &a.to_tree(), st.clone(), &u).unwrap();
        let bb = beh_state(&ctx, &b.to_tree(), st.clone(), &u).unwrap();
        let bc = beh_state(&ctx, &c.to_tree(), st.clone(), &u).unwrap();
        if beh_subset(&ctx, &ba, &bb).is_ok() && beh_subset(&ctx, &bb, &bc).is_ok() {
            rep.check(beh_subset(&ctx, &ba, &bc).is_ok(), || format!("transitivity at {i}"));
        }
    }
    rep
}

/// Memory-model unit facts as executable checks.
pub fn memlang_laws(seed: u64, iters: u64) -> LawReport {
    let mut rep = LawReport::new("memlang");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x15);
    for _ in 0..iters.min(200) {
        let m = Mem::new();
        let cells = 8 * rng.gen_range(1..4i64);
        let (m1, p) = m.alloc(&Val::long(cells)).unwrap();
        rep.check(
            m1.blocks[&0].len() as i64 == cells / 8,
            || "alloc granularity".into(),
        );
        // fresh blocks are never reused
        let m2 = m1.free(&p).unwrap();
        let (_, p2) = m2.alloc(&Val::long(8)).unwrap();
        rep.check(p != p2, || "block id reuse".into());
        // load∘store and store∘store
        let v = Val::long(rng.gen_range(0..100));
        let w = Val::long(rng.gen_range(0..100));
        let m3 = m1.store(&p, v.clone()).unwrap();
        rep.check(m3.load(&p).unwrap() == v, || "load after store".into());
        let m4 = m3.store(&p, w.clone()).unwrap();
        rep.check(m4.load(&p).unwrap() == w, || "store then store".into());
        // free then access is UB at the model level
        let m5 = m4.free(&p).unwrap();
        rep.check(m5.load(&p).is_err(), || "load after free".into());
        rep.check(m5.store(&p, v).is_err(), || "store after free".into());
    }
    rep
}

/// Runs a suite by name.
pub fn run_suite(name: &str, seed: u64, iters: u64) -> Option<Vec<LawReport>> {
    match name {
        "res" => Some(vec![
            res_laws(seed, iters),
            cur_sprops_laws(seed, iters),
            peeking_laws(seed, iters),
        ]),
        "conds" => Some(vec![conds_laws(seed, iters)]),
        "refine" => {
            let mut out = vec![refine_laws(seed, iters)];
            for rule in crate::harness::FIG5_RULES {
                let r = crate::harness::rule_harness(rule, (iters / 100).max(2) as usize, seed)
                    .expect("known rule");
                out.push(LawReport {
                    suite: format!("fig5/{rule}"),
                    checks: r.instances as u64,
                    violations: r.violations as u64,
                    notes: r.notes,
                });
            }
            Some(out)
        }
        "memlang" => {
            let mut out = vec![memlang_laws(seed, iters)];
            for rule in crate::memlang::FIG9_RULES {
                let r = crate::memlang::fig9_harness(rule, (iters / 20).max(2) as usize, seed)
                    .expect("known rule");
                out.push(LawReport {
                    suite: format!("fig9/{rule}"),
                    checks: r.instances as u64,
                    violations: r.violations as u64,
                    notes: r.notes,
                });
            }
            Some(out)
        }
        _ => None,
    }
}

pub const SUITES: &[&str] = &["res", "conds", "refine", "memlang"];

/// All suites.
pub fn run_all(seed: u64, iters: u64) -> Vec<LawReport> {
    SUITES
        .iter()
        .flat_map(|s| run_suite(s, seed, iters).expect("known suite"))
        .collect()
}

//! Sampled soundness harness for the simulation-logic rules beyond the
//! first-box game moves: condition-event rules, call/return, and the
//! structural rules (frame, bind, monotonicity, strong update).
//!
//! Each rule is instantiated on small concrete module pairs; premises are
//! checked Proven and the rule's conclusion instance must then be Proven
//! as well (violations are hard failures). A few deliberately broken
//! variants are pinned Refuted so the harness keeps its teeth.

use std::rc::Rc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::any::Any;
use crate::conds::{Cond, Conds};
use crate::module::{embed, FunDef, Mod, PlainMod};
use crate::refine::check_refine_module;
use crate::res::{exclusive, Ra, SProp};
use crate::tree::{call, ret, Tree};
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub rule: String,
    pub instances: usize,
    pub violations: usize,
    pub notes: Vec<String>,
}

pub const FIG5_RULES: &[&str] = &[
    "STAR-ASSUME-SRC",
    "STAR-ASSERT-SRC",
    "STAR-ASSUME-TGT",
    "STAR-ASSERT-TGT",
    "SIM-CALL",
    "SIM-RET",
    "SIM-MONO",
    "SIM-BIND",
    "SIM-BIND-ALT",
    "SIM-FRAME",
    "SIM-SUPD",
];

fn skip_mod(ra: &Ra, v: i64) -> Mod {
    let pm = PlainMod::new(
        vec![("f", Rc::new(move |_: &Any| ret(Any::Int(v))) as FunDef)],
        Any::Unit,
    );
    embed(&pm, ra.unit_resource())
}

fn mod_with_body(ra: &Ra, body: impl Fn(&Any) -> Tree + 'static) -> Mod {
    let pm = PlainMod::new(vec![("f", Rc::new(body) as FunDef)], Any::Unit);
    embed(&pm, ra.unit_resource())
}

fn uni(ra: &Ra) -> Universe {
    Universe::new(vec![Any::Unit, Any::Int(0), Any::Int(1)], ra.clone(), 8)
}

fn own_cond(ra: &Ra, pre: Option<SProp>, post: Option<SProp>) -> Cond {
    let ra2 = ra.clone();
    let ra3 = ra.clone();
    Cond::new(
        ra,
        vec![Any::Unit],
        move |_, a_s, a_t| {
            let eq = SProp::pure(&ra2, a_s == a_t);
            match &pre {
                None => eq,
                Some(p) => eq.and(p),
            }
        },
        move |_, r_s, r_t| {
            let eq = SProp::pure(&ra3, r_s == r_t);
            match &post {
                None => eq,
                Some(q) => eq.and(q),
            }
        },
    )
}

/// Runs `samples` seeded instances of a named rule.
pub fn rule_harness(rule: &str, samples: usize, seed: u64) -> Result<HarnessReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf15);
    let mut violations = 0usize;
    let mut notes = Vec::new();
    for i in 0..samples {
        match run_instance(rule, &mut rng) {
            None => return Err(format!("unknown rule {rule}")),
            Some(Ok(())) => {}
            Some(Err(msg)) => {
                violations += 1;
                notes.push(format!("sample {i}: {msg}"));
            }
        }
    }
    Ok(HarnessReport { rule: rule.into(), instances: samples, violations, notes })
}

fn run_instance<R: Rng>(rule: &str, rng: &mut R) -> Option<Result<(), String>> {
    let ra = exclusive("hx", &["x", "y"]);
    let x = ra.resource(ra.elem_by_name("x").unwrap());
    let y = ra.resource(ra.elem_by_name("y").unwrap());
    let u = uni(&ra);
    let v = rng.gen_range(0..2i64);
    let variant = WrapVariant::V2Strong;
    let expect = |verdict: crate::refine::Verdict, wanted: bool, what: &str| {
        if verdict.is_proven() == wanted {
            Ok(())
        } else {
            Err(format!("{what}: got {}", verdict.short()))
        }
    };
    Some(match rule {
        "SIM-RET" => {
            // both sides immediately return with the postcondition satisfied
            let t = skip_mod(&ra, v);
            let s = skip_mod(&ra, v);
            let d = Conds::new(&ra, vec![("f", own_cond(&ra, None, None))]);
            let r = check_refine_module(&t, &s, &Conds::eps(&ra), &d, &u, variant).unwrap();
            expect(r, true, "SIM-RET")
        }
        "STAR-ASSUME-SRC" => {
            // the source assumes ⟦x⟧ mid-body, which funds an ⟦x⟧ post
            let own_x = SProp::own(&x);
            let s = mod_with_body(&ra, {
                let own_x = own_x.clone();
                move |_| Tree::SAssume(own_x.clone(), Rc::new(ret(Any::Int(0))))
            });
            let t = skip_mod(&ra, 0);
            let d = Conds::new(&ra, vec![("f", own_cond(&ra, None, Some(own_x.clone())))]);
            let r = check_refine_module(&t, &s, &Conds::eps(&ra), &d, &u, variant).unwrap();
            expect(r, true, "STAR-ASSUME-SRC positive").and_then(|_| {
                // without the assumed resource the post is unforgeable
                let s2 = skip_mod(&ra, 0);
                let r =
                    check_refine_module(&t, &s2, &Conds::eps(&ra), &d, &u, variant).unwrap();
                expect(r, false, "STAR-ASSUME-SRC negative")
            })
        }
        "STAR-ASSERT-SRC" => {
            // the source asserts away a resource granted by its precondition
            let own_x = SProp::own(&x);
            let s = mod_with_body(&ra, {
                let own_x = own_x.clone();
                move |_| Tree::SAssert(own_x.clone(), Rc::new(ret(Any::Int(0))))
            });
            let t = skip_mod(&ra, 0);
            let d = Conds::new(&ra, vec![("f", own_cond(&ra, Some(own_x), None))]);
            let r = check_refine_module(&t, &s, &Conds::eps(&ra), &d, &u, variant).unwrap();
            expect(r, true, "STAR-ASSERT-SRC")
        }
        "STAR-ASSUME-TGT" => {
            // the target assumes ⟦x⟧; the surviving branches carry the
            // extra resource and exit through the trivial assert
            let own_x = SProp::own(&x);
            let t = mod_with_body(&ra, {
                let own_x = own_x.clone();
                move |_| Tree::SAssume(own_x.clone(), Rc::new(ret(Any::Int(0))))
            });
            let s = skip_mod(&ra, 0);
            let r = check_refine_module(
                &t,
                &s,
                &Conds::eps(&ra),
                &Conds::eps(&ra),
                &u,
                variant,
            )
            .unwrap();
            expect(r, true, "STAR-ASSUME-TGT")
        }
        "STAR-ASSERT-TGT" => {
            // the target asserts ⟦x⟧ funded by its own wrapped precondition
            let own_x = SProp::own(&x);
            let t = mod_with_body(&ra, {
                let own_x = own_x.clone();
                move |_| Tree::SAssert(own_x.clone(), Rc::new(ret(Any::Int(0))))
            });
            let s = skip_mod(&ra, 0);
            let c = Conds::new(&ra, vec![("f", own_cond(&ra, Some(own_x.clone()), None))]);
            let d = Conds::new(&ra, vec![("f", own_cond(&ra, Some(own_x), None))]);
            let r = check_refine_module(&t, &s, &c, &d, &u, variant).unwrap();
            expect(r, true, "STAR-ASSERT-TGT")
        }
        "SIM-CALL" => {
            // a conditioned call: the caller provides the callee's pre and
            // relies on its post
            let own_x = SProp::own(&x);
            let g_cond = own_cond(&ra, Some(own_x.clone()), None);
            let body = |_: &Any| call("g", Any::Int(1), |r| ret(r.clone()));
            let two = |ra: &Ra| {
                let pm = PlainMod::new(
                    vec![
                        ("f", Rc::new(body) as FunDef),
                        ("g", Rc::new(|a: &Any| ret(a.clone())) as FunDef),
                    ],
                    Any::Unit,
                );
                embed(&pm, ra.unit_resource())
            };
            let t = two(&ra);
            let s = two(&ra);
            let c = Conds::new(
                &ra,
                vec![
                    ("f", own_cond(&ra, Some(own_x.clone()), None)),
                    ("g", g_cond.clone()),
                ],
            );
            let d = Conds::new(
                &ra,
                vec![("f", own_cond(&ra, Some(own_x), None)), ("g", g_cond)],
            );
            let r = check_refine_module(&t, &s, &c, &d, &u, variant).unwrap();
            expect(r, true, "SIM-CALL")
        }
        "SIM-MONO" => {
            // weakening the source postcondition preserves the verdict
            let own_x = SProp::own(&x);
            let t = skip_mod(&ra, 0);
            let s = skip_mod(&ra, 0);
            let d1 = Conds::new(
                &ra,
                vec![("f", own_cond(&ra, Some(own_x.clone()), Some(own_x.clone())))],
            );
            let weaker = own_x.mono_closure();
            let d2 =
                Conds::new(&ra, vec![("f", own_cond(&ra, Some(own_x.clone()), Some(weaker)))]);
            let r1 = check_refine_module(&t, &s, &Conds::eps(&ra), &d1, &u, variant).unwrap();
            let r2 = check_refine_module(&t, &s, &Conds::eps(&ra), &d2, &u, variant).unwrap();
            expect(r1, true, "SIM-MONO premise")
                .and_then(|_| expect(r2, true, "SIM-MONO conclusion"))
        }
        "SIM-BIND" | "SIM-BIND-ALT" => {
            // sequenced observable steps compose when each piece matches
            let t = mod_with_body(&ra, move |_| {
                crate::tree::obs("a", Any::Int(v), move |_| {
                    crate::tree::obs("b", Any::Int(v), |_| ret(Any::Int(0)))
                })
            });
            let s = mod_with_body(&ra, move |_| {
                crate::tree::obs("a", Any::Int(v), move |_| {
                    crate::tree::obs("b", Any::Int(v), |_| ret(Any::Int(0)))
                })
            });
            let t1 = mod_with_body(&ra, move |_| {
                crate::tree::obs("a", Any::Int(v), |_| ret(Any::Int(0)))
            });
            let s1 = mod_with_body(&ra, move |_| {
                crate::tree::obs("a", Any::Int(v), |_| ret(Any::Int(0)))
            });
            let e = Conds::eps(&ra);
            let p1 = check_refine_module(&t1, &s1, &e, &e, &u, variant).unwrap();
            let p = check_refine_module(&t, &s, &e, &e, &u, variant).unwrap();
            expect(p1, true, "SIM-BIND premise")
                .and_then(|_| expect(p, true, "SIM-BIND conclusion"))
        }
        "SIM-FRAME" => {
            // premise: a conditioned refinement; conclusion: both condition
            // sets framed with ⟦y⟧ in pre and post
            let own_x = SProp::own(&x);
            let own_y = SProp::own(&y);
            let t = skip_mod(&ra, 0);
            let s = skip_mod(&ra, 0);
            let c = Conds::new(
                &ra,
                vec![("f", own_cond(&ra, Some(own_x.clone()), Some(own_x.clone())))],
            );
            let frame = Cond::new(
                &ra,
                vec![Any::Unit],
                {
                    let own_y = own_y.clone();
                    move |_, _, _| own_y.clone()
                },
                {
                    let own_y = own_y.clone();
                    move |_, _, _| own_y.clone()
                },
            );
            let cf = Conds::new(&ra, vec![("f", crate::conds::cond_sep(c.get("f"), &frame))]);
            let p = check_refine_module(&t, &s, &c, &c, &u, variant).unwrap();
            let q = check_refine_module(&t, &s, &cf, &cf, &u, variant).unwrap();
            expect(p, true, "SIM-FRAME premise")
                .and_then(|_| expect(q, true, "SIM-FRAME conclusion"))
        }
        "SIM-SUPD" => {
            // the exit assert may update owned resources along a
            // frame-preserving update (x ⤳ y on an exclusive algebra)
            let t = skip_mod(&ra, 0);
            let s = skip_mod(&ra, 0);
            let d = Conds::new(
                &ra,
                vec![("f", own_cond(&ra, Some(SProp::own(&x)), Some(SProp::own(&y))))],
            );
            let r = check_refine_module(&t, &s, &Conds::eps(&ra), &d, &u, variant).unwrap();
            expect(r, true, "SIM-SUPD positive").and_then(|_| {
                // resources cannot be forged from nothing
                let d2 =
                    Conds::new(&ra, vec![("f", own_cond(&ra, None, Some(SProp::own(&y))))]);
                let r =
                    check_refine_module(&t, &s, &Conds::eps(&ra), &d2, &u, variant).unwrap();
                expect(r, false, "SIM-SUPD negative")
            })
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fig5_rules_pass_a_small_sample() {
        for rule in FIG5_RULES {
            let r = rule_harness(rule, 2, 5).unwrap();
            assert_eq!(r.violations, 0, "{rule}: {:?}", r.notes);
        }
    }
}

//! The weak/strong update separation on the six-token algebra: the first
//! link of the tower is provable under the context-peeking wrapper and
//! refuted under the strong-update wrapper, the second link is provable
//! under the strong-update wrapper, the composed postcondition is
//! unsatisfiable, and the composed closed programs are observationally
//! unequal.

use std::rc::Rc;

use crate::any::Any;
use crate::beh::BehCtx;
use crate::conds::{Cond, Conds};
use crate::corpus::{Example, Expectation, Obligation, Outcome, RunCfg};
use crate::module::{embed, link, FunDef, Mod, PlainMod};
use crate::refine::{check_refine_closed_args, check_refine_module};
use crate::res::{six_token, Ra, SProp};
use crate::tree::{ang, call, dem, ret, seq};
use crate::universe::Universe;
use crate::wrapper::{wrap_module, WrapVariant};

struct Setup {
    ra: Ra,
    u: Universe,
    t: Mod,
    m: Mod,
    s: Mod,
    c: Conds,
    d: Conds,
}

fn bools() -> Vec<Any> {
    vec![Any::Bool(false), Any::Bool(true)]
}

fn setup(cfg: &RunCfg) -> Result<Setup, String> {
    let ra = six_token::six_token_ra();
    let mut values = vec![Any::Unit, Any::Bool(false), Any::Bool(true), Any::Int(0), Any::Int(1)];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 8)?;
    // target: angelic boolean return; middle and source: demonic
    let t = embed(
        &PlainMod::new(
            vec![("f", Rc::new(|_: &Any| ang(bools(), |r| ret(r.clone()))) as FunDef)],
            Any::Unit,
        ),
        ra.unit_resource(),
    );
    let demf = |_: &Any| dem(bools(), |r| ret(r.clone()));
    let m = embed(
        &PlainMod::new(vec![("f", Rc::new(demf) as FunDef)], Any::Unit),
        ra.unit_resource(),
    );
    let s = embed(
        &PlainMod::new(vec![("f", Rc::new(demf) as FunDef)], Any::Unit),
        ra.unit_resource(),
    );
    let own_tok = {
        let ra = ra.clone();
        move |s_tok: usize, t_tok: usize| SProp::own(&ra.resource(six_token::idx(s_tok, t_tok)))
    };
    // cpost(r) = α if r else γ; dpost(r) = c if r else a
    let cpost = {
        let ra = ra.clone();
        let own = own_tok.clone();
        move |r: &Any| match r {
            Any::Bool(true) => own(0, 1),
            Any::Bool(false) => own(0, 3),
            _ => SProp::pure(&ra, false),
        }
    };
    let dpost = {
        let ra = ra.clone();
        let own = own_tok.clone();
        move |r: &Any| match r {
            Any::Bool(true) => own(3, 0),
            Any::Bool(false) => own(1, 0),
            _ => SProp::pure(&ra, false),
        }
    };
    let eq = |ra: &Ra| {
        let ra = ra.clone();
        move |a: &Any, b: &Any| SProp::pure(&ra, a == b)
    };
    let c = {
        let (eqf, beta) = (eq(&ra), own_tok(0, 2));
        let cpost = cpost.clone();
        Conds::new(
            &ra,
            vec![(
                "f",
                Cond::new(
                    &ra,
                    vec![Any::Unit],
                    move |_, a_s, a_t| eqf(a_s, a_t).and(&beta),
                    move |_, r_s, r_t| {
                        let base = cpost(r_s);
                        if r_s == r_t {
                            base
                        } else {
                            base.and(&SProp::pure(&base.ra, false))
                        }
                    },
                )
                .memoized(),
            )],
        )
    };
    let d = {
        let (eqf, btok) = (eq(&ra), own_tok(2, 0));
        Conds::new(
            &ra,
            vec![(
                "f",
                Cond::new(
                    &ra,
                    vec![Any::Unit],
                    move |_, a_s, a_t| eqf(a_s, a_t).and(&btok),
                    move |_, r_s, r_t| {
                        let base = dpost(r_s);
                        if r_s == r_t {
                            base
                        } else {
                            base.and(&SProp::pure(&base.ra, false))
                        }
                    },
                )
                .memoized(),
            )],
        )
    };
    Ok(Setup { ra, u, t, m, s, c, d })
}

/// `main() ≜ f(); ret k` as a plain module.
fn main_ret(k: i64) -> PlainMod {
    PlainMod::new(
        vec![(
            "main",
            Rc::new(move |_: &Any| {
                seq(&call("f", Any::Unit, |r| ret(r.clone())), ret(Any::Int(k)))
            }) as FunDef,
        )],
        Any::Unit,
    )
}

/// The first link as a closed check: a result-discarding client makes the
/// angelic/demonic interplay observable.
fn link1(variant: WrapVariant, cfg: &RunCfg) -> Outcome {
    let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
    let t_prog = Rc::new(link(vec![main_ret(0), erase_mod(&s.t)], "main").unwrap());
    let m_wrapped = wrap_module(&s.m, &s.c, &s.u, variant);
    let s_prog = Rc::new(link(vec![main_ret(0), m_wrapped], "main").unwrap());
    Outcome::Verdict(check_refine_closed_args(&t_prog, &s_prog, &s.u, &Any::Unit, &Any::Unit))
}

fn erase_mod(m: &Mod) -> PlainMod {
    crate::module::erase(m)
}

pub fn cexappb() -> Example {
    let wupd_sep = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let beta = s.ra.resource(six_token::idx(0, 2));
        let alpha = s.ra.resource(six_token::idx(0, 1));
        let gamma = s.ra.resource(six_token::idx(0, 3));
        let target = SProp::exists(
            &s.ra,
            &[SProp::own(&alpha), SProp::own(&gamma)],
        );
        let weak_ok = SProp::own(&beta).entails(&target.wupd());
        let strong_fails = !SProp::own(&beta).entails(&target.supd());
        Outcome::Bool(weak_ok && strong_fails)
    };
    let link1_v1 = |cfg: &RunCfg| link1(WrapVariant::V1Peek, cfg);
    let link1_v2 = |cfg: &RunCfg| link1(WrapVariant::V2Strong, cfg);
    let link2_v2 = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let e = s.c.vcomp(&s.d, &s.u);
        match check_refine_module(&s.m, &s.s, &s.c, &e, &s.u, WrapVariant::V2Strong) {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let e_post_unsat = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let e = s.c.vcomp(&s.d, &s.u);
        let cond = e.get("f");
        for x in cond.aux.iter() {
            for r_s in s.u.values() {
                for r_t in s.u.values() {
                    if cond.post(x, r_s, r_t).satisfiable() {
                        return Outcome::Bool(false);
                    }
                }
            }
        }
        Outcome::Bool(true)
    };
    let end_falsity = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let t_prog = Rc::new(link(vec![main_ret(0), erase_mod(&s.t)], "main").unwrap());
        let s_prog = Rc::new(link(vec![main_ret(1), erase_mod(&s.s)], "main").unwrap());
        Outcome::Verdict(check_refine_closed_args(&t_prog, &s_prog, &s.u, &Any::Unit, &Any::Unit))
    };
    let mains_observable = |cfg: &RunCfg| {
        // ret 0 vs ret 1, concretely
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let ctx = BehCtx::new();
        let t_prog = Rc::new(link(vec![main_ret(0), erase_mod(&s.t)], "main").unwrap());
        let s_prog = Rc::new(link(vec![main_ret(1), erase_mod(&s.s)], "main").unwrap());
        let bt = crate::beh::beh(&ctx, &crate::interp::interp_closed(&t_prog, &s.u), &s.u);
        let bs = crate::beh::beh(&ctx, &crate::interp::interp_closed(&s_prog, &s.u), &s.u);
        match (bt, bs) {
            (Ok(bt), Ok(bs)) => {
                let t_ret0 = crate::beh::beh_contains(
                    &ctx,
                    &bt,
                    &crate::beh::Trace { events: vec![], end: Any::Int(0) },
                );
                let s_ret1 = crate::beh::beh_contains(
                    &ctx,
                    &bs,
                    &crate::beh::Trace { events: vec![], end: Any::Int(1) },
                );
                Outcome::Bool(t_ret0 && s_ret1 && bt.len() == Some(1) && bs.len() == Some(1))
            }
            _ => Outcome::Error("behavior computation failed".into()),
        }
    };
    Example {
        id: "cex-appB".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "appb-wupd-separation",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the token update to a chosen alternative holds weakly and \
                 fails strongly",
                wupd_sep,
            ),
            Obligation::new(
                "appb-link1-v1",
                WrapVariant::V1Peek,
                Expectation::Proven,
                "first link provable under the context-peeking wrapper",
                link1_v1,
            ),
            Obligation::new(
                "appb-link1-v2",
                WrapVariant::V2Strong,
                Expectation::Refuted,
                "first link refuted under the strong-update wrapper",
                link1_v2,
            ),
            Obligation::new(
                "appb-link2-v2",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "second link provable under the strong-update wrapper",
                link2_v2,
            ),
            Obligation::new(
                "appb-e-post-unsat",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the composed postcondition is unsatisfiable for every \
                 return pair",
                e_post_unsat,
            ),
            Obligation::new(
                "appb-end-falsity",
                WrapVariant::V2Strong,
                Expectation::Refuted,
                "the composed closed programs are observationally unequal",
                end_falsity,
            ),
            Obligation::new(
                "appb-mains-observable",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the two mains deterministically return 0 and 1",
                mains_observable,
            ),
        ],
        growable: true,
    }
}

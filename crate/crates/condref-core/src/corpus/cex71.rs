//! The vertical-framing counterexample: with an unsatisfiable source
//! postcondition the raw refinement is provable only because the target is
//! ill-formed; framing both sides with a token-owning condition exposes
//! the failure.

use std::rc::Rc;

use crate::any::Any;
use crate::conds::{Cond, Conds};
use crate::corpus::{Example, Expectation, Obligation, Outcome, RunCfg};
use crate::module::{embed, FunDef, Mod, PlainMod};
use crate::refine::{check_refine_module, replay_module_refutation, Verdict};
use crate::res::{exclusive, Ra, SProp};
use crate::tree::ret;
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

#[allow(dead_code)]
struct Setup {
    ra: Ra,
    u: Universe,
    t: Mod,
    s: Mod,
    c: Conds,
    d: Conds,
    fr: Conds,
}

fn const_cond(ra: &Ra, pre: SProp, post: SProp) -> Cond {
    Cond::new(
        ra,
        vec![Any::Unit],
        move |_, _, _| pre.clone(),
        move |_, _, _| post.clone(),
    )
}

fn setup(cfg: &RunCfg) -> Result<Setup, String> {
    let ra = exclusive("cex71", &["a"]);
    let a = ra.resource(ra.elem_by_name("a").unwrap());
    let own_a = SProp::own(&a);
    let top = SProp::pure(&ra, true);
    let bot = SProp::pure(&ra, false);
    let mut values = vec![Any::Unit, Any::Int(0)];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 8)?;
    let skip = |ra: &Ra| {
        embed(
            &PlainMod::new(vec![("f", Rc::new(|_: &Any| ret(Any::Unit)) as FunDef)], Any::Unit),
            ra.unit_resource(),
        )
    };
    let c = Conds::new(&ra, vec![("f", const_cond(&ra, top.clone(), own_a.clone()))]);
    let d = Conds::new(&ra, vec![("f", const_cond(&ra, top, bot))]);
    let fr = Conds::new(
        &ra,
        vec![("f", const_cond(&ra, own_a, SProp::pure(&ra, true)))],
    );
    Ok(Setup { ra: ra.clone(), u, t: skip(&ra), s: skip(&ra), c, d, fr })
}

pub fn cex71() -> Example {
    let unframed = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(&s.t, &s.s, &s.c, &s.d, &s.u, WrapVariant::V2Strong) {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let framed = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let fc = s.fr.vcomp(&s.c, &s.u);
        let fd = s.fr.vcomp(&s.d, &s.u);
        match check_refine_module(&s.t, &s.s, &fc, &fd, &s.u, WrapVariant::V2Strong) {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let replay = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let fc = s.fr.vcomp(&s.c, &s.u);
        let fd = s.fr.vcomp(&s.d, &s.u);
        match check_refine_module(&s.t, &s.s, &fc, &fd, &s.u, WrapVariant::V2Strong) {
            Ok(Verdict::Refuted(r)) => {
                match replay_module_refutation(&s.t, &s.s, &fc, &fd, &s.u, WrapVariant::V2Strong, &r)
                {
                    Ok(ok) => Outcome::Bool(ok),
                    Err(e) => Outcome::Error(e.to_string()),
                }
            }
            Ok(v) => Outcome::Error(format!("expected a refutation, got {}", v.short())),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let target_empty = |cfg: &RunCfg| {
        // the unframed wrapped target really has empty behavior: every
        // surviving entry branch hits an assert with no valid update
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let wt = crate::wrapper::wrap_module(&s.t, &s.c, &s.u, WrapVariant::V2Strong);
        let prog = Rc::new(crate::module::link(vec![wt], "f").unwrap());
        let ctx = crate::beh::BehCtx::new();
        match crate::beh::beh(&ctx, &crate::interp::interp_fun(&prog, "f", &s.u, &Any::Unit), &s.u)
        {
            Ok(b) => Outcome::Bool(b.is_empty()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    Example {
        id: "cex-7.1".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "cex71-unframed",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "provable by exploiting the ill-formed target (its wrapped \
                 behavior is empty)",
                unframed,
            ),
            Obligation::new(
                "cex71-framed",
                WrapVariant::V2Strong,
                Expectation::Refuted,
                "the token-owning frame makes the target well-formed and \
                 the unsatisfiable source postcondition refutes",
                framed,
            ),
            Obligation::new(
                "cex71-replay",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the framed counter-trace replays: present in the wrapped \
                 target's behavior, absent from the source's",
                replay,
            ),
            Obligation::new(
                "cex71-target-empty",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the unframed wrapped target's behavior set is empty",
                target_empty,
            ),
        ],
        growable: true,
    }
}

//! Refinement checks: the behavior-inclusion oracle for closed programs,
//! the module-level wrapped-tree check, and generalized conditional
//! refinement.

use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::any::Any;
use crate::beh::{beh, beh_subset, BehCtx, Trace};
use crate::conds::Conds;
use crate::error::RefineErr;
use crate::interp::{interp_closed_arg, interp_fun};
use crate::module::{link, LinkedProgram, Mod};
use crate::universe::Universe;
use crate::wrapper::{wrap_module_opts, WrapVariant};

/// Outcome of a refinement check. `Refuted` always carries a replayable
/// counter-trace: a behavior of the target absent from the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Proven,
    Refuted(Box<Refutation>),
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    /// Which obligation failed (e.g. `f=get a=(…)` for module checks).
    pub obligation: String,
    pub counter: Trace,
}

impl Verdict {
    pub fn refuted(obligation: impl Into<String>, counter: Trace) -> Verdict {
        Verdict::Refuted(Box::new(Refutation { obligation: obligation.into(), counter }))
    }

    pub fn is_proven(&self) -> bool {
        matches!(self, Verdict::Proven)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }

    pub fn short(&self) -> &'static str {
        match self {
            Verdict::Proven => "Proven",
            Verdict::Refuted(_) => "Refuted",
            Verdict::Unknown(_) => "Unknown",
        }
    }
}

/// `T ⊑closed S`: behavior-set inclusion of two closed programs run from
/// their entry functions with the given arguments.
pub fn check_refine_closed_args(
    t: &Rc<LinkedProgram>,
    s: &Rc<LinkedProgram>,
    u: &Universe,
    arg_t: &Any,
    arg_s: &Any,
) -> Verdict {
    let ctx = BehCtx::new();
    let bt = match beh(&ctx, &interp_closed_arg(t, u, arg_t), u) {
        Ok(b) => b,
        Err(e) => return Verdict::Unknown(format!("target: {e}")),
    };
    let bs = match beh(&ctx, &interp_closed_arg(s, u, arg_s), u) {
        Ok(b) => b,
        Err(e) => return Verdict::Unknown(format!("source: {e}")),
    };
    match beh_subset(&ctx, &bt, &bs) {
        Ok(()) => Verdict::Proven,
        Err(w) => Verdict::refuted("closed", w),
    }
}

pub fn check_refine_closed(t: &Rc<LinkedProgram>, s: &Rc<LinkedProgram>, u: &Universe) -> Verdict {
    check_refine_closed_args(t, s, u, &Any::Unit, &Any::Unit)
}

/// `⌊T⌋_C ⊑ ⌊S⌋_D` decided pointwise: for every common function name and
/// every argument in the universe, the wrapped target tree's behaviors
/// (state threaded from the initial wrapped state) must be included in the
/// wrapped source tree's.
pub fn check_refine_module(
    t: &Mod,
    s: &Mod,
    c: &Conds,
    d: &Conds,
    u: &Universe,
    variant: WrapVariant,
) -> Result<Verdict, RefineErr> {
    let tn = t.fun_names();
    let sn = s.fun_names();
    if tn != sn {
        return Err(RefineErr::DomainMismatch(format!("{tn:?} vs {sn:?}")));
    }
    let entry = tn.first().expect("modules define at least one function").clone();
    let wt = Rc::new(link(vec![wrap_module_opts(t, c, u, variant, None)?], &entry)?);
    let ws = Rc::new(link(vec![wrap_module_opts(s, d, u, variant, None)?], &entry)?);
    let ctx = BehCtx::new();
    for f in &tn {
        for a in u.values() {
            let bt = match beh(&ctx, &interp_fun(&wt, f, u, a), u) {
                Ok(b) => b,
                Err(e) => return Ok(Verdict::Unknown(format!("target f={f}: {e}"))),
            };
            let bs = match beh(&ctx, &interp_fun(&ws, f, u, a), u) {
                Ok(b) => b,
                Err(e) => return Ok(Verdict::Unknown(format!("source f={f}: {e}"))),
            };
            if let Err(w) = beh_subset(&ctx, &bt, &bs) {
                return Ok(Verdict::refuted(format!("f={f} a={a}"), w));
            }
        }
    }
    Ok(Verdict::Proven)
}

/// Replays a module-check refutation: the counter-trace must be a behavior
/// of the wrapped target and not of the wrapped source at the failing
/// obligation.
pub fn replay_module_refutation(
    t: &Mod,
    s: &Mod,
    c: &Conds,
    d: &Conds,
    u: &Universe,
    variant: WrapVariant,
    refutation: &Refutation,
) -> Result<bool, RefineErr> {
    let Some((f, a)) = parse_obligation(&refutation.obligation, u) else {
        return Ok(false);
    };
    let entry = t.fun_names().first().expect("non-empty module").clone();
    let wt = Rc::new(link(vec![wrap_module_opts(t, c, u, variant, None)?], &entry)?);
    let ws = Rc::new(link(vec![wrap_module_opts(s, d, u, variant, None)?], &entry)?);
    let ctx = BehCtx::new();
    let bt = beh(&ctx, &interp_fun(&wt, &f, u, &a), u)?;
    let bs = beh(&ctx, &interp_fun(&ws, &f, u, &a), u)?;
    Ok(crate::beh::beh_contains(&ctx, &bt, &refutation.counter)
        && !crate::beh::beh_contains(&ctx, &bs, &refutation.counter))
}

fn parse_obligation(ob: &str, u: &Universe) -> Option<(String, Any)> {
    let rest = ob.strip_prefix("f=")?;
    let (f, a_str) = rest.split_once(" a=")?;
    let a = u.values().iter().find(|v| v.to_string() == a_str)?;
    Some((f.to_string(), a.clone()))
}

/// Generalized conditional refinement (sampled): `⌊T⌋_FR ⊑ ⌊S⌋_{FR⋉C}` for
/// every frame in the family; ε is always included. The report flags the
/// quantifier approximation.
#[derive(Debug, Clone)]
pub struct GenRefineReport {
    pub verdict: Verdict,
    pub frames_checked: usize,
    pub sampled_approximation: bool,
}

pub fn check_gen_refine(
    t: &Mod,
    s: &Mod,
    c: &Conds,
    fr_family: &[Conds],
    u: &Universe,
    variant: WrapVariant,
) -> Result<GenRefineReport, RefineErr> {
    let ra = &t.init_res.ra;
    let eps = Conds::eps(ra);
    let mut frames: Vec<&Conds> = vec![&eps];
    frames.extend(fr_family.iter());
    for (i, fr) in frames.iter().enumerate() {
        let d = fr.vcomp(c, u);
        let v = check_refine_module(t, s, fr, &d, u, variant)?;
        if !v.is_proven() {
            let v = match v {
                Verdict::Refuted(r) => Verdict::refuted(
                    format!("FR[{i}] {}", r.obligation),
                    r.counter,
                ),
                other => other,
            };
            return Ok(GenRefineReport {
                verdict: v,
                frames_checked: i + 1,
                sampled_approximation: true,
            });
        }
    }
    Ok(GenRefineReport {
        verdict: Verdict::Proven,
        frames_checked: frames.len(),
        sampled_approximation: true,
    })
}

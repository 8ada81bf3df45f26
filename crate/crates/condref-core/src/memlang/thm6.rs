//! Instance checking for the memLang adequacy theorem: build `𝒥 ∗ Ĉ`,
//! wrap both modules, and decide the refinement pointwise.

use crate::conds::Conds;
use crate::error::RefineErr;
use crate::memlang::ast::MlModule;
use crate::memlang::ghost::{j_cond, MemLayout};
use crate::memlang::interp::to_plain_mod;
use crate::module::{embed, Mod};
use crate::refine::{check_gen_refine, check_refine_module, Verdict};
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

/// A memLang module as an enriched module (unit initial resource; memory
/// travels through the boundary, so the module state is unused).
pub fn ml_mod(module: &MlModule, layout: &MemLayout) -> Mod {
    embed(&to_plain_mod(module), layout.ra.unit_resource())
}

/// `𝒥 ∗ Ĉ ⊨ T ⊑ S` for two memLang modules and value-level conditions
/// `C`: builds the combined conditions, wraps both sides and decides the
/// refinement (`⌊T⌋_ε ⊑ ⌊S⌋_{ε⋉(𝒥∗Ĉ)}`).
pub fn check_thm6_instance(
    t: &MlModule,
    s: &MlModule,
    c: &Conds,
    layout: &MemLayout,
    u: &Universe,
    variant: WrapVariant,
) -> Result<Verdict, RefineErr> {
    let tm = ml_mod(t, layout);
    let sm = ml_mod(s, layout);
    let combined = combined_conds(c, layout, u);
    Ok(check_gen_refine(&tm, &sm, &combined, &[], u, variant)?.verdict)
}

/// `𝒥 ∗ Ĉ` where `C` holds value-level conditions (embedded via ĉ).
pub fn combined_conds(c: &Conds, layout: &MemLayout, u: &Universe) -> Conds {
    let j = j_cond(layout, u);
    let c_hat = embed_conds(c);
    j.sep(&c_hat)
}

/// Pointwise ĉ embedding of a value-level condition family.
pub fn embed_conds(c: &Conds) -> Conds {
    Conds {
        map: c
            .map
            .iter()
            .map(|(n, cond)| (n.clone(), crate::conds::vcond_embed(cond)))
            .collect(),
        default: crate::conds::vcond_embed(&c.default),
    }
}

/// Directly checks `⌊T⌋_C ⊑ ⌊S⌋_D` for memLang modules with explicit
/// wrapped-level condition families on both sides.
pub fn check_ml_refine(
    t: &MlModule,
    s: &MlModule,
    c: &Conds,
    d: &Conds,
    layout: &MemLayout,
    u: &Universe,
    variant: WrapVariant,
) -> Result<Verdict, RefineErr> {
    check_refine_module(&ml_mod(t, layout), &ml_mod(s, layout), c, d, u, variant)
}

//! Self-relatedness of the corpus memory-language modules under the
//! relational condition, and the repetition-count equalization of that
//! condition at the algebra level.

use std::sync::Arc;

use crate::any::Any;
use crate::conds::{cond_equiv_bounded, cond_sep, cond_vcomp, eps_cond, CondEquiv, Conds};
use crate::corpus::map::{c_map_conds, t_map_mems, T_MAP_SRC};
use crate::corpus::umap::U_MAP_SRC;
use crate::corpus::{Example, Expectation, Obligation, Outcome, RunCfg};
use crate::memlang::ghost::{j_cond, MemGhost, MemLayout, MemWorld};
use crate::memlang::{parse_memlang, to_plain_mod, Mem, MlModule, Val};
use crate::module::embed;
use crate::refine::check_refine_module;
use crate::res::{exclusive, product, Ra};
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

use super::bitset::T_BS_SRC;
use super::snippet61 as snip;

/// Builds a diagonal world over the module's reachable memories and
/// checks `𝒥 ∗ ε ⊨ M ⊑ M`.
fn self_check(src: &str, fname_args: &[(&str, Vec<Vec<Val>>)], mems: Vec<Mem>, grown: bool) -> Outcome {
    let module: MlModule = match parse_memlang(src) {
        Ok(m) => m,
        Err(e) => return Outcome::Error(e.to_string()),
    };
    let plain = to_plain_mod(&module);
    // collect reachable terminal memories from the declared entry points
    let probe = vec![Any::Unit];
    let mut all_mems = mems.clone();
    let mut values = Vec::new();
    for (f, argsets) in fname_args {
        for args in argsets {
            for m in &mems {
                let packed = Any::pack_args(m, args.clone());
                values.push(packed.clone());
                if let Some(fun) = plain.funs.get(*f) {
                    for t in crate::tree::reachable_terminals(&fun(&packed), &probe, 64) {
                        if let Some((m2, _)) = t.unpack_ret() {
                            all_mems.push(m2.clone());
                        }
                        values.push(t);
                    }
                }
            }
        }
    }
    all_mems.sort();
    all_mems.dedup();
    // modules returning pointers need their blocks relatable pairwise
    let mut rel_pairs = Vec::new();
    for v in &values {
        if let Some((_, Val::Ptr(b, _))) = v.unpack_ret() {
            rel_pairs.push((*b, *b));
        }
    }
    rel_pairs.sort();
    rel_pairs.dedup();
    let world = Arc::new(MemWorld {
        pairs: all_mems.iter().map(|m| (m.clone(), m.clone())).collect(),
        frag_keys_t: vec![],
        frag_vals_t: vec![],
        frag_keys_s: vec![],
        frag_vals_s: vec![],
        rel_pairs,
    });
    let ghost = Arc::new(MemGhost::new(world.clone()));
    let ghost_ra = match Ra::new("selfrel-ghost", Box::new(MemGhost::new(world))) {
        Ok(r) => r,
        Err(e) => return Outcome::Error(e.to_string()),
    };
    let ra = product("selfrel-ra", vec![ghost_ra]);
    let layout = MemLayout { ra: ra.clone(), factor: 0, ghost };
    if grown {
        values.push(Any::str("pad"));
    }
    let u = Universe::new(values, ra.clone(), 12).with_obs_results(vec![Any::Unit]);
    let m = embed(&plain, ra.unit_resource());
    let conds = j_cond(&layout, &u).sep(&Conds::eps(&ra));
    match check_refine_module(&m, &m, &Conds::eps(&ra), &conds, &u, WrapVariant::V2Strong) {
        Ok(v) => Outcome::Verdict(v),
        Err(e) => Outcome::Error(e.to_string()),
    }
}

pub fn self_relatedness() -> Example {
    let mk = |id: &str,
              src: &'static str,
              fname_args: Vec<(&'static str, Vec<Vec<Val>>)>,
              mems: fn() -> Vec<Mem>| {
        let src = src.to_string();
        Obligation::new(
            id,
            WrapVariant::V2Strong,
            Expectation::Proven,
            "module is self-related under the relational condition",
            move |cfg: &RunCfg| self_check(&src, &fname_args, mems(), cfg.grown),
        )
    };
    let t_map_obl = mk(
        "selfrel-t-map",
        T_MAP_SRC,
        vec![
            ("init", vec![vec![Val::Long(1)]]),
            ("get", vec![vec![Val::Long(0)]]),
            ("set", vec![vec![Val::Long(0), Val::Long(42)]]),
        ],
        || {
            let (m0, m1, m2) = t_map_mems();
            vec![m0, m1, m2]
        },
    );
    let u_map_obl = mk(
        "selfrel-u-map",
        U_MAP_SRC,
        vec![
            ("init", vec![vec![Val::Long(1)]]),
            ("get", vec![vec![Val::Long(0)]]),
            ("set", vec![vec![Val::Long(0), Val::Long(42)]]),
        ],
        || {
            let (m0, m1, m2) = t_map_mems();
            vec![m0, m1, m2]
        },
    );
    let t_bs_obl = mk(
        "selfrel-t-bs",
        T_BS_SRC,
        vec![
            ("set", vec![vec![Val::Long(0)], vec![Val::Long(1)]]),
            ("get", vec![vec![Val::Long(0)], vec![Val::Long(1)]]),
        ],
        || {
            [0i64, 1, 2, 3]
                .iter()
                .map(|b| Mem::with_blocks(vec![(0, vec![Val::Long(*b)])]))
                .collect()
        },
    );
    let snip_t = mk(
        "selfrel-snippet-t",
        snip::T_SRC,
        vec![("run", vec![vec![]])],
        || vec![Mem::new()],
    );
    let snip_s = mk(
        "selfrel-snippet-s",
        snip::S_SRC,
        vec![("run", vec![vec![]])],
        || vec![Mem::new()],
    );
    Example {
        id: "self-relatedness".into(),
        summary: String::new(),
        obligations: vec![t_map_obl, u_map_obl, t_bs_obl, snip_t, snip_s],
        growable: true,
    }
}

/// The equalization derivation at the condition level: composing a
/// self-relation copy onto a three-fold power yields the four-fold power,
/// pointwise on the map conditions.
pub fn j_padding() -> Example {
    let run = |cfg: &RunCfg| {
        let (m0, m1, m2) = t_map_mems();
        let m0s = Mem::new();
        let mems = [m0.clone(), m1.clone(), m2.clone(), m0s.clone()];
        let mut pairs = Vec::new();
        for a in &mems {
            for b in &mems {
                pairs.push((a.clone(), b.clone()));
            }
        }
        let world = Arc::new(MemWorld {
            pairs,
            frag_keys_t: vec![],
            frag_vals_t: vec![],
            frag_keys_s: vec![],
            frag_vals_s: vec![],
            rel_pairs: vec![],
        });
        let ghost = Arc::new(MemGhost::new(world.clone()));
        let ghost_ra = Ra::new("jpad-ghost", Box::new(MemGhost::new(world))).unwrap();
        let uninit = exclusive("jpad-uninit", &["uninit"]);
        let ra = product("jpad-ra", vec![uninit, ghost_ra]);
        let layout = MemLayout { ra: ra.clone(), factor: 1, ghost };
        let lv = |i: i64| Any::MemV(Val::Long(i));
        let mut values = Vec::new();
        for m in &mems {
            values.push(Any::pack_args(m, vec![Val::Long(1)]));
            values.push(Any::pack_args(m, vec![Val::Long(0)]));
            values.push(Any::pack_args(m, vec![Val::Long(0), Val::Long(42)]));
            values.push(Any::pack_ret(m, Val::Long(0)));
            values.push(Any::pack_ret(m, Val::Long(42)));
        }
        let _ = lv;
        if cfg.grown {
            values.push(Any::str("pad"));
        }
        let u = Universe::new(values, ra.clone(), 8).with_obs_results(vec![Any::Unit]);
        let j = j_cond(&layout, &u);
        let c = crate::memlang::thm6::embed_conds(&c_map_conds(&ra, 0));
        for f in ["init", "get", "set"] {
            let jf = j.get(f);
            let cf = c.get(f);
            let eps = eps_cond(&ra);
            let j3 = cond_vcomp(&cond_vcomp(jf, jf, &u), jf, &u);
            let j4 = cond_vcomp(&j3, jf, &u);
            let lhs = cond_vcomp(&cond_sep(jf, &eps), &cond_sep(&j3, cf), &u);
            let rhs = cond_sep(&j4, cf);
            match cond_equiv_bounded(&lhs, &rhs, &u, 8) {
                Ok(CondEquiv::No) => return Outcome::Bool(false),
                Ok(_) => {}
                Err(e) => return Outcome::Error(e.to_string()),
            }
        }
        Outcome::Bool(true)
    };
    Example {
        id: "j-padding".into(),
        summary: String::new(),
        obligations: vec![Obligation::new(
            "jpad-equalize",
            WrapVariant::V2Strong,
            Expectation::Holds,
            "padding with a self-relation copy equalizes the repetition \
             count (bijective or semantic equivalence per function)",
            run,
        )],
        growable: true,
    }
}

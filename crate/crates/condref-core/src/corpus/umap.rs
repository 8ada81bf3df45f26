//! The compact map variant: stores values truncated to 32 bits. Refines
//! the full-width implementation exactly under the value-range contract;
//! without the contract a counter-trace stores an out-of-range value.

use std::sync::Arc;

use crate::any::Any;
use crate::conds::{Cond, Conds};
use crate::corpus::{Example, Expectation, Obligation, Outcome, RunCfg};
use crate::memlang::ghost::{j_cond, MemGhost, MemLayout, MemWorld};
use crate::memlang::thm6::embed_conds;
use crate::memlang::{parse_memlang, to_plain_mod, Mem, Val};
use crate::module::{embed, Mod};
use crate::refine::{check_refine_module, replay_module_refutation, Verdict};
use crate::res::{product, Ra, SProp};
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

use super::map::T_MAP_SRC;

/// Same layout as the full-width implementation; stores are truncated to
/// the 32-bit range via shifts.
pub const U_MAP_SRC: &str = r#"
module u_map {
  private data;
  fn init(sz) {
    *data := calloc(sz << 3);
    ret 0;
  }
  fn get(k) {
    let p = *data;
    ret *(p + k);
  }
  fn set(k, v) {
    print(k);
    print(v);
    let p = *data;
    *(p + k) := ((v << 32) >> 32);
    ret 0;
  }
}
"#;

const BIG: i64 = 1 << 33;

fn mems() -> (Mem, Mem, Mem, Mem) {
    let m0 = Mem::with_blocks(vec![(0, vec![Val::Long(0)])]);
    let mut m1 = m0.clone();
    m1.blocks.insert(1, vec![Val::Long(0)]);
    m1.blocks.insert(0, vec![Val::Ptr(1, 0)]);
    m1.next = 2;
    let mut m42 = m1.clone();
    m42.blocks.insert(1, vec![Val::Long(42)]);
    let mut mbig = m1.clone();
    mbig.blocks.insert(1, vec![Val::Long(BIG)]);
    (m0, m1, m42, mbig)
}

fn args1(m: &Mem, a: i64) -> Any {
    Any::pack_args(m, vec![Val::Long(a)])
}

fn args2(m: &Mem, a: i64, b: i64) -> Any {
    Any::pack_args(m, vec![Val::Long(a), Val::Long(b)])
}

fn retv(m: &Mem, v: i64) -> Any {
    Any::pack_ret(m, Val::Long(v))
}

struct Setup {
    ra: Ra,
    u: Universe,
    t_u: Mod,
    t_full: Mod,
    with_range: Conds,
    without_range: Conds,
}

/// Value-range contract on `set`: plain shape bindings elsewhere.
fn b_map_conds(ra: &Ra, range: bool) -> Conds {
    let lv = |i: i64| Any::MemV(Val::Long(i));
    let shaped = |ra: &Ra, shapes: Vec<Any>| {
        let ra = ra.clone();
        move |a_s: &Any, a_t: &Any| SProp::pure(&ra, a_s == a_t && shapes.contains(a_s))
    };
    let mk = |ra: &Ra, pre: Box<dyn Fn(&Any, &Any) -> SProp>| {
        let ra2 = ra.clone();
        Cond::new(
            ra,
            vec![Any::Unit],
            move |_, a_s, a_t| pre(a_s, a_t),
            move |_, r_s, r_t| SProp::pure(&ra2, r_s == r_t),
        )
        .memoized()
    };
    let init = mk(ra, Box::new(shaped(ra, vec![Any::List(vec![lv(1)])])));
    let getc = mk(ra, Box::new(shaped(ra, vec![Any::List(vec![lv(0)])])));
    let mut set_shapes = vec![Any::List(vec![lv(0), lv(42)])];
    if !range {
        set_shapes.push(Any::List(vec![lv(0), lv(BIG)]));
    }
    // with the range contract, out-of-range stores are outside the
    // precondition; without it they are admitted
    let setc = mk(ra, Box::new(shaped(ra, set_shapes)));
    Conds::new(ra, vec![("get", getc), ("init", init), ("set", setc)])
}

fn setup(cfg: &RunCfg) -> Result<Setup, String> {
    let (m0, m1, m42, mbig) = mems();
    // the declared pairing is memory equality: identical layouts must hold
    // identical contents
    let all = [m0.clone(), m1.clone(), m42.clone(), mbig.clone()];
    let world = Arc::new(MemWorld {
        pairs: all.iter().map(|m| (m.clone(), m.clone())).collect(),
        frag_keys_t: vec![],
        frag_vals_t: vec![],
        frag_keys_s: vec![],
        frag_vals_s: vec![],
        rel_pairs: vec![],
    });
    let ghost = Arc::new(MemGhost::new(world.clone()));
    let ghost_ra = Ra::new("umap-memghost", Box::new(MemGhost::new(world))).unwrap();
    let ra = product("umap-ra", vec![ghost_ra]);
    let layout = MemLayout { ra: ra.clone(), factor: 0, ghost };

    let mut values = vec![
        args1(&m0, 1),
        args1(&m1, 0),
        args1(&m42, 0),
        args1(&mbig, 0),
        args2(&m1, 0, 42),
        args2(&m1, 0, BIG),
        retv(&m1, 0),
        retv(&m42, 0),
        retv(&mbig, 0),
        retv(&m42, 42),
        retv(&mbig, BIG),
    ];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 10)?.with_obs_results(vec![Any::Unit]);
    let t_u = embed(&to_plain_mod(&parse_memlang(U_MAP_SRC).unwrap()), ra.unit_resource());
    let t_full = embed(&to_plain_mod(&parse_memlang(T_MAP_SRC).unwrap()), ra.unit_resource());
    let j = j_cond(&layout, &u);
    let with_range = j.sep(&embed_conds(&b_map_conds(&ra, true)));
    let without_range = j.sep(&embed_conds(&b_map_conds(&ra, false)));
    Ok(Setup { ra, u, t_u, t_full, with_range, without_range })
}

pub fn umap_analogue() -> Example {
    let proven = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(
            &s.t_u,
            &s.t_full,
            &Conds::eps(&s.ra),
            &s.with_range,
            &s.u,
            WrapVariant::V2Strong,
        ) {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let refuted = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(
            &s.t_u,
            &s.t_full,
            &Conds::eps(&s.ra),
            &s.without_range,
            &s.u,
            WrapVariant::V2Strong,
        ) {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let replay = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(
            &s.t_u,
            &s.t_full,
            &Conds::eps(&s.ra),
            &s.without_range,
            &s.u,
            WrapVariant::V2Strong,
        ) {
            Ok(Verdict::Refuted(r)) => match replay_module_refutation(
                &s.t_u,
                &s.t_full,
                &Conds::eps(&s.ra),
                &s.without_range,
                &s.u,
                WrapVariant::V2Strong,
                &r,
            ) {
                Ok(ok) => Outcome::Bool(ok),
                Err(e) => Outcome::Error(e.to_string()),
            },
            Ok(v) => Outcome::Error(format!("expected a refutation, got {}", v.short())),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    Example {
        id: "umap-analogue".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "umap-with-range",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "compact variant refines the full-width implementation \
                 under the 32-bit value contract",
                proven,
            ),
            Obligation::new(
                "umap-replay",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the out-of-range counter-trace replays on the wrapped pair",
                replay,
            ),
            Obligation::new(
                "umap-without-range",
                WrapVariant::V2Strong,
                Expectation::Refuted,
                "dropping the range precondition is refuted by a trace \
                 that stores an out-of-range value",
                refuted,
            ),
        ],
        growable: true,
    }
}

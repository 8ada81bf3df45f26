//! The key-value store family: a memory implementation, an asserting
//! intermediate abstraction, a plain final abstraction, the condition
//! families tying them together, the composition chain, and the wrapper
//! elimination instance.

use std::collections::BTreeMap;
use std::rc::Rc;
use std::sync::Arc;

use crate::any::Any;
use crate::beh::{beh, BehCtx};
use crate::conds::{cond_equiv, cond_vcomp, eps_cond, interchange_check, Cond, Conds};
use crate::corpus::{prod_elem, Example, Expectation, Obligation, Outcome, RunCfg};
use crate::interp::interp_closed_arg;
use crate::memlang::ghost::{j_cond, MemGhost, MemLayout, MemWorld};
use crate::memlang::{parse_memlang, to_plain_mod, Mem, Val};
use crate::module::{embed, erase, link, FunDef, Mod, PlainMod};
use crate::refine::{check_refine_closed_args, check_refine_module};
use crate::res::instances::{auth_map, exclusive, product};
use crate::res::{Ra, SProp};
use crate::tree::{call, get, nb, obs, put, ret, ub, Tree};
use crate::universe::Universe;
use crate::wrapper::{wrap_module, WrapVariant};

pub const T_MAP_SRC: &str = r#"
module t_map {
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
    *(p + k) := v;
    ret 0;
  }
}
"#;

fn lv(i: i64) -> Any {
    Any::MemV(Val::Long(i))
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

/// Target-side memories: private data cell, then the allocated one-cell
/// array holding 0 or 42.
pub fn t_map_mems() -> (Mem, Mem, Mem) {
    let m0 = Mem::with_blocks(vec![(0, vec![Val::Long(0)])]);
    let mut m1 = m0.clone();
    m1.blocks.insert(1, vec![Val::Long(0)]);
    m1.blocks.insert(0, vec![Val::Ptr(1, 0)]);
    m1.next = 2;
    let mut m2 = m1.clone();
    m2.blocks.insert(1, vec![Val::Long(42)]);
    (m0, m1, m2)
}

/// Helpers for abstract bodies working on the packed boundary shape.
fn with_args(arity: usize, a: &Any, f: impl FnOnce(&Mem, Vec<Val>) -> Tree) -> Tree {
    match a.unpack_args() {
        Some((m, vals)) if vals.len() == arity => {
            let vals: Vec<Val> = vals.into_iter().cloned().collect();
            f(m, vals)
        }
        _ => ub(),
    }
}

fn long_of(v: &Val) -> Option<i64> {
    match v {
        Val::Long(i) => Some(*i),
        _ => None,
    }
}

/// The asserting intermediate abstraction. State: (stored value for key 0,
/// size option); `size?` failing is UB, double init is NB. Memory passes
/// through the boundary untouched.
pub fn m_map() -> PlainMod {
    let init: FunDef = Rc::new(|a: &Any| {
        with_args(1, a, |m, vals| {
            let m = m.clone();
            let Some(sz) = long_of(&vals[0]) else { return ub() };
            get(move |st| {
                let Any::Pair(mapv, size) = st else { return ub() };
                if size.as_ref() != &Any::Unit {
                    // assert(size = None)
                    return nb();
                }
                let st2 = Any::pair(mapv.as_ref().clone(), Any::Int(sz));
                put(st2, ret(retv(&m, 0)))
            })
        })
    });
    let getf: FunDef = Rc::new(|a: &Any| {
        with_args(1, a, |m, vals| {
            let m = m.clone();
            let Some(k) = long_of(&vals[0]) else { return ub() };
            get(move |st| {
                let Any::Pair(mapv, size) = st else { return ub() };
                let Any::Int(sz) = size.as_ref() else { return ub() }; // size?
                if !(0 <= k && k < *sz) {
                    return ub(); // assume(0 ≤ k < size?)
                }
                let Any::List(cells) = mapv.as_ref() else { return ub() };
                ret(Any::pair(Any::MemState(m.clone()), cells[k as usize].clone()))
            })
        })
    });
    let setf: FunDef = Rc::new(|a: &Any| {
        with_args(2, a, |m, vals| {
            let m = m.clone();
            let (Some(k), v) = (long_of(&vals[0]), vals[1].clone()) else {
                return ub();
            };
            obs("print", lv(k), move |_| {
                let (m, v) = (m.clone(), v.clone());
                obs("print", Any::MemV(v.clone()), move |_| {
                    let (m, v) = (m.clone(), v.clone());
                    get(move |st| {
                        let Any::Pair(mapv, size) = st else { return ub() };
                        let Any::Int(sz) = size.as_ref() else { return ub() };
                        if !(0 <= k && k < *sz) {
                            return ub();
                        }
                        let Any::List(cells) = mapv.as_ref() else { return ub() };
                        let mut cells = cells.clone();
                        cells[k as usize] = Any::MemV(v.clone());
                        let st2 = Any::pair(Any::List(cells), size.as_ref().clone());
                        put(st2, ret(retv(&m, 0)))
                    })
                })
            })
        })
    });
    PlainMod::new(
        vec![("get", getf), ("init", init), ("set", setf)],
        Any::pair(Any::List(vec![lv(0)]), Any::Unit),
    )
}

/// The final abstraction: a total map, no assertions.
pub fn s_map() -> PlainMod {
    let init: FunDef = Rc::new(|a: &Any| {
        with_args(1, a, |m, _| ret(retv(m, 0)))
    });
    let getf: FunDef = Rc::new(|a: &Any| {
        with_args(1, a, |m, vals| {
            let m = m.clone();
            let Some(k) = long_of(&vals[0]) else { return ub() };
            get(move |st| {
                let Any::List(cells) = st else { return ub() };
                if !(0 <= k && (k as usize) < cells.len()) {
                    return ub();
                }
                ret(Any::pair(Any::MemState(m.clone()), cells[k as usize].clone()))
            })
        })
    });
    let setf: FunDef = Rc::new(|a: &Any| {
        with_args(2, a, |m, vals| {
            let m = m.clone();
            let (Some(k), v) = (long_of(&vals[0]), vals[1].clone()) else {
                return ub();
            };
            obs("print", lv(k), move |_| {
                let (m, v) = (m.clone(), v.clone());
                obs("print", Any::MemV(v.clone()), move |_| {
                    let (m, v) = (m.clone(), v.clone());
                    get(move |st| {
                        let Any::List(cells) = st else { return ub() };
                        if !(0 <= k && (k as usize) < cells.len()) {
                            return ub();
                        }
                        let mut cells = cells.clone();
                        cells[k as usize] = Any::MemV(v.clone());
                        put(Any::List(cells), ret(retv(&m, 0)))
                    })
                })
            })
        })
    });
    PlainMod::new(
        vec![("get", getf), ("init", init), ("set", setf)],
        Any::List(vec![lv(0)]),
    )
}

/// Value-level conditions of the lower refinement: plain argument-shape
/// bindings plus the uninit token on `init` (the token is factor `uninit`
/// of the example algebra).
pub fn c_map_conds(ra: &Ra, uninit_factor: usize) -> Conds {
    let tok = prod_elem(ra, &[(uninit_factor, uninit_token_idx(ra, uninit_factor))]);
    let own_tok = SProp::own(&ra.resource(tok));
    let shape = |ra: &Ra, want: Vec<Any>| {
        let ra = ra.clone();
        move |a_s: &Any, a_t: &Any| {
            SProp::pure(&ra, a_s == a_t && want.contains(a_s))
        }
    };
    let init = {
        let f = shape(ra, vec![Any::List(vec![lv(1)])]);
        let (ra2, own_tok) = (ra.clone(), own_tok.clone());
        Cond::new(
            ra,
            vec![Any::Int(1)],
            move |_, a_s, a_t| f(a_s, a_t).and(&own_tok),
            move |_, r_s, r_t| SProp::pure(&ra2, r_s == r_t),
        )
        .memoized()
    };
    let getc = {
        let f = shape(ra, vec![Any::List(vec![lv(0)])]);
        let ra2 = ra.clone();
        Cond::new(
            ra,
            vec![Any::Int(0)],
            move |_, a_s, a_t| f(a_s, a_t),
            move |_, r_s, r_t| SProp::pure(&ra2, r_s == r_t),
        )
        .memoized()
    };
    let setc = {
        let f = shape(
            ra,
            vec![
                Any::List(vec![lv(0), lv(0)]),
                Any::List(vec![lv(0), lv(42)]),
            ],
        );
        let ra2 = ra.clone();
        Cond::new(
            ra,
            vec![Any::pair(Any::Int(0), Any::Int(0)), Any::pair(Any::Int(0), Any::Int(42))],
            move |_, a_s, a_t| f(a_s, a_t),
            move |_, r_s, r_t| SProp::pure(&ra2, r_s == r_t),
        )
        .memoized()
    };
    Conds::new(ra, vec![("get", getc), ("init", init), ("set", setc)])
}

fn uninit_token_idx(ra: &Ra, factor: usize) -> u32 {
    ra.factors_vec().expect("product")[factor]
        .elem_by_name("uninit")
        .expect("uninit token")
}

/// Per-key map-ghost fragment `k ↦ v`, lifted into the product.
fn map_frag(ra: &Ra, mg_factor: usize, v: i64) -> SProp {
    let mg = &ra.factors_vec().expect("product")[mg_factor];
    let idx = mg
        .elem_by_name(&format!("◯{{0↦{v}}}"))
        .expect("map ghost fragment");
    SProp::own(&ra.resource(prod_elem(ra, &[(mg_factor, idx)])))
}

/// The empty-domain map-ghost authority (grown by `init`).
pub fn map_auth_empty(ra: &Ra, mg_factor: usize) -> u32 {
    let mg = &ra.factors_vec().expect("product")[mg_factor];
    let idx = mg.elem_by_name("ε").expect("unit");
    // the authority over the empty partial map: ●{}·◯{}
    let auth = mg.elem_by_name("●{}·◯{}").expect("empty authority");
    let _ = idx;
    prod_elem(ra, &[(mg_factor, auth)])
}

/// Value-level conditions of the upper refinement: per-key points-to.
/// `with_uninit` additionally requires the init token (that family is the
/// final-specification family used by the elimination instance).
pub fn d_map_conds(ra: &Ra, mg_factor: usize, uninit_factor: Option<usize>) -> Conds {
    let eq_shape = |ra: &Ra, want: Vec<Any>| {
        let ra = ra.clone();
        move |a_s: &Any, a_t: &Any| SProp::pure(&ra, a_s == a_t && want.contains(a_s))
    };
    let init = {
        let f = eq_shape(ra, vec![Any::List(vec![lv(1)])]);
        let ra2 = ra.clone();
        let frag0 = map_frag(ra, mg_factor, 0);
        let tok = uninit_factor.map(|uf| {
            SProp::own(&ra.resource(prod_elem(ra, &[(uf, uninit_token_idx(ra, uf))])))
        });
        Cond::new(
            ra,
            vec![Any::Int(1)],
            move |_, a_s, a_t| {
                let base = f(a_s, a_t);
                match &tok {
                    None => base,
                    Some(t) => base.and(t),
                }
            },
            move |_, r_s, r_t| SProp::pure(&ra2, r_s == r_t).sep(&frag0),
        )
        .memoized()
    };
    let getc = {
        let ra2 = ra.clone();
        let ra3 = ra.clone();
        let frag = {
            let ra = ra.clone();
            move |v: i64| map_frag(&ra, mg_factor, v)
        };
        let frag2 = frag.clone();
        Cond::new(
            ra,
            vec![Any::pair(Any::Int(0), Any::Int(0)), Any::pair(Any::Int(0), Any::Int(42))],
            move |x, a_s, a_t| {
                let Any::Pair(k, v) = x else { unreachable!() };
                let (k, v) = (k.as_int().unwrap(), v.as_int().unwrap());
                SProp::pure(&ra2, a_s == a_t && a_s == &Any::List(vec![lv(k)])).sep(&frag(v))
            },
            move |x, r_s, r_t| {
                let Any::Pair(_, v) = x else { unreachable!() };
                let v = v.as_int().unwrap();
                SProp::pure(&ra3, r_s == r_t && matches!(r_s, Any::MemV(Val::Long(i)) if *i == v))
                    .sep(&frag2(v))
            },
        )
        .memoized()
    };
    let setc = {
        let ra2 = ra.clone();
        let ra3 = ra.clone();
        let frag = {
            let ra = ra.clone();
            move |v: i64| map_frag(&ra, mg_factor, v)
        };
        let frag2 = frag.clone();
        let mut aux = Vec::new();
        for w in [0i64, 42] {
            for v in [0i64, 42] {
                aux.push(Any::pair(Any::Int(0), Any::pair(Any::Int(w), Any::Int(v))));
            }
        }
        Cond::new(
            ra,
            aux,
            move |x, a_s, a_t| {
                let Any::Pair(k, wv) = x else { unreachable!() };
                let Any::Pair(w, v) = wv.as_ref() else { unreachable!() };
                let (k, w, v) = (k.as_int().unwrap(), w.as_int().unwrap(), v.as_int().unwrap());
                SProp::pure(&ra2, a_s == a_t && a_s == &Any::List(vec![lv(k), lv(v)]))
                    .sep(&frag(w))
            },
            move |x, r_s, r_t| {
                let Any::Pair(_, wv) = x else { unreachable!() };
                let Any::Pair(_, v) = wv.as_ref() else { unreachable!() };
                let v = v.as_int().unwrap();
                SProp::pure(&ra3, r_s == r_t).sep(&frag2(v))
            },
        )
        .memoized()
    };
    Conds::new(ra, vec![("get", getc), ("init", init), ("set", setc)])
}

// ---------------------------------------------------------------------
// map-lower: 𝒥 ∗ Ĉ_Map ⊨ T_Map ⊑ M_Map
// ---------------------------------------------------------------------

struct LowerSetup {
    ra: Ra,
    u: Universe,
    t: Mod,
    m: Mod,
    conds: Conds,
}

fn lower_setup(cfg: &RunCfg) -> Result<LowerSetup, String> {
    let (m0, m1, m2) = t_map_mems();
    let m0s = Mem::new();
    let world = Arc::new(MemWorld {
        pairs: vec![
            (m0.clone(), m0s.clone()),
            (m1.clone(), m0s.clone()),
            (m2.clone(), m0s.clone()),
        ],
        frag_keys_t: vec![],
        frag_vals_t: vec![],
        frag_keys_s: vec![],
        frag_vals_s: vec![],
        rel_pairs: vec![],
    });
    let ghost = Arc::new(MemGhost::new(world.clone()));
    let ghost_ra = Ra::new("map-memghost", Box::new(MemGhost::new(world))).unwrap();
    let uninit = exclusive("map-uninit", &["uninit"]);
    let ra = product("map-lower-ra", vec![uninit, ghost_ra]);
    let layout = MemLayout { ra: ra.clone(), factor: 1, ghost };

    let mut values = vec![
        args1(&m0, 1),
        args1(&m1, 0),
        args1(&m2, 0),
        args2(&m1, 0, 0),
        args2(&m1, 0, 42),
        args2(&m2, 0, 0),
        args2(&m2, 0, 42),
        args1(&m0s, 1),
        args1(&m0s, 0),
        args2(&m0s, 0, 0),
        args2(&m0s, 0, 42),
        retv(&m1, 0),
        retv(&m2, 0),
        retv(&m2, 42),
        retv(&m1, 42),
        retv(&m0s, 0),
        retv(&m0s, 42),
    ];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 10)?.with_obs_results(vec![Any::Unit]);

    let t = embed(&to_plain_mod(&parse_memlang(T_MAP_SRC).unwrap()), ra.unit_resource());
    let m = embed(&m_map(), ra.unit_resource());
    let conds = j_cond(&layout, &u).sep(&embed_vconds(&c_map_conds(&ra, 0)));
    Ok(LowerSetup { ra, u, t, m, conds })
}

fn embed_vconds(c: &Conds) -> Conds {
    crate::memlang::thm6::embed_conds(c)
}

pub fn map_lower() -> Example {
    let run = |cfg: &RunCfg| {
        let s = match lower_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(&s.t, &s.m, &Conds::eps(&s.ra), &s.conds, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let nonvac = |cfg: &RunCfg| {
        let s = match lower_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let wt = wrap_module(&s.t, &Conds::eps(&s.ra), &s.u, WrapVariant::V2Strong);
        let prog = Rc::new(link(vec![wt], "init").unwrap());
        let ctx = BehCtx::new();
        let (m0, _, _) = t_map_mems();
        let b = beh(&ctx, &crate::interp::interp_fun(&prog, "init", &s.u, &args1(&m0, 1)), &s.u);
        match b {
            Ok(b) => Outcome::Bool(!b.is_empty()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    // framed variant: the uninit-owning frame preserves the verdict
    let framed = |cfg: &RunCfg| {
        let s = match lower_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let tok = prod_elem(&s.ra, &[(0, uninit_token_idx(&s.ra, 0))]);
        let own_tok = SProp::own(&s.ra.resource(tok));
        let fr_cond = Cond::new(
            &s.ra,
            vec![Any::Unit],
            {
                let own_tok = own_tok.clone();
                move |_, _, _| own_tok.clone()
            },
            {
                let own_tok = own_tok.clone();
                move |_, _, _| own_tok.clone()
            },
        );
        // frame only the condition-free functions; a second uninit around
        // init would clash with the one in its precondition
        let fr = Conds::new(&s.ra, vec![("get", fr_cond.clone()), ("set", fr_cond)]);
        let d = fr.vcomp(&s.conds, &s.u);
        match check_refine_module(&s.t, &s.m, &fr, &d, &s.u, WrapVariant::V2Strong) {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    Example {
        id: "map-lower".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "lower-refinement",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "memory implementation refines the asserting abstraction \
                 under the relational condition plus uninit",
                run,
            ),
            Obligation::new(
                "lower-nonvacuous",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the wrapped target's init behavior is non-empty",
                nonvac,
            ),
            Obligation::new(
                "lower-vframing",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "the verdict survives an uninit-owning frame on the \
                 condition-free functions",
                framed,
            ),
        ],
        growable: true,
    }
}

// ---------------------------------------------------------------------
// map-upper: ε ∗ D̂_Map ⊨ M_Map ⊑ S_Map
// ---------------------------------------------------------------------

struct UpperSetup {
    ra: Ra,
    u: Universe,
    m: Mod,
    s: Mod,
    conds: Conds,
}

fn upper_setup(cfg: &RunCfg) -> Result<UpperSetup, String> {
    let mg = auth_map("map-ghost", &["0"], &["0", "42"]);
    let ra = product("map-upper-ra", vec![mg]);
    let m0s = Mem::new();
    let mut values = vec![
        args1(&m0s, 1),
        args1(&m0s, 0),
        args2(&m0s, 0, 0),
        args2(&m0s, 0, 42),
        retv(&m0s, 0),
        retv(&m0s, 42),
    ];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 10)?.with_obs_results(vec![Any::Unit]);
    let m = embed(&m_map(), ra.unit_resource());
    let s = Mod {
        funs: s_map().funs,
        init_st: s_map().init_st,
        init_res: ra.resource(map_auth_empty(&ra, 0)),
    };
    let conds = embed_vconds(&d_map_conds(&ra, 0, None));
    Ok(UpperSetup { ra, u, m, s, conds })
}

pub fn map_upper() -> Example {
    let run = |cfg: &RunCfg| {
        let s = match upper_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(&s.m, &s.s, &Conds::eps(&s.ra), &s.conds, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let nonvac = |cfg: &RunCfg| {
        let s = match upper_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let wm = wrap_module(&s.m, &Conds::eps(&s.ra), &s.u, WrapVariant::V2Strong);
        let prog = Rc::new(link(vec![wm], "init").unwrap());
        let ctx = BehCtx::new();
        let b = beh(
            &ctx,
            &crate::interp::interp_fun(&prog, "init", &s.u, &args1(&Mem::new(), 1)),
            &s.u,
        );
        match b {
            Ok(b) => Outcome::Bool(!b.is_empty()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    Example {
        id: "map-upper".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "upper-refinement",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "asserting abstraction refines the plain map under per-key \
                 points-to conditions",
                run,
            ),
            Obligation::new(
                "upper-nonvacuous",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the wrapped target's init behavior is non-empty",
                nonvac,
            ),
        ],
        growable: true,
    }
}

// ---------------------------------------------------------------------
// map-chain: composition steps and the composed end-to-end refinement
// ---------------------------------------------------------------------

struct ChainSetup {
    ra: Ra,
    layout: MemLayout,
    u: Universe,
    t: Mod,
    m: Mod,
    s: Mod,
    c_lower: Conds,
    d_upper: Conds,
}

fn chain_setup(cfg: &RunCfg) -> Result<ChainSetup, String> {
    let (m0, m1, m2) = t_map_mems();
    let m0s = Mem::new();
    let world = Arc::new(MemWorld {
        pairs: vec![
            (m0.clone(), m0s.clone()),
            (m1.clone(), m0s.clone()),
            (m2.clone(), m0s.clone()),
        ],
        frag_keys_t: vec![],
        frag_vals_t: vec![],
        frag_keys_s: vec![],
        frag_vals_s: vec![],
        rel_pairs: vec![],
    });
    let ghost = Arc::new(MemGhost::new(world.clone()));
    let ghost_ra = Ra::new("chain-memghost", Box::new(MemGhost::new(world))).unwrap();
    let uninit = exclusive("chain-uninit", &["uninit"]);
    let mg = auth_map("chain-mapghost", &["0"], &["0", "42"]);
    let ra = product("map-chain-ra", vec![uninit, mg, ghost_ra]);
    let layout = MemLayout { ra: ra.clone(), factor: 2, ghost };

    let mut values = vec![
        args1(&m0, 1),
        args1(&m1, 0),
        args1(&m2, 0),
        args2(&m1, 0, 42),
        args2(&m2, 0, 0),
        args1(&m0s, 1),
        args1(&m0s, 0),
        args2(&m0s, 0, 0),
        args2(&m0s, 0, 42),
        retv(&m1, 0),
        retv(&m2, 0),
        retv(&m2, 42),
        retv(&m0s, 0),
        retv(&m0s, 42),
        // bare value-level atoms: middles for value-level composition
        Any::List(vec![lv(1)]),
        Any::List(vec![lv(0)]),
        Any::List(vec![lv(0), lv(0)]),
        Any::List(vec![lv(0), lv(42)]),
        lv(0),
        lv(42),
    ];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 10)?.with_obs_results(vec![Any::Unit]);
    let t = embed(&to_plain_mod(&parse_memlang(T_MAP_SRC).unwrap()), ra.unit_resource());
    let m = embed(&m_map(), ra.unit_resource());
    let s = Mod {
        funs: s_map().funs,
        init_st: s_map().init_st,
        init_res: ra.resource(map_auth_empty(&ra, 1)),
    };
    let c_lower = j_cond(&layout, &u).sep(&embed_vconds(&c_map_conds(&ra, 0)));
    let d_upper = embed_vconds(&d_map_conds(&ra, 1, None));
    Ok(ChainSetup { ra, layout, u, t, m, s, c_lower, d_upper })
}

pub fn map_chain() -> Example {
    let step_lower = |cfg: &RunCfg| {
        let s = match chain_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(&s.t, &s.m, &Conds::eps(&s.ra), &s.c_lower, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let step_upper = |cfg: &RunCfg| {
        let s = match chain_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match check_refine_module(&s.m, &s.s, &Conds::eps(&s.ra), &s.d_upper, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let enhanced_vc = |cfg: &RunCfg| {
        let s = match chain_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let composed = s.c_lower.vcomp(&s.d_upper, &s.u);
        match check_refine_module(&s.t, &s.s, &Conds::eps(&s.ra), &composed, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let interchange = |cfg: &RunCfg| {
        let s = match chain_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let j = j_cond(&s.layout, &s.u);
        let c = c_map_conds(&s.ra, 0);
        let i = eps_cond(&s.ra);
        let d = d_map_conds(&s.ra, 1, None);
        for f in ["init", "get", "set"] {
            match interchange_check(j.get(f), c.get(f), &i, d.get(f), &s.u) {
                Ok(rep) => {
                    if rep.hypothesis_violated || !rep.conclusion_equiv.holds() {
                        return Outcome::Bool(false);
                    }
                }
                Err(e) => return Outcome::Error(e.to_string()),
            }
        }
        Outcome::Bool(true)
    };
    let rewrite = |cfg: &RunCfg| {
        let s = match chain_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        // Ĉ ⋉ D̂ at the value level equals the directly written final
        // family (D with the uninit token restored on init)
        let c = c_map_conds(&s.ra, 0);
        let e_direct = d_map_conds(&s.ra, 1, Some(0));
        let d = d_map_conds(&s.ra, 1, None);
        for f in ["init", "get", "set"] {
            let composed = cond_vcomp(c.get(f), d.get(f), &s.u);
            // aux cardinalities differ on set (the composition carries a
            // dead auxiliary product), so semantic equivalence is the
            // right notion there
            match crate::conds::cond_equiv_bounded(&composed, e_direct.get(f), &s.u, 8) {
                Ok(crate::conds::CondEquiv::No) => return Outcome::Bool(false),
                Ok(_) => {}
                Err(e) => return Outcome::Error(e.to_string()),
            }
        }
        // 𝒥 ⋉ ε ≡ 𝒥 (the unit law realizing the repetition collapse)
        let j = j_cond(&s.layout, &s.u);
        let jf = j.get("get");
        match cond_equiv(&cond_vcomp(jf, &eps_cond(&s.ra), &s.u), jf, &s.u) {
            Ok(eq) => Outcome::Bool(!matches!(eq, crate::conds::CondEquiv::No)),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let closed_distinguish = |cfg: &RunCfg| {
        let s = match chain_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let (m0, _, _) = t_map_mems();
        let m0s = Mem::new();
        let t_plain = to_plain_mod(&parse_memlang(T_MAP_SRC).unwrap());
        let s_plain = s_map();
        let client = double_init_client();
        let tp = Rc::new(link(vec![t_plain, client.clone()], "main").unwrap());
        let sp = Rc::new(link(vec![s_plain, client], "main").unwrap());
        Outcome::Verdict(check_refine_closed_args(
            &tp,
            &sp,
            &s.u,
            &Any::pack_args(&m0, vec![]),
            &Any::pack_args(&m0s, vec![]),
        ))
    };
    Example {
        id: "map-chain".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "chain-step-lower",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "lower leg on the combined algebra",
                step_lower,
            ),
            Obligation::new(
                "chain-step-upper",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "upper leg on the combined algebra",
                step_upper,
            ),
            Obligation::new(
                "chain-enhanced-vc",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "vertically composed conditions prove the end-to-end \
                 refinement",
                enhanced_vc,
            ),
            Obligation::new(
                "chain-interchange",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "interchange hypotheses and conclusion hold for every \
                 function",
                interchange,
            ),
            Obligation::new(
                "chain-rewrite",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "composed per-key conditions equal the directly written \
                 final family; the relational condition absorbs its unit",
                rewrite,
            ),
            Obligation::new(
                "closed-distinguish",
                WrapVariant::V2Strong,
                Expectation::Refuted,
                "the double-init client distinguishes the erased \
                 implementation from the erased final abstraction",
                closed_distinguish,
            ),
        ],
        growable: true,
    }
}

/// The ill-formed client: init, set, init again, then print the read.
pub fn double_init_client() -> PlainMod {
    let main: FunDef = Rc::new(|a: &Any| {
        let Some((m, _)) = a.unpack_args() else { return ub() };
        let m = m.clone();
        call("init", args1(&m, 1), move |r1| {
            let Some((m1, _)) = r1.unpack_ret() else { return ub() };
            let m1 = m1.clone();
            call("set", args2(&m1, 0, 42), move |r2| {
                let Some((m2, _)) = r2.unpack_ret() else { return ub() };
                let m2 = m2.clone();
                call("init", args1(&m2, 1), move |r3| {
                    let Some((m3, _)) = r3.unpack_ret() else { return ub() };
                    let m3 = m3.clone();
                    call("get", args1(&m3, 0), move |r4| {
                        let Some((m4, v)) = r4.unpack_ret() else { return ub() };
                        let out = Any::pack_ret(m4, v.clone());
                        obs("print", Any::MemV(v.clone()), move |_| ret(out.clone()))
                    })
                })
            })
        })
    });
    PlainMod::new(vec![("main", main)], Any::Unit)
}

/// The well-behaved client: one legal init/set/get sequence.
pub fn legal_client() -> PlainMod {
    let main: FunDef = Rc::new(|a: &Any| {
        let Some((m, _)) = a.unpack_args() else { return ub() };
        let m = m.clone();
        call("init", args1(&m, 1), move |r1| {
            let Some((m1, _)) = r1.unpack_ret() else { return ub() };
            let m1 = m1.clone();
            call("set", args2(&m1, 0, 42), move |r2| {
                let Some((m2, _)) = r2.unpack_ret() else { return ub() };
                let m2 = m2.clone();
                call("get", args1(&m2, 0), move |r3| {
                    let Some((m3, v)) = r3.unpack_ret() else { return ub() };
                    let out = Any::pack_ret(m3, v.clone());
                    obs("print", Any::MemV(v.clone()), move |_| ret(out.clone()))
                })
            })
        })
    });
    PlainMod::new(vec![("main", main)], Any::Unit)
}

// ---------------------------------------------------------------------
// wet-instance: ⌊S_Map⌋_E ⊕ ⌊Clnt⌋_E ⊑closed ⇓S_Map ⊕ ⇓Clnt
// ---------------------------------------------------------------------

struct WetSetup {
    u: Universe,
    s_mod: Mod,
    clnt: Mod,
    e: Conds,
}

fn wet_setup(cfg: &RunCfg) -> Result<WetSetup, String> {
    let uninit = exclusive("wet-uninit", &["uninit"]);
    let mg = auth_map("wet-mapghost", &["0"], &["0", "42"]);
    let ra = product("wet-ra", vec![uninit, mg]);
    let m0s = Mem::new();
    let mut values = vec![
        Any::pack_args(&m0s, vec![]),
        args1(&m0s, 1),
        args1(&m0s, 0),
        args2(&m0s, 0, 42),
        retv(&m0s, 0),
        retv(&m0s, 42),
    ];
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 10)?.with_obs_results(vec![Any::Unit]);
    let s_mod = Mod {
        funs: s_map().funs,
        init_st: s_map().init_st,
        init_res: ra.resource(map_auth_empty(&ra, 1)),
    };
    let clnt = Mod {
        funs: legal_client().funs,
        init_st: Any::Unit,
        init_res: ra.resource(prod_elem(&ra, &[(0, uninit_token_idx(&ra, 0))])),
    };
    let e = embed_vconds(&d_map_conds(&ra, 1, Some(0)));
    Ok(WetSetup { u, s_mod, clnt, e })
}

pub fn wet_instance() -> Example {
    let consistency = |cfg: &RunCfg| {
        let s = match wet_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        match s.s_mod.init_res.join(&s.clnt.init_res) {
            Ok(r) => Outcome::Bool(r.is_valid()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let refine = |cfg: &RunCfg| {
        let s = match wet_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let wrapped = link(
            vec![
                wrap_module(&s.s_mod, &s.e, &s.u, WrapVariant::V2Strong),
                wrap_module(&s.clnt, &s.e, &s.u, WrapVariant::V2Strong),
            ],
            "main",
        )
        .unwrap();
        let erased = link(vec![erase(&s.s_mod), erase(&s.clnt)], "main").unwrap();
        let arg = Any::pack_args(&Mem::new(), vec![]);
        Outcome::Verdict(check_refine_closed_args(
            &Rc::new(wrapped),
            &Rc::new(erased),
            &s.u,
            &arg,
            &arg,
        ))
    };
    let nonvac = |cfg: &RunCfg| {
        let s = match wet_setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let wrapped = Rc::new(
            link(
                vec![
                    wrap_module(&s.s_mod, &s.e, &s.u, WrapVariant::V2Strong),
                    wrap_module(&s.clnt, &s.e, &s.u, WrapVariant::V2Strong),
                ],
                "main",
            )
            .unwrap(),
        );
        let ctx = BehCtx::new();
        let arg = Any::pack_args(&Mem::new(), vec![]);
        match beh(&ctx, &interp_closed_arg(&wrapped, &s.u, &arg), &s.u) {
            Ok(b) => Outcome::Bool(!b.is_empty() && !b.is_univ()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    Example {
        id: "wet-instance".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "wet-consistency",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "composed initial resources are valid",
                consistency,
            ),
            Obligation::new(
                "wet-refine",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "wrapped closed program refines the erased one",
                refine,
            ),
            Obligation::new(
                "wet-nonvacuous",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the wrapped closed program has a proper non-empty behavior",
                nonvac,
            ),
        ],
        growable: true,
    }
}

/// Shared by laws and tests: which expectations this family pins.
pub fn family_notes() -> BTreeMap<&'static str, &'static str> {
    let mut m = BTreeMap::new();
    m.insert("map-lower", "lower refinement proven");
    m.insert("map-upper", "upper refinement proven");
    m.insert("map-chain", "composition chain verified");
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_map_memories_match_execution() {
        // the hand-written snapshots equal what the implementation reaches
        let (m0, m1, m2) = t_map_mems();
        let t = to_plain_mod(&parse_memlang(T_MAP_SRC).unwrap());
        let probe = vec![Any::Unit];
        let terms = crate::tree::reachable_terminals(&(t.funs["init"])(&args1(&m0, 1)), &probe, 64);
        assert_eq!(terms, vec![retv(&m1, 0)]);
        let terms = crate::tree::reachable_terminals(&(t.funs["set"])(&args2(&m1, 0, 42)), &probe, 64);
        assert_eq!(terms, vec![retv(&m2, 0)]);
        let terms = crate::tree::reachable_terminals(&(t.funs["get"])(&args1(&m2, 0)), &probe, 64);
        assert_eq!(terms, vec![retv(&m2, 42)]);
    }

    #[test]
    fn double_init_prints_differ() {
        let s = chain_setup(&RunCfg::default()).unwrap();
        let (m0, _, _) = t_map_mems();
        let t_plain = to_plain_mod(&parse_memlang(T_MAP_SRC).unwrap());
        let tp = Rc::new(link(vec![t_plain, double_init_client()], "main").unwrap());
        let ctx = BehCtx::new();
        let b = beh(
            &ctx,
            &interp_closed_arg(&tp, &s.u, &Any::pack_args(&m0, vec![])),
            &s.u,
        )
        .unwrap();
        // exactly one trace: set prints 0 and 42, the final print is 0
        let w = crate::beh::beh_subset(&ctx, &b, &crate::beh::BehSet::empty()).unwrap_err();
        let names: Vec<&str> = w.events.iter().map(|e| e.0.as_str()).collect();
        assert_eq!(names, vec!["print", "print", "print"]);
        assert_eq!(w.events[2].1, lv(0));
        // against the final abstraction the last print is 42
        let sp = Rc::new(link(vec![s_map(), double_init_client()], "main").unwrap());
        let b2 = beh(
            &ctx,
            &interp_closed_arg(&sp, &s.u, &Any::pack_args(&Mem::new(), vec![])),
            &s.u,
        )
        .unwrap();
        let w2 = crate::beh::beh_subset(&ctx, &b2, &crate::beh::BehSet::empty()).unwrap_err();
        assert_eq!(w2.events[2].1, lv(42));
    }

    #[test]
    fn assert_pure_helper_is_used_consistently() {
        // double init reaches the asserting abstraction's NB branch
        let m = m_map();
        let st = Any::pair(Any::List(vec![lv(0)]), Any::Int(1));
        let tree = (m.funs["init"])(&args1(&Mem::new(), 1));
        // body reads the state; with size already set the branch is NB
        let ctx = BehCtx::new();
        let u = Universe::new(vec![Any::Unit], crate::res::unit_ra(), 4);
        let b = crate::beh::beh_state(&ctx, &tree, st, &u).unwrap();
        assert!(b.is_empty());
    }
}

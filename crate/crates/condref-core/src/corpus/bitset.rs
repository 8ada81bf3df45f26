//! The bitset tower: a long-typed implementation, a natural-number
//! abstraction, and a flag-typed final abstraction. The conditions change
//! argument and return types across levels; composing them vertically
//! yields a sensible end-to-end condition while the same-level conjunction
//! collapses to falsity.

use std::rc::Rc;

use crate::any::Any;
use crate::conds::{cond_equiv, cond_sep, cond_vcomp, Cond, Conds};
use crate::corpus::{Example, Expectation, Obligation, Outcome, RunCfg};
use crate::memlang::{parse_memlang, to_plain_mod, Mem, Val};
use crate::module::{embed, FunDef, Mod, PlainMod};
use crate::refine::check_refine_module;
use crate::res::{unit_ra, Ra, SProp};
use crate::tree::{get, put, ret, ub};
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

pub const T_BS_SRC: &str = r#"
module t_bs {
  private bs;
  fn set(k) {
    *bs := (*bs | (1 << k));
    ret 0;
  }
  fn get(k) {
    ret ((*bs >> k) & 1);
  }
}
"#;

const FLAGS: [&str; 3] = ["F0", "F1", "F2"];

fn flag(i: usize) -> Any {
    Any::str(FLAGS[i])
}

/// `f2n`: the flag embedding into naturals.
fn f2n(v: &Any) -> Option<i64> {
    match v {
        Any::Str(s) => FLAGS.iter().position(|f| f == s).map(|i| i as i64),
        _ => None,
    }
}

/// `l2n`: longs embed into naturals (non-negative ones).
fn l2n(v: &Any) -> Option<i64> {
    match v {
        Any::MemV(Val::Long(i)) if *i >= 0 => Some(*i),
        _ => None,
    }
}

fn nat(v: &Any) -> Option<i64> {
    match v {
        Any::Int(i) if *i >= 0 => Some(*i),
        _ => None,
    }
}

/// The natural-number abstraction: state is a plain integer.
pub fn m_bs() -> PlainMod {
    let setf: FunDef = Rc::new(|a: &Any| {
        let Some((m, vals)) = a.unpack_args_nat(1) else { return ub() };
        let k = vals[0];
        get(move |st| {
            let Some(n) = st.as_int() else { return ub() };
            put(Any::Int(n | (1 << k)), ret(Any::pair(Any::MemState(m.clone()), Any::Int(0))))
        })
    });
    let getf: FunDef = Rc::new(|a: &Any| {
        let Some((m, vals)) = a.unpack_args_nat(1) else { return ub() };
        let k = vals[0];
        get(move |st| {
            let Some(n) = st.as_int() else { return ub() };
            ret(Any::pair(Any::MemState(m.clone()), Any::Int((n >> k) & 1)))
        })
    });
    PlainMod::new(vec![("get", getf), ("set", setf)], Any::Int(0))
}

/// The flag-typed final abstraction: state maps each flag to 0/1.
pub fn s_bs() -> PlainMod {
    let setf: FunDef = Rc::new(|a: &Any| {
        let Some((m, f)) = a.unpack_args_flag() else { return ub() };
        get(move |st| {
            let Any::List(cells) = st else { return ub() };
            let mut cells = cells.clone();
            cells[f] = Any::Int(1);
            put(Any::List(cells), ret(Any::pair(Any::MemState(m.clone()), Any::Int(0))))
        })
    });
    let getf: FunDef = Rc::new(|a: &Any| {
        let Some((m, f)) = a.unpack_args_flag() else { return ub() };
        get(move |st| {
            let Any::List(cells) = st else { return ub() };
            ret(Any::pair(Any::MemState(m.clone()), cells[f].clone()))
        })
    });
    PlainMod::new(
        vec![("get", getf), ("set", setf)],
        Any::List(vec![Any::Int(0), Any::Int(0), Any::Int(0)]),
    )
}

trait PackedExt {
    fn unpack_args_nat(&self, arity: usize) -> Option<(Mem, Vec<i64>)>;
    fn unpack_args_flag(&self) -> Option<(Mem, usize)>;
}

impl PackedExt for Any {
    fn unpack_args_nat(&self, arity: usize) -> Option<(Mem, Vec<i64>)> {
        let Any::Pair(m, vs) = self else { return None };
        let (Any::MemState(mem), Any::List(items)) = (m.as_ref(), vs.as_ref()) else {
            return None;
        };
        if items.len() != arity {
            return None;
        }
        let mut out = Vec::new();
        for it in items {
            out.push(nat(it)?);
        }
        Some((mem.clone(), out))
    }

    fn unpack_args_flag(&self) -> Option<(Mem, usize)> {
        let Any::Pair(m, vs) = self else { return None };
        let (Any::MemState(mem), Any::List(items)) = (m.as_ref(), vs.as_ref()) else {
            return None;
        };
        if items.len() != 1 {
            return None;
        }
        let f = f2n(&items[0])?;
        Some((mem.clone(), f as usize))
    }
}

/// Lower conditions: relate a natural-number argument with a long argument
/// via `l2n`, bounded by the representable range.
pub fn c_bs_conds(ra: &Ra) -> Conds {
    let pre = |ra: &Ra| {
        let ra = ra.clone();
        move |_: &Any, a_m: &Any, a_t: &Any| {
            let ok = match (a_m, a_t) {
                (Any::List(ms), Any::List(ts)) if ms.len() == 1 && ts.len() == 1 => {
                    match (nat(&ms[0]), l2n(&ts[0])) {
                        (Some(n), Some(l)) => n == l && (0..=64).contains(&n),
                        _ => false,
                    }
                }
                _ => false,
            };
            SProp::pure(&ra, ok)
        }
    };
    let set_post = {
        let ra = ra.clone();
        move |_: &Any, r_m: &Any, r_t: &Any| {
            SProp::pure(&ra, r_m == &Any::Int(0) && r_t == &Any::MemV(Val::Long(0)))
        }
    };
    let get_post = {
        let ra = ra.clone();
        move |_: &Any, r_m: &Any, r_t: &Any| {
            let ok = match (nat(r_m), l2n(r_t)) {
                (Some(n), Some(l)) => n == l,
                _ => false,
            };
            SProp::pure(&ra, ok)
        }
    };
    let setc = Cond::new(ra, vec![Any::Unit], pre(ra), set_post).memoized();
    let getc = Cond::new(ra, vec![Any::Unit], pre(ra), get_post).memoized();
    Conds::new(ra, vec![("get", getc), ("set", setc)])
}

/// Upper conditions: relate a flag argument with a natural via `f2n`.
pub fn d_bs_conds(ra: &Ra) -> Conds {
    let pre = |ra: &Ra| {
        let ra = ra.clone();
        move |_: &Any, a_s: &Any, a_m: &Any| {
            let ok = match (a_s, a_m) {
                (Any::List(ss), Any::List(ms)) if ss.len() == 1 && ms.len() == 1 => {
                    match (f2n(&ss[0]), nat(&ms[0])) {
                        (Some(f), Some(n)) => f == n,
                        _ => false,
                    }
                }
                _ => false,
            };
            SProp::pure(&ra, ok)
        }
    };
    let set_post = {
        let ra = ra.clone();
        move |_: &Any, r_s: &Any, r_m: &Any| {
            SProp::pure(&ra, r_s == &Any::Int(0) && r_m == &Any::Int(0))
        }
    };
    let get_post = {
        let ra = ra.clone();
        move |_: &Any, r_s: &Any, r_m: &Any| SProp::pure(&ra, r_s == r_m)
    };
    let setc = Cond::new(ra, vec![Any::Unit], pre(ra), set_post).memoized();
    let getc = Cond::new(ra, vec![Any::Unit], pre(ra), get_post).memoized();
    Conds::new(ra, vec![("get", getc), ("set", setc)])
}

/// The directly-written composite precondition `⌜f2n(a_s) = l2n(a_t)⌝`.
fn composite_get_pre(ra: &Ra) -> Cond {
    let ra2 = ra.clone();
    let ra3 = ra.clone();
    Cond::new(
        ra,
        vec![Any::Unit],
        move |_, a_s, a_t| {
            let ok = match (a_s, a_t) {
                (Any::List(ss), Any::List(ts)) if ss.len() == 1 && ts.len() == 1 => {
                    match (f2n(&ss[0]), l2n(&ts[0])) {
                        (Some(f), Some(l)) => f == l,
                        _ => false,
                    }
                }
                _ => false,
            };
            SProp::pure(&ra2, ok)
        },
        move |_, r_s, r_t| {
            let ok = match (nat(r_s), l2n(r_t)) {
                (Some(n), Some(l)) => n == l,
                _ => false,
            };
            SProp::pure(&ra3, ok)
        },
    )
}

struct BsSetup {
    ra: Ra,
    u: Universe,
    t: Mod,
    m: Mod,
    s: Mod,
}

fn bs_mem(bits: i64) -> Mem {
    Mem::with_blocks(vec![(0, vec![Val::Long(bits)])])
}

fn setup(cfg: &RunCfg) -> Result<BsSetup, String> {
    let ra = unit_ra();
    let m0 = bs_mem(0);
    let m0s = Mem::new();
    let mut values = Vec::new();
    // long-typed arguments and returns over the 4-bit key space
    for k in 0..4i64 {
        values.push(Any::pack_args(&m0, vec![Val::Long(k)]));
        values.push(Any::pack_ret(&bs_mem(1 << k), Val::Long(0)));
        // nat-typed arguments for the middle level
        values.push(Any::pair(
            Any::MemState(m0s.clone()),
            Any::List(vec![Any::Int(k)]),
        ));
    }
    values.push(Any::pack_ret(&m0, Val::Long(0)));
    values.push(Any::pack_ret(&m0, Val::Long(1)));
    // nat- and flag-typed boundary values
    for n in [0i64, 1] {
        values.push(Any::pair(Any::MemState(m0s.clone()), Any::Int(n)));
    }
    for f in 0..3 {
        values.push(Any::pair(Any::MemState(m0s.clone()), Any::List(vec![flag(f)])));
    }
    // bare value-level atoms for the condition-equivalence checks over the
    // 4-bit long domain and the 3-constructor flag domain
    for k in 0..16i64 {
        values.push(Any::List(vec![Any::MemV(Val::Long(k))]));
        values.push(Any::List(vec![Any::Int(k)]));
        values.push(Any::MemV(Val::Long(k)));
        values.push(Any::Int(k));
    }
    for f in 0..3 {
        values.push(Any::List(vec![flag(f)]));
    }
    if cfg.grown {
        values.push(Any::str("pad"));
    }
    let u = crate::corpus::mk_universe(cfg, values, &ra, 8)?.with_obs_results(vec![Any::Unit]);
    let t = embed(&to_plain_mod(&parse_memlang(T_BS_SRC).unwrap()), ra.unit_resource());
    let m = embed(&m_bs(), ra.unit_resource());
    let s = embed(&s_bs(), ra.unit_resource());
    Ok(BsSetup { ra, u, t, m, s })
}

pub fn bitset() -> Example {
    let vcomp_pre = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let c = c_bs_conds(&s.ra);
        let d = d_bs_conds(&s.ra);
        let composed = cond_vcomp(c.get("get"), d.get("get"), &s.u);
        match cond_equiv(&composed, &composite_get_pre(&s.ra), &s.u) {
            Ok(eq) => Outcome::Bool(eq.holds()),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let sep_unsat = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let c = c_bs_conds(&s.ra);
        let d = d_bs_conds(&s.ra);
        let starred = cond_sep(c.get("get"), d.get("get"));
        for x in starred.aux.iter() {
            for a in s.u.values() {
                for b in s.u.values() {
                    if starred.pre(x, a, b).satisfiable() || starred.post(x, a, b).satisfiable() {
                        return Outcome::Bool(false);
                    }
                }
            }
        }
        Outcome::Bool(true)
    };
    let leg_lower = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let c = c_bs_conds(&s.ra);
        match check_refine_module(&s.t, &s.m, &Conds::eps(&s.ra), &c, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let leg_upper = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let d = d_bs_conds(&s.ra);
        match check_refine_module(&s.m, &s.s, &Conds::eps(&s.ra), &d, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    let composed_end = |cfg: &RunCfg| {
        let s = match setup(cfg) {
            Ok(s) => s,
            Err(e) => return Outcome::Error(e),
        };
        let c = c_bs_conds(&s.ra);
        let d = d_bs_conds(&s.ra);
        let e = c.vcomp(&d, &s.u);
        match check_refine_module(&s.t, &s.s, &Conds::eps(&s.ra), &e, &s.u, WrapVariant::V2Strong)
        {
            Ok(v) => Outcome::Verdict(v),
            Err(e) => Outcome::Error(e.to_string()),
        }
    };
    Example {
        id: "bitset".into(),
        summary: String::new(),
        obligations: vec![
            Obligation::new(
                "bs-vcomp-pre",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the vertically composed get precondition equals the \
                 direct flag-to-long relation pointwise",
                vcomp_pre,
            ),
            Obligation::new(
                "bs-sep-unsat",
                WrapVariant::V2Strong,
                Expectation::Holds,
                "the same-level conjunction is unsatisfiable at every \
                 input",
                sep_unsat,
            ),
            Obligation::new(
                "bs-leg-lower",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "long implementation refines the natural-number \
                 abstraction",
                leg_lower,
            ),
            Obligation::new(
                "bs-leg-upper",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "natural-number abstraction refines the flag abstraction",
                leg_upper,
            ),
            Obligation::new(
                "bs-composed-end",
                WrapVariant::V2Strong,
                Expectation::Proven,
                "the composed conditions prove the end-to-end refinement",
                composed_end,
            ),
        ],
        growable: true,
    }
}

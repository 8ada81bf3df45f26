//! Sampled soundness harness for the memLang relational-logic rules.
//!
//! Each rule is instantiated on small concrete programs and checked as a
//! semantic refinement instance through the same machinery as the
//! adequacy-theorem checks: the quadruple `{P} c_t ≤ c_s {Q}` becomes a
//! single-function module pair wrapped with `inv ∗ P` / `inv ∗ Q`
//! conditions. A rule violation is a hard failure.

use std::rc::Rc;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::any::Any;
use crate::conds::{Cond, Conds};
use crate::memlang::ghost::{
    inv, points_to_many_t, points_to_s, points_to_t, vrel, vrel_list, MemGhost, MemLayout,
    MemWorld,
};
use crate::memlang::interp::to_plain_mod;
use crate::memlang::parser::parse_memlang;
use crate::memlang::val::{BlockId, Mem, Val};
use crate::module::embed;
use crate::refine::{check_refine_module, Verdict};
use crate::res::ra::Ra;
use crate::res::SProp;
use crate::tree::reachable_terminals;
use crate::universe::Universe;
use crate::wrapper::WrapVariant;

/// Value-level pre/postcondition of a quadruple instance.
type PreFn = Rc<dyn Fn(&MemLayout, &[Val], &[Val]) -> SProp>;
type PostFn = Rc<dyn Fn(&MemLayout, &Val, &Val) -> SProp>;

/// One quadruple instance: two single-function memLang modules, entry
/// memories and arguments for each side, the extra conditions, and the
/// ghost world shape.
pub struct QuadInstance {
    pub name: String,
    pub t_src: String,
    pub s_src: String,
    pub fname: String,
    pub mem_t: Mem,
    pub mem_s: Mem,
    pub args_t: Vec<Val>,
    pub args_s: Vec<Val>,
    pub pre: PreFn,
    pub post: PostFn,
    pub frag_keys_t: Vec<(BlockId, usize)>,
    pub frag_vals_t: Vec<Val>,
    pub frag_keys_s: Vec<(BlockId, usize)>,
    pub frag_vals_s: Vec<Val>,
    pub rel_pairs: Vec<(BlockId, BlockId)>,
    pub expect_proven: bool,
}

impl QuadInstance {
    pub fn base(name: &str, t_src: &str, s_src: &str) -> QuadInstance {
        let layout_true: PreFn = Rc::new(|l, _, _| SProp::pure(&l.ra, true));
        let post_true: PostFn = Rc::new(|l, _, _| SProp::pure(&l.ra, true));
        QuadInstance {
            name: name.to_string(),
            t_src: t_src.to_string(),
            s_src: s_src.to_string(),
            fname: "f".to_string(),
            mem_t: Mem::new(),
            mem_s: Mem::new(),
            args_t: vec![],
            args_s: vec![],
            pre: layout_true,
            post: post_true,
            frag_keys_t: vec![],
            frag_vals_t: vec![],
            frag_keys_s: vec![],
            frag_vals_s: vec![],
            rel_pairs: vec![],
            expect_proven: true,
        }
    }
}

/// Checks one quadruple instance; returns the verdict plus whether it
/// matched the expectation.
pub fn check_quad(inst: &QuadInstance, variant: WrapVariant) -> Result<(Verdict, bool), String> {
    let t_mod = parse_memlang(&inst.t_src).map_err(|e| e.to_string())?;
    let s_mod = parse_memlang(&inst.s_src).map_err(|e| e.to_string())?;
    let t_plain = to_plain_mod(&t_mod);
    let s_plain = to_plain_mod(&s_mod);

    // probe terminals to discover the memory/value footprint
    let probe = vec![Any::Unit];
    let packed_t = Any::pack_args(&inst.mem_t, inst.args_t.clone());
    let packed_s = Any::pack_args(&inst.mem_s, inst.args_s.clone());
    let terms_t = reachable_terminals(&(t_plain.funs[&inst.fname])(&packed_t), &probe, 64);
    let terms_s = reachable_terminals(&(s_plain.funs[&inst.fname])(&packed_s), &probe, 64);

    let mut mems_t = vec![inst.mem_t.clone()];
    let mut mems_s = vec![inst.mem_s.clone()];
    for t in &terms_t {
        if let Some((m, _)) = t.unpack_ret() {
            mems_t.push(m.clone());
        }
    }
    for t in &terms_s {
        if let Some((m, _)) = t.unpack_ret() {
            mems_s.push(m.clone());
        }
    }
    mems_t.sort();
    mems_t.dedup();
    mems_s.sort();
    mems_s.dedup();
    let mut pairs = Vec::new();
    for mt in &mems_t {
        for ms in &mems_s {
            pairs.push((mt.clone(), ms.clone()));
        }
    }
    let world = Arc::new(MemWorld {
        pairs,
        frag_keys_t: inst.frag_keys_t.clone(),
        frag_vals_t: inst.frag_vals_t.clone(),
        frag_keys_s: inst.frag_keys_s.clone(),
        frag_vals_s: inst.frag_vals_s.clone(),
        rel_pairs: inst.rel_pairs.clone(),
    });
    let ghost = Arc::new(MemGhost::new(world.clone()));
    let ghost_ra =
        Ra::new("fig9-ghost", Box::new(MemGhost::new(world))).map_err(|e| e.to_string())?;
    let ra = crate::res::product("fig9-ra", vec![ghost_ra]);
    let layout = MemLayout { ra: ra.clone(), factor: 0, ghost };

    let mut values = vec![packed_t.clone(), packed_s.clone()];
    values.extend(terms_t);
    values.extend(terms_s);
    let u = Universe::new(values, ra.clone(), 16);

    let d_cond = def8_cond(&layout, inst.pre.clone(), inst.post.clone());
    let d = Conds::new(&ra, vec![]).with_default(d_cond);
    let t_m = embed(&t_plain, ra.unit_resource());
    let s_m = embed(&s_plain, ra.unit_resource());
    let v = check_refine_module(&t_m, &s_m, &Conds::eps(&ra), &d, &u, variant)
        .map_err(|e| e.to_string())?;
    let ok = v.is_proven() == inst.expect_proven;
    Ok((v, ok))
}

/// `inv ∗ P` / `inv ∗ Q` conditions in the packed boundary shape.
fn def8_cond(layout: &MemLayout, pre: PreFn, post: PostFn) -> Cond {
    let (l1, l2) = (layout.clone(), layout.clone());
    Cond::new(
        &layout.ra,
        vec![Any::Unit],
        move |_, a_s, a_t| match (a_s.unpack_args(), a_t.unpack_args()) {
            (Some((m_s, vs_s)), Some((m_t, vs_t))) => {
                let vs_s: Vec<Val> = vs_s.into_iter().cloned().collect();
                let vs_t: Vec<Val> = vs_t.into_iter().cloned().collect();
                inv(&l1, m_t, m_s).sep(&(pre)(&l1, &vs_s, &vs_t))
            }
            _ => SProp::pure(&l1.ra, false),
        },
        move |_, r_s, r_t| match (r_s.unpack_ret(), r_t.unpack_ret()) {
            (Some((m_s, v_s)), Some((m_t, v_t))) => {
                inv(&l2, m_t, m_s).sep(&(post)(&l2, v_s, v_t))
            }
            _ => SProp::pure(&l2.ra, false),
        },
    )
    .memoized()
}

/// Report for one rule: instance verdicts and any violations.
#[derive(Debug, Clone, Serialize)]
pub struct HarnessReport {
    pub rule: String,
    pub instances: usize,
    pub violations: usize,
    pub notes: Vec<String>,
}

pub const FIG9_RULES: &[&str] = &[
    "MSIM-FRAME",
    "MSIM-BIND",
    "MSIM-FOCUS-TARGET",
    "MSIM-FOCUS-SOURCE",
    "TARGET-ALLOC",
    "TARGET-LOAD",
    "TARGET-STORE",
    "SOURCE-ALLOC",
    "SOURCE-LOAD",
    "SOURCE-STORE",
    "BOTH-ALLOC",
    "BOTH-LOAD",
    "BOTH-STORE",
    "BOTH-CALL",
    "BOTH-RETURN",
    "BOTH-PRINT",
    "PT-SPLIT",
];

/// Runs `samples` instances of one rule with a seeded generator.
pub fn fig9_harness(rule: &str, samples: usize, seed: u64) -> Result<HarnessReport, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xf19);
    let mut violations = 0usize;
    let mut notes = Vec::new();
    if rule == "PT-SPLIT" {
        for i in 0..samples {
            let v = Val::Long(rng.gen_range(0..4));
            let w = Val::Long(rng.gen_range(0..4));
            if !pt_split_holds(&v, &w) {
                violations += 1;
                notes.push(format!("split law failed at sample {i}"));
            }
        }
        return Ok(HarnessReport { rule: rule.into(), instances: samples, violations, notes });
    }
    for i in 0..samples {
        let inst = make_instance(rule, &mut rng).ok_or_else(|| format!("unknown rule {rule}"))?;
        match check_quad(&inst, WrapVariant::V2Strong) {
            Ok((v, ok)) => {
                if !ok {
                    violations += 1;
                    notes.push(format!("sample {i} ({}): got {}", inst.name, v.short()));
                }
            }
            Err(e) => {
                violations += 1;
                notes.push(format!("sample {i}: {e}"));
            }
        }
    }
    Ok(HarnessReport { rule: rule.into(), instances: samples, violations, notes })
}

/// `p ↦ [v,w] ⊣⊢ p ↦ [v] ∗ (p+1) ↦ [w]` on a two-cell world, both sides.
fn pt_split_holds(v: &Val, w: &Val) -> bool {
    let m = Mem::with_blocks(vec![(0, vec![v.clone(), w.clone()])]);
    let mut vals = vec![v.clone(), w.clone()];
    vals.sort();
    vals.dedup();
    let world = Arc::new(MemWorld {
        pairs: vec![(m.clone(), m.clone())],
        frag_keys_t: vec![(0, 0), (0, 1)],
        frag_vals_t: vals.clone(),
        frag_keys_s: vec![(0, 0), (0, 1)],
        frag_vals_s: vals,
        rel_pairs: vec![],
    });
    let ghost = Arc::new(MemGhost::new(world.clone()));
    let Ok(ghost_ra) = Ra::new("split-ghost", Box::new(MemGhost::new(world))) else {
        return false;
    };
    let ra = crate::res::product("split-ra", vec![ghost_ra]);
    let layout = MemLayout { ra, factor: 0, ghost };
    let combined = points_to_many_t(&layout, 0, 0, &[v.clone(), w.clone()]);
    let split = points_to_t(&layout, 0, 0, v).sep(&points_to_t(&layout, 0, 1, w));
    let combined_s = points_to_s(&layout, 0, 0, v).sep(&points_to_s(&layout, 0, 1, w));
    let split_s = points_to_s(&layout, 0, 0, v).sep(&points_to_s(&layout, 0, 1, w));
    combined.equivalent(&split) && combined_s.equivalent(&split_s)
}

fn make_instance<R: Rng>(rule: &str, rng: &mut R) -> Option<QuadInstance> {
    let v = rng.gen_range(0..4i64);
    let w = rng.gen_range(0..4i64);
    let cells = 8 * rng.gen_range(1..3i64);
    Some(match rule {
        "TARGET-ALLOC" => {
            let mut i = QuadInstance::base(
                "target-alloc",
                &format!("module t {{ fn f() {{ let p = calloc({cells}); ret p; }} }}"),
                "module s { fn f() { ret 0; } }",
            );
            let b = i.mem_t.next; // the fresh block id
            let n = (cells / 8) as usize;
            i.frag_keys_t = (0..n).map(|c| (b, c)).collect();
            i.frag_vals_t = vec![Val::Long(0)];
            let zeros = vec![Val::Long(0); n];
            i.post = Rc::new(move |l, v_s, v_t| {
                let ok = v_t == &Val::Ptr(b, 0) && v_s == &Val::Long(0);
                SProp::pure(&l.ra, ok).and(&points_to_many_t(l, b, 0, &zeros))
            });
            i
        }
        "TARGET-LOAD" => {
            let m = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "target-load",
                "module t { private cell; fn f() { ret *cell; } }",
                "module s { fn f() { ret 0; } }",
            );
            i.mem_t = m;
            i.frag_keys_t = vec![(0, 0)];
            i.frag_vals_t = vec![Val::Long(v)];
            i.pre = Rc::new(move |l, _, _| points_to_t(l, 0, 0, &Val::Long(v)));
            i.post = Rc::new(move |l, v_s, v_t| {
                let ok = v_t == &Val::Long(v) && v_s == &Val::Long(0);
                SProp::pure(&l.ra, ok).and(&points_to_t(l, 0, 0, &Val::Long(v)))
            });
            i
        }
        "TARGET-STORE" => {
            let m = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "target-store",
                &format!("module t {{ private cell; fn f() {{ *cell := {w}; ret 0; }} }}"),
                "module s { fn f() { ret 0; } }",
            );
            i.mem_t = m;
            i.frag_keys_t = vec![(0, 0)];
            i.frag_vals_t = vec![Val::Long(v), Val::Long(w)];
            i.frag_vals_t.dedup();
            i.pre = Rc::new(move |l, _, _| points_to_t(l, 0, 0, &Val::Long(v)));
            let stale = rng.gen_bool(0.2);
            // one in five samples asserts the stale value and must refute
            let claimed = if stale && v != w { v } else { w };
            i.expect_proven = claimed == w;
            i.post = Rc::new(move |l, _, _| points_to_t(l, 0, 0, &Val::Long(claimed)));
            i
        }
        "SOURCE-ALLOC" => {
            let mut i = QuadInstance::base(
                "source-alloc",
                "module t { fn f() { ret 0; } }",
                &format!("module s {{ fn f() {{ let p = calloc({cells}); ret p; }} }}"),
            );
            let b = i.mem_s.next;
            let n = (cells / 8) as usize;
            i.frag_keys_s = (0..n).map(|c| (b, c)).collect();
            i.frag_vals_s = vec![Val::Long(0)];
            i.post = Rc::new(move |l, v_s, v_t| {
                let ok = v_s == &Val::Ptr(b, 0) && v_t == &Val::Long(0);
                let mut frags = SProp::pure(&l.ra, true);
                for c in 0..n {
                    frags = frags.sep(&points_to_s(l, b, c, &Val::Long(0)));
                }
                SProp::pure(&l.ra, ok).and(&frags)
            });
            i
        }
        "SOURCE-LOAD" => {
            let m = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "source-load",
                "module t { fn f() { ret 0; } }",
                "module s { private cell; fn f() { ret *cell; } }",
            );
            i.mem_s = m;
            i.frag_keys_s = vec![(0, 0)];
            i.frag_vals_s = vec![Val::Long(v)];
            i.pre = Rc::new(move |l, _, _| points_to_s(l, 0, 0, &Val::Long(v)));
            i.post = Rc::new(move |l, v_s, v_t| {
                let ok = v_s == &Val::Long(v) && v_t == &Val::Long(0);
                SProp::pure(&l.ra, ok).and(&points_to_s(l, 0, 0, &Val::Long(v)))
            });
            i
        }
        "SOURCE-STORE" => {
            let m = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "source-store",
                "module t { fn f() { ret 0; } }",
                &format!("module s {{ private cell; fn f() {{ *cell := {w}; ret 0; }} }}"),
            );
            i.mem_s = m;
            i.frag_keys_s = vec![(0, 0)];
            i.frag_vals_s = vec![Val::Long(v), Val::Long(w)];
            i.frag_vals_s.dedup();
            i.pre = Rc::new(move |l, _, _| points_to_s(l, 0, 0, &Val::Long(v)));
            i.post = Rc::new(move |l, _, _| points_to_s(l, 0, 0, &Val::Long(w)));
            i
        }
        "BOTH-ALLOC" => {
            let mut i = QuadInstance::base(
                "both-alloc",
                &format!("module t {{ fn f() {{ let p = calloc({cells}); ret p; }} }}"),
                &format!("module s {{ fn f() {{ let p = calloc({cells}); ret p; }} }}"),
            );
            i.rel_pairs = vec![(i.mem_t.next, i.mem_s.next)];
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        "BOTH-LOAD" => {
            let m_t = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let m_s = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "both-load",
                "module t { fn f(p) { ret *p; } }",
                "module s { fn f(p) { ret *p; } }",
            );
            i.mem_t = m_t;
            i.mem_s = m_s;
            i.args_t = vec![Val::Ptr(0, 0)];
            i.args_s = vec![Val::Ptr(0, 0)];
            i.rel_pairs = vec![(0, 0)];
            i.pre = Rc::new(|l, vs_s, vs_t| vrel_list(l, vs_t, vs_s));
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        "BOTH-STORE" => {
            let m_t = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let m_s = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "both-store",
                &format!("module t {{ fn f(p) {{ *p := {w}; ret 0; }} }}"),
                &format!("module s {{ fn f(p) {{ *p := {w}; ret 0; }} }}"),
            );
            i.mem_t = m_t;
            i.mem_s = m_s;
            i.args_t = vec![Val::Ptr(0, 0)];
            i.args_s = vec![Val::Ptr(0, 0)];
            i.rel_pairs = vec![(0, 0)];
            i.pre = Rc::new(|l, vs_s, vs_t| vrel_list(l, vs_t, vs_s));
            i
        }
        "BOTH-RETURN" => {
            let mut i = QuadInstance::base(
                "both-return",
                &format!("module t {{ fn f() {{ ret {v}; }} }}"),
                &format!("module s {{ fn f() {{ ret {v}; }} }}"),
            );
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        "BOTH-PRINT" => {
            let mut i = QuadInstance::base(
                "both-print",
                &format!("module t {{ fn f() {{ print({v}); ret 0; }} }}"),
                &format!("module s {{ fn f() {{ print({v}); ret 0; }} }}"),
            );
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        "MSIM-FRAME" => {
            // a proven load instance framed with an untouched cell on both
            // sides of pre and post
            let m = Mem::with_blocks(vec![(0, vec![Val::Long(v)]), (1, vec![Val::Long(w)])]);
            let mut i = QuadInstance::base(
                "msim-frame",
                "module t { private cell; private spare; fn f() { ret *cell; } }",
                "module s { fn f() { ret 0; } }",
            );
            i.mem_t = m;
            i.frag_keys_t = vec![(0, 0), (1, 0)];
            i.frag_vals_t = vec![Val::Long(v), Val::Long(w)];
            i.frag_vals_t.dedup();
            i.pre = Rc::new(move |l, _, _| {
                points_to_t(l, 0, 0, &Val::Long(v)).sep(&points_to_t(l, 1, 0, &Val::Long(w)))
            });
            i.post = Rc::new(move |l, v_s, v_t| {
                let ok = v_t == &Val::Long(v) && v_s == &Val::Long(0);
                SProp::pure(&l.ra, ok)
                    .and(&points_to_t(l, 0, 0, &Val::Long(v)).sep(&points_to_t(l, 1, 0, &Val::Long(w))))
            });
            i
        }
        "MSIM-BIND" => {
            // store then load, sequenced; equals the composition of the
            // two one-step instances
            let m = Mem::with_blocks(vec![(0, vec![Val::Long(v)])]);
            let mut i = QuadInstance::base(
                "msim-bind",
                &format!(
                    "module t {{ private cell; fn f() {{ *cell := {w}; let x = *cell; ret x; }} }}"
                ),
                "module s { fn f() { ret 0; } }",
            );
            i.mem_t = m;
            i.frag_keys_t = vec![(0, 0)];
            i.frag_vals_t = vec![Val::Long(v), Val::Long(w)];
            i.frag_vals_t.dedup();
            i.pre = Rc::new(move |l, _, _| points_to_t(l, 0, 0, &Val::Long(v)));
            i.post = Rc::new(move |l, v_s, v_t| {
                let ok = v_t == &Val::Long(w) && v_s == &Val::Long(0);
                SProp::pure(&l.ra, ok).and(&points_to_t(l, 0, 0, &Val::Long(w)))
            });
            i
        }
        "MSIM-FOCUS-TARGET" => {
            let mut i = QuadInstance::base(
                "msim-focus-target",
                &format!(
                    "module t {{ fn f() {{ let p = calloc(8); *p := {v}; let x = *p; print(x); ret 0; }} }}"
                ),
                &format!("module s {{ fn f() {{ print({v}); ret 0; }} }}"),
            );
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        "MSIM-FOCUS-SOURCE" => {
            let mut i = QuadInstance::base(
                "msim-focus-source",
                &format!("module t {{ fn f() {{ print({v}); ret 0; }} }}"),
                &format!(
                    "module s {{ fn f() {{ let p = calloc(8); *p := {v}; let x = *p; print(x); ret 0; }} }}"
                ),
            );
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        "BOTH-CALL" => {
            let mut i = QuadInstance::base(
                "both-call",
                &format!("module t {{ fn f() {{ let x = g({v}); ret x; }} fn g(y) {{ ret y + 1; }} }}"),
                &format!("module s {{ fn f() {{ let x = g({v}); ret x; }} fn g(y) {{ ret y + 1; }} }}"),
            );
            i.post = Rc::new(|l, v_s, v_t| vrel(l, v_t, v_s));
            i
        }
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_check_fast_rules() {
        for rule in ["TARGET-ALLOC", "TARGET-LOAD", "BOTH-PRINT", "PT-SPLIT", "BOTH-RETURN"] {
            let r = fig9_harness(rule, 4, 11).unwrap();
            assert_eq!(r.violations, 0, "{rule}: {:?}", r.notes);
        }
    }

    #[test]
    fn target_store_refutes_a_stale_postcondition() {
        // direct negative instance: claim the old value after a store
        let m = Mem::with_blocks(vec![(0, vec![Val::Long(1)])]);
        let mut i = QuadInstance::base(
            "stale",
            "module t { private cell; fn f() { *cell := 2; ret 0; } }",
            "module s { fn f() { ret 0; } }",
        );
        i.mem_t = m;
        i.frag_keys_t = vec![(0, 0)];
        i.frag_vals_t = vec![Val::Long(1), Val::Long(2)];
        i.pre = Rc::new(|l, _, _| points_to_t(l, 0, 0, &Val::Long(1)));
        i.post = Rc::new(|l, _, _| points_to_t(l, 0, 0, &Val::Long(1)));
        let (v, _) = check_quad(&i, WrapVariant::V2Strong).unwrap();
        assert!(v.is_refuted(), "{v:?}");
    }
}

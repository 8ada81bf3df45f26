//! The condition algebra: per-function separation-logic conditions, their
//! equivalence, separating conjunction ∗, vertical composition ⋉, the units
//! ⊤ and ε, value-level conditions and their embedding, and the
//! interchange check.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use crate::any::Any;
use crate::error::CondErr;
use crate::res::{Ra, SProp};
use crate::universe::Universe;

/// `(x, value_s, value_t) ↦ sProp`; argument order: auxiliary variable,
/// source value, target value.
pub type CondFn = Rc<dyn Fn(&Any, &Any, &Any) -> SProp>;

/// A condition for one function: a finite auxiliary set with relational
/// pre/postconditions.
#[derive(Clone)]
pub struct Cond {
    pub ra: Ra,
    pub aux: Rc<Vec<Any>>,
    pre: CondFn,
    post: CondFn,
}

/// Maximum auxiliary-set size for the bijection search in `cond_equiv`.
pub const DEFAULT_AUX_BOUND: usize = 6;

/// Bound used for the composed conditions of the interchange check.
pub const INTERCHANGE_AUX_BOUND: usize = 16;

impl Cond {
    pub fn new(
        ra: &Ra,
        aux: Vec<Any>,
        pre: impl Fn(&Any, &Any, &Any) -> SProp + 'static,
        post: impl Fn(&Any, &Any, &Any) -> SProp + 'static,
    ) -> Cond {
        assert!(!aux.is_empty(), "auxiliary sets are finite enumerations; use [Unit] for 𝟙");
        Cond { ra: ra.clone(), aux: Rc::new(aux), pre: Rc::new(pre), post: Rc::new(post) }
    }

    pub fn pre(&self, x: &Any, a_s: &Any, a_t: &Any) -> SProp {
        (self.pre)(x, a_s, a_t)
    }

    pub fn post(&self, x: &Any, r_s: &Any, r_t: &Any) -> SProp {
        (self.post)(x, r_s, r_t)
    }

    /// Caches applications; conditions are applied at every wrapped tree
    /// node, so corpus conditions should be memoized.
    pub fn memoized(self) -> Cond {
        type Memo = RefCell<HashMap<(Any, Any, Any), SProp>>;
        fn wrap(f: CondFn) -> CondFn {
            let memo: Rc<Memo> = Rc::new(RefCell::new(HashMap::new()));
            Rc::new(move |x, a_s, a_t| {
                let key = (x.clone(), a_s.clone(), a_t.clone());
                if let Some(p) = memo.borrow().get(&key) {
                    return p.clone();
                }
                let p = f(x, a_s, a_t);
                memo.borrow_mut().insert(key, p.clone());
                p
            })
        }
        Cond { ra: self.ra, aux: self.aux, pre: wrap(self.pre), post: wrap(self.post) }
    }
}

/// ⊤: unit auxiliary set, trivially satisfiable conditions.
pub fn top_cond(ra: &Ra) -> Cond {
    let (ra1, ra2) = (ra.clone(), ra.clone());
    Cond::new(
        ra,
        vec![Any::Unit],
        move |_, _, _| SProp::pure(&ra1, true),
        move |_, _, _| SProp::pure(&ra2, true),
    )
}

/// ε: like ⊤ but equates source and target values; the unit of ⋉.
pub fn eps_cond(ra: &Ra) -> Cond {
    let (ra1, ra2) = (ra.clone(), ra.clone());
    Cond::new(
        ra,
        vec![Any::Unit],
        move |_, a_s, a_t| SProp::pure(&ra1, a_s == a_t),
        move |_, r_s, r_t| SProp::pure(&ra2, r_s == r_t),
    )
}

/// Same-level separating conjunction: pairs the auxiliary sets and conjoins
/// pre/post at the same value pair.
pub fn cond_sep(c: &Cond, d: &Cond) -> Cond {
    assert!(c.ra.same_as(&d.ra));
    let mut aux = Vec::with_capacity(c.aux.len() * d.aux.len());
    for xc in c.aux.iter() {
        for xd in d.aux.iter() {
            aux.push(Any::pair(xc.clone(), xd.clone()));
        }
    }
    let (cp, dp) = (c.pre.clone(), d.pre.clone());
    let (cq, dq) = (c.post.clone(), d.post.clone());
    Cond::new(
        &c.ra,
        aux,
        move |x, a_s, a_t| {
            let (xc, xd) = split_pair(x);
            cp(xc, a_s, a_t).sep(&dp(xd, a_s, a_t))
        },
        move |x, r_s, r_t| {
            let (xc, xd) = split_pair(x);
            cq(xc, r_s, r_t).sep(&dq(xd, r_s, r_t))
        },
    )
    .memoized()
}

/// Vertical composition c ⋉ d: c relates the middle and target levels, d
/// the source and middle; the middle value is existentially quantified
/// over the universe.
pub fn cond_vcomp(c: &Cond, d: &Cond, u: &Universe) -> Cond {
    assert!(c.ra.same_as(&d.ra));
    let mut aux = Vec::with_capacity(c.aux.len() * d.aux.len());
    for xc in c.aux.iter() {
        for xd in d.aux.iter() {
            aux.push(Any::pair(xc.clone(), xd.clone()));
        }
    }
    let (cp, dp) = (c.pre.clone(), d.pre.clone());
    let (cq, dq) = (c.post.clone(), d.post.clone());
    let (u1, u2) = (u.clone(), u.clone());
    let ra = c.ra.clone();
    let ra2 = c.ra.clone();
    Cond::new(
        &c.ra,
        aux,
        move |x, a_s, a_t| {
            let (xc, xd) = split_pair(x);
            let mut acc = SProp::pure(&ra, false);
            for a_m in u1.values() {
                acc = acc.or(&cp(xc, a_m, a_t).sep(&dp(xd, a_s, a_m)));
            }
            acc
        },
        move |x, r_s, r_t| {
            let (xc, xd) = split_pair(x);
            let mut acc = SProp::pure(&ra2, false);
            for r_m in u2.values() {
                acc = acc.or(&cq(xc, r_m, r_t).sep(&dq(xd, r_s, r_m)));
            }
            acc
        },
    )
    .memoized()
}

fn split_pair(x: &Any) -> (&Any, &Any) {
    match x {
        Any::Pair(a, b) => (a, b),
        _ => panic!("composed condition applied to a non-pair auxiliary value"),
    }
}

/// Result of `cond_equiv`: either a bijection witnesses the equivalence,
/// or only the aux-quantified (semantic) readings coincide, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondEquiv {
    Bijective,
    SemanticOnly,
    No,
}

impl CondEquiv {
    pub fn holds(self) -> bool {
        matches!(self, CondEquiv::Bijective)
    }
}

/// Decides c ≡ d at a universe: searches for a bijection between the
/// auxiliary sets making pre and post inter-derivable at every
/// (x, a_s, a_t). When no bijection works it still reports whether the
/// aux-existential readings agree pointwise.
pub fn cond_equiv(c: &Cond, d: &Cond, u: &Universe) -> Result<CondEquiv, CondErr> {
    cond_equiv_bounded(c, d, u, DEFAULT_AUX_BOUND)
}

pub fn cond_equiv_bounded(
    c: &Cond,
    d: &Cond,
    u: &Universe,
    bound: usize,
) -> Result<CondEquiv, CondErr> {
    let n = c.aux.len();
    if n > bound || d.aux.len() > bound {
        return Err(CondErr::AuxTooLarge { size: n.max(d.aux.len()), bound });
    }
    if n == d.aux.len() {
        let mut perm: Vec<usize> = (0..n).collect();
        if search_bijection(c, d, u, &mut perm, 0) {
            return Ok(CondEquiv::Bijective);
        }
    }
    if semantic_equiv(c, d, u) {
        return Ok(CondEquiv::SemanticOnly);
    }
    Ok(CondEquiv::No)
}

fn search_bijection(c: &Cond, d: &Cond, u: &Universe, perm: &mut Vec<usize>, k: usize) -> bool {
    let n = perm.len();
    if k == n {
        return true;
    }
    for i in k..n {
        perm.swap(k, i);
        let (xc, xd) = (&c.aux[k], &d.aux[perm[k]]);
        if aux_matches(c, d, xc, xd, u) && search_bijection(c, d, u, perm, k + 1) {
            return true;
        }
        perm.swap(k, i);
    }
    false
}

fn aux_matches(c: &Cond, d: &Cond, xc: &Any, xd: &Any, u: &Universe) -> bool {
    for a_s in u.values() {
        for a_t in u.values() {
            if !c.pre(xc, a_s, a_t).equivalent(&d.pre(xd, a_s, a_t)) {
                return false;
            }
            if !c.post(xc, a_s, a_t).equivalent(&d.post(xd, a_s, a_t)) {
                return false;
            }
        }
    }
    true
}

fn semantic_equiv(c: &Cond, d: &Cond, u: &Universe) -> bool {
    let any_of = |cond: &Cond, pre: bool, a_s: &Any, a_t: &Any| {
        let mut acc = SProp::pure(&cond.ra, false);
        for x in cond.aux.iter() {
            acc = acc.or(&if pre { cond.pre(x, a_s, a_t) } else { cond.post(x, a_s, a_t) });
        }
        acc
    };
    for a_s in u.values() {
        for a_t in u.values() {
            if !any_of(c, true, a_s, a_t).equivalent(&any_of(d, true, a_s, a_t)) {
                return false;
            }
            if !any_of(c, false, a_s, a_t).equivalent(&any_of(d, false, a_s, a_t)) {
                return false;
            }
        }
    }
    true
}

/// A name-indexed family of conditions, total via an explicit default.
#[derive(Clone)]
pub struct Conds {
    pub map: BTreeMap<String, Cond>,
    pub default: Cond,
}

impl Conds {
    /// All unmentioned names default to ε.
    pub fn new(ra: &Ra, entries: Vec<(&str, Cond)>) -> Conds {
        Conds {
            map: entries.into_iter().map(|(n, c)| (n.to_string(), c)).collect(),
            default: eps_cond(ra),
        }
    }

    pub fn with_default(mut self, default: Cond) -> Conds {
        self.default = default;
        self
    }

    /// ε everywhere.
    pub fn eps(ra: &Ra) -> Conds {
        Conds::new(ra, vec![])
    }

    pub fn get(&self, fname: &str) -> &Cond {
        self.map.get(fname).unwrap_or(&self.default)
    }

    fn zip_with(&self, other: &Conds, f: impl Fn(&Cond, &Cond) -> Cond) -> Conds {
        let mut names: Vec<&String> = self.map.keys().collect();
        names.extend(other.map.keys());
        names.sort();
        names.dedup();
        Conds {
            map: names
                .into_iter()
                .map(|n| (n.clone(), f(self.get(n), other.get(n))))
                .collect(),
            default: f(&self.default, &other.default),
        }
    }

    /// Pointwise ∗.
    pub fn sep(&self, other: &Conds) -> Conds {
        self.zip_with(other, cond_sep)
    }

    /// Pointwise ⋉.
    pub fn vcomp(&self, other: &Conds, u: &Universe) -> Conds {
        self.zip_with(other, |c, d| cond_vcomp(c, d, u))
    }

    /// Pointwise ≡ under one universe; true only if every name (and the
    /// default) is bijectively equivalent.
    pub fn equiv(&self, other: &Conds, u: &Universe) -> Result<bool, CondErr> {
        let mut names: Vec<&String> = self.map.keys().collect();
        names.extend(other.map.keys());
        names.sort();
        names.dedup();
        for n in names {
            if !cond_equiv(self.get(n), other.get(n), u)?.holds() {
                return Ok(false);
            }
        }
        cond_equiv(&self.default, &other.default, u).map(|e| e.holds())
    }
}

/// 𝒥ⁿ: left-associated ⋉-power, n ≥ 1.
pub fn vcomp_power(c: &Conds, n: u32, u: &Universe) -> Conds {
    assert!(n >= 1);
    let mut acc = c.clone();
    for _ in 1..n {
        acc = acc.vcomp(c, u);
    }
    acc
}

/// Desugars a unary Hoare-triple condition `∀x. {P x a} f(a) {r. Q x r}`
/// into the relational form `(X, λx aₛ aₜ. ⌜aₛ = aₜ⌝ ∗ P x aₛ, …)`.
pub fn unary_cond(
    ra: &Ra,
    aux: Vec<Any>,
    pre: impl Fn(&Any, &Any) -> SProp + 'static,
    post: impl Fn(&Any, &Any) -> SProp + 'static,
) -> Cond {
    let (ra1, ra2) = (ra.clone(), ra.clone());
    Cond::new(
        ra,
        aux,
        move |x, a_s, a_t| SProp::pure(&ra1, a_s == a_t).and(&pre(x, a_s)),
        move |x, r_s, r_t| SProp::pure(&ra2, r_s == r_t).and(&post(x, r_s)),
    )
}

/// Projects the unary payload back out of a desugared condition by fixing
/// equal source/target values.
pub fn unary_project(c: &Cond, x: &Any, a: &Any, pre: bool) -> SProp {
    if pre {
        c.pre(x, a, a)
    } else {
        c.post(x, a, a)
    }
}

/// A value-level condition (no memory component). Same shape as `Cond`;
/// the values it relates are plain, not (memory, value) pairs.
pub type VCond = Cond;

/// The trivial embedding ĉ: pre/post ignore the memory component of packed
/// `(memory, value)` pairs. Applied to values that are not packed pairs the
/// embedded condition is unsatisfiable, which makes malformed boundary
/// values absorb into UB on the source side.
pub fn vcond_embed(c: &VCond) -> Cond {
    let (cp, cq) = (c.pre.clone(), c.post.clone());
    let (ra1, ra2) = (c.ra.clone(), c.ra.clone());
    Cond::new(
        &c.ra,
        c.aux.as_ref().clone(),
        move |x, a_s, a_t| match (strip_mem(a_s), strip_mem(a_t)) {
            (Some(vs), Some(vt)) => cp(x, vs, vt),
            _ => SProp::pure(&ra1, false),
        },
        move |x, r_s, r_t| match (strip_mem(r_s), strip_mem(r_t)) {
            (Some(vs), Some(vt)) => cq(x, vs, vt),
            _ => SProp::pure(&ra2, false),
        },
    )
    .memoized()
}

fn strip_mem(v: &Any) -> Option<&Any> {
    match v {
        Any::Pair(m, rest) if matches!(m.as_ref(), Any::MemState(_)) => Some(rest),
        _ => None,
    }
}

/// Checks that a packed value really is a (memory, value) pair.
pub fn check_packed(v: &Any) -> Result<&Any, CondErr> {
    strip_mem(v).ok_or_else(|| CondErr::MalformedPacking(v.to_string()))
}

/// Report of the interchange law `(j ∗ ĉ) ⋉ (i ∗ d̂) ≡ (j ⋉ i) ∗ (c ⋉ d)^`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterchangeReport {
    pub hypotheses_hold: bool,
    pub conclusion_equiv: CondEquiv,
    pub hypothesis_violated: bool,
}

/// Checks both hypothesis entailments (middle and unary values pinned to
/// the target value) and the conclusion equivalence at a universe.
pub fn interchange_check(
    j: &Cond,
    c: &VCond,
    i: &Cond,
    d: &VCond,
    u: &Universe,
) -> Result<InterchangeReport, CondErr> {
    let mut hyp = true;
    // ∀x x' and packed middle/target values: (P_j x m t ∗ P_c x' v'_m v_t)
    // ⊢ ⌜v_m = v_t ∧ v'_m = v_t⌝, and the same for Q.
    'outer: for xj in j.aux.iter() {
        for xc in c.aux.iter() {
            for am in u.values() {
                let Some(vm) = strip_mem(am) else { continue };
                for at in u.values() {
                    let Some(vt) = strip_mem(at) else { continue };
                    for vpm in u.values() {
                        let agree = vm == vt && vpm == vt;
                        let pre = j.pre(xj, am, at).sep(&c.pre(xc, vpm, vt));
                        let post = j.post(xj, am, at).sep(&c.post(xc, vpm, vt));
                        if (pre.satisfiable() || post.satisfiable()) && !agree {
                            hyp = false;
                            break 'outer;
                        }
                    }
                }
            }
        }
    }
    let lhs = cond_vcomp(&cond_sep(j, &vcond_embed(c)), &cond_sep(i, &vcond_embed(d)), u);
    let rhs = cond_sep(&cond_vcomp(j, i, u), &vcond_embed(&cond_vcomp(c, d, u)));
    // composed auxiliary sets are products; allow a larger bijection bound
    let conclusion = cond_equiv_bounded(&lhs, &rhs, u, INTERCHANGE_AUX_BOUND)?;
    Ok(InterchangeReport {
        hypotheses_hold: hyp,
        conclusion_equiv: conclusion,
        hypothesis_violated: !hyp,
    })
}

/// Serializes a condition as satisfiability tables over the universe, for
/// reports.
pub fn cond_dump(name: &str, c: &Cond, u: &Universe) -> String {
    let mut out = format!("cond {name}: |X| = {}\n", c.aux.len());
    for (i, x) in c.aux.iter().enumerate() {
        out.push_str(&format!("  x[{i}] = {x}\n"));
        for a_s in u.values() {
            for a_t in u.values() {
                let p = c.pre(x, a_s, a_t);
                let q = c.post(x, a_s, a_t);
                if p.satisfiable() || q.satisfiable() {
                    out.push_str(&format!(
                        "    ({a_s}, {a_t}): pre{} post{}\n",
                        if p.satisfiable() { "+" } else { "-" },
                        if q.satisfiable() { "+" } else { "-" },
                    ));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::res::unit_ra;

    fn tiny_universe(ra: &Ra) -> Universe {
        Universe::new(vec![Any::Int(0), Any::Int(1)], ra.clone(), 8)
    }

    #[test]
    fn equiv_is_reflexive_and_units_cancel() {
        let ra = unit_ra();
        let u = tiny_universe(&ra);
        let c = eps_cond(&ra);
        assert!(cond_equiv(&c, &c, &u).unwrap().holds());
        assert!(cond_equiv(&cond_sep(&top_cond(&ra), &c), &c, &u).unwrap().holds());
        assert!(cond_equiv(&cond_vcomp(&eps_cond(&ra), &c, &u), &c, &u).unwrap().holds());
        assert!(cond_equiv(&cond_vcomp(&c, &eps_cond(&ra), &u), &c, &u).unwrap().holds());
    }

    #[test]
    fn aux_bound_is_enforced() {
        let ra = unit_ra();
        let u = tiny_universe(&ra);
        let big = Cond::new(
            &ra,
            (0..7).map(Any::Int).collect(),
            {
                let ra = ra.clone();
                move |_, _, _| SProp::pure(&ra, true)
            },
            {
                let ra = ra.clone();
                move |_, _, _| SProp::pure(&ra, true)
            },
        );
        assert!(matches!(
            cond_equiv(&big, &big, &u),
            Err(CondErr::AuxTooLarge { .. })
        ));
    }

    #[test]
    fn unary_desugaring_round_trips() {
        let ra = unit_ra();
        let u = tiny_universe(&ra);
        let c = unary_cond(
            &ra,
            vec![Any::Unit],
            {
                let ra = ra.clone();
                move |_, a| SProp::pure(&ra, a == &Any::Int(0))
            },
            {
                let ra = ra.clone();
                move |_, _| SProp::pure(&ra, true)
            },
        );
        for a in u.values() {
            let projected = unary_project(&c, &Any::Unit, a, true);
            assert_eq!(projected.satisfiable(), a == &Any::Int(0));
        }
        // relational positions with distinct values are unsatisfiable
        assert!(!c.pre(&Any::Unit, &Any::Int(0), &Any::Int(1)).satisfiable());
    }
}

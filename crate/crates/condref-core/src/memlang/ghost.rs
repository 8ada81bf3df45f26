//! Ghost state tying memLang memories to separation-logic resources: the
//! authoritative memory pairing, per-side points-to fragments, the
//! rel-set of lock-step-allocated block pairs, the value relation 𝒱, the
//! invariant `inv`, and the relational condition 𝒥.
//!
//! Desk-scale realization: each example declares a `MemWorld` — the
//! (target, source) memory pairs its ghost authority may assert, the
//! governed cells that may carry points-to fragments, and the universe of
//! relatable block pairs. `inv m_t m_s` owns the authority for exactly the
//! pair `(m_t, m_s)` plus a rel-set authority consistent with it; the
//! declared pair list plays the role of the module-state invariant of the
//! underlying simulation, and an undeclared pairing makes `inv`
//! unsatisfiable.

use std::sync::Arc;

use crate::any::Any;
use crate::conds::{Cond, Conds};
use crate::memlang::val::{BlockId, Mem, Val};
use crate::res::ra::{Ra, RaOps};
use crate::res::SProp;
use crate::universe::Universe;

/// Declared ghost world for one example.
#[derive(Debug, Clone, Default)]
pub struct MemWorld {
    /// (target, source) memory pairs the authority may relate.
    pub pairs: Vec<(Mem, Mem)>,
    /// Governed target cells that may carry ↦tgt fragments, with their
    /// value domain.
    pub frag_keys_t: Vec<(BlockId, usize)>,
    pub frag_vals_t: Vec<Val>,
    /// Same for ↦src.
    pub frag_keys_s: Vec<(BlockId, usize)>,
    pub frag_vals_s: Vec<Val>,
    /// Universe of relatable (target block, source block) pairs.
    pub rel_pairs: Vec<(BlockId, BlockId)>,
}

impl MemWorld {
    pub fn pair_idx(&self, m_t: &Mem, m_s: &Mem) -> Option<usize> {
        self.pairs.iter().position(|(t, s)| t == m_t && s == m_s)
    }
}

/// Decoded ghost element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GhostElem {
    /// Authoritative memory pairing, if owned.
    pub pair: Option<usize>,
    /// ↦tgt fragments: per governed key, an optional value index.
    pub frag_t: Vec<Option<usize>>,
    pub frag_s: Vec<Option<usize>>,
    /// Rel-set authority (subset mask over `rel_pairs`), if owned.
    pub rel_auth: Option<u32>,
    /// Persistent rel-set fragments (subset mask).
    pub rel_frag: u32,
}

/// The ghost resource algebra over a declared world.
pub struct MemGhost {
    pub world: Arc<MemWorld>,
    // mixed-radix sizes
    pair_card: u32,
    fmap_t_card: u32,
    fmap_s_card: u32,
    rel_auth_card: u32,
    rel_frag_card: u32,
}

impl MemGhost {
    pub fn new(world: Arc<MemWorld>) -> MemGhost {
        let rp = world.rel_pairs.len() as u32;
        assert!(rp <= 4, "rel universe kept tiny by design");
        let fmap = |keys: &Vec<(BlockId, usize)>, vals: &Vec<Val>| {
            (vals.len() as u32 + 1).pow(keys.len() as u32)
        };
        MemGhost {
            pair_card: world.pairs.len() as u32 + 1,
            fmap_t_card: fmap(&world.frag_keys_t, &world.frag_vals_t),
            fmap_s_card: fmap(&world.frag_keys_s, &world.frag_vals_s),
            rel_auth_card: (1 << rp) + 1,
            rel_frag_card: 1 << rp,
            world,
        }
    }

    fn cards(&self) -> [u32; 5] {
        [
            self.pair_card,
            self.fmap_t_card,
            self.fmap_s_card,
            self.rel_auth_card,
            self.rel_frag_card,
        ]
    }

    pub fn encode(&self, e: &GhostElem) -> u32 {
        let fenc = |frag: &Vec<Option<usize>>, vals: usize| {
            let base = vals as u32 + 1;
            frag.iter().rev().fold(0u32, |acc, d| {
                acc * base + d.map(|v| v as u32 + 1).unwrap_or(0)
            })
        };
        let parts = [
            e.pair.map(|p| p as u32 + 1).unwrap_or(0),
            fenc(&e.frag_t, self.world.frag_vals_t.len()),
            fenc(&e.frag_s, self.world.frag_vals_s.len()),
            e.rel_auth.map(|r| r + 1).unwrap_or(0),
            e.rel_frag,
        ];
        let mut idx = 0u32;
        for (p, c) in parts.iter().zip(self.cards()) {
            idx = idx * c + p;
        }
        idx
    }

    pub fn decode(&self, mut idx: u32) -> Option<GhostElem> {
        if idx == self.bot() {
            return None;
        }
        let cards = self.cards();
        let mut parts = [0u32; 5];
        for i in (0..5).rev() {
            parts[i] = idx % cards[i];
            idx /= cards[i];
        }
        let fdec = |mut m: u32, keys: usize, vals: usize| {
            let base = vals as u32 + 1;
            let mut out = Vec::with_capacity(keys);
            for _ in 0..keys {
                let d = m % base;
                m /= base;
                out.push(if d == 0 { None } else { Some((d - 1) as usize) });
            }
            out
        };
        Some(GhostElem {
            pair: if parts[0] == 0 { None } else { Some((parts[0] - 1) as usize) },
            frag_t: fdec(parts[1], self.world.frag_keys_t.len(), self.world.frag_vals_t.len()),
            frag_s: fdec(parts[2], self.world.frag_keys_s.len(), self.world.frag_vals_s.len()),
            rel_auth: if parts[3] == 0 { None } else { Some(parts[3] - 1) },
            rel_frag: parts[4],
        })
    }

    fn bot(&self) -> u32 {
        self.cards().iter().product::<u32>()
    }

    fn frag_agrees(mem: &Mem, keys: &[(BlockId, usize)], vals: &[Val], frag: &[Option<usize>]) -> bool {
        frag.iter().enumerate().all(|(i, d)| match d {
            None => true,
            Some(v) => {
                let (b, cell) = keys[i];
                mem.blocks
                    .get(&b)
                    .and_then(|cells| cells.get(cell))
                    .map(|actual| actual == &vals[*v])
                    .unwrap_or(false)
            }
        })
    }

    /// Block-pair consistency under a rel mask: both live with equal cell
    /// counts, and publicly related cells hold 𝒱-related values.
    fn rel_consistent(&self, mask: u32, m_t: &Mem, m_s: &Mem) -> bool {
        for (i, (bt, bs)) in self.world.rel_pairs.iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let (Some(ct), Some(cs)) = (m_t.blocks.get(bt), m_s.blocks.get(bs)) else {
                return false;
            };
            if ct.len() != cs.len() {
                return false;
            }
            for (vt, vs) in ct.iter().zip(cs) {
                if !self.vrel_holds(mask, vt, vs) {
                    return false;
                }
            }
        }
        true
    }

    /// The value relation under a given rel mask: identical defined scalars
    /// or block pairs in the mask.
    fn vrel_holds(&self, mask: u32, v_t: &Val, v_s: &Val) -> bool {
        match (v_t, v_s) {
            (Val::Int32(a), Val::Int32(b)) => a == b,
            (Val::Long(a), Val::Long(b)) => a == b,
            (Val::Ptr(bt, ot), Val::Ptr(bs, os)) => {
                ot == os
                    && self
                        .world
                        .rel_pairs
                        .iter()
                        .enumerate()
                        .any(|(i, p)| mask & (1 << i) != 0 && p == &(*bt, *bs))
            }
            _ => false,
        }
    }
}

impl RaOps for MemGhost {
    fn size(&self) -> u32 {
        self.bot() + 1
    }

    fn unit(&self) -> u32 {
        self.encode(&GhostElem {
            pair: None,
            frag_t: vec![None; self.world.frag_keys_t.len()],
            frag_s: vec![None; self.world.frag_keys_s.len()],
            rel_auth: None,
            rel_frag: 0,
        })
    }

    fn op(&self, a: u32, b: u32) -> u32 {
        let (Some(ea), Some(eb)) = (self.decode(a), self.decode(b)) else {
            return self.bot();
        };
        let pair = match (ea.pair, eb.pair) {
            (None, x) | (x, None) => x,
            _ => return self.bot(),
        };
        let rel_auth = match (ea.rel_auth, eb.rel_auth) {
            (None, x) | (x, None) => x,
            _ => return self.bot(),
        };
        let merge = |x: &[Option<usize>], y: &[Option<usize>]| -> Option<Vec<Option<usize>>> {
            x.iter()
                .zip(y)
                .map(|(a, b)| match (a, b) {
                    (None, v) | (v, None) => Some(*v),
                    _ => None,
                })
                .collect()
        };
        let (Some(frag_t), Some(frag_s)) = (merge(&ea.frag_t, &eb.frag_t), merge(&ea.frag_s, &eb.frag_s))
        else {
            return self.bot();
        };
        self.encode(&GhostElem {
            pair,
            frag_t,
            frag_s,
            rel_auth,
            rel_frag: ea.rel_frag | eb.rel_frag,
        })
    }

    fn valid(&self, a: u32) -> bool {
        let Some(e) = self.decode(a) else { return false };
        if let Some(r) = e.rel_auth {
            if e.rel_frag & !r != 0 {
                return false;
            }
        }
        match e.pair {
            None => true,
            Some(p) => {
                let (m_t, m_s) = &self.world.pairs[p];
                if !MemGhost::frag_agrees(m_t, &self.world.frag_keys_t, &self.world.frag_vals_t, &e.frag_t)
                    || !MemGhost::frag_agrees(m_s, &self.world.frag_keys_s, &self.world.frag_vals_s, &e.frag_s)
                {
                    return false;
                }
                match e.rel_auth {
                    None => true,
                    Some(r) => self.rel_consistent(r, m_t, m_s),
                }
            }
        }
    }

    fn core(&self, a: u32) -> Option<u32> {
        let e = self.decode(a)?;
        Some(self.encode(&GhostElem {
            pair: None,
            frag_t: vec![None; self.world.frag_keys_t.len()],
            frag_s: vec![None; self.world.frag_keys_s.len()],
            rel_auth: None,
            rel_frag: e.rel_frag,
        }))
    }

    fn elem_name(&self, a: u32) -> String {
        match self.decode(a) {
            None => "⊥".into(),
            Some(e) => {
                let mut parts = Vec::new();
                if let Some(p) = e.pair {
                    parts.push(format!("●pair{p}"));
                }
                for (i, d) in e.frag_t.iter().enumerate() {
                    if let Some(v) = d {
                        let (b, c) = self.world.frag_keys_t[i];
                        parts.push(format!("({b},{c})↦t{}", self.world.frag_vals_t[*v]));
                    }
                }
                for (i, d) in e.frag_s.iter().enumerate() {
                    if let Some(v) = d {
                        let (b, c) = self.world.frag_keys_s[i];
                        parts.push(format!("({b},{c})↦s{}", self.world.frag_vals_s[*v]));
                    }
                }
                if let Some(r) = e.rel_auth {
                    parts.push(format!("●rel{r:b}"));
                }
                if e.rel_frag != 0 {
                    parts.push(format!("◯rel{:b}", e.rel_frag));
                }
                if parts.is_empty() {
                    "ε".into()
                } else {
                    parts.join("·")
                }
            }
        }
    }

    fn laws_by_construction(&self) -> bool {
        true
    }
}

/// Locates the ghost factor inside an example's product algebra.
#[derive(Clone)]
pub struct MemLayout {
    pub ra: Ra,
    pub factor: usize,
    pub ghost: Arc<MemGhost>,
}

impl MemLayout {
    /// Builds the full-RA index for an element that is `g` in the ghost
    /// factor and ε elsewhere.
    pub fn lift(&self, g: u32) -> u32 {
        let factors = self.ra_factors();
        let parts: Vec<u32> = factors
            .iter()
            .enumerate()
            .map(|(i, f)| if i == self.factor { g } else { f.unit() })
            .collect();
        self.encode_parts(&parts)
    }

    fn ra_factors(&self) -> Vec<Ra> {
        self.ra
            .factors_vec()
            .expect("memory layout requires a product algebra")
    }

    fn encode_parts(&self, parts: &[u32]) -> u32 {
        let factors = self.ra_factors();
        let mut idx = 0u32;
        for (p, f) in parts.iter().zip(&factors) {
            idx = idx * f.size() + p;
        }
        idx
    }
}

impl Ra {
    /// Factor list of a product algebra (clones the handles).
    pub fn factors_vec(&self) -> Option<Vec<Ra>> {
        self.factors_ref().map(|fs| fs.to_vec())
    }
}

/// `𝒱 v_t v_s`: pure on identical defined scalars, rel-set fragment
/// ownership on pointer pairs, false otherwise. Duplicable (the rel
/// fragment is its own core).
pub fn vrel(layout: &MemLayout, v_t: &Val, v_s: &Val) -> SProp {
    match (v_t, v_s) {
        (Val::Int32(a), Val::Int32(b)) => SProp::pure(&layout.ra, a == b),
        (Val::Long(a), Val::Long(b)) => SProp::pure(&layout.ra, a == b),
        (Val::Ptr(bt, ot), Val::Ptr(bs, os)) => {
            if ot != os {
                return SProp::pure(&layout.ra, false);
            }
            match layout.ghost.world.rel_pairs.iter().position(|p| p == &(*bt, *bs)) {
                None => SProp::pure(&layout.ra, false),
                Some(i) => {
                    let g = layout.ghost.encode(&GhostElem {
                        pair: None,
                        frag_t: vec![None; layout.ghost.world.frag_keys_t.len()],
                        frag_s: vec![None; layout.ghost.world.frag_keys_s.len()],
                        rel_auth: None,
                        rel_frag: 1 << i,
                    });
                    SProp::own(&layout.ra.resource(layout.lift(g)))
                }
            }
        }
        _ => SProp::pure(&layout.ra, false),
    }
}

/// 𝒱 on argument lists: pairwise, false on length mismatch.
pub fn vrel_list(layout: &MemLayout, vs_t: &[Val], vs_s: &[Val]) -> SProp {
    if vs_t.len() != vs_s.len() {
        return SProp::pure(&layout.ra, false);
    }
    let mut acc = SProp::pure(&layout.ra, true);
    for (vt, vs) in vs_t.iter().zip(vs_s) {
        acc = acc.sep(&vrel(layout, vt, vs));
    }
    acc
}

/// `inv m_t m_s`: ownership of the memory-pair authority for exactly
/// `(m_t, m_s)` together with a rel-set authority whose pairs all name
/// live blocks of equal cell count holding 𝒱-related values. Unsatisfiable
/// when the pairing is not declared in the world.
pub fn inv(layout: &MemLayout, m_t: &Mem, m_s: &Mem) -> SProp {
    let ghost = &layout.ghost;
    let Some(p) = ghost.world.pair_idx(m_t, m_s) else {
        return SProp::pure(&layout.ra, false);
    };
    let mut elems = Vec::new();
    let nrel = ghost.world.rel_pairs.len() as u32;
    for mask in 0u32..(1 << nrel) {
        if ghost.rel_consistent(mask, m_t, m_s) {
            let g = ghost.encode(&GhostElem {
                pair: Some(p),
                frag_t: vec![None; ghost.world.frag_keys_t.len()],
                frag_s: vec![None; ghost.world.frag_keys_s.len()],
                rel_auth: Some(mask),
                rel_frag: 0,
            });
            elems.push(layout.lift(g));
        }
    }
    SProp::from_elems(&layout.ra, &elems)
}

/// ↦tgt for a single governed cell.
pub fn points_to_t(layout: &MemLayout, b: BlockId, cell: usize, v: &Val) -> SProp {
    points_to(layout, true, b, cell, v)
}

/// ↦src for a single governed cell.
pub fn points_to_s(layout: &MemLayout, b: BlockId, cell: usize, v: &Val) -> SProp {
    points_to(layout, false, b, cell, v)
}

fn points_to(layout: &MemLayout, tgt: bool, b: BlockId, cell: usize, v: &Val) -> SProp {
    let ghost = &layout.ghost;
    let (keys, vals) = if tgt {
        (&ghost.world.frag_keys_t, &ghost.world.frag_vals_t)
    } else {
        (&ghost.world.frag_keys_s, &ghost.world.frag_vals_s)
    };
    let (Some(ki), Some(vi)) = (
        keys.iter().position(|k| k == &(b, cell)),
        vals.iter().position(|w| w == v),
    ) else {
        return SProp::pure(&layout.ra, false);
    };
    let mut frag_t = vec![None; ghost.world.frag_keys_t.len()];
    let mut frag_s = vec![None; ghost.world.frag_keys_s.len()];
    if tgt {
        frag_t[ki] = Some(vi);
    } else {
        frag_s[ki] = Some(vi);
    }
    let g = ghost.encode(&GhostElem { pair: None, frag_t, frag_s, rel_auth: None, rel_frag: 0 });
    SProp::own(&layout.ra.resource(layout.lift(g)))
}

/// ↦ over consecutive cells starting at (b, start).
pub fn points_to_many_t(layout: &MemLayout, b: BlockId, start: usize, vs: &[Val]) -> SProp {
    let mut acc = SProp::pure(&layout.ra, true);
    for (i, v) in vs.iter().enumerate() {
        acc = acc.sep(&points_to_t(layout, b, start + i, v));
    }
    acc
}

/// The relational condition 𝒥 (one `Cond` serving every function name):
/// boundary values are `(memory, values)` packs whose memories are related
/// by `inv` and whose values are pairwise 𝒱-related.
pub fn j_cond(layout: &MemLayout, _u: &Universe) -> Conds {
    let ra = layout.ra.clone();
    let l1 = layout.clone();
    let l2 = layout.clone();
    let cond = Cond::new(
        &ra,
        vec![Any::Unit],
        move |_, a_s, a_t| match (a_s.unpack_args(), a_t.unpack_args()) {
            (Some((m_s, vs_s)), Some((m_t, vs_t))) => {
                let vs_s: Vec<Val> = vs_s.into_iter().cloned().collect();
                let vs_t: Vec<Val> = vs_t.into_iter().cloned().collect();
                inv(&l1, m_t, m_s).sep(&vrel_list(&l1, &vs_t, &vs_s))
            }
            _ => SProp::pure(&l1.ra, false),
        },
        move |_, r_s, r_t| match (r_s.unpack_ret(), r_t.unpack_ret()) {
            (Some((m_s, v_s)), Some((m_t, v_t))) => {
                inv(&l2, m_t, m_s).sep(&vrel(&l2, v_t, v_s))
            }
            _ => SProp::pure(&l2.ra, false),
        },
    )
    .memoized();
    Conds::new(&ra, vec![]).with_default(cond)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::res::{product, unit_ra, Ra};

    fn world_and_layout() -> (Arc<MemWorld>, MemLayout) {
        let m0 = Mem::new();
        let (m1t, _) = m0.alloc(&Val::long(8)).unwrap();
        let m1t = m1t.store(&Val::Ptr(0, 0), Val::Long(5)).unwrap();
        let (m1s, _) = m0.alloc(&Val::long(8)).unwrap();
        let m1s = m1s.store(&Val::Ptr(0, 0), Val::Long(5)).unwrap();
        let world = Arc::new(MemWorld {
            pairs: vec![(m0.clone(), m0.clone()), (m1t.clone(), m1s.clone())],
            frag_keys_t: vec![(0, 0)],
            frag_vals_t: vec![Val::Long(0), Val::Long(5)],
            frag_keys_s: vec![],
            frag_vals_s: vec![],
            rel_pairs: vec![(0, 0)],
        });
        let ghost = Arc::new(MemGhost::new(world.clone()));
        let ghost_ra = Ra::new("memghost", Box::new(MemGhost::new(world.clone())))
            .expect("ghost algebra is valid");
        let ra = product("test-ra", vec![unit_ra(), ghost_ra]);
        (world.clone(), MemLayout { ra, factor: 1, ghost })
    }

    #[test]
    fn vrel_scalars_and_duplicability() {
        let (_, l) = world_and_layout();
        assert!(vrel(&l, &Val::Long(5), &Val::Long(5)).equivalent(&SProp::pure(&l.ra, true)));
        assert!(!vrel(&l, &Val::Long(5), &Val::Long(6)).satisfiable());
        assert!(!vrel(&l, &Val::Undef, &Val::Undef).satisfiable());
        // pointer relatedness is duplicable
        let v = vrel(&l, &Val::Ptr(0, 0), &Val::Ptr(0, 0));
        assert!(v.satisfiable());
        assert!(v.entails(&v.sep(&v)));
    }

    #[test]
    fn inv_requires_a_declared_pairing() {
        let (w, l) = world_and_layout();
        let (m0, _) = (&w.pairs[0].0, &w.pairs[0].1);
        assert!(inv(&l, m0, m0).satisfiable());
        let (m1t, m1s) = (&w.pairs[1].0, &w.pairs[1].1);
        assert!(inv(&l, m1t, m1s).satisfiable());
        // a mispairing is unsatisfiable
        assert!(!inv(&l, m1t, m0).satisfiable());
    }

    #[test]
    fn points_to_agrees_with_the_authority() {
        let (w, l) = world_and_layout();
        let (m1t, m1s) = (&w.pairs[1].0, &w.pairs[1].1);
        let pt5 = points_to_t(&l, 0, 0, &Val::Long(5));
        let pt0 = points_to_t(&l, 0, 0, &Val::Long(0));
        // fragment composes validly with the matching authority only
        let with_auth = |frag: &SProp, m_t: &Mem, m_s: &Mem| {
            let a = inv(&l, m_t, m_s);
            a.sep(frag).satisfiable()
        };
        assert!(with_auth(&pt5, m1t, m1s));
        assert!(!with_auth(&pt0, m1t, m1s));
        // two fragments for the same cell never compose
        assert!(!pt5.sep(&pt5).satisfiable());
    }
}

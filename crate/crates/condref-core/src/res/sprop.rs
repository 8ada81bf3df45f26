//! Separation-logic propositions over a finite carrier, with the Iris-style
//! connectives, the update modalities, and `cur_sprops`.
//!
//! A proposition is the set of carrier elements satisfying it, stored as a
//! bitset. Entailment quantifies over valid elements only.

use crate::error::RaErr;
use crate::res::bits::Bits;
use crate::res::ra::{Ra, Resource};

/// Decidable predicate over a resource-algebra carrier.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SProp {
    pub ra: Ra,
    bits: Bits,
}

/// Update-modality strength selector for the peeking modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strength {
    Weak,
    Strong,
}

/// Hard bound on `2^|carrier|` for the peeking modality's predicate
/// quantifier (see `peek_upd`).
pub const DEFAULT_PEEK_BOUND: u32 = 14;

impl SProp {
    pub fn from_bits(ra: &Ra, bits: Bits) -> SProp {
        debug_assert_eq!(bits.len(), ra.size());
        SProp { ra: ra.clone(), bits }
    }

    pub fn from_elems(ra: &Ra, elems: &[u32]) -> SProp {
        let mut bits = Bits::empty(ra.size());
        for &e in elems {
            bits.set(e);
        }
        SProp { ra: ra.clone(), bits }
    }

    pub fn from_fn(ra: &Ra, f: impl Fn(u32) -> bool) -> SProp {
        let mut bits = Bits::empty(ra.size());
        for e in ra.elems() {
            if f(e) {
                bits.set(e);
            }
        }
        SProp { ra: ra.clone(), bits }
    }

    /// `⌜p⌝`: a pure proposition holds of every element or none.
    pub fn pure(ra: &Ra, p: bool) -> SProp {
        if p {
            SProp { ra: ra.clone(), bits: Bits::full(ra.size()) }
        } else {
            SProp { ra: ra.clone(), bits: Bits::empty(ra.size()) }
        }
    }

    /// `⟦a⟧`: ownership of at least `a`.
    pub fn own(a: &Resource) -> SProp {
        let ra = &a.ra;
        let mut bits = Bits::empty(ra.size());
        for c in ra.elems() {
            bits.set(ra.op(a.idx, c));
        }
        SProp { ra: ra.clone(), bits }
    }

    /// Ownership of exactly `a`.
    pub fn exact(a: &Resource) -> SProp {
        SProp::from_elems(&a.ra, &[a.idx])
    }

    pub fn holds(&self, a: u32) -> bool {
        self.bits.get(a)
    }

    pub fn holds_res(&self, a: &Resource) -> Result<bool, RaErr> {
        self.ra.check_same(&a.ra)?;
        Ok(self.holds(a.idx))
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    /// True if some valid element satisfies the proposition.
    pub fn satisfiable(&self) -> bool {
        self.bits.intersects(self.ra.valid_set())
    }

    pub fn and(&self, other: &SProp) -> SProp {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        SProp { ra: self.ra.clone(), bits }
    }

    pub fn or(&self, other: &SProp) -> SProp {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        SProp { ra: self.ra.clone(), bits }
    }

    /// Separating conjunction: `(P ∗ Q)(r) ⇔ ∃r₁r₂. r = r₁·r₂ ∧ P r₁ ∧ Q r₂`.
    pub fn sep(&self, other: &SProp) -> SProp {
        debug_assert!(self.ra.same_as(&other.ra));
        let ra = &self.ra;
        let mut bits = Bits::empty(ra.size());
        for p in self.bits.ones() {
            for q in other.bits.ones() {
                bits.set(ra.op(p, q));
            }
        }
        SProp { ra: ra.clone(), bits }
    }

    /// Magic wand: `(P −∗ Q)(r) ⇔ ∀r'. ✓(r·r') ∧ P r' ⇒ Q (r·r')`.
    pub fn wand(&self, other: &SProp) -> SProp {
        debug_assert!(self.ra.same_as(&other.ra));
        let ra = &self.ra;
        let mut bits = Bits::empty(ra.size());
        'outer: for r in ra.elems() {
            for p in self.bits.ones() {
                let rp = ra.op(r, p);
                if ra.valid(rp) && !other.bits.get(rp) {
                    continue 'outer;
                }
            }
            bits.set(r);
        }
        SProp { ra: ra.clone(), bits }
    }

    /// Monotone (upward) closure under resource extension: `P ∗ ⊤`.
    pub fn mono_closure(&self) -> SProp {
        self.sep(&SProp::pure(&self.ra, true))
    }

    /// Finite universal quantification.
    pub fn forall(ra: &Ra, family: &[SProp]) -> SProp {
        let mut acc = SProp::pure(ra, true);
        for p in family {
            acc = acc.and(p);
        }
        acc
    }

    /// Finite existential quantification.
    pub fn exists(ra: &Ra, family: &[SProp]) -> SProp {
        let mut acc = SProp::pure(ra, false);
        for p in family {
            acc = acc.or(p);
        }
        acc
    }

    /// Entailment over valid elements: `∀r. ✓r ∧ P r ⇒ Q r`.
    pub fn entails(&self, other: &SProp) -> bool {
        debug_assert!(self.ra.same_as(&other.ra));
        let mut lhs = self.bits.clone();
        lhs.intersect_with(self.ra.valid_set());
        lhs.is_subset(&other.bits)
    }

    pub fn equivalent(&self, other: &SProp) -> bool {
        self.entails(other) && other.entails(self)
    }

    /// Weak update modality:
    /// `(⊩w P)(a) ⇔ ∀c. ✓(a·c) ⇒ ∃b. ✓(b·c) ∧ P b`.
    pub fn wupd(&self) -> SProp {
        let ra = &self.ra;
        // frames coverable by some satisfying b
        let mut covered = Bits::empty(ra.size());
        for b in self.bits.ones() {
            covered.union_with(ra.compat_row(b));
        }
        let mut bits = Bits::empty(ra.size());
        for a in ra.elems() {
            if ra.compat_row(a).is_subset(&covered) {
                bits.set(a);
            }
        }
        SProp { ra: ra.clone(), bits }
    }

    /// Strong update modality:
    /// `(⊩s P)(a) ⇔ ∃b. a ⤳ b ∧ P b`.
    pub fn supd(&self) -> SProp {
        let ra = &self.ra;
        let mut bits = Bits::empty(ra.size());
        for a in ra.elems() {
            let ca = ra.compat_row(a);
            let found =
                self.bits.ones().any(|b| ca.is_subset(ra.compat_row(b)));
            if found {
                bits.set(a);
            }
        }
        SProp { ra: ra.clone(), bits }
    }

    pub fn upd(&self, strength: Strength) -> SProp {
        match strength {
            Strength::Weak => self.wupd(),
            Strength::Strong => self.supd(),
        }
    }
}

/// Peeking update modality:
/// `(R ⊩ P) ≜ ∀F. (F ∧ R) −∗ ⊩ ((F ∧ R) ∗ P)`
/// where `F` ranges over *all* predicates on the carrier and `⊩` is the
/// selected update strength. Exhaustive in `2^|Σ|`; fails when the carrier
/// exceeds the configured bound.
pub fn peek_upd(r: &SProp, p: &SProp, strength: Strength, bound: u32) -> Result<SProp, RaErr> {
    debug_assert!(r.ra.same_as(&p.ra));
    let ra = &r.ra;
    let n = ra.size();
    if n > bound {
        return Err(RaErr::CarrierTooLarge { carrier: n as usize, bound });
    }
    let mut acc = SProp::pure(ra, true);
    for mask in 0u64..(1u64 << n) {
        let mut fbits = Bits::empty(n);
        for i in 0..n {
            if mask & (1 << i) != 0 {
                fbits.set(i);
            }
        }
        let fr = SProp::from_bits(ra, fbits).and(r);
        let inner = fr.sep(p).upd(strength);
        acc = acc.and(&fr.wand(&inner));
        if acc.bits.is_empty() {
            break;
        }
    }
    Ok(acc)
}

/// `cur_sprops p R ≜ ✓(p) ∧ ∃r. p ⤳ r ∧ R r`.
pub fn cur_sprops(p: &Resource, r: &SProp) -> Result<bool, RaErr> {
    p.ra.check_same(&r.ra)?;
    let ra = &p.ra;
    if !ra.valid(p.idx) {
        return Ok(false);
    }
    let cp = ra.compat_row(p.idx);
    Ok(r.bits.ones().any(|b| cp.is_subset(ra.compat_row(b))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::res::instances::{exclusive, six_token, unit_ra};

    #[test]
    fn own_and_sep_compose() {
        let ra = exclusive("ex", &["x", "y"]);
        let x = ra.resource(ra.elem_by_name("x").unwrap());
        let y = ra.resource(ra.elem_by_name("y").unwrap());
        let xy = x.join(&y).unwrap();
        // entails(own x ∗ own y, own (x·y))
        assert!(SProp::own(&x).sep(&SProp::own(&y)).entails(&SProp::own(&xy)));
        // P ⊢ ⌜true⌝
        assert!(SProp::own(&x).entails(&SProp::pure(&ra, true)));
    }

    #[test]
    fn cannot_forge_an_exclusive_token() {
        let ra = exclusive("ex", &["x"]);
        let x = ra.resource(ra.elem_by_name("x").unwrap());
        let forged = SProp::own(&x).supd();
        assert!(!SProp::pure(&ra, true).entails(&forged));
    }

    #[test]
    fn supd_entails_wupd() {
        let ra = six_token::six_token_ra();
        for mask in [0u32, 3, 7, 16, 255, 511] {
            let p = SProp::from_fn(&ra, |e| mask & (1 << (e % 30)) != 0);
            assert!(p.supd().entails(&p.wupd()));
        }
    }

    #[test]
    fn six_token_separates_weak_from_strong() {
        let ra = six_token::six_token_ra();
        let beta = ra.resource(six_token::idx(0, 2));
        let alpha = ra.resource(six_token::idx(0, 1));
        let gamma = ra.resource(six_token::idx(0, 3));
        let target = SProp::exists(&ra, &[SProp::own(&alpha), SProp::own(&gamma)]);
        assert!(SProp::own(&beta).entails(&target.wupd()));
        assert!(!SProp::own(&beta).entails(&target.supd()));
    }

    #[test]
    fn cur_sprops_basics() {
        let ra = unit_ra();
        assert!(cur_sprops(&ra.unit_resource(), &SProp::pure(&ra, true)).unwrap());
        let ex = exclusive("ex", &["x"]);
        let x = ex.resource(ex.elem_by_name("x").unwrap());
        // cur_sprops(a, ⟦a'⟧) implies ✓ a'
        for a in ex.elems() {
            for b in ex.elems() {
                let owned = ex.resource(b);
                if cur_sprops(&ex.resource(a), &SProp::own(&owned)).unwrap() {
                    assert!(ex.valid(b));
                }
            }
        }
        assert!(!cur_sprops(&x.join(&x).unwrap(), &SProp::pure(&ex, true)).unwrap());
    }

    #[test]
    fn peek_bound_is_enforced() {
        let ra = six_token::six_token_ra();
        let p = SProp::pure(&ra, true);
        assert!(matches!(
            peek_upd(&p, &p, Strength::Strong, 14),
            Err(RaErr::CarrierTooLarge { .. })
        ));
        assert!(peek_upd(&p, &p, Strength::Strong, 17).is_ok());
    }
}

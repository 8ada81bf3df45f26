//! Finite resource algebras: carriers, composition, validity, cores, and
//! the frame-preserving-update deciders.
//!
//! Carrier elements are `u32` indices into the algebra. Construction
//! precomputes a pairwise compatibility matrix (`✓(a·b)` rows), which makes
//! every enumeration decider a few bitset scans.

use std::fmt;
use std::sync::Arc;

use crate::error::RaErr;
use crate::res::bits::Bits;

/// Raw operations of a finite resource algebra over indices `0..size`.
///
/// Implementations provide total composition; validity and core are free
/// functions of the element. Everything else is derived.
pub trait RaOps: Send + Sync {
    fn size(&self) -> u32;
    fn unit(&self) -> u32;
    fn op(&self, a: u32, b: u32) -> u32;
    fn valid(&self, a: u32) -> bool;
    fn core(&self, a: u32) -> Option<u32>;
    fn elem_name(&self, a: u32) -> String;
    /// Structured algebras may expose factors for factored deciders.
    fn factors(&self) -> Option<&[Ra]> {
        None
    }
    /// Whether associativity/commutativity hold by construction, making the
    /// exhaustive table check redundant.
    fn laws_by_construction(&self) -> bool {
        false
    }
}

struct RaInner {
    name: String,
    ops: Box<dyn RaOps>,
    /// compat[a] = { b | ✓(a·b) }
    compat: Vec<Bits>,
    valid: Bits,
}

/// Shared handle to a finite resource algebra.
#[derive(Clone)]
pub struct Ra(Arc<RaInner>);

impl PartialEq for Ra {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}
impl Eq for Ra {}

impl fmt::Debug for Ra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ra({}, |Σ|={})", self.0.name, self.size())
    }
}

/// Exhaustive associativity is only attempted below this carrier size;
/// larger algebras must hold the laws by construction (products, ghosts).
const EXHAUSTIVE_ASSOC_BOUND: u32 = 192;

impl Ra {
    /// Wraps raw operations into a checked algebra. All axioms are checked
    /// exhaustively for table-sized carriers; structured algebras that hold
    /// the laws by construction skip only the cubic associativity sweep.
    pub fn new(name: &str, ops: Box<dyn RaOps>) -> Result<Ra, RaErr> {
        let n = ops.size();
        assert!(n >= 1, "carrier must be non-empty");
        let mut compat = Vec::with_capacity(n as usize);
        let mut valid = Bits::empty(n);
        for a in 0..n {
            if ops.valid(a) {
                valid.set(a);
            }
        }
        for a in 0..n {
            let mut row = Bits::empty(n);
            for b in 0..n {
                if ops.valid(ops.op(a, b)) {
                    row.set(b);
                }
            }
            compat.push(row);
        }
        let ra = Ra(Arc::new(RaInner { name: name.to_string(), ops, compat, valid }));
        ra.check_axioms()?;
        Ok(ra)
    }

    fn check_axioms(&self) -> Result<(), RaErr> {
        let n = self.size();
        let ops = &self.0.ops;
        let fail = |law: &str| {
            Err(RaErr::InvalidAlgebra { name: self.0.name.clone(), law: law.to_string() })
        };
        let e = ops.unit();
        if !ops.valid(e) {
            return fail("unit must be valid");
        }
        for a in 0..n {
            if ops.op(e, a) != a || ops.op(a, e) != a {
                return fail("unit is not a two-sided identity");
            }
            if let Some(c) = ops.core(a) {
                if ops.op(c, a) != a {
                    return fail("core(a) · a must equal a");
                }
                if ops.core(c) != Some(c) {
                    return fail("core must be idempotent");
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if ops.op(a, b) != ops.op(b, a) {
                    return fail("composition is not commutative");
                }
                if ops.valid(ops.op(a, b)) && !ops.valid(a) {
                    return fail("validity is not down-closed");
                }
            }
        }
        if !ops.laws_by_construction() {
            if n > EXHAUSTIVE_ASSOC_BOUND {
                return fail("carrier too large for exhaustive associativity check");
            }
            for a in 0..n {
                for b in 0..n {
                    let ab = ops.op(a, b);
                    for c in 0..n {
                        if ops.op(ab, c) != ops.op(a, ops.op(b, c)) {
                            return fail("composition is not associative");
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn size(&self) -> u32 {
        self.0.ops.size()
    }

    pub fn unit(&self) -> u32 {
        self.0.ops.unit()
    }

    pub fn op(&self, a: u32, b: u32) -> u32 {
        self.0.ops.op(a, b)
    }

    pub fn valid(&self, a: u32) -> bool {
        self.0.valid.get(a)
    }

    pub fn core(&self, a: u32) -> Option<u32> {
        self.0.ops.core(a)
    }

    pub fn elem_name(&self, a: u32) -> String {
        self.0.ops.elem_name(a)
    }

    /// `{ b | ✓(a·b) }` as a precomputed row.
    pub fn compat_row(&self, a: u32) -> &Bits {
        &self.0.compat[a as usize]
    }

    pub fn valid_set(&self) -> &Bits {
        &self.0.valid
    }

    pub fn same_as(&self, other: &Ra) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// Factors of a structured (product) algebra.
    pub fn factors_ref(&self) -> Option<&[Ra]> {
        self.0.ops.factors()
    }

    pub fn check_same(&self, other: &Ra) -> Result<(), RaErr> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(RaErr::AlgebraMismatch(self.0.name.clone(), other.0.name.clone()))
        }
    }

    /// Frame-preserving update `a ⤳ b`: every frame valid with `a` stays
    /// valid with `b`, i.e. `compat(a) ⊆ compat(b)`.
    pub fn fp_update_idx(&self, a: u32, b: u32) -> bool {
        self.0.compat[a as usize].is_subset(&self.0.compat[b as usize])
    }

    /// `{ b | a ⤳ b }`.
    pub fn fp_targets(&self, a: u32) -> Bits {
        let ca = &self.0.compat[a as usize];
        let mut out = Bits::empty(self.size());
        for b in 0..self.size() {
            if ca.is_subset(&self.0.compat[b as usize]) {
                out.set(b);
            }
        }
        out
    }

    /// Set update `a ⤳set B`: every frame valid with `a` is valid with some
    /// member of `B`.
    pub fn set_update_idx(&self, a: u32, bs: &[u32]) -> bool {
        let mut reach = Bits::empty(self.size());
        for &b in bs {
            reach.union_with(&self.0.compat[b as usize]);
        }
        self.0.compat[a as usize].is_subset(&reach)
    }

    pub fn elems(&self) -> impl Iterator<Item = u32> {
        0..self.size()
    }

    pub fn resource(&self, idx: u32) -> Resource {
        assert!(idx < self.size());
        Resource { ra: self.clone(), idx }
    }

    pub fn unit_resource(&self) -> Resource {
        self.resource(self.unit())
    }

    /// Looks an element up by its display name.
    pub fn elem_by_name(&self, name: &str) -> Option<u32> {
        self.elems().find(|&i| self.elem_name(i) == name)
    }
}

/// An element of a specific resource algebra.
#[derive(Clone)]
pub struct Resource {
    pub ra: Ra,
    pub idx: u32,
}

impl Resource {
    pub fn join(&self, other: &Resource) -> Result<Resource, RaErr> {
        self.ra.check_same(&other.ra)?;
        Ok(self.ra.resource(self.ra.op(self.idx, other.idx)))
    }

    pub fn is_valid(&self) -> bool {
        self.ra.valid(self.idx)
    }
}

impl fmt::Debug for Resource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ra.elem_name(self.idx))
    }
}

impl PartialEq for Resource {
    fn eq(&self, other: &Self) -> bool {
        self.ra.same_as(&other.ra) && self.idx == other.idx
    }
}
impl Eq for Resource {}

/// `a ⤳ b` between two resources of the same algebra.
pub fn fp_update(a: &Resource, b: &Resource) -> Result<bool, RaErr> {
    a.ra.check_same(&b.ra)?;
    Ok(a.ra.fp_update_idx(a.idx, b.idx))
}

/// `a ⤳set B`.
pub fn set_update(a: &Resource, bs: &[Resource]) -> Result<bool, RaErr> {
    let mut idxs = Vec::with_capacity(bs.len());
    for b in bs {
        a.ra.check_same(&b.ra)?;
        idxs.push(b.idx);
    }
    Ok(a.ra.set_update_idx(a.idx, &idxs))
}

/// Plain table-backed algebra.
pub struct TableRa {
    pub names: Vec<String>,
    pub unit: u32,
    pub op: Vec<u32>,
    pub valid: Vec<bool>,
    pub core: Vec<Option<u32>>,
}

impl RaOps for TableRa {
    fn size(&self) -> u32 {
        self.names.len() as u32
    }
    fn unit(&self) -> u32 {
        self.unit
    }
    fn op(&self, a: u32, b: u32) -> u32 {
        self.op[(a as usize) * self.names.len() + b as usize]
    }
    fn valid(&self, a: u32) -> bool {
        self.valid[a as usize]
    }
    fn core(&self, a: u32) -> Option<u32> {
        self.core[a as usize]
    }
    fn elem_name(&self, a: u32) -> String {
        self.names[a as usize].clone()
    }
}

/// Product algebra with mixed-radix element encoding. Composition,
/// validity and core are componentwise; the laws follow from the factors.
pub struct ProductRa {
    pub factors: Vec<Ra>,
    strides: Vec<u32>,
    size: u32,
}

impl ProductRa {
    pub fn new(factors: Vec<Ra>) -> ProductRa {
        assert!(!factors.is_empty());
        let mut strides = vec![0u32; factors.len()];
        let mut size: u64 = 1;
        for (i, f) in factors.iter().enumerate().rev() {
            strides[i] = size as u32;
            size *= f.size() as u64;
            assert!(size <= u32::MAX as u64, "product carrier too large");
        }
        ProductRa { factors, strides, size: size as u32 }
    }

    pub fn decode(&self, mut a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.factors.len());
        for (i, _) in self.factors.iter().enumerate() {
            out.push(a / self.strides[i]);
            a %= self.strides[i];
        }
        out
    }

    pub fn encode(&self, parts: &[u32]) -> u32 {
        parts.iter().zip(&self.strides).map(|(p, s)| p * s).sum()
    }
}

impl RaOps for ProductRa {
    fn size(&self) -> u32 {
        self.size
    }
    fn unit(&self) -> u32 {
        let parts: Vec<u32> = self.factors.iter().map(|f| f.unit()).collect();
        self.encode(&parts)
    }
    fn op(&self, a: u32, b: u32) -> u32 {
        let pa = self.decode(a);
        let pb = self.decode(b);
        let parts: Vec<u32> =
            self.factors.iter().enumerate().map(|(i, f)| f.op(pa[i], pb[i])).collect();
        self.encode(&parts)
    }
    fn valid(&self, a: u32) -> bool {
        let pa = self.decode(a);
        self.factors.iter().enumerate().all(|(i, f)| f.valid(pa[i]))
    }
    fn core(&self, a: u32) -> Option<u32> {
        let pa = self.decode(a);
        let mut parts = Vec::with_capacity(pa.len());
        for (i, f) in self.factors.iter().enumerate() {
            parts.push(f.core(pa[i])?);
        }
        Some(self.encode(&parts))
    }
    fn elem_name(&self, a: u32) -> String {
        let pa = self.decode(a);
        let names: Vec<String> =
            self.factors.iter().enumerate().map(|(i, f)| f.elem_name(pa[i])).collect();
        format!("({})", names.join(","))
    }
    fn factors(&self) -> Option<&[Ra]> {
        Some(&self.factors)
    }
    fn laws_by_construction(&self) -> bool {
        true
    }
}

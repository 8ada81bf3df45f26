//! memLang runtime values and the cell-granular memory model.
//!
//! Values follow a CompCert-inspired shape: 32-bit and 64-bit integers,
//! block/offset pointers and an `undef` value. Memory is a finite map from
//! block ids to cell vectors; allocation hands out strictly increasing
//! fresh block ids and `free` removes a block outright.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MemErr;

pub type BlockId = u32;

/// A memLang value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Val {
    Int32(i32),
    Long(i64),
    /// Pointer: block id plus a cell offset inside the block.
    Ptr(BlockId, i64),
    Undef,
}

impl Val {
    pub fn long(i: i64) -> Val {
        Val::Long(i)
    }

    pub fn int32(i: i32) -> Val {
        Val::Int32(i)
    }

    /// Checked 32-bit constructor; rejects out-of-range inputs.
    pub fn int32_checked(i: i64) -> Result<Val, MemErr> {
        i32::try_from(i).map(Val::Int32).map_err(|_| MemErr::Int32Range(i))
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, Val::Int32(_) | Val::Long(_))
    }

    /// Truthiness used by `if`: nonzero integers are true. Pointers and
    /// undef have no truth value (branching on them is UB).
    pub fn truth(&self) -> Option<bool> {
        match self {
            Val::Int32(i) => Some(*i != 0),
            Val::Long(i) => Some(*i != 0),
            _ => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Int32(i) => write!(f, "{i}i32"),
            Val::Long(i) => write!(f, "{i}"),
            Val::Ptr(b, o) => write!(f, "ptr({b},{o})"),
            Val::Undef => write!(f, "undef"),
        }
    }
}

/// Size of one memory cell in bytes; `calloc(long(n))` allocates `n / 8`
/// cells, each holding a whole `Val`.
pub const CELL_SIZE: i64 = 8;

/// A memLang memory snapshot. Immutable in use: every operation returns a
/// fresh snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct Mem {
    pub blocks: BTreeMap<BlockId, Vec<Val>>,
    pub next: BlockId,
}

impl Mem {
    pub fn new() -> Mem {
        Mem { blocks: BTreeMap::new(), next: 0 }
    }

    /// Builds a memory with pre-reserved blocks (used for module-private
    /// cells); `next` starts after the highest reserved id.
    pub fn with_blocks(blocks: Vec<(BlockId, Vec<Val>)>) -> Mem {
        let next = blocks.iter().map(|(b, _)| b + 1).max().unwrap_or(0);
        Mem { blocks: blocks.into_iter().collect(), next }
    }

    /// Allocates `n_bytes / CELL_SIZE` zeroed cells. The byte count must be
    /// a `long`, non-negative and divisible by the cell size.
    pub fn alloc(&self, n_bytes: &Val) -> Result<(Mem, Val), MemErr> {
        let i = match n_bytes {
            Val::Long(i) if *i >= 0 && *i % CELL_SIZE == 0 => *i,
            other => return Err(MemErr::BadAlloc(other.clone())),
        };
        let cells = vec![Val::Long(0); (i / CELL_SIZE) as usize];
        let mut m = self.clone();
        let b = m.next;
        m.blocks.insert(b, cells);
        m.next += 1;
        Ok((m, Val::Ptr(b, 0)))
    }

    pub fn load(&self, p: &Val) -> Result<Val, MemErr> {
        let (b, o) = ptr_of(p)?;
        let cells = self.blocks.get(&b).ok_or(MemErr::DeadBlock(b))?;
        cell_index(cells.len(), o).map(|i| cells[i].clone())
    }

    pub fn store(&self, p: &Val, v: Val) -> Result<Mem, MemErr> {
        let (b, o) = ptr_of(p)?;
        let mut m = self.clone();
        let cells = m.blocks.get_mut(&b).ok_or(MemErr::DeadBlock(b))?;
        let i = cell_index(cells.len(), o)?;
        cells[i] = v;
        Ok(m)
    }

    /// Frees a live block; the pointer must address offset 0.
    pub fn free(&self, p: &Val) -> Result<Mem, MemErr> {
        let (b, o) = ptr_of(p)?;
        if o != 0 {
            return Err(MemErr::FreeOffset(b, o));
        }
        let mut m = self.clone();
        if m.blocks.remove(&b).is_none() {
            return Err(MemErr::DeadBlock(b));
        }
        Ok(m)
    }

    pub fn live(&self, b: BlockId) -> bool {
        self.blocks.contains_key(&b)
    }
}

fn ptr_of(v: &Val) -> Result<(BlockId, i64), MemErr> {
    match v {
        Val::Ptr(b, o) => Ok((*b, *o)),
        other => Err(MemErr::NotAPointer(other.clone())),
    }
}

fn cell_index(len: usize, o: i64) -> Result<usize, MemErr> {
    if o >= 0 && (o as usize) < len {
        Ok(o as usize)
    } else {
        Err(MemErr::OutOfBounds(o, len))
    }
}

impl fmt::Display for Mem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mem{{")?;
        for (i, (b, cells)) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}:[")?;
            for (j, c) in cells.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alloc_granularity_is_one_cell_per_eight_bytes() {
        let m = Mem::new();
        let (m1, p) = m.alloc(&Val::long(16)).unwrap();
        assert_eq!(p, Val::Ptr(0, 0));
        assert_eq!(m1.blocks[&0], vec![Val::Long(0), Val::Long(0)]);
    }

    #[test]
    fn alloc_rejects_non_cell_sizes() {
        let m = Mem::new();
        assert!(m.alloc(&Val::long(12)).is_err());
        assert!(m.alloc(&Val::long(-8)).is_err());
        assert!(m.alloc(&Val::int32(8)).is_err());
    }

    #[test]
    fn load_after_store_returns_stored_value() {
        let m = Mem::new();
        let (m, p) = m.alloc(&Val::long(8)).unwrap();
        let m = m.store(&p, Val::long(5)).unwrap();
        assert_eq!(m.load(&p).unwrap(), Val::long(5));
    }

    #[test]
    fn out_of_bounds_and_freed_access_fail() {
        let m = Mem::new();
        let (m, p) = m.alloc(&Val::long(8)).unwrap();
        assert!(m.load(&Val::Ptr(0, 1)).is_err());
        assert!(m.load(&Val::Ptr(0, -1)).is_err());
        let m2 = m.free(&p).unwrap();
        assert!(m2.load(&p).is_err());
        assert!(m2.store(&p, Val::long(1)).is_err());
        assert!(m.free(&Val::Ptr(0, 0)).is_ok());
        assert!(m.free(&Val::Ptr(5, 0)).is_err());
    }

    #[test]
    fn fresh_blocks_are_never_reused() {
        let m = Mem::new();
        let (m, p1) = m.alloc(&Val::long(8)).unwrap();
        let m = m.free(&p1).unwrap();
        let (_, p2) = m.alloc(&Val::long(8)).unwrap();
        assert_ne!(p1, p2);
    }
}

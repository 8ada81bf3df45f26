//! Error types shared across the workbench.

use thiserror::Error;

use crate::memlang::Val;

/// Errors from resource-algebra construction and the enumeration deciders.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RaErr {
    #[error("invalid resource algebra {name}: {law}")]
    InvalidAlgebra { name: String, law: String },
    #[error("operands belong to different resource algebras ({0} vs {1})")]
    AlgebraMismatch(String, String),
    #[error("carrier too large for this decider: 2^{carrier} predicates exceed bound 2^{bound}")]
    CarrierTooLarge { carrier: usize, bound: u32 },
}

/// Errors from linking and closed-program interpretation.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum KernelErr {
    #[error("duplicate function name {0:?} across linked modules")]
    DuplicateName(String),
    #[error("entry function {0:?} is not defined by any linked module")]
    MissingEntry(String),
    #[error("call to unresolved function {0:?}")]
    UnresolvedCall(String),
    #[error("fuel exhausted (call depth exceeded {0})")]
    FuelExhausted(u32),
    #[error("tree still contains a {0} node where only Ret/Obs/Dem/Ang are allowed")]
    UnresolvedNode(&'static str),
}

/// Errors from the condition algebra.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum CondErr {
    #[error("auxiliary set too large for bijection search: {size} > bound {bound}")]
    AuxTooLarge { size: usize, bound: usize },
    #[error("value is not a (memory, value) pair: {0}")]
    MalformedPacking(String),
}

/// Errors from wrapping and refinement checking.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum RefineErr {
    #[error("missing condition for function {0:?} and defaulting is disabled")]
    MissingCond(String),
    #[error("function domains differ: {0}")]
    DomainMismatch(String),
    #[error(transparent)]
    Kernel(#[from] KernelErr),
    #[error(transparent)]
    Ra(#[from] RaErr),
}

/// memLang memory-model violations. During interpretation every one of
/// these becomes UB in the produced tree, never a checker crash.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum MemErr {
    #[error("calloc size must be a non-negative long divisible by 8, got {0}")]
    BadAlloc(Val),
    #[error("memory access through non-pointer value {0}")]
    NotAPointer(Val),
    #[error("access to dead block {0}")]
    DeadBlock(u32),
    #[error("cell offset {0} out of bounds for block of {1} cells")]
    OutOfBounds(i64, usize),
    #[error("free at non-zero offset {1} of block {0}")]
    FreeOffset(u32, i64),
    #[error("value {0} out of int32 range")]
    Int32Range(i64),
}

/// memLang parse errors with source position.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: expected {expected}, found {found}")]
pub struct SyntaxError {
    pub line: u32,
    pub col: u32,
    pub expected: String,
    pub found: String,
}

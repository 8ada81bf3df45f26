//! Universal value type shared by every module language in the workbench.
//!
//! All function arguments, return values and module states are `Any`.
//! Structural equality is decidable and the derived `Ord` gives the
//! deterministic orderings used by behavior sets and reports.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::memlang::{Mem, Val};

/// Universal value: the union of every value shape the workbench uses.
///
/// `Pair`/`List` nesting is finite by construction (values are built
/// bottom-up; there is no way to tie a cycle).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Any {
    Unit,
    Bool(bool),
    Int(i64),
    Str(String),
    Pair(Box<Any>, Box<Any>),
    List(Vec<Any>),
    /// A memLang runtime value.
    MemV(Val),
    /// A memLang memory snapshot.
    MemState(Mem),
}

impl Any {
    pub fn pair(a: Any, b: Any) -> Any {
        Any::Pair(Box::new(a), Box::new(b))
    }

    pub fn str(s: &str) -> Any {
        Any::Str(s.to_string())
    }

    pub fn list(items: Vec<Any>) -> Any {
        Any::List(items)
    }

    /// Packs a memory snapshot together with an argument list, the calling
    /// convention used at memLang module boundaries.
    pub fn pack_args(mem: &Mem, args: Vec<Val>) -> Any {
        Any::pair(
            Any::MemState(mem.clone()),
            Any::List(args.into_iter().map(Any::MemV).collect()),
        )
    }

    /// Packs a memory snapshot with a single return value.
    pub fn pack_ret(mem: &Mem, v: Val) -> Any {
        Any::pair(Any::MemState(mem.clone()), Any::MemV(v))
    }

    /// Unpacks a `(memory, value list)` argument pair, if well formed.
    pub fn unpack_args(&self) -> Option<(&Mem, Vec<&Val>)> {
        if let Any::Pair(m, vs) = self {
            if let (Any::MemState(mem), Any::List(items)) = (m.as_ref(), vs.as_ref()) {
                let mut vals = Vec::with_capacity(items.len());
                for it in items {
                    match it {
                        Any::MemV(v) => vals.push(v),
                        _ => return None,
                    }
                }
                return Some((mem, vals));
            }
        }
        None
    }

    /// Unpacks a `(memory, value)` return pair, if well formed.
    pub fn unpack_ret(&self) -> Option<(&Mem, &Val)> {
        if let Any::Pair(m, v) = self {
            if let (Any::MemState(mem), Any::MemV(val)) = (m.as_ref(), v.as_ref()) {
                return Some((mem, val));
            }
        }
        None
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Any::Int(i) => Some(*i),
            _ => None,
        }
    }
}

impl fmt::Display for Any {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Any::Unit => write!(f, "()"),
            Any::Bool(b) => write!(f, "{b}"),
            Any::Int(i) => write!(f, "{i}"),
            Any::Str(s) => write!(f, "{s:?}"),
            Any::Pair(a, b) => write!(f, "({a}, {b})"),
            Any::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            Any::MemV(v) => write!(f, "{v}"),
            Any::MemState(m) => write!(f, "{m}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structural_equality_is_an_equivalence() {
        let vals = [
            Any::Unit,
            Any::Bool(true),
            Any::Int(3),
            Any::str("x"),
            Any::pair(Any::Int(1), Any::Unit),
            Any::list(vec![Any::Int(1), Any::Int(2)]),
        ];
        for a in &vals {
            assert_eq!(a, a);
            for b in &vals {
                if a == b {
                    assert_eq!(b, a);
                }
            }
        }
        assert_ne!(Any::Int(1), Any::Int(2));
        assert_ne!(Any::pair(Any::Int(1), Any::Int(2)), Any::pair(Any::Int(2), Any::Int(1)));
    }

    #[test]
    fn pack_unpack_round_trip() {
        let m = Mem::new();
        let packed = Any::pack_args(&m, vec![Val::long(3)]);
        let (m2, vs) = packed.unpack_args().unwrap();
        assert_eq!(m2, &m);
        assert_eq!(vs, vec![&Val::long(3)]);
        assert!(Any::Int(0).unpack_args().is_none());
    }
}

//! Finite computation trees with dual non-determinism and events.
//!
//! Continuations are closures applied eagerly during checking; `FlatTree`
//! is the fully-expanded first-order form used by tests and the game
//! solver, where structural equality and hashing make sense.

use std::fmt;
use std::rc::Rc;

use crate::any::Any;
use crate::res::SProp;

pub type Cont = Rc<dyn Fn(&Any) -> Tree>;

/// A computation tree. `Dem`/`Ang` branch over explicit finite domains; an
/// empty demonic domain is NB (no behavior), an empty angelic domain is UB
/// (all behaviors).
#[derive(Clone)]
pub enum Tree {
    Ret(Any),
    /// Observable event `(name, arg)`; the environment chooses the result.
    Obs(String, Any, Cont),
    Call(String, Any, Cont),
    Dem(Rc<Vec<Any>>, Cont),
    Ang(Rc<Vec<Any>>, Cont),
    Put(Any, Rc<Tree>),
    Get(Cont),
    SAssume(SProp, Rc<Tree>),
    SAssert(SProp, Rc<Tree>),
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Ret(v) => write!(f, "Ret({v})"),
            Tree::Obs(n, a, _) => write!(f, "Obs({n}, {a}, _)"),
            Tree::Call(n, a, _) => write!(f, "Call({n}, {a}, _)"),
            Tree::Dem(d, _) => write!(f, "Dem(|{}|, _)", d.len()),
            Tree::Ang(d, _) => write!(f, "Ang(|{}|, _)", d.len()),
            Tree::Put(s, _) => write!(f, "Put({s}, _)"),
            Tree::Get(_) => write!(f, "Get(_)"),
            Tree::SAssume(_, _) => write!(f, "SAssume(_, _)"),
            Tree::SAssert(_, _) => write!(f, "SAssert(_, _)"),
        }
    }
}

pub fn ret(v: Any) -> Tree {
    Tree::Ret(v)
}

pub fn obs(name: &str, arg: Any, k: impl Fn(&Any) -> Tree + 'static) -> Tree {
    Tree::Obs(name.to_string(), arg, Rc::new(k))
}

pub fn call(fname: &str, arg: Any, k: impl Fn(&Any) -> Tree + 'static) -> Tree {
    Tree::Call(fname.to_string(), arg, Rc::new(k))
}

pub fn dem(domain: Vec<Any>, k: impl Fn(&Any) -> Tree + 'static) -> Tree {
    Tree::Dem(Rc::new(domain), Rc::new(k))
}

pub fn ang(domain: Vec<Any>, k: impl Fn(&Any) -> Tree + 'static) -> Tree {
    Tree::Ang(Rc::new(domain), Rc::new(k))
}

pub fn put(state: Any, rest: Tree) -> Tree {
    Tree::Put(state, Rc::new(rest))
}

pub fn get(k: impl Fn(&Any) -> Tree + 'static) -> Tree {
    Tree::Get(Rc::new(k))
}

/// UB: `assume(⊥)`, the empty angelic choice.
pub fn ub() -> Tree {
    Tree::Ang(Rc::new(vec![]), Rc::new(|_| Tree::Ret(Any::Unit)))
}

/// NB: `assert(⊥)`, the empty demonic choice.
pub fn nb() -> Tree {
    Tree::Dem(Rc::new(vec![]), Rc::new(|_| Tree::Ret(Any::Unit)))
}

/// `assume(p) ≜ if p then ret(()) else UB`.
pub fn assume_pure(p: bool) -> Tree {
    if p {
        Tree::Ret(Any::Unit)
    } else {
        ub()
    }
}

/// `assert(p) ≜ if p then ret(()) else NB`.
pub fn assert_pure(p: bool) -> Tree {
    if p {
        Tree::Ret(Any::Unit)
    } else {
        nb()
    }
}

/// Guarded continuation: continue iff the assumption holds.
pub fn guard_assume(p: bool, rest: impl FnOnce() -> Tree) -> Tree {
    if p {
        rest()
    } else {
        ub()
    }
}

/// Guarded continuation: continue iff the assertion holds.
pub fn guard_assert(p: bool, rest: impl FnOnce() -> Tree) -> Tree {
    if p {
        rest()
    } else {
        nb()
    }
}

/// Monadic bind: grafts `k` onto every `Ret` leaf of `t`.
pub fn bind(t: &Tree, k: &Cont) -> Tree {
    match t {
        Tree::Ret(v) => k(v),
        Tree::Obs(n, a, c) => {
            let (n, a, c, k) = (n.clone(), a.clone(), c.clone(), k.clone());
            Tree::Obs(n, a, Rc::new(move |v| bind(&c(v), &k)))
        }
        Tree::Call(n, a, c) => {
            let (n, a, c, k) = (n.clone(), a.clone(), c.clone(), k.clone());
            Tree::Call(n, a, Rc::new(move |v| bind(&c(v), &k)))
        }
        Tree::Dem(d, c) => {
            let (c, k) = (c.clone(), k.clone());
            Tree::Dem(d.clone(), Rc::new(move |v| bind(&c(v), &k)))
        }
        Tree::Ang(d, c) => {
            let (c, k) = (c.clone(), k.clone());
            Tree::Ang(d.clone(), Rc::new(move |v| bind(&c(v), &k)))
        }
        Tree::Put(s, rest) => Tree::Put(s.clone(), Rc::new(bind(rest, k))),
        Tree::Get(c) => {
            let (c, k) = (c.clone(), k.clone());
            Tree::Get(Rc::new(move |v| bind(&c(v), &k)))
        }
        Tree::SAssume(p, rest) => Tree::SAssume(p.clone(), Rc::new(bind(rest, k))),
        Tree::SAssert(p, rest) => Tree::SAssert(p.clone(), Rc::new(bind(rest, k))),
    }
}

/// Sequencing that discards the intermediate value.
pub fn seq(t: &Tree, rest: Tree) -> Tree {
    let rest = Rc::new(rest);
    bind(t, &(Rc::new(move |_: &Any| (*rest).clone()) as Cont))
}

/// Fully expanded first-order tree: continuations have been applied to
/// every value of a probe domain. Condition events are not expandable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlatTree {
    Ret(Any),
    Obs(String, Any, Vec<(Any, FlatTree)>),
    Dem(Vec<FlatTree>),
    Ang(Vec<FlatTree>),
    Put(Any, Box<FlatTree>),
    Get(Vec<(Any, FlatTree)>),
}

/// Expands a tree over `probe` values up to `depth` constructor layers.
/// Returns `None` if the tree contains `Call`/`SAssume`/`SAssert` nodes or
/// exceeds the depth budget.
pub fn expand(t: &Tree, probe: &[Any], depth: u32) -> Option<FlatTree> {
    if depth == 0 {
        return None;
    }
    Some(match t {
        Tree::Ret(v) => FlatTree::Ret(v.clone()),
        Tree::Obs(n, a, c) => {
            let mut arms = Vec::with_capacity(probe.len());
            for v in probe {
                arms.push((v.clone(), expand(&c(v), probe, depth - 1)?));
            }
            FlatTree::Obs(n.clone(), a.clone(), arms)
        }
        Tree::Dem(d, c) => {
            let mut arms = Vec::with_capacity(d.len());
            for v in d.iter() {
                arms.push(expand(&c(v), probe, depth - 1)?);
            }
            FlatTree::Dem(arms)
        }
        Tree::Ang(d, c) => {
            let mut arms = Vec::with_capacity(d.len());
            for v in d.iter() {
                arms.push(expand(&c(v), probe, depth - 1)?);
            }
            FlatTree::Ang(arms)
        }
        Tree::Put(s, rest) => FlatTree::Put(s.clone(), Box::new(expand(rest, probe, depth - 1)?)),
        Tree::Get(c) => {
            let mut arms = Vec::with_capacity(probe.len());
            for v in probe {
                arms.push((v.clone(), expand(&c(v), probe, depth - 1)?));
            }
            FlatTree::Get(arms)
        }
        Tree::Call(_, _, _) | Tree::SAssume(_, _) | Tree::SAssert(_, _) => return None,
    })
}

impl FlatTree {
    /// Re-animates a flat tree as a lazy tree. Obs/Get arms fall back to UB
    /// outside the expanded probe domain.
    pub fn to_tree(&self) -> Tree {
        match self {
            FlatTree::Ret(v) => Tree::Ret(v.clone()),
            FlatTree::Obs(n, a, arms) => {
                let arms = arms.clone();
                Tree::Obs(
                    n.clone(),
                    a.clone(),
                    Rc::new(move |v| {
                        arms.iter()
                            .find(|(w, _)| w == v)
                            .map(|(_, t)| t.to_tree())
                            .unwrap_or_else(ub)
                    }),
                )
            }
            FlatTree::Dem(arms) => {
                let domain: Vec<Any> = (0..arms.len() as i64).map(Any::Int).collect();
                let arms = arms.clone();
                Tree::Dem(
                    Rc::new(domain),
                    Rc::new(move |v| arms[v.as_int().unwrap() as usize].to_tree()),
                )
            }
            FlatTree::Ang(arms) => {
                let domain: Vec<Any> = (0..arms.len() as i64).map(Any::Int).collect();
                let arms = arms.clone();
                Tree::Ang(
                    Rc::new(domain),
                    Rc::new(move |v| arms[v.as_int().unwrap() as usize].to_tree()),
                )
            }
            FlatTree::Put(s, rest) => Tree::Put(s.clone(), Rc::new(rest.to_tree())),
            FlatTree::Get(arms) => {
                let arms = arms.clone();
                Tree::Get(Rc::new(move |v| {
                    arms.iter()
                        .find(|(w, _)| w == v)
                        .map(|(_, t)| t.to_tree())
                        .unwrap_or_else(ub)
                }))
            }
        }
    }
}

/// All `Ret` values reachable by walking every branch, applying `Obs`/`Get`
/// continuations to the probe values only. Used to discover the value and
/// memory footprint of deterministic-result programs when assembling
/// universes.
pub fn reachable_terminals(t: &Tree, probe: &[Any], depth: u32) -> Vec<Any> {
    let mut out = Vec::new();
    terminals_into(t, probe, depth, &mut out);
    out.sort();
    out.dedup();
    out
}

fn terminals_into(t: &Tree, probe: &[Any], depth: u32, out: &mut Vec<Any>) {
    if depth == 0 {
        return;
    }
    match t {
        Tree::Ret(v) => out.push(v.clone()),
        Tree::Obs(_, _, c) | Tree::Get(c) => {
            for v in probe {
                terminals_into(&c(v), probe, depth - 1, out);
            }
        }
        Tree::Call(_, _, _) => {}
        Tree::Dem(d, c) | Tree::Ang(d, c) => {
            for v in d.iter() {
                terminals_into(&c(v), probe, depth - 1, out);
            }
        }
        Tree::Put(_, rest) | Tree::SAssume(_, rest) | Tree::SAssert(_, rest) => {
            terminals_into(rest, probe, depth - 1, out);
        }
    }
}

/// Kinds of nodes found by a bounded traversal; used for structural
/// invariant checks.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct NodeKinds {
    pub has_cond_events: bool,
    pub has_state_events: bool,
    pub has_calls: bool,
}

/// Bounded traversal over probe values collecting which event classes the
/// tree can reach.
pub fn scan_nodes(t: &Tree, probe: &[Any], depth: u32) -> NodeKinds {
    let mut acc = NodeKinds::default();
    scan_into(t, probe, depth, &mut acc);
    acc
}

fn scan_into(t: &Tree, probe: &[Any], depth: u32, acc: &mut NodeKinds) {
    if depth == 0 || (acc.has_cond_events && acc.has_state_events && acc.has_calls) {
        return;
    }
    match t {
        Tree::Ret(_) => {}
        Tree::Obs(_, _, c) => {
            for v in probe {
                scan_into(&c(v), probe, depth - 1, acc);
            }
        }
        Tree::Call(_, _, c) => {
            acc.has_calls = true;
            for v in probe {
                scan_into(&c(v), probe, depth - 1, acc);
            }
        }
        Tree::Dem(d, c) | Tree::Ang(d, c) => {
            for v in d.iter() {
                scan_into(&c(v), probe, depth - 1, acc);
            }
        }
        Tree::Put(_, rest) => {
            acc.has_state_events = true;
            scan_into(rest, probe, depth - 1, acc);
        }
        Tree::Get(c) => {
            acc.has_state_events = true;
            for v in probe {
                scan_into(&c(v), probe, depth - 1, acc);
            }
        }
        Tree::SAssume(_, rest) | Tree::SAssert(_, rest) => {
            acc.has_cond_events = true;
            scan_into(rest, probe, depth - 1, acc);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn probe() -> Vec<Any> {
        vec![Any::Int(0), Any::Int(1)]
    }

    #[test]
    fn bind_left_identity() {
        let k: Cont = Rc::new(|v: &Any| ret(Any::pair(v.clone(), v.clone())));
        let t = bind(&ret(Any::Int(3)), &k);
        assert_eq!(
            expand(&t, &probe(), 8),
            expand(&k(&Any::Int(3)), &probe(), 8)
        );
    }

    #[test]
    fn bind_right_identity() {
        let t = obs("o", Any::Int(1), |v| ret(v.clone()));
        let idk: Cont = Rc::new(|v: &Any| ret(v.clone()));
        assert_eq!(
            expand(&bind(&t, &idk), &probe(), 8),
            expand(&t, &probe(), 8)
        );
    }

    #[test]
    fn ub_and_nb_shapes() {
        assert!(matches!(ub(), Tree::Ang(d, _) if d.is_empty()));
        assert!(matches!(nb(), Tree::Dem(d, _) if d.is_empty()));
        assert!(matches!(assume_pure(true), Tree::Ret(Any::Unit)));
        assert!(matches!(assume_pure(false), Tree::Ang(d, _) if d.is_empty()));
        assert!(matches!(assert_pure(false), Tree::Dem(d, _) if d.is_empty()));
    }
}

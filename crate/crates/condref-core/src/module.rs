//! Modules: plain (condition-free) and enriched, the ⇑/⇓ embeddings, and
//! linking.

use std::collections::BTreeMap;
use std::rc::Rc;

use crate::any::Any;
use crate::error::KernelErr;
use crate::res::Resource;
use crate::tree::{self, Tree};

pub type FunDef = Rc<dyn Fn(&Any) -> Tree>;

/// A condition-free module: function bodies must not contain
/// `SAssume`/`SAssert` nodes (checkable by bounded traversal).
#[derive(Clone)]
pub struct PlainMod {
    pub funs: BTreeMap<String, FunDef>,
    pub init_st: Any,
}

impl PlainMod {
    pub fn new(funs: Vec<(&str, FunDef)>, init_st: Any) -> PlainMod {
        PlainMod {
            funs: funs.into_iter().map(|(n, f)| (n.to_string(), f)).collect(),
            init_st,
        }
    }

    pub fn fun_names(&self) -> Vec<String> {
        self.funs.keys().cloned().collect()
    }

    /// Bounded check that no body can reach a condition event.
    pub fn check_condition_free(&self, probe: &[Any], depth: u32) -> bool {
        self.funs
            .values()
            .all(|f| probe.iter().all(|a| !tree::scan_nodes(&f(a), probe, depth).has_cond_events))
    }
}

/// An enriched module carrying an initial resource.
#[derive(Clone)]
pub struct Mod {
    pub funs: BTreeMap<String, FunDef>,
    pub init_st: Any,
    pub init_res: Resource,
}

impl Mod {
    pub fn new(funs: Vec<(&str, FunDef)>, init_st: Any, init_res: Resource) -> Mod {
        assert!(init_res.is_valid(), "init_res must be valid");
        Mod {
            funs: funs.into_iter().map(|(n, f)| (n.to_string(), f)).collect(),
            init_st,
            init_res,
        }
    }

    pub fn fun_names(&self) -> Vec<String> {
        self.funs.keys().cloned().collect()
    }
}

/// The trivial embedding ⇑: a plain module is a module with a unit initial
/// resource.
pub fn embed(pm: &PlainMod, unit_res: Resource) -> Mod {
    assert_eq!(unit_res.idx, unit_res.ra.unit(), "embedding uses the unit resource");
    Mod { funs: pm.funs.clone(), init_st: pm.init_st.clone(), init_res: unit_res }
}

/// Replaces every condition event by UB in a tree (the body part of ⇓).
pub fn erase_tree(t: &Tree) -> Tree {
    match t {
        Tree::SAssume(_, _) | Tree::SAssert(_, _) => tree::ub(),
        Tree::Ret(v) => Tree::Ret(v.clone()),
        Tree::Obs(n, a, c) => {
            let c = c.clone();
            Tree::Obs(n.clone(), a.clone(), Rc::new(move |v| erase_tree(&c(v))))
        }
        Tree::Call(n, a, c) => {
            let c = c.clone();
            Tree::Call(n.clone(), a.clone(), Rc::new(move |v| erase_tree(&c(v))))
        }
        Tree::Dem(d, c) => {
            let c = c.clone();
            Tree::Dem(d.clone(), Rc::new(move |v| erase_tree(&c(v))))
        }
        Tree::Ang(d, c) => {
            let c = c.clone();
            Tree::Ang(d.clone(), Rc::new(move |v| erase_tree(&c(v))))
        }
        Tree::Put(s, rest) => Tree::Put(s.clone(), Rc::new(erase_tree(rest))),
        Tree::Get(c) => {
            let c = c.clone();
            Tree::Get(Rc::new(move |v| erase_tree(&c(v))))
        }
    }
}

/// The ⇓ operator: every `SAssume`/`SAssert` becomes UB and the initial
/// resource is dropped.
pub fn erase(m: &Mod) -> PlainMod {
    let funs = m
        .funs
        .iter()
        .map(|(n, f)| {
            let f = f.clone();
            let g: FunDef = Rc::new(move |a: &Any| erase_tree(&f(a)));
            (n.clone(), g)
        })
        .collect();
    PlainMod { funs, init_st: m.init_st.clone() }
}

/// A closed program: an ordered list of plain modules with globally unique
/// function names and a designated entry point.
#[derive(Clone)]
pub struct LinkedProgram {
    pub modules: Vec<PlainMod>,
    pub owner: BTreeMap<String, usize>,
    pub entry: String,
}

/// The ⊕ operator. Fails on duplicate function names or a missing entry.
pub fn link(mods: Vec<PlainMod>, entry: &str) -> Result<LinkedProgram, KernelErr> {
    let mut owner = BTreeMap::new();
    for (i, m) in mods.iter().enumerate() {
        for name in m.funs.keys() {
            if owner.insert(name.clone(), i).is_some() {
                return Err(KernelErr::DuplicateName(name.clone()));
            }
        }
    }
    if !owner.contains_key(entry) {
        return Err(KernelErr::MissingEntry(entry.to_string()));
    }
    Ok(LinkedProgram { modules: mods, owner, entry: entry.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::res::{unit_ra, SProp};
    use crate::tree::{expand, ret};

    fn probe() -> Vec<Any> {
        vec![Any::Int(0), Any::Int(1)]
    }

    fn sample_plain() -> PlainMod {
        PlainMod::new(
            vec![("f", Rc::new(|a: &Any| ret(a.clone())) as FunDef)],
            Any::Unit,
        )
    }

    #[test]
    fn erase_replaces_condition_events_with_ub() {
        let ra = unit_ra();
        let body = Tree::SAssume(SProp::pure(&ra, true), Rc::new(ret(Any::Int(1))));
        let erased = erase_tree(&body);
        assert!(matches!(erased, Tree::Ang(d, _) if d.is_empty()));
        // condition-free bodies are unchanged
        let plain = ret(Any::Int(2));
        assert_eq!(expand(&erase_tree(&plain), &probe(), 4), expand(&plain, &probe(), 4));
    }

    #[test]
    fn erase_after_embed_is_identity() {
        let ra = unit_ra();
        let pm = sample_plain();
        let back = erase(&embed(&pm, ra.unit_resource()));
        for a in probe() {
            assert_eq!(
                expand(&(back.funs["f"])(&a), &probe(), 6),
                expand(&(pm.funs["f"])(&a), &probe(), 6)
            );
        }
        assert!(back.check_condition_free(&probe(), 6));
    }

    #[test]
    fn erase_is_idempotent() {
        let ra = unit_ra();
        let body = Tree::SAssert(SProp::pure(&ra, false), Rc::new(ret(Any::Int(1))));
        let once = erase_tree(&body);
        let twice = erase_tree(&once);
        assert_eq!(expand(&once, &probe(), 6), expand(&twice, &probe(), 6));
    }

    #[test]
    fn link_rejects_duplicates_and_missing_entry() {
        let a = sample_plain();
        let b = sample_plain();
        assert!(matches!(link(vec![a.clone(), b], "f"), Err(KernelErr::DuplicateName(_))));
        assert!(matches!(link(vec![a], "main"), Err(KernelErr::MissingEntry(_))));
    }
}

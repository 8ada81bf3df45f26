//! Behavior sets: observable traces of finite trees, the ⋃/⋂ trace algebra
//! for dual non-determinism, and inclusion with witness extraction.

use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::any::Any;
use crate::error::KernelErr;
use crate::tree::Tree;
use crate::universe::Universe;

/// An observable trace: a finite list of `(name, arg, result)` events from
/// `Obs` nodes, ending in termination with a value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Trace {
    pub events: Vec<(String, Any, Any)>,
    pub end: Any,
}

impl std::fmt::Display for Trace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (n, a, r) in &self.events {
            write!(f, "{n}({a})={r}; ")?;
        }
        write!(f, "ret {}", self.end)
    }
}

type EventId = u32;
type EndId = u32;
type Key = (Vec<EventId>, EndId);

/// Interning context shared by the behavior computations of one check, so
/// trace keys are comparable across sides.
pub struct BehCtx {
    events: RefCell<Vec<(String, Any, Any)>>,
    event_ids: RefCell<HashMap<(String, Any, Any), EventId>>,
    ends: RefCell<Vec<Any>>,
    end_ids: RefCell<HashMap<Any, EndId>>,
    /// Tree nodes visited; reported as branch statistics.
    pub visits: Cell<u64>,
}

impl Default for BehCtx {
    fn default() -> Self {
        Self::new()
    }
}

impl BehCtx {
    pub fn new() -> BehCtx {
        BehCtx {
            events: RefCell::new(Vec::new()),
            event_ids: RefCell::new(HashMap::new()),
            ends: RefCell::new(Vec::new()),
            end_ids: RefCell::new(HashMap::new()),
            visits: Cell::new(0),
        }
    }

    fn event_id(&self, ev: (String, Any, Any)) -> EventId {
        if let Some(id) = self.event_ids.borrow().get(&ev) {
            return *id;
        }
        let mut evs = self.events.borrow_mut();
        let id = evs.len() as EventId;
        evs.push(ev.clone());
        self.event_ids.borrow_mut().insert(ev, id);
        id
    }

    fn end_id(&self, v: &Any) -> EndId {
        if let Some(id) = self.end_ids.borrow().get(v) {
            return *id;
        }
        let mut ends = self.ends.borrow_mut();
        let id = ends.len() as EndId;
        ends.push(v.clone());
        self.end_ids.borrow_mut().insert(v.clone(), id);
        id
    }

    fn decode(&self, key: &Key) -> Trace {
        let evs = self.events.borrow();
        let ends = self.ends.borrow();
        Trace {
            events: key.0.iter().map(|&id| evs[id as usize].clone()).collect(),
            end: ends[key.1 as usize].clone(),
        }
    }

    /// Re-interns a trace (for replay checks of counter-traces).
    pub fn encode(&self, t: &Trace) -> Key {
        (
            t.events.iter().map(|ev| self.event_id(ev.clone())).collect(),
            self.end_id(&t.end),
        )
    }
}

/// A set of behaviors: either the universal set (UB absorbs everything) or
/// an explicit finite, deduplicated trace set.
#[derive(Clone)]
pub enum BehSet {
    Univ,
    Fin(Rc<BTreeSet<Key>>),
}

impl BehSet {
    pub fn empty() -> BehSet {
        BehSet::Fin(Rc::new(BTreeSet::new()))
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, BehSet::Fin(s) if s.is_empty())
    }

    pub fn is_univ(&self) -> bool {
        matches!(self, BehSet::Univ)
    }

    pub fn len(&self) -> Option<usize> {
        match self {
            BehSet::Univ => None,
            BehSet::Fin(s) => Some(s.len()),
        }
    }

    pub fn union(self, other: BehSet) -> BehSet {
        match (self, other) {
            (BehSet::Univ, _) | (_, BehSet::Univ) => BehSet::Univ,
            (BehSet::Fin(a), BehSet::Fin(b)) => {
                if a.is_empty() {
                    return BehSet::Fin(b);
                }
                if b.is_empty() {
                    return BehSet::Fin(a);
                }
                let mut s = (*a).clone();
                s.extend(b.iter().cloned());
                BehSet::Fin(Rc::new(s))
            }
        }
    }

    pub fn intersect(self, other: BehSet) -> BehSet {
        match (self, other) {
            (BehSet::Univ, x) | (x, BehSet::Univ) => x,
            (BehSet::Fin(a), BehSet::Fin(b)) => {
                BehSet::Fin(Rc::new(a.intersection(&b).cloned().collect()))
            }
        }
    }
}

/// Result of an inclusion check: `Ok` or a witness in `lhs \ rhs`.
pub fn beh_subset(ctx: &BehCtx, lhs: &BehSet, rhs: &BehSet) -> Result<(), Trace> {
    match (lhs, rhs) {
        (_, BehSet::Univ) => Ok(()),
        (BehSet::Univ, BehSet::Fin(b)) => {
            // synthesize a trace outside any finite set: strictly longer
            // than every member, over a reserved event name
            let max_len = b.iter().map(|(evs, _)| evs.len()).max().unwrap_or(0);
            let ev = ("__univ".to_string(), Any::Unit, Any::Unit);
            Err(Trace { events: vec![ev; max_len + 1], end: Any::Unit })
        }
        (BehSet::Fin(a), BehSet::Fin(b)) => match a.difference(b).next() {
            None => Ok(()),
            Some(key) => Err(ctx.decode(key)),
        },
    }
}

/// Membership of a concrete trace.
pub fn beh_contains(ctx: &BehCtx, set: &BehSet, t: &Trace) -> bool {
    match set {
        BehSet::Univ => true,
        BehSet::Fin(s) => s.contains(&ctx.encode(t)),
    }
}

/// Reserved `Obs` prefix carrying deferred interpreter errors.
pub const ERR_EVENT_PREFIX: &str = "__err:";

/// Behavior of a tree containing only `Ret`/`Obs`/`Dem`/`Ang` nodes.
pub fn beh(ctx: &BehCtx, t: &Tree, u: &Universe) -> Result<BehSet, KernelErr> {
    beh_rec(ctx, t, &None, u)
}

/// Behavior with module state threaded through `Put`/`Get`.
pub fn beh_state(ctx: &BehCtx, t: &Tree, st: Any, u: &Universe) -> Result<BehSet, KernelErr> {
    beh_rec(ctx, t, &Some(st), u)
}

fn beh_rec(ctx: &BehCtx, t: &Tree, st: &Option<Any>, u: &Universe) -> Result<BehSet, KernelErr> {
    ctx.visits.set(ctx.visits.get() + 1);
    match t {
        Tree::Ret(v) => {
            let key = (Vec::new(), ctx.end_id(v));
            let mut s = BTreeSet::new();
            s.insert(key);
            Ok(BehSet::Fin(Rc::new(s)))
        }
        Tree::Obs(n, a, c) => {
            if let Some(msg) = n.strip_prefix(ERR_EVENT_PREFIX) {
                return Err(decode_err(msg, u));
            }
            let mut acc = BehSet::empty();
            for r in u.obs_results() {
                let sub = beh_rec(ctx, &c(r), st, u)?;
                let ev = ctx.event_id((n.clone(), a.clone(), r.clone()));
                let prefixed = match sub {
                    BehSet::Univ => BehSet::Univ,
                    BehSet::Fin(s) => BehSet::Fin(Rc::new(
                        s.iter()
                            .map(|(evs, end)| {
                                let mut v = Vec::with_capacity(evs.len() + 1);
                                v.push(ev);
                                v.extend_from_slice(evs);
                                (v, *end)
                            })
                            .collect(),
                    )),
                };
                acc = acc.union(prefixed);
            }
            Ok(acc)
        }
        Tree::Dem(d, c) => {
            let mut acc = BehSet::empty();
            for v in d.iter() {
                acc = acc.union(beh_rec(ctx, &c(v), st, u)?);
                if acc.is_univ() {
                    break;
                }
            }
            Ok(acc)
        }
        Tree::Ang(d, c) => {
            let mut acc = BehSet::Univ;
            for v in d.iter() {
                acc = acc.intersect(beh_rec(ctx, &c(v), st, u)?);
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        }
        Tree::Put(s, rest) => match st {
            None => Err(KernelErr::UnresolvedNode("Put")),
            Some(_) => beh_rec(ctx, rest, &Some(s.clone()), u),
        },
        Tree::Get(c) => match st {
            None => Err(KernelErr::UnresolvedNode("Get")),
            Some(s) => beh_rec(ctx, &c(&s.clone()), st, u),
        },
        Tree::Call(_, _, _) => Err(KernelErr::UnresolvedNode("Call")),
        Tree::SAssume(_, _) => Err(KernelErr::UnresolvedNode("SAssume")),
        Tree::SAssert(_, _) => Err(KernelErr::UnresolvedNode("SAssert")),
    }
}

fn decode_err(msg: &str, u: &Universe) -> KernelErr {
    if msg == "fuel" {
        KernelErr::FuelExhausted(u.fuel())
    } else if let Some(f) = msg.strip_prefix("call:") {
        KernelErr::UnresolvedCall(f.to_string())
    } else {
        KernelErr::UnresolvedNode("unknown error event")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::res::unit_ra;
    use crate::tree::{ang, dem, nb, obs, ret, ub};

    fn u() -> Universe {
        Universe::new(vec![Any::Int(0), Any::Int(1)], unit_ra(), 8)
    }

    #[test]
    fn empty_angelic_is_universal_and_empty_demonic_is_empty() {
        let ctx = BehCtx::new();
        assert!(beh(&ctx, &ub(), &u()).unwrap().is_univ());
        assert!(beh(&ctx, &nb(), &u()).unwrap().is_empty());
    }

    #[test]
    fn obs_branches_over_environment_results() {
        let ctx = BehCtx::new();
        let t = obs("print", Any::Int(5), |_| ret(Any::Unit));
        let b = beh(&ctx, &t, &u()).unwrap();
        assert_eq!(b.len(), Some(2)); // one trace per environment result
    }

    #[test]
    fn demonic_unions_angelic_intersects() {
        let ctx = BehCtx::new();
        let t = dem(vec![Any::Int(0), Any::Int(1)], |v| ret(v.clone()));
        assert_eq!(beh(&ctx, &t, &u()).unwrap().len(), Some(2));
        let t = ang(vec![Any::Int(0), Any::Int(1)], |v| ret(v.clone()));
        assert!(beh(&ctx, &t, &u()).unwrap().is_empty());
        let t = ang(vec![Any::Int(0), Any::Int(1)], |_| ret(Any::Unit));
        assert_eq!(beh(&ctx, &t, &u()).unwrap().len(), Some(1));
    }

    #[test]
    fn subset_and_witnesses() {
        let ctx = BehCtx::new();
        let small = beh(&ctx, &ret(Any::Int(0)), &u()).unwrap();
        let big = beh(&ctx, &dem(vec![Any::Int(0), Any::Int(1)], |v| ret(v.clone())), &u()).unwrap();
        assert!(beh_subset(&ctx, &small, &big).is_ok());
        assert!(beh_subset(&ctx, &BehSet::empty(), &small).is_ok());
        assert!(beh_subset(&ctx, &small, &BehSet::Univ).is_ok());
        let w = beh_subset(&ctx, &big, &small).unwrap_err();
        assert!(beh_contains(&ctx, &big, &w));
        assert!(!beh_contains(&ctx, &small, &w));
        // Univ ⊄ finite, with a synthesized witness outside the finite set
        let w = beh_subset(&ctx, &BehSet::Univ, &small).unwrap_err();
        assert!(!beh_contains(&ctx, &small, &w));
    }

    #[test]
    fn state_threading() {
        let ctx = BehCtx::new();
        let t = crate::tree::put(
            Any::Int(7),
            crate::tree::get(|s| ret(s.clone())),
        );
        let b = beh_state(&ctx, &t, Any::Int(0), &u()).unwrap();
        let tr = match &b {
            BehSet::Fin(s) => ctx.decode(s.iter().next().unwrap()),
            _ => panic!(),
        };
        assert_eq!(tr.end, Any::Int(7));
        // stateless beh rejects state nodes
        assert!(beh(&ctx, &t, &u()).is_err());
    }
}

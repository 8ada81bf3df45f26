//! Closed-program interpretation: resolves calls by fuel-bounded inlining
//! and threads each module's private state.

use std::rc::Rc;

use crate::any::Any;
use crate::beh::ERR_EVENT_PREFIX;
use crate::module::LinkedProgram;
use crate::tree::{ub, Tree};
use crate::universe::Universe;

type StCont = Rc<dyn Fn(&Any, &[Any]) -> Tree>;

fn err_tree(kind: &str) -> Tree {
    Tree::Obs(
        format!("{ERR_EVENT_PREFIX}{kind}"),
        Any::Unit,
        Rc::new(|_| ub()),
    )
}

/// Interprets a closed program from its entry function applied to `arg`.
/// The result contains only `Ret`/`Obs`/`Dem`/`Ang` nodes; exceeding the
/// fuel or calling an unresolved name yields a reserved error event that
/// the behavior computation reports as an error (never silently UB).
pub fn interp_closed_arg(p: &Rc<LinkedProgram>, u: &Universe, arg: &Any) -> Tree {
    let states: Vec<Any> = p.modules.iter().map(|m| m.init_st.clone()).collect();
    let entry = &p.entry;
    let Some(&mi) = p.owner.get(entry) else {
        return err_tree(&format!("call:{entry}"));
    };
    let body = (p.modules[mi].funs[entry])(arg);
    go(
        p,
        &body,
        mi,
        states,
        u.fuel(),
        Rc::new(|v: &Any, _: &[Any]| Tree::Ret(v.clone())),
    )
}

/// Entry with a unit argument.
pub fn interp_closed(p: &Rc<LinkedProgram>, u: &Universe) -> Tree {
    interp_closed_arg(p, u, &Any::Unit)
}

/// Interprets one function of a linked program applied to `arg`,
/// resolving (self-)calls by fuel-bounded inlining with each module's
/// private state threaded from its initial state.
pub fn interp_fun(p: &Rc<LinkedProgram>, fname: &str, u: &Universe, arg: &Any) -> Tree {
    let states: Vec<Any> = p.modules.iter().map(|m| m.init_st.clone()).collect();
    let Some(&mi) = p.owner.get(fname) else {
        return err_tree(&format!("call:{fname}"));
    };
    let body = (p.modules[mi].funs[fname])(arg);
    go(
        p,
        &body,
        mi,
        states,
        u.fuel(),
        Rc::new(|v: &Any, _: &[Any]| Tree::Ret(v.clone())),
    )
}

fn go(
    p: &Rc<LinkedProgram>,
    t: &Tree,
    mi: usize,
    states: Vec<Any>,
    fuel: u32,
    k: StCont,
) -> Tree {
    match t {
        Tree::Ret(v) => k(v, &states),
        Tree::Obs(n, a, c) => {
            let (p, c, k) = (p.clone(), c.clone(), k.clone());
            Tree::Obs(
                n.clone(),
                a.clone(),
                Rc::new(move |r| go(&p, &c(r), mi, states.clone(), fuel, k.clone())),
            )
        }
        Tree::Dem(d, c) => {
            let (p, c, k) = (p.clone(), c.clone(), k.clone());
            Tree::Dem(
                d.clone(),
                Rc::new(move |v| go(&p, &c(v), mi, states.clone(), fuel, k.clone())),
            )
        }
        Tree::Ang(d, c) => {
            let (p, c, k) = (p.clone(), c.clone(), k.clone());
            Tree::Ang(
                d.clone(),
                Rc::new(move |v| go(&p, &c(v), mi, states.clone(), fuel, k.clone())),
            )
        }
        Tree::Put(s, rest) => {
            let mut states = states;
            states[mi] = s.clone();
            go(p, rest, mi, states, fuel, k)
        }
        Tree::Get(c) => {
            let s = states[mi].clone();
            go(p, &c(&s), mi, states, fuel, k)
        }
        Tree::Call(f, a, c) => match p.owner.get(f) {
            None => err_tree(&format!("call:{f}")),
            Some(&mj) => {
                if fuel == 0 {
                    return err_tree("fuel");
                }
                let body = (p.modules[mj].funs[f])(a);
                let (p2, c, k) = (p.clone(), c.clone(), k.clone());
                let ret_k: StCont = Rc::new(move |r: &Any, st: &[Any]| {
                    go(&p2, &c(r), mi, st.to_vec(), fuel, k.clone())
                });
                go(p, &body, mj, states, fuel - 1, ret_k)
            }
        },
        Tree::SAssume(_, _) | Tree::SAssert(_, _) => err_tree("cond"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beh::{beh, BehCtx, BehSet};
    use crate::error::KernelErr;
    use crate::module::{link, FunDef, PlainMod};
    use crate::res::unit_ra;
    use crate::tree::{call, get, put, ret, seq};

    fn u() -> Universe {
        Universe::new(vec![Any::Int(0), Any::Int(1), Any::Int(2), Any::Unit], unit_ra(), 6)
    }

    fn counter_module(bump: &'static str) -> PlainMod {
        // one function that increments this module's private counter and
        // returns the new value
        PlainMod::new(
            vec![(
                bump,
                Rc::new(move |_: &Any| {
                    get(|s| {
                        let n = s.as_int().unwrap();
                        put(Any::Int(n + 1), ret(Any::Int(n + 1)))
                    })
                }) as FunDef,
            )],
            Any::Int(0),
        )
    }

    #[test]
    fn modules_keep_private_state() {
        // main bumps a twice and b once; final values must be independent
        let a = counter_module("bump_a");
        let b = counter_module("bump_b");
        let main = PlainMod::new(
            vec![(
                "main",
                Rc::new(|_: &Any| {
                    seq(
                        &call("bump_a", Any::Unit, |v| ret(v.clone())),
                        seq(
                            &call("bump_a", Any::Unit, |v| ret(v.clone())),
                            call("bump_b", Any::Unit, |vb| {
                                // return (a_count, b_count) via a final call
                                let vb = vb.clone();
                                call("bump_a", Any::Unit, move |va| {
                                    ret(Any::pair(va.clone(), vb.clone()))
                                })
                            }),
                        ),
                    )
                }) as FunDef,
            )],
            Any::Unit,
        );
        let p = Rc::new(link(vec![main, a, b], "main").unwrap());
        let ctx = BehCtx::new();
        let t = interp_closed(&p, &u());
        let b = beh(&ctx, &t, &u()).unwrap();
        match &b {
            BehSet::Fin(s) => {
                assert_eq!(s.len(), 1);
            }
            _ => panic!("expected finite behavior"),
        }
        let w = crate::beh::beh_subset(&ctx, &b, &BehSet::empty()).unwrap_err();
        assert_eq!(w.end, Any::pair(Any::Int(3), Any::Int(1)));
    }

    #[test]
    fn program_without_calls_is_unchanged() {
        let main = PlainMod::new(
            vec![("main", Rc::new(|_: &Any| ret(Any::Int(2))) as FunDef)],
            Any::Unit,
        );
        let p = Rc::new(link(vec![main], "main").unwrap());
        let ctx = BehCtx::new();
        let b = beh(&ctx, &interp_closed(&p, &u()), &u()).unwrap();
        assert_eq!(b.len(), Some(1));
    }

    #[test]
    fn recursion_deeper_than_fuel_errors() {
        let looping = PlainMod::new(
            vec![("main", Rc::new(|_: &Any| call("main", Any::Unit, |v| ret(v.clone()))) as FunDef)],
            Any::Unit,
        );
        let p = Rc::new(link(vec![looping], "main").unwrap());
        let ctx = BehCtx::new();
        let t = interp_closed(&p, &u());
        assert!(matches!(beh(&ctx, &t, &u()), Err(KernelErr::FuelExhausted(_))));
    }

    #[test]
    fn unresolved_call_errors() {
        let main = PlainMod::new(
            vec![("main", Rc::new(|_: &Any| call("nope", Any::Unit, |v| ret(v.clone()))) as FunDef)],
            Any::Unit,
        );
        let p = Rc::new(link(vec![main], "main").unwrap());
        let ctx = BehCtx::new();
        let t = interp_closed(&p, &u());
        assert!(matches!(
            beh(&ctx, &t, &u()),
            Err(KernelErr::UnresolvedCall(f)) if f == "nope"
        ));
    }
}

//! Backtracking simulation-game solver over condition-free trees.
//!
//! The move set is the standard one for dual non-determinism: angelic
//! choices quantify universally on the source and existentially on the
//! target, demonic choices the other way round; observable events must
//! match and their environment results are explored universally; state
//! events resolve unilaterally against each side's own state.
//!
//! A game win is sound for behavior inclusion. The game is incomplete
//! (committing to a demonic source branch before the target resolves can
//! lose provable goals), so on failure the behavior oracle decides between
//! `Refuted` (with a replayable counter-trace) and `Unknown`.

use std::collections::HashMap;
use std::rc::Rc;

use rand::Rng;

use crate::any::Any;
use crate::beh::{beh_state, beh_subset, BehCtx};
use crate::refine::Verdict;
use crate::tree::{expand, FlatTree, Tree};
use crate::universe::Universe;

#[derive(Clone, PartialEq, Eq, Hash)]
struct Pos {
    t: Rc<FlatTree>,
    st_t: Any,
    s: Rc<FlatTree>,
    st_s: Any,
}

struct Game {
    memo: HashMap<Pos, bool>,
    pub positions: u64,
}

impl Game {
    fn win(&mut self, pos: Pos) -> bool {
        if let Some(&r) = self.memo.get(&pos) {
            return r;
        }
        self.positions += 1;
        let r = self.step(&pos);
        self.memo.insert(pos, r);
        r
    }

    fn step(&mut self, pos: &Pos) -> bool {
        let Pos { t, st_t, s, st_s } = pos;
        // terminal and matched-event rules
        match (t.as_ref(), s.as_ref()) {
            (FlatTree::Ret(v), FlatTree::Ret(w)) if v == w => return true,
            (FlatTree::Obs(n, a, arms_t), FlatTree::Obs(n2, a2, arms_s))
                if n == n2 && a == a2 =>
            {
                // the environment result is universal for both sides
                let ok = arms_t.iter().all(|(r, kt)| {
                    arms_s.iter().any(|(r2, ks)| {
                        r == r2
                            && self.win(Pos {
                                t: Rc::new(kt.clone()),
                                st_t: st_t.clone(),
                                s: Rc::new(ks.clone()),
                                st_s: st_s.clone(),
                            })
                    })
                });
                if ok {
                    return true;
                }
            }
            _ => {}
        }
        // state rules resolve deterministically
        match s.as_ref() {
            FlatTree::Put(v, rest) => {
                return self.win(Pos {
                    t: t.clone(),
                    st_t: st_t.clone(),
                    s: Rc::new((**rest).clone()),
                    st_s: v.clone(),
                });
            }
            FlatTree::Get(arms) => {
                if let Some((_, k)) = arms.iter().find(|(v, _)| v == st_s) {
                    return self.win(Pos {
                        t: t.clone(),
                        st_t: st_t.clone(),
                        s: Rc::new(k.clone()),
                        st_s: st_s.clone(),
                    });
                }
                return false;
            }
            _ => {}
        }
        match t.as_ref() {
            FlatTree::Put(v, rest) => {
                return self.win(Pos {
                    t: Rc::new((**rest).clone()),
                    st_t: v.clone(),
                    s: s.clone(),
                    st_s: st_s.clone(),
                });
            }
            FlatTree::Get(arms) => {
                if let Some((_, k)) = arms.iter().find(|(v, _)| v == st_t) {
                    return self.win(Pos {
                        t: Rc::new(k.clone()),
                        st_t: st_t.clone(),
                        s: s.clone(),
                        st_s: st_s.clone(),
                    });
                }
                return false;
            }
            _ => {}
        }
        // dual non-determinism moves, tried with full backtracking
        if let FlatTree::Ang(arms) = s.as_ref() {
            if arms.iter().all(|k| {
                self.win(Pos {
                    t: t.clone(),
                    st_t: st_t.clone(),
                    s: Rc::new(k.clone()),
                    st_s: st_s.clone(),
                })
            }) {
                return true;
            }
        }
        if let FlatTree::Dem(arms) = s.as_ref() {
            if arms.iter().any(|k| {
                self.win(Pos {
                    t: t.clone(),
                    st_t: st_t.clone(),
                    s: Rc::new(k.clone()),
                    st_s: st_s.clone(),
                })
            }) {
                return true;
            }
        }
        if let FlatTree::Ang(arms) = t.as_ref() {
            if arms.iter().any(|k| {
                self.win(Pos {
                    t: Rc::new(k.clone()),
                    st_t: st_t.clone(),
                    s: s.clone(),
                    st_s: st_s.clone(),
                })
            }) {
                return true;
            }
        }
        if let FlatTree::Dem(arms) = t.as_ref() {
            if arms.iter().all(|k| {
                self.win(Pos {
                    t: Rc::new(k.clone()),
                    st_t: st_t.clone(),
                    s: s.clone(),
                    st_s: st_s.clone(),
                })
            }) {
                return true;
            }
        }
        false
    }
}

/// Plays the simulation game between two flat trees (with initial states
/// for their `Put`/`Get` nodes); falls back to the behavior oracle for
/// refutation. Never contradicts the oracle.
pub fn game_solve_flat(
    t: &FlatTree,
    st_t: &Any,
    s: &FlatTree,
    st_s: &Any,
    u: &Universe,
) -> Verdict {
    let mut game = Game { memo: HashMap::new(), positions: 0 };
    let won = game.win(Pos {
        t: Rc::new(t.clone()),
        st_t: st_t.clone(),
        s: Rc::new(s.clone()),
        st_s: st_s.clone(),
    });
    if won {
        return Verdict::Proven;
    }
    let ctx = BehCtx::new();
    let bt = match beh_state(&ctx, &t.to_tree(), st_t.clone(), u) {
        Ok(b) => b,
        Err(e) => return Verdict::Unknown(format!("target: {e}")),
    };
    let bs = match beh_state(&ctx, &s.to_tree(), st_s.clone(), u) {
        Ok(b) => b,
        Err(e) => return Verdict::Unknown(format!("source: {e}")),
    };
    match beh_subset(&ctx, &bt, &bs) {
        Err(w) => Verdict::refuted("game", w),
        Ok(()) => Verdict::Unknown("inclusion holds but no simulation strategy found".into()),
    }
}

/// Expands two lazy trees over the universe and plays the game.
pub fn game_solve(t: &Tree, s: &Tree, u: &Universe) -> Verdict {
    let depth = u.fuel() * 8;
    let (Some(ft), Some(fs)) = (expand(t, u.values(), depth), expand(s, u.values(), depth))
    else {
        return Verdict::Unknown("trees contain unexpandable nodes".into());
    };
    game_solve_flat(&ft, &Any::Unit, &fs, &Any::Unit, u)
}

/// Configuration for random condition-free tree generation.
#[derive(Debug, Clone)]
pub struct TreeGenCfg {
    pub max_depth: u32,
    pub max_branch: usize,
    pub obs_names: Vec<String>,
    pub values: Vec<Any>,
    pub with_state: bool,
}

impl Default for TreeGenCfg {
    fn default() -> Self {
        TreeGenCfg {
            max_depth: 4,
            max_branch: 3,
            obs_names: vec!["a".into(), "b".into(), "c".into()],
            values: vec![Any::Int(0), Any::Int(1)],
            with_state: false,
        }
    }
}

/// Generates a random finite tree. Leaves are `Ret` over the value domain.
pub fn gen_tree<R: Rng>(rng: &mut R, cfg: &TreeGenCfg, depth: u32) -> FlatTree {
    let leaf = depth == 0 || rng.gen_bool(0.25);
    if leaf {
        let v = &cfg.values[rng.gen_range(0..cfg.values.len())];
        return FlatTree::Ret(v.clone());
    }
    let kinds = if cfg.with_state { 5 } else { 3 };
    match rng.gen_range(0..kinds) {
        0 => {
            let n = &cfg.obs_names[rng.gen_range(0..cfg.obs_names.len())];
            let a = &cfg.values[rng.gen_range(0..cfg.values.len())];
            let arms = cfg
                .values
                .iter()
                .map(|v| (v.clone(), gen_tree(rng, cfg, depth - 1)))
                .collect();
            FlatTree::Obs(n.clone(), a.clone(), arms)
        }
        1 => {
            let k = rng.gen_range(0..=cfg.max_branch);
            FlatTree::Dem((0..k).map(|_| gen_tree(rng, cfg, depth - 1)).collect())
        }
        2 => {
            let k = rng.gen_range(0..=cfg.max_branch);
            FlatTree::Ang((0..k).map(|_| gen_tree(rng, cfg, depth - 1)).collect())
        }
        3 => {
            let v = &cfg.values[rng.gen_range(0..cfg.values.len())];
            FlatTree::Put(v.clone(), Box::new(gen_tree(rng, cfg, depth - 1)))
        }
        _ => {
            let arms = cfg
                .values
                .iter()
                .map(|v| (v.clone(), gen_tree(rng, cfg, depth - 1)))
                .collect();
            FlatTree::Get(arms)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beh::beh_contains;
    use crate::res::unit_ra;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn u() -> Universe {
        Universe::new(vec![Any::Int(0), Any::Int(1)], unit_ra(), 8)
    }

    #[test]
    fn identical_trees_are_proven() {
        let t = FlatTree::Obs(
            "a".into(),
            Any::Int(0),
            vec![
                (Any::Int(0), FlatTree::Ret(Any::Int(0))),
                (Any::Int(1), FlatTree::Ret(Any::Int(1))),
            ],
        );
        assert!(game_solve_flat(&t, &Any::Unit, &t, &Any::Unit, &u()).is_proven());
    }

    #[test]
    fn source_assume_false_wins_regardless_of_target() {
        // source assume(⊥) = empty angelic choice
        let s = FlatTree::Ang(vec![]);
        let t = FlatTree::Obs(
            "a".into(),
            Any::Int(1),
            vec![
                (Any::Int(0), FlatTree::Ret(Any::Int(0))),
                (Any::Int(1), FlatTree::Ret(Any::Int(0))),
            ],
        );
        assert!(game_solve_flat(&t, &Any::Unit, &s, &Any::Unit, &u()).is_proven());
    }

    #[test]
    fn oracle_agreement_on_random_pairs() {
        let uni = u();
        let cfg = TreeGenCfg { with_state: true, ..TreeGenCfg::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ctx = BehCtx::new();
        let mut refuted = 0usize;
        for _ in 0..500 {
            let t = gen_tree(&mut rng, &cfg, cfg.max_depth);
            let s = gen_tree(&mut rng, &cfg, cfg.max_depth);
            let v = game_solve_flat(&t, &Any::Int(0), &s, &Any::Int(0), &uni);
            let bt = beh_state(&ctx, &t.to_tree(), Any::Int(0), &uni).unwrap();
            let bs = beh_state(&ctx, &s.to_tree(), Any::Int(0), &uni).unwrap();
            let included = beh_subset(&ctx, &bt, &bs).is_ok();
            match &v {
                Verdict::Proven => assert!(included, "game proved a non-inclusion"),
                Verdict::Refuted(r) => {
                    refuted += 1;
                    assert!(!included, "game refuted a valid inclusion");
                    assert!(beh_contains(&ctx, &bt, &r.counter));
                    assert!(!beh_contains(&ctx, &bs, &r.counter));
                }
                Verdict::Unknown(_) => assert!(included, "unknown only when inclusion holds"),
            }
        }
        assert!(refuted > 0, "random sampling should exercise refutations");
    }
}

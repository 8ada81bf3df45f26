//! A desk-scale workbench for conditional contextual refinement.
//!
//! Finite computation trees with dual (angelic/demonic) non-determinism
//! form the semantic core. Modules carry separation-logic resources drawn
//! from finite resource algebras; a wrapper transformation dynamically
//! enforces per-function relational pre/postconditions; refinement is
//! decided by exhaustive behavior-set computation over finite universes,
//! with a simulation-game solver as a cross-checked fast path. A tiny
//! memory language (memLang) with CompCert-style block/offset pointers is
//! instantiated on top, together with a relational memory logic.

pub mod any;
pub mod beh;
pub mod conds;
pub mod corpus;
pub mod error;
pub mod game;
pub mod harness;
pub mod interp;
pub mod memlang;
pub mod module;
pub mod refine;
pub mod res;
pub mod tree;
pub mod universe;
pub mod wrapper;

pub use any::Any;
pub use beh::{beh, beh_state, beh_subset, BehCtx, BehSet, Trace};
pub use conds::{
    cond_equiv, cond_sep, cond_vcomp, eps_cond, interchange_check, top_cond, unary_cond,
    vcomp_power, vcond_embed, Cond, CondEquiv, Conds, VCond,
};
pub use error::{CondErr, KernelErr, MemErr, RaErr, RefineErr, SyntaxError};
pub use game::{game_solve, game_solve_flat};
pub use interp::{interp_closed, interp_closed_arg};
pub use module::{embed, erase, link, FunDef, LinkedProgram, Mod, PlainMod};
pub use refine::{
    check_gen_refine, check_refine_closed, check_refine_closed_args, check_refine_module, Verdict,
};
pub use res::{fp_update, set_update, Ra, Resource, SProp};
pub use tree::{
    ang, assert_pure, assume_pure, bind, call, dem, expand, get, nb, obs, put, ret, seq, ub,
    FlatTree, Tree,
};
pub use universe::Universe;
pub use wrapper::{wrap_module, wrapc_call, WrapVariant};

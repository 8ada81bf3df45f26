//! memLang: a tiny memory language with CompCert-style block/offset
//! pointers, its parser, its interpretation into kernel trees, and the
//! relational memory logic built on top (the 𝒥 condition, the value
//! relation 𝒱 and the ghost invariant).

pub mod ast;
pub mod fig9;
pub mod ghost;
pub mod interp;
pub mod parser;
pub mod thm6;
pub mod val;

pub use ast::{dump_expr, dump_module, BinOp, Expr, FnDef, MlModule, Stmt};
pub use ghost::{inv, j_cond, vrel, MemGhost, MemWorld};
pub use interp::{interp_cmd, interp_fn, private_blocks, to_plain_mod};
pub use fig9::{check_quad, fig9_harness, HarnessReport, QuadInstance, FIG9_RULES};
pub use parser::{parse_memlang, parse_memlang_at};
pub use thm6::{check_ml_refine, check_thm6_instance, combined_conds, embed_conds, ml_mod};
pub use val::{BlockId, Mem, Val, CELL_SIZE};

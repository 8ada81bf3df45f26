//! Finite resource algebras, separation-logic propositions over them, and
//! the update modalities.

pub mod bits;
pub mod instances;
pub mod ra;
pub mod sprop;

pub use bits::Bits;
pub use instances::{
    agreement, auth_map, auth_mono_set, exclusive, fmap_exclusive, mono_set, product,
    ra_instances, six_token, sum, unit_ra,
};
pub use ra::{fp_update, set_update, Ra, RaOps, Resource};
pub use sprop::{cur_sprops, peek_upd, SProp, Strength, DEFAULT_PEEK_BOUND};

//! Local realisers and dimension-like invariants of finite posets, built
//! around the two-layer suborders of the Boolean lattice.
//!
//! The crate provides:
//!
//! - [`poset`] / [`layer`]: dense posets on `1..=n` and lazy Boolean-lattice
//!   layer posets, lexicographic sums, duals and divisibility orders;
//! - [`realiser`]: local realisers (families of partial linear extensions)
//!   with parallel coverage verification and multiplicity accounting;
//! - [`constructions`]: the explicit realisers for far layers and for
//!   arbitrary layers via bipartite graphs, realiser composition over
//!   lexicographic sums, and order embeddings (layer shifts, divisibility);
//! - [`codec`]: the prefix-free poset code over the 3n-symbol alphabet and
//!   the binary cube-embedding code;
//! - [`exact`]: exhaustive oracles for local dimension, dimension and
//!   2-dimension on small posets;
//! - [`experiments`]: seeded random ensembles, entropy, and the table of
//!   closed-form bounds;
//! - [`textio`]: the text formats used by the `ldim` command-line tool.

pub mod codec;
pub mod constructions;
pub mod error;
pub mod exact;
pub mod experiments;
pub mod layer;
pub mod poset;
pub mod realiser;
pub mod textio;

pub use error::{Error, Result};
pub use layer::LayerPoset;
pub use poset::{Elem, OrderHost, Poset};
pub use realiser::{verify_local_realiser, LocalRealiser, VerificationReport};

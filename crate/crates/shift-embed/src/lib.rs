//! Embedding low-entropy subshifts through factor codes onto sofic shifts.
//!
//! The crate decides whether a subshift `Z` embeds into a mixing SFT `X` so that a
//! given factor code `π: X → Y` stays injective on the image, and synthesizes such an
//! embedding together with a zero-error stream codec.

pub mod codes;
pub mod combinatorics;
pub mod constructions;
pub mod embedder;
pub mod invariants;
pub mod error;
pub mod instances;
pub mod shift_core;

pub use error::{Budget, Error, Result};

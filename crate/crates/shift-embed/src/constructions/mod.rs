//! Subshift constructions: blanks shifts, stamp-separated gap shifts, inner and outer
//! approximations, the liftable-orbit-preserving subsystem and channel parameters.

mod approx;
mod blanks;
mod enlarge;
mod gap;
mod params;

pub use approx::{embed_into_mixing, inner_sft_approximation, marked_block_sft, synchronizing_word, InnerApproximation, MixingCover};
pub use blanks::{blanks_shift, parse_blanks, BlanksSpec};
pub use enlarge::{avoiding, enlarge_mixing, proper_inner_sft, quant_summary, Enlargement, GrowthSpot, QuantSummary, RRow};
pub use gap::{gap_sft, gap_sft_entropy_bound, GapEntropyBound, GapSft};
pub use params::{custom_w, ParameterPack};

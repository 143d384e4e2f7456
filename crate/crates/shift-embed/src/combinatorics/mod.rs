//! Self-overlap counts, stamps, syndetic subshifts, marker sets and periodic extension.

mod markers;
mod overlap;
mod periodic;
mod sat;
mod stamp;
mod syndetic;

pub use markers::{marker_set, MarkerSet, MarkerTranscript};
pub use overlap::{max_self_overlap, overlap_census, self_overlap, OverlapConstants, OverlapProfile, OverlapRow};
pub use periodic::extend_locally_periodic;
pub use stamp::{find_stamp, verify_stamp, Stamp, StampCheck, StampViolation};
pub use syndetic::syndetic_subshift;
pub(crate) use overlap::growth_threshold;
pub(crate) use stamp::occurrences;
pub(crate) use syndetic::Matcher;

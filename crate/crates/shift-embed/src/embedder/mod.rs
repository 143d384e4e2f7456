//! The embedding pipeline: recoding, marker coding into a blanks shift, lifting through
//! the channel with stamps, composition, verification and the stream codec.

mod certificate;
mod channel;
mod codec;
mod conjugacy;
mod injection;
mod marker;
mod recode;

pub use certificate::{
    synthesize, verify_certificate, verify_certificate_seeded, BruteForceCheck, CodecCheck, EmbeddingCertificate, NecessityRow, StageWindows,
    VerificationTranscript,
};
pub use channel::{channel_embed, connectors, Connectors};
pub use codec::{decode_stream, encode_stream, Decoded};
pub use conjugacy::blanks_conjugacy;
pub use injection::{BlockInjection, InjectionKind};
pub use marker::marker_encode;
pub use recode::{wlog_recode, Recoding};

use crate::invariants::least_rotation;
use crate::shift_core::{Sym, Word};

/// Least `p ≥ 1` with `w[i] = w[i - p]` throughout.
pub(crate) fn linear_period(w: &[Sym]) -> usize {
    (1..=w.len()).find(|&p| (p..w.len()).all(|i| w[i] == w[i - p])).unwrap_or(0)
}

/// Reads `w` as a stretch of a periodic point: the canonical word `c` of the orbit and the
/// phase `t` with `w[j] = c[(t + j) mod |c|]`, provided the least period is below `max`.
pub(crate) fn periodic_phase(w: &[Sym], max: usize) -> Option<(Word, usize)> {
    let p = linear_period(w);
    if p == 0 || p >= max {
        return None;
    }
    let c = least_rotation(&w[..p]);
    let t = (0..p).find(|&t| (0..p).all(|j| c[(t + j) % p] == w[j]))?;
    Some((c, t))
}

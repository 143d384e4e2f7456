use serde::{Deserialize, Serialize};

use super::{periodic_phase, EmbeddingCertificate, InjectionKind};
use crate::combinatorics::occurrences;
use crate::error::{Error, Result};
use crate::shift_core::{Sym, Word};

/// A recovered stretch of the encoded word: `word` equals `w[offset..offset + word.len()]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decoded {
    pub offset: usize,
    pub word: Word,
}

/// Applies ψ; the output is shorter than `w` by the window minus one.
pub fn encode_stream(cert: &EmbeddingCertificate, w: &[Sym]) -> Result<Word> {
    cert.psi.apply(w)
}

/// Output stream `y = π(ψ(w))` read in coordinates of `w`: `y[j]` sits at `j + memory`.
struct Reader<'a> {
    cert: &'a EmbeddingCertificate,
    y: &'a [Sym],
    memory: usize,
    k: usize,
    ell: usize,
}

impl Reader<'_> {
    fn data(&self, from: usize, to: usize) -> &[Sym] {
        &self.y[from - self.memory..to - self.memory]
    }

    /// The input on `[z_from, z_to)` from the orbit read on `[from, to)`.
    fn periodic(&self, from: usize, to: usize, z_from: usize, z_to: usize) -> Result<Word> {
        let seg = self.data(from, to);
        let (d, t) = periodic_phase(seg, self.k)
            .ok_or_else(|| Error::DecodeMismatch(format!("data at {from}..{to} is not periodic below {}", self.k)))?;
        let c = self
            .cert
            .injections
            .iter()
            .filter(|i| i.kind() == InjectionKind::Periodic && i.n() == d.len())
            .find_map(|i| i.invert(&d))
            .ok_or_else(|| Error::DecodeMismatch(format!("orbit {d:?} is not an image")))?;
        let p = c.len() as i64;
        Ok((z_from..z_to).map(|j| c[(t as i64 + j as i64 - from as i64).rem_euclid(p) as usize]).collect())
    }

    fn moderate(&self, a: usize, b: usize) -> Result<Word> {
        let n = b - a;
        let block = self.data(a + self.ell, b);
        self.cert
            .injections
            .iter()
            .filter(|i| i.kind() == InjectionKind::Moderate && i.n() == n)
            .find_map(|i| i.invert(block))
            .cloned()
            .ok_or_else(|| Error::DecodeMismatch(format!("block {block:?} between stamps at {a} and {b} is not an image")))
    }
}

/// Recovers the input from its channel image by locating the stamps, which sit at fixed
/// offsets from marker coordinates, and inverting the block and orbit tables in between.
/// Stretches before the first and after the last stamp are recovered when they are long
/// enough to be periodic. The result is re-encoded and compared with `y`.
pub fn decode_stream(cert: &EmbeddingCertificate, y: &[Sym]) -> Result<Decoded> {
    let pack = &cert.parameters;
    let (k, ell, g) = (pack.k, pack.ell, pack.gap);
    let mu = &pack.stamp.word;
    let memory = cert.psi.memory();
    let r = Reader { cert, y, memory, k, ell };
    let end = memory + y.len();
    let long = 2 * k + 2 * ell + 1;
    let tail_end = (end + 1).saturating_sub(g + mu.len());
    let hits: Vec<usize> = occurrences(y, mu).into_iter().map(|p| p + memory - g).collect();

    let (offset, mut z1) = match (hits.first(), hits.last()) {
        (None, _) | (_, None) => {
            if y.len() < long {
                return Err(Error::SyncFailure(format!("no stamp in {} symbols", y.len())));
            }
            (memory, r.periodic(memory + ell, tail_end, memory, tail_end)?)
        }
        (Some(&first), Some(_)) => {
            if first >= memory + long {
                (memory, r.periodic(memory + ell, first, memory, first)?)
            } else {
                (first, Vec::new())
            }
        }
    };
    for pair in hits.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if b - a < k {
            return Err(Error::DecodeMismatch(format!("stamps at {a} and {b} are closer than {k}")));
        }
        z1.extend(if b - a <= 2 * k + ell { r.moderate(a, b)? } else { r.periodic(a + ell, b, a, b)? });
    }
    if let Some(&last) = hits.last() {
        if end >= last + long {
            z1.extend(r.periodic(last + ell, tail_end, last, tail_end)?);
        }
    }
    if z1.is_empty() {
        return Err(Error::SyncFailure(format!("fewer than two stamps in {} symbols", y.len())));
    }
    let word = if cert.recoding.is_identity() { z1 } else { cert.recoding.decode.apply(&z1)? };

    if word.len() >= cert.psi.width() {
        let again = cert
            .psi
            .apply(&word)
            .and_then(|x| cert.pi.apply(&x))
            .map_err(|e| Error::DecodeMismatch(format!("recovered word does not encode: {e}")))?;
        if again[..] != y[offset..offset + again.len()] {
            return Err(Error::DecodeMismatch("re-encoding differs from the input stream".into()));
        }
    }
    Ok(Decoded { offset, word })
}

use crate::error::{Error, Result};
use crate::invariants::{accepts_periodic, CyclicWord};
use crate::shift_core::{Presentation, Sym};

use super::markers::locally_periodic;
use super::overlap::max_self_overlap;

/// The periodic point of `z` with least period below `n` that agrees with `w`.
///
/// Short words (at most `2n + 1` symbols) must themselves have such a period; longer words
/// must have one on every window of length `2n + 1`, and then the periods agree along `w`.
pub fn extend_locally_periodic(z: &Presentation, w: &[Sym], n: usize) -> Result<CyclicWord> {
    if n < 2 || w.len() < 2 * n {
        return Err(Error::InvalidInput(format!(
            "need n ≥ 2 and a word of length ≥ 2n, got n = {n} and length {}",
            w.len()
        )));
    }
    let span = (2 * n + 1).min(w.len());
    if !w.windows(span).all(|c| locally_periodic(c, n)) {
        return Err(Error::NotLocallyPeriodic(n));
    }
    let p = w.len() - max_self_overlap(w);
    if p >= n {
        return Err(Error::AmbiguousExtension(format!(
            "windows are periodic but the word has least period {p}"
        )));
    }
    let orbit = CyclicWord::new(&w[..p]);
    if !accepts_periodic(z, orbit.canonical()) {
        return Err(Error::NotLocallyPeriodic(n));
    }
    Ok(orbit)
}

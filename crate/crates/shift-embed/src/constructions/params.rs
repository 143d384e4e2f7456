use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::enlarge::avoiding;
use crate::codes::{image, preimage_sft, BlockMap};
use crate::combinatorics::{find_stamp, Stamp};
use crate::error::{Budget, Error, Result};
use crate::invariants::{count_periodic, periodic_orbits_while, CyclicWord, Lifter, LiftedOrbit};
use crate::shift_core::{count_blocks, determinize, language_blocks, structure, Presentation, Word};

const MAX_AVOIDED: usize = 4;
const MAX_N: usize = 48;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCount {
    pub p: usize,
    /// Points of least period p in `Z`.
    pub q_z: u128,
    /// Liftable points of least period p in `W` found, stopping once `q_z` is reached.
    pub r_v_found: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockCount {
    pub n: usize,
    /// `|B_n(Z)|`.
    pub z: u128,
    /// `|B_{n-ell}(W)|`.
    pub w: u128,
}

/// Parameters for coding `Z` into the channel: `W` is the output shift avoiding `theta`,
/// `V = π⁻¹(W)`, and `stamp` marks every blank run once the blanks are lifted.
///
/// Marker scale is `k = n + ell`. Intervals between markers of length `k..=2k+ell` carry
/// a `W`-block of length `n..=2k` after `ell` blanks; longer intervals are periodic with
/// period below `k` and carry a liftable `W`-orbit of the same period.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParameterPack {
    pub n: usize,
    pub k: usize,
    pub ell: usize,
    pub gap: usize,
    pub theta: Word,
    pub stamp: Stamp,
    #[serde(skip)]
    pub w: Option<Presentation>,
    #[serde(skip)]
    pub v: Option<Presentation>,
    pub periodic_counts: Vec<PeriodicCount>,
    pub block_counts: Vec<BlockCount>,
    /// Liftable `W`-orbits by period, as many as `Z` has orbits of that period.
    pub orbits: BTreeMap<usize, Vec<LiftedOrbit>>,
}

impl ParameterPack {
    pub fn w(&self) -> &Presentation {
        self.w.as_ref().expect("built with a presentation")
    }

    pub fn v(&self) -> &Presentation {
        self.v.as_ref().expect("built with a presentation")
    }
}

/// Liftable orbits of `W` by period, enumerated lazily up to the demand.
struct OrbitPool<'a> {
    w: &'a Presentation,
    lifter: Lifter<'a>,
    found: BTreeMap<usize, Vec<LiftedOrbit>>,
}

impl OrbitPool<'_> {
    fn take(&mut self, p: usize, need: usize, budget: &Budget) -> Result<&[LiftedOrbit]> {
        if !self.found.contains_key(&p) {
            let mut got = Vec::new();
            if need > 0 {
                periodic_orbits_while(self.w, p, budget, |u| {
                    if let Some(lift) = self.lifter.least_closed_lift(u) {
                        got.push(LiftedOrbit {
                            image: CyclicWord::new(u),
                            witness: CyclicWord::new(&lift),
                        });
                    }
                    got.len() < need
                })?;
            }
            self.found.insert(p, got);
        }
        Ok(&self.found[&p])
    }
}

/// Least `N` (and, among avoided words, least marker scale) passing every counting
/// inequality, each verified by exact enumeration.
pub fn custom_w(x: &Presentation, pi: &BlockMap, z: &Presentation, budget: &Budget) -> Result<ParameterPack> {
    let g = structure(x, budget)?
        .gap
        .ok_or_else(|| Error::InvalidInput("the channel input must be mixing".into()))?;
    let y = determinize(&image(x, pi)?, budget)?;
    let mut best: Option<ParameterPack> = None;
    for m in 1..=MAX_AVOIDED {
        for theta in language_blocks(&y, m, budget)? {
            if best.as_ref().is_some_and(|b| b.k <= 2 * (m + g)) {
                break;
            }
            let w = match avoiding(&y, &theta) {
                Ok(w) => w,
                Err(Error::EmptyShift) => continue,
                Err(e) => return Err(e),
            };
            let stamp = match find_stamp(&y, &w, g, m + 2 * g + 4, budget) {
                Ok(s) => s,
                Err(Error::NotFound(_)) => continue,
                Err(e) => return Err(e),
            };
            if let Some(pack) = least_n(x, pi, z, theta, w, stamp, g, best.as_ref().map(|b| b.k), budget)? {
                best = Some(pack);
            }
        }
    }
    best.ok_or_else(|| {
        Error::ParameterSearchExhausted(format!("no avoided word of length ≤ {MAX_AVOIDED} and N ≤ {MAX_N} works"))
    })
}

#[allow(clippy::too_many_arguments)]
fn least_n(
    x: &Presentation,
    pi: &BlockMap,
    z: &Presentation,
    theta: Word,
    w: Presentation,
    stamp: Stamp,
    g: usize,
    beat: Option<usize>,
    budget: &Budget,
) -> Result<Option<ParameterPack>> {
    let ell = stamp.word.len() + 2 * g;
    let v = preimage_sft(x, pi, &w, budget)?;
    let top = 2 * (MAX_N + ell) + ell;
    let bz = count_blocks(z, top, budget)?;
    let bw = count_blocks(&w, top, budget)?;
    let qz = count_periodic(z, MAX_N + ell, budget)?;
    let mut pool = OrbitPool {
        w: &w,
        lifter: Lifter::new(&v, pi)?,
        found: BTreeMap::new(),
    };
    for n in stamp.word.len().max(1)..=MAX_N {
        let k = n + ell;
        if beat.is_some_and(|b| k >= b) {
            return Ok(None);
        }
        let block_counts: Vec<BlockCount> = (k..=2 * k + ell)
            .map(|i| BlockCount { n: i, z: bz[i], w: bw[i - ell] })
            .collect();
        if block_counts.iter().any(|c| c.z > c.w) {
            continue;
        }
        let mut periodic_counts = Vec::with_capacity(k - 1);
        let mut enough = true;
        for p in 1..k {
            let q_z = qz.q(p);
            let need = (q_z / p as u128) as usize;
            let found = pool.take(p, need, budget)?.len();
            periodic_counts.push(PeriodicCount { p, q_z, r_v_found: found as u128 * p as u128 });
            if found < need {
                enough = false;
                break;
            }
        }
        if !enough {
            // fewer liftable orbits than needed at some period; longer scales only add periods
            return Ok(None);
        }
        let orbits = (1..k)
            .filter_map(|p| pool.found.get(&p).filter(|o| !o.is_empty()).map(|o| (p, o.clone())))
            .collect();
        return Ok(Some(ParameterPack {
            n,
            k,
            ell,
            gap: g,
            theta,
            stamp,
            w: Some(w),
            v: Some(v),
            periodic_counts,
            block_counts,
            orbits,
        }));
    }
    Ok(None)
}

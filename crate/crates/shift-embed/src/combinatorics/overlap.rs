use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::shift_core::{count_blocks, entropy, language_blocks, Interval, Presentation, Sym};

/// Every shift `k < |w|` under which `w` agrees with itself: `w[k..] == w[..|w|-k]`.
pub fn self_overlap(w: &[Sym]) -> BTreeSet<usize> {
    (1..w.len()).filter(|&k| w[k..] == w[..w.len() - k]).collect()
}

/// Length of the longest proper border of `w` (0 when there is none).
pub fn max_self_overlap(w: &[Sym]) -> usize {
    let n = w.len();
    if n == 0 {
        return 0;
    }
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && w[i] != w[k] {
            k = fail[k - 1];
        }
        if w[i] == w[k] {
            k += 1;
        }
        fail[i] = k;
    }
    fail[n - 1]
}

/// Constants of the low-self-overlap counting bound for a shift of positive entropy:
/// for `n ≥ big_n`, at least `(1 - e^{-b n}) e^{n h}` blocks of length n have no
/// self-overlap exceeding `alpha·n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapConstants {
    pub alpha: f64,
    pub entropy: Interval,
    /// Lower end of the entropy interval; every bound below uses it.
    pub h: f64,
    pub epsilon: f64,
    pub r: f64,
    pub s: f64,
    /// `|B_n| ≤ s^n` for every `n ≥ n0`.
    pub n0: usize,
    pub c1: f64,
    pub c2: f64,
    pub big_n: usize,
    pub b: f64,
}

const SLACK: f64 = 1e-12;

impl OverlapConstants {
    pub fn compute(p: &Presentation, alpha: f64, budget: &Budget) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidInput(format!("overlap ratio {alpha} outside (0,1)")));
        }
        let ent = entropy(p, 1e-10, budget)?;
        if ent.lo <= 0.0 {
            return Err(Error::InvalidInput("the counting bound needs positive entropy".into()));
        }
        let h = ent.lo;
        let epsilon = 0.5 * alpha / (1.0 - alpha) * h;
        let r = h.exp();
        let s = (h + epsilon).exp();
        let n0 = growth_threshold(p, s, budget)?;
        let counts = count_blocks(p, n0, budget)?;
        let c1: f64 = counts[1..n0].iter().map(|&c| c as f64).sum::<f64>() * (1.0 + SLACK);
        let c2 = c1 + s * s / (s - 1.0);
        let c0 = alpha * h - (1.0 - alpha) * epsilon;
        let big_n = (c2.ln() / c0).floor() as usize + 1;
        let b = c0 - c2.ln() / big_n as f64;
        Ok(OverlapConstants {
            alpha,
            entropy: ent,
            h,
            epsilon,
            r,
            s,
            n0,
            c1,
            c2,
            big_n,
            b,
        })
    }

    /// Certified lower bound on low-overlap blocks of length `n`, once `n ≥ big_n`.
    pub fn bound(&self, n: usize) -> Option<f64> {
        (n >= self.big_n).then(|| (1.0 - (-self.b * n as f64).exp()) * (n as f64 * self.h).exp() * (1.0 - SLACK))
    }
}

/// Least `N` with `|B_n| ≤ s^n` for all `n ≥ N`, certified by submultiplicativity of
/// block counts: if `|B_m| = t^m` then `|B_{qm+j}| ≤ t^{qm} |B_j|`.
pub(crate) fn growth_threshold(p: &Presentation, s: f64, budget: &Budget) -> Result<usize> {
    const MAX_M: usize = 96;
    let counts = count_blocks(p, MAX_M, budget)?;
    let mut best: Option<usize> = None;
    for m in 1..=MAX_M {
        let t = (counts[m] as f64).powf(1.0 / m as f64) * (1.0 + SLACK);
        if t >= s {
            continue;
        }
        let k = (0..m)
            .map(|j| counts[j] as f64 / t.powi(j as i32))
            .fold(1.0f64, f64::max)
            * (1.0 + SLACK);
        let n = m.max((k.ln() / (s / t).ln()).ceil().max(0.0) as usize);
        best = Some(best.map_or(n, |b: usize| b.min(n)));
    }
    let n = best.ok_or_else(|| Error::limit("block growth certificate", MAX_M as u64))?;
    Ok(n.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapRow {
    pub n: usize,
    pub blocks: u128,
    pub low_overlap: u128,
    pub bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapProfile {
    pub alpha: f64,
    pub rows: Vec<OverlapRow>,
    /// Absent when the shift has zero entropy.
    pub constants: Option<OverlapConstants>,
}

/// Low-overlap block counts for lengths `1..=n` with the certified lower bound.
pub fn overlap_census(p: &Presentation, alpha: f64, n: usize, budget: &Budget) -> Result<OverlapProfile> {
    let constants = match OverlapConstants::compute(p, alpha, budget) {
        Ok(c) => Some(c),
        Err(Error::InvalidInput(_)) if alpha > 0.0 && alpha < 1.0 => None,
        Err(e) => return Err(e),
    };
    let mut rows = Vec::with_capacity(n);
    for len in 1..=n {
        let words = language_blocks(p, len, budget)?;
        let low = words
            .iter()
            .filter(|w| max_self_overlap(w) as f64 <= alpha * len as f64)
            .count();
        rows.push(OverlapRow {
            n: len,
            blocks: words.len() as u128,
            low_overlap: low as u128,
            bound: constants.and_then(|c| c.bound(len)),
        });
    }
    Ok(OverlapProfile { alpha, rows, constants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::fixtures::golden_mean;
    use proptest::prelude::*;

    #[test]
    fn overlap_sets() {
        assert_eq!(self_overlap(&[0, 0, 0, 0]), BTreeSet::from([1, 2, 3]));
        assert_eq!(self_overlap(&[0, 1, 0, 1]), BTreeSet::from([2]));
        assert!(self_overlap(&[0, 0, 1]).is_empty());
        assert_eq!(max_self_overlap(&[0, 1, 0, 1]), 2);
        assert_eq!(max_self_overlap(&[0, 0, 1]), 0);
    }

    #[test]
    fn full_two_shift_length_four() {
        let b = Budget::default();
        let prof = overlap_census(&Presentation::full_shift(2), 0.5, 4, &b).unwrap();
        let brute = (0u32..16)
            .filter(|m| {
                let w: Vec<Sym> = (0..4).map(|i| (m >> i) & 1).collect();
                self_overlap(&w).iter().all(|&k| 4 - k <= 2)
            })
            .count() as u128;
        assert_eq!(brute, 14);
        assert_eq!(prof.rows[3].low_overlap, brute);
    }

    #[test]
    fn fixed_point_has_no_low_overlap_words() {
        let prof = overlap_census(&Presentation::full_shift(1), 1.0 / 3.0, 5, &Budget::default()).unwrap();
        assert!(prof.constants.is_none());
        assert!(prof.rows[1..].iter().all(|r| r.low_overlap == 0));
    }

    #[test]
    fn constants_on_full_two_shift() {
        let c = OverlapConstants::compute(&Presentation::full_shift(2), 0.5, &Budget::default()).unwrap();
        assert_eq!(c.n0, 1);
        assert!((c.c2 - 8.0 / (8f64.sqrt() - 1.0)).abs() < 1e-6);
        assert_eq!(c.big_n, 9);
        assert!(c.b > 0.0);
    }

    #[test]
    fn enumeration_meets_bound() {
        let b = Budget::default();
        for (p, alpha, n) in [(Presentation::full_shift(2), 0.5, 14), (golden_mean(), 1.0 / 3.0, 16)] {
            let prof = overlap_census(&p, alpha, n, &b).unwrap();
            for row in &prof.rows {
                if let Some(bound) = row.bound {
                    assert!(row.low_overlap as f64 >= bound, "n={} {} < {}", row.n, row.low_overlap, bound);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn border_matches_overlap_set(w in proptest::collection::vec(0u32..2, 1..14)) {
            let expect = self_overlap(&w).iter().next().map_or(0, |k| w.len() - k);
            prop_assert_eq!(max_self_overlap(&w), expect);
        }
    }
}

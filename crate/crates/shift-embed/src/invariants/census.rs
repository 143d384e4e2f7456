use serde::{Deserialize, Serialize};

use super::necklace::for_each_periodic_orbit;
use crate::error::{Budget, Error, Result};
use crate::shift_core::Presentation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRow {
    pub n: usize,
    /// Points fixed by the n-th shift power.
    pub p_n: u128,
    /// Points of least period n.
    pub q_n: u128,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicCensus {
    pub rows: Vec<CensusRow>,
}

impl PeriodicCensus {
    pub fn q(&self, n: usize) -> u128 {
        self.rows[n - 1].q_n
    }

    pub fn p(&self, n: usize) -> u128 {
        self.rows[n - 1].p_n
    }

    fn from_p(p: Vec<u128>) -> Result<Self> {
        let q = mobius_invert(&p)?;
        Ok(PeriodicCensus {
            rows: p
                .into_iter()
                .zip(q)
                .enumerate()
                .map(|(i, (p_n, q_n))| CensusRow { n: i + 1, p_n, q_n })
                .collect(),
        })
    }

    fn from_q(q: Vec<u128>) -> Result<Self> {
        let p = (1..=q.len())
            .map(|n| {
                divisors(n)
                    .map(|d| q[d - 1])
                    .try_fold(0u128, |a, b| a.checked_add(b))
                    .ok_or_else(|| Error::limit("periodic point count overflow", u128::BITS as u64))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(PeriodicCensus {
            rows: p
                .into_iter()
                .zip(q)
                .enumerate()
                .map(|(i, (p_n, q_n))| CensusRow { n: i + 1, p_n, q_n })
                .collect(),
        })
    }
}

pub(crate) fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n.is_multiple_of(*d))
}

pub(crate) fn mobius(mut n: usize) -> i128 {
    let mut sign = 1;
    let mut f = 2;
    while f * f <= n {
        if n.is_multiple_of(f) {
            n /= f;
            if n.is_multiple_of(f) {
                return 0;
            }
            sign = -sign;
        }
        f += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

fn mobius_invert(p: &[u128]) -> Result<Vec<u128>> {
    let overflow = || Error::limit("periodic point count overflow", i128::BITS as u64);
    (1..=p.len())
        .map(|n| {
            let mut acc: i128 = 0;
            for d in divisors(n) {
                let term = i128::try_from(p[d - 1]).map_err(|_| overflow())?;
                acc = acc.checked_add(mobius(n / d) * term).ok_or_else(overflow)?;
            }
            u128::try_from(acc).map_err(|_| Error::InconsistentOracle(format!("negative q_{n}")))
        })
        .collect()
}

/// Periodic points of an SFT presentation from closed-path counts (traces of `A^n`).
pub fn count_periodic_sft(p: &Presentation, n_max: usize) -> Result<PeriodicCensus> {
    if !p.sft_flag() {
        return Err(Error::InvalidInput("trace counting needs an injectively labeled presentation".into()));
    }
    let v = p.vertex_count();
    let mut traces = vec![0u128; n_max];
    for start in 0..v {
        let mut cur = vec![0u128; v];
        cur[start] = 1;
        for slot in traces.iter_mut() {
            let mut next = vec![0u128; v];
            for e in p.edges() {
                if cur[e.from] > 0 {
                    next[e.to] = next[e.to]
                        .checked_add(cur[e.from])
                        .ok_or_else(|| Error::limit("closed path count overflow", u128::BITS as u64))?;
                }
            }
            cur = next;
            *slot = slot
                .checked_add(cur[start])
                .ok_or_else(|| Error::limit("closed path count overflow", u128::BITS as u64))?;
        }
    }
    PeriodicCensus::from_p(traces)
}

/// Periodic points of any presentation by necklace enumeration.
pub fn count_periodic_sofic(p: &Presentation, n_max: usize, budget: &Budget) -> Result<PeriodicCensus> {
    let mut q = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut orbits = 0u128;
        for_each_periodic_orbit(p, n, budget, |_| orbits += 1)?;
        q.push(orbits * n as u128);
    }
    PeriodicCensus::from_q(q)
}

/// Trace counting when the presentation allows it, necklaces otherwise.
pub fn count_periodic(p: &Presentation, n_max: usize, budget: &Budget) -> Result<PeriodicCensus> {
    if p.sft_flag() {
        count_periodic_sft(p, n_max)
    } else {
        count_periodic_sofic(p, n_max, budget)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::fixtures::*;
    use crate::shift_core::{language_blocks, Word};

    fn q_row(c: &PeriodicCensus) -> Vec<u128> {
        c.rows.iter().map(|r| r.q_n).collect()
    }

    /// Points of period n by brute force: n-words whose (|V|+2)-fold repetition is allowed.
    fn brute_p(p: &Presentation, n: usize) -> u128 {
        let b = Budget::default();
        language_blocks(p, n, &b)
            .unwrap()
            .into_iter()
            .filter(|w| {
                let rep: Word = w.iter().cycle().take(w.len() * (p.vertex_count() + 2)).copied().collect();
                crate::shift_core::membership(p, &rep)
            })
            .count() as u128
    }

    #[test]
    fn full_two_shift() {
        let c = count_periodic_sft(&Presentation::full_shift(2), 3).unwrap();
        assert_eq!(c.rows.iter().map(|r| r.p_n).collect::<Vec<_>>(), vec![2, 4, 8]);
        assert_eq!(q_row(&c), vec![2, 2, 6]);
    }

    #[test]
    fn golden_mean_and_fixed_point() {
        let c = count_periodic_sft(&golden_mean(), 4).unwrap();
        assert_eq!((c.p(1), c.p(2), c.q(2)), (1, 3, 2));
        let f = count_periodic_sft(&Presentation::full_shift(1), 5).unwrap();
        assert_eq!(q_row(&f), vec![1, 0, 0, 0, 0]);
    }

    #[test]
    fn odd_and_even_shifts() {
        let b = Budget::default();
        // 1 0^n 1 allowed only for odd n
        let odd = Presentation::from_triples(&["0", "1"], &[("a", "b", "0"), ("b", "a", "0"), ("b", "a", "1")]).unwrap();
        let c = count_periodic_sofic(&odd, 8, &b).unwrap();
        assert_eq!(c.q(1), 1);
        assert!(c.q(2) > 0);
        assert_eq!((c.q(3), c.q(5), c.q(7)), (0, 0, 0));
        let e = count_periodic_sofic(&even_shift(), 4, &b).unwrap();
        assert_eq!(e.q(2), 0);
    }

    #[test]
    fn trace_and_necklace_counts_agree() {
        let b = Budget::default();
        for p in [golden_mean(), Presentation::full_shift(3)] {
            let t = count_periodic_sft(&p, 8).unwrap();
            let s = count_periodic_sofic(&p, 8, &b).unwrap();
            assert_eq!(t, s);
            for n in 1..=6 {
                assert_eq!(t.p(n), brute_p(&p, n));
            }
        }
    }

    #[test]
    fn mobius_values() {
        let m: Vec<i128> = (1..=12).map(mobius).collect();
        assert_eq!(m, vec![1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]);
    }
}

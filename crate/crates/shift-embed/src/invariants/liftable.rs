use serde::{Deserialize, Serialize};

use super::census::{divisors, mobius};
use super::necklace::{for_each_periodic_orbit, CyclicWord};
use crate::codes::{image, require_one_block, BlockMap};
use crate::error::{Budget, Error, Result};
use crate::shift_core::{Presentation, Sym, Word};

/// A liftable output orbit with one input orbit of the same least period mapping onto it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedOrbit {
    pub image: CyclicWord,
    pub witness: CyclicWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftableRow {
    pub n: usize,
    pub r_n: u128,
    pub orbits: Vec<LiftedOrbit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftableCensus {
    pub rows: Vec<LiftableRow>,
}

impl LiftableCensus {
    pub fn r(&self, n: usize) -> u128 {
        self.rows[n - 1].r_n
    }
}

/// Closed-path lifting through a 1-block code. A closed path of length n reads a point of
/// period n, so any presentation works.
pub(crate) struct Lifter<'a> {
    x: &'a Presentation,
    /// Input symbols over each output symbol, ascending.
    pre: Vec<Vec<Sym>>,
}

impl<'a> Lifter<'a> {
    pub(crate) fn new(x: &'a Presentation, pi: &BlockMap) -> Result<Self> {
        require_one_block(x, pi)?;
        let mut pre = vec![Vec::new(); pi.target().len()];
        for a in x.alphabet().symbols() {
            if let Some(b) = pi.symbol(a) {
                pre[b as usize].push(a);
            }
        }
        Ok(Lifter { x, pre })
    }

    fn step(&self, cur: &[bool], b: Sym) -> Vec<bool> {
        let mut next = vec![false; cur.len()];
        for &a in &self.pre[b as usize] {
            for e in self.x.edges_labeled(a) {
                if cur[e.from] {
                    next[e.to] = true;
                }
            }
        }
        next
    }

    /// Whether some closed path of length `|y|` in `x` reads a preimage of `y`.
    pub(crate) fn has_closed_lift(&self, y: &[Sym]) -> bool {
        (0..self.x.vertex_count()).any(|s| {
            let mut cur = vec![false; self.x.vertex_count()];
            cur[s] = true;
            for &b in y {
                cur = self.step(&cur, b);
            }
            cur[s]
        })
    }

    /// Lexicographically least label sequence of a closed path lifting `y`.
    pub(crate) fn least_closed_lift(&self, y: &[Sym]) -> Option<Word> {
        (0..self.x.vertex_count()).filter_map(|s| self.closed_lift_from(y, s)).min()
    }

    fn closed_lift_from(&self, y: &[Sym], s: usize) -> Option<Word> {
        let n = self.x.vertex_count();
        let mut feasible = vec![vec![false; n]; y.len() + 1];
        feasible[y.len()][s] = true;
        for i in (0..y.len()).rev() {
            for &a in &self.pre[y[i] as usize] {
                for e in self.x.edges_labeled(a) {
                    if feasible[i + 1][e.to] {
                        feasible[i][e.from] = true;
                    }
                }
            }
        }
        if !feasible[0][s] {
            return None;
        }
        let mut cur = vec![false; n];
        cur[s] = true;
        let mut out = Vec::with_capacity(y.len());
        for (i, &b) in y.iter().enumerate() {
            let (a, next) = self.pre[b as usize].iter().find_map(|&a| {
                let mut next = vec![false; n];
                for e in self.x.edges_labeled(a) {
                    if cur[e.from] && feasible[i + 1][e.to] {
                        next[e.to] = true;
                    }
                }
                next.iter().any(|&v| v).then_some((a, next))
            })?;
            out.push(a);
            cur = next;
        }
        Some(out)
    }
}

/// `r_n` for `n ≤ n_max`: points of least period n in the image with a preimage of the
/// same least period, with one witness orbit per liftable image orbit.
pub fn count_liftable(x: &Presentation, pi: &BlockMap, n_max: usize, budget: &Budget) -> Result<LiftableCensus> {
    let lifter = Lifter::new(x, pi)?;
    let y = image(x, pi)?;
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut orbits = Vec::new();
        for_each_periodic_orbit(&y, n, budget, |w| {
            if let Some(lift) = lifter.least_closed_lift(w) {
                orbits.push(LiftedOrbit {
                    image: CyclicWord::new(w),
                    witness: CyclicWord::new(&lift),
                });
            }
        })?;
        rows.push(LiftableRow {
            n,
            r_n: orbits.len() as u128 * n as u128,
            orbits,
        });
    }
    Ok(LiftableCensus { rows })
}

/// A relation on at most 64 vertices as one bitset row per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Relation(Vec<u64>);

impl Relation {
    fn identity(n: usize) -> Self {
        Relation((0..n).map(|i| 1u64 << i).collect())
    }

    fn then(&self, other: &Relation) -> Relation {
        Relation(
            self.0
                .iter()
                .map(|&row| {
                    let mut out = 0u64;
                    let mut bits = row;
                    while bits != 0 {
                        let j = bits.trailing_zeros() as usize;
                        out |= other.0[j];
                        bits &= bits - 1;
                    }
                    out
                })
                .collect(),
        )
    }

    fn meets_diagonal(&self) -> bool {
        self.0.iter().enumerate().any(|(i, &row)| row >> i & 1 == 1)
    }

    /// Whether the `k`-fold composite meets the diagonal.
    fn power_meets_diagonal(&self, k: usize) -> bool {
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.then(self);
        }
        acc.meets_diagonal()
    }
}

/// `r_n` alone. Words of the output alphabet act on `x`'s vertices as relations; with
/// `A(n, e)` the number of e-words u whose relation to the power n/e meets the diagonal
/// (points of period e with a closed lift of length n), `r_n = Σ_{e|n} μ(n/e) A(n, e)`.
pub fn liftable_counts(x: &Presentation, pi: &BlockMap, n_max: usize, budget: &Budget) -> Result<Vec<u128>> {
    let lifter = Lifter::new(x, pi)?;
    let v = x.vertex_count();
    if v > 64 {
        return liftable_counts_by_necklaces(x, pi, n_max, budget);
    }
    let steps: Vec<Relation> = lifter
        .pre
        .iter()
        .map(|pre| {
            let mut rows = vec![0u64; v];
            for &a in pre {
                for e in x.edges_labeled(a) {
                    rows[e.from] |= 1 << e.to;
                }
            }
            Relation(rows)
        })
        .collect();
    let overflow = || Error::limit("liftable count overflow", u128::BITS as u64);
    let mut states = vec![Relation::identity(v)];
    let mut index = std::collections::HashMap::from([(states[0].clone(), 0usize)]);
    let mut delta: Vec<Vec<usize>> = Vec::new();
    // by_length[e][s]: e-words whose relation is states[s]
    let mut by_length: Vec<Vec<u128>> = vec![vec![1]];
    for _ in 1..=n_max {
        let prev = by_length.last().expect("nonempty");
        let mut next = vec![0u128; states.len()];
        for (s, &count) in prev.iter().enumerate() {
            if count == 0 {
                continue;
            }
            while delta.len() <= s {
                let row = steps
                    .iter()
                    .map(|m| {
                        let r = states[delta.len()].then(m);
                        *index.entry(r.clone()).or_insert_with(|| {
                            states.push(r);
                            states.len() - 1
                        })
                    })
                    .collect();
                delta.push(row);
                budget.check_states(states.len(), "word relation states")?;
            }
            for &t in &delta[s] {
                if next.len() <= t {
                    next.resize(states.len(), 0);
                }
                next[t] = next[t].checked_add(count).ok_or_else(overflow)?;
            }
        }
        by_length.push(next);
    }
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut acc: i128 = 0;
        for e in divisors(n) {
            let a: u128 = by_length[e]
                .iter()
                .enumerate()
                .filter(|&(s, &c)| c > 0 && states[s].power_meets_diagonal(n / e))
                .try_fold(0u128, |t, (_, &c)| t.checked_add(c))
                .ok_or_else(overflow)?;
            let a = i128::try_from(a).map_err(|_| overflow())?;
            acc = acc.checked_add(mobius(n / e) * a).ok_or_else(overflow)?;
        }
        out.push(u128::try_from(acc).map_err(|_| Error::InconsistentOracle(format!("negative r_{n}")))?);
    }
    Ok(out)
}

fn liftable_counts_by_necklaces(x: &Presentation, pi: &BlockMap, n_max: usize, budget: &Budget) -> Result<Vec<u128>> {
    let lifter = Lifter::new(x, pi)?;
    let y = image(x, pi)?;
    (1..=n_max)
        .map(|n| {
            let mut count = 0u128;
            for_each_periodic_orbit(&y, n, budget, |w| {
                if lifter.has_closed_lift(w) {
                    count += 1;
                }
            })?;
            Ok(count * n as u128)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub n: usize,
    pub r_n: u128,
    /// `(1/n)·log r_n`, reported as 0 when `r_n = 0`.
    pub rate: f64,
}

/// Growth rates of `r_n`, which approach the entropy of the image.
pub fn growth_check(x: &Presentation, pi: &BlockMap, n_max: usize, budget: &Budget) -> Result<Vec<GrowthRow>> {
    Ok(liftable_counts(x, pi, n_max, budget)?
        .into_iter()
        .enumerate()
        .map(|(i, r_n)| GrowthRow {
            n: i + 1,
            r_n,
            rate: (r_n.max(1) as f64).ln() / (i + 1) as f64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::tests::{even_labeling, ti_channel};
    use crate::codes::{lift_orbit, BlockMap};
    use crate::invariants::{count_periodic_sft, least_period};
    use crate::shift_core::fixtures::golden_mean;

    #[test]
    fn identity_channel_counts_every_orbit() {
        let b = Budget::default();
        for x in [golden_mean(), Presentation::full_shift(2)] {
            let id = BlockMap::identity(x.alphabet());
            let r = count_liftable(&x, &id, 6, &b).unwrap();
            let q = count_periodic_sft(&x, 6).unwrap();
            for n in 1..=6 {
                assert_eq!(r.r(n), q.q(n));
            }
        }
    }

    #[test]
    fn ti_channel_lifts_every_output_orbit() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let r = count_liftable(&x, &pi, 5, &b).unwrap();
        let q = count_periodic_sft(&Presentation::full_shift(2), 5).unwrap();
        for n in 1..=5 {
            assert_eq!(r.r(n), q.q(n));
        }
    }

    #[test]
    fn even_labeling_lifts_only_the_ones() {
        let b = Budget::default();
        let (x, pi) = even_labeling();
        let r = count_liftable(&x, &pi, 4, &b).unwrap();
        assert_eq!(r.r(1), 1);
        assert_eq!(r.rows[0].orbits[0].image.canonical(), &vec![1]);
        let y = image(&x, &pi).unwrap();
        let q = crate::invariants::count_periodic_sofic(&y, 4, &b).unwrap();
        for n in 1..=4 {
            assert!(r.r(n) <= q.q(n));
        }
    }

    /// The closed-path test agrees with exhaustive orbit lifting.
    #[test]
    fn witnesses_agree_with_orbit_search() {
        let b = Budget::default();
        let (x, pi) = even_labeling();
        let r = count_liftable(&x, &pi, 6, &b).unwrap();
        let y = image(&x, &pi).unwrap();
        for n in 1..=6 {
            let mut expected = Vec::new();
            for_each_periodic_orbit(&y, n, &b, |w| {
                if lift_orbit(&x, &pi, &CyclicWord::new(w), &b).is_ok() {
                    expected.push(w.clone());
                }
            })
            .unwrap();
            let got: Vec<Word> = r.rows[n - 1].orbits.iter().map(|o| o.image.canonical().clone()).collect();
            assert_eq!(got, expected);
            for o in &r.rows[n - 1].orbits {
                assert_eq!(least_period(o.witness.canonical()), n);
                let img = pi.apply(o.witness.canonical()).unwrap();
                assert_eq!(CyclicWord::new(&img), o.image);
            }
        }
    }

    #[test]
    fn transfer_counts_match_necklaces() {
        let b = Budget::default();
        let gm = golden_mean();
        let xor_like = Presentation::from_triples(
            &["a", "b", "c", "d"],
            &[("u", "u", "a"), ("u", "v", "b"), ("v", "v", "c"), ("v", "u", "d")],
        )
        .unwrap();
        let merge = BlockMap::relabeling(
            xor_like.alphabet(),
            &crate::shift_core::Alphabet::digits(2),
            &[("a", "0"), ("b", "1"), ("c", "0"), ("d", "0")],
        )
        .unwrap();
        let cases = [ti_channel(), even_labeling(), (gm.clone(), BlockMap::identity(gm.alphabet())), (xor_like, merge)];
        for (x, pi) in cases {
            let fast = liftable_counts(&x, &pi, 9, &b).unwrap();
            let slow = liftable_counts_by_necklaces(&x, &pi, 9, &b).unwrap();
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn growth_rates() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let g = growth_check(&x, &pi, 8, &b).unwrap();
        assert!((g[7].rate - 2f64.ln()).abs() < 0.1);
        let fixed = Presentation::full_shift(1);
        let id = BlockMap::identity(fixed.alphabet());
        assert!(growth_check(&fixed, &id, 4, &b).unwrap().iter().all(|r| r.rate == 0.0));
    }
}

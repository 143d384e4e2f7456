use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use super::sat::{lit, Lit, Outcome, Solver};
use crate::shift_core::{language_blocks, Presentation, Sym, Word};

/// Largest window radius tried before giving up.
const MIN_RADIUS_CAP: usize = 6;
/// Solver conflicts allowed per radius.
const MAX_CONFLICTS: u64 = 500_000;

/// Counts from the exhaustive word-level check of both marker properties.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerTranscript {
    pub word_length: usize,
    pub words_checked: u64,
    pub disjointness_violations: u64,
    pub periodicity_violations: u64,
    pub search_conflicts: u64,
    pub radii_tried: Vec<usize>,
}

/// A finite union of cylinders `F` given by windows `z[-L..=L]`.
///
/// Property (1): `σ^i F` for `0 ≤ i < n` are pairwise disjoint.
/// Property (2): a point avoiding `σ^i F` for `|i| < n` is `p`-periodic on `[-n, n]` for some `p < n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkerSet {
    pub n: usize,
    pub radius: usize,
    pub cylinders: Vec<Word>,
    pub transcript: MarkerTranscript,
    #[serde(skip)]
    lookup: HashSet<Word>,
}

impl MarkerSet {
    fn new(n: usize, radius: usize, cylinders: Vec<Word>, transcript: MarkerTranscript) -> Self {
        let lookup = cylinders.iter().cloned().collect();
        MarkerSet {
            n,
            radius,
            cylinders,
            transcript,
            lookup,
        }
    }

    /// Rebuilds the lookup table after deserialization.
    pub fn reindexed(mut self) -> Self {
        self.lookup = self.cylinders.iter().cloned().collect();
        self
    }

    pub fn window(&self) -> usize {
        2 * self.radius + 1
    }

    pub fn contains(&self, window: &[Sym]) -> bool {
        self.lookup.contains(window)
    }

    /// Marker hits of `w`: entry `i` says whether the window starting at `i` lies in `F`,
    /// i.e. whether coordinate `i + radius` is a marker coordinate.
    pub fn hits(&self, w: &[Sym]) -> Vec<bool> {
        if w.len() < self.window() {
            return Vec::new();
        }
        w.windows(self.window()).map(|c| self.contains(c)).collect()
    }

    /// Re-runs the exhaustive check of both properties over legal words of `z`.
    pub fn verify(&self, z: &Presentation, budget: &Budget) -> Result<MarkerTranscript> {
        let len = 2 * self.radius + 2 * self.n + 1;
        let words = language_blocks(z, len, budget)?;
        let mut t = MarkerTranscript {
            word_length: len,
            words_checked: words.len() as u64,
            disjointness_violations: 0,
            periodicity_violations: 0,
            search_conflicts: 0,
            radii_tried: vec![self.radius],
        };
        let span = 2 * self.radius + 2 * self.n - 1;
        for w in &words {
            let hits = self.hits(w);
            let clash = (0..hits.len()).any(|i| hits[i] && (1..self.n).any(|j| hits.get(i + j) == Some(&true)));
            if clash {
                t.disjointness_violations += 1;
            }
            for off in 0..=len - span {
                let region = &w[off..off + span];
                let free = !self.hits(region).contains(&true);
                if free && !locally_periodic(&region[self.radius - 1..self.radius - 1 + 2 * self.n + 1], self.n) {
                    t.periodicity_violations += 1;
                }
            }
        }
        Ok(t)
    }
}

/// `w` is `p`-periodic for some `1 ≤ p < n`.
pub(crate) fn locally_periodic(w: &[Sym], n: usize) -> bool {
    (1..n).any(|p| (p..w.len()).all(|k| w[k] == w[k - p]))
}

/// Marker set for `z` at scale `n`, searched at growing radius and verified exhaustively.
pub fn marker_set(z: &Presentation, n: usize, budget: &Budget) -> Result<MarkerSet> {
    if n < 1 {
        return Err(Error::InvalidInput("marker scale must be at least 1".into()));
    }
    let mut tried = Vec::new();
    let mut conflicts = 0;
    let cap = MIN_RADIUS_CAP.max(n + 1);
    for radius in 1..=cap {
        tried.push(radius);
        let (found, used) = solve_at(z, n, radius, budget)?;
        conflicts += used;
        let Some(cylinders) = found else {
            continue;
        };
        let set = MarkerSet::new(n, radius, cylinders, MarkerTranscript {
            word_length: 0,
            words_checked: 0,
            disjointness_violations: 0,
            periodicity_violations: 0,
            search_conflicts: 0,
            radii_tried: Vec::new(),
        });
        let mut t = set.verify(z, budget)?;
        if t.disjointness_violations + t.periodicity_violations > 0 {
            return Err(Error::ConstructionFailed(format!(
                "radius {radius}: {} disjointness and {} periodicity violations",
                t.disjointness_violations, t.periodicity_violations
            )));
        }
        t.search_conflicts = conflicts;
        t.radii_tried = tried;
        return Ok(MarkerSet { transcript: t, ..set });
    }
    Err(Error::ConstructionFailed(format!(
        "no marker set with radius ≤ {cap} at scale {n}"
    )))
}

/// Window variables; a conflict clause for each pair of hits closer than `n` and a coverage
/// clause for each region whose centre is not locally periodic.
fn solve_at(z: &Presentation, n: usize, radius: usize, budget: &Budget) -> Result<(Option<Vec<Word>>, u64)> {
    let win = 2 * radius + 1;
    let index: BTreeMap<Word, usize> = language_blocks(z, win, budget)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    let mut clauses: BTreeSet<Vec<Lit>> = BTreeSet::new();
    for j in 1..n {
        for w in language_blocks(z, win + j, budget)? {
            let mut c = vec![lit(index[&w[..win]], false), lit(index[&w[j..]], false)];
            c.sort_unstable();
            c.dedup();
            clauses.insert(c);
        }
    }
    let span = win + 2 * n - 2;
    for w in language_blocks(z, span, budget)? {
        if locally_periodic(&w[radius - 1..radius + 2 * n], n) {
            continue;
        }
        let mut c: Vec<Lit> = w.windows(win).map(|c| lit(index[c], true)).collect();
        c.sort_unstable();
        c.dedup();
        clauses.insert(c);
    }
    budget.check_words(clauses.len() as u64, "marker clauses")?;
    let mut solver = Solver::new(index.len());
    clauses.into_iter().for_each(|c| solver.add_clause(c));
    let Outcome::Sat(model) = solver.solve(MAX_CONFLICTS) else {
        return Ok((None, solver.conflicts));
    };
    let cylinders = index.into_iter().filter(|(_, v)| model[*v]).map(|(c, _)| c).collect();
    Ok((Some(cylinders), solver.conflicts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::fixtures::golden_mean;

    fn check(z: &Presentation, n: usize) -> MarkerSet {
        let b = Budget::default();
        let m = marker_set(z, n, &b).unwrap();
        let t = m.verify(z, &b).unwrap();
        assert_eq!((t.disjointness_violations, t.periodicity_violations), (0, 0));
        assert!(t.words_checked > 0);
        m
    }

    #[test]
    fn fixed_point_needs_no_markers() {
        let m = check(&Presentation::full_shift(1), 3);
        assert!(m.cylinders.is_empty());
    }

    #[test]
    fn full_two_shift_scale_two() {
        let z = Presentation::full_shift(2);
        let m = check(&z, 2);
        assert!(!m.cylinders.is_empty());
        // every non-constant 5-window is covered at offset -1, 0 or 1
        let b = Budget::default();
        for w in language_blocks(&z, 2 * m.radius + 3, &b).unwrap() {
            let centre = &w[m.radius - 1..m.radius + 4];
            if !locally_periodic(centre, 2) {
                assert!(m.hits(&w).contains(&true), "{w:?}");
            }
        }
    }

    #[test]
    fn golden_mean_and_full_shift_scale_three() {
        check(&golden_mean(), 3);
        check(&golden_mean(), 2);
        check(&Presentation::full_shift(2), 3);
    }

    #[test]
    fn verification_catches_bad_sets() {
        let b = Budget::default();
        let z = Presentation::full_shift(2);
        let empty = MarkerSet::new(2, 1, Vec::new(), marker_set(&z, 2, &b).unwrap().transcript);
        assert!(empty.verify(&z, &b).unwrap().periodicity_violations > 0);
        let all = MarkerSet::new(2, 1, language_blocks(&z, 3, &b).unwrap(), empty.transcript.clone());
        assert!(all.verify(&z, &b).unwrap().disjointness_violations > 0);
    }

    #[test]
    fn locally_periodic_words() {
        assert!(locally_periodic(&[0, 1, 0, 1, 0], 3));
        assert!(!locally_periodic(&[0, 1, 0, 1, 0], 2));
        assert!(!locally_periodic(&[0, 0, 1, 0, 0], 3));
    }
}

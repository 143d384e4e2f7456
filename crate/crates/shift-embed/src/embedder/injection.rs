use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::invariants::{least_period, least_rotation};
use crate::shift_core::{language_blocks, Presentation, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InjectionKind {
    /// Blocks of length `n` to output blocks of length `n - ell`.
    Moderate,
    /// Orbits of least period `n` to output orbits of least period `n`, as canonical words.
    Periodic,
}

/// An injective table from input blocks or orbits to output blocks or orbits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "InjectionDoc", into = "InjectionDoc")]
pub struct BlockInjection {
    kind: InjectionKind,
    n: usize,
    forward: BTreeMap<Word, Word>,
    backward: BTreeMap<Word, Word>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InjectionDoc {
    kind: InjectionKind,
    n: usize,
    /// Output length for moderate tables.
    out_len: usize,
    pairs: Vec<(Word, Word)>,
}

impl From<BlockInjection> for InjectionDoc {
    fn from(b: BlockInjection) -> Self {
        let out_len = b.forward.values().next().map_or(0, Vec::len);
        InjectionDoc { kind: b.kind, n: b.n, out_len, pairs: b.forward.into_iter().collect() }
    }
}

impl TryFrom<InjectionDoc> for BlockInjection {
    type Error = Error;

    fn try_from(d: InjectionDoc) -> Result<Self> {
        match d.kind {
            InjectionKind::Moderate => BlockInjection::moderate_from(d.n, d.n.saturating_sub(d.out_len), d.pairs),
            InjectionKind::Periodic => BlockInjection::periodic_from(d.n, d.pairs),
        }
    }
}

impl BlockInjection {
    /// Validated moderate table: every input has length `n`, every output `n - ell`.
    pub fn moderate_from(n: usize, ell: usize, pairs: Vec<(Word, Word)>) -> Result<Self> {
        if n <= ell {
            return Err(Error::InvalidInput(format!("block length {n} does not exceed ell = {ell}")));
        }
        if let Some((a, b)) = pairs.iter().find(|(a, b)| a.len() != n || b.len() != n - ell) {
            return Err(Error::InvalidInput(format!("pair {a:?} -> {b:?} has the wrong lengths")));
        }
        Self::build(InjectionKind::Moderate, n, pairs)
    }

    /// Validated periodic table on canonical words of least period `n`.
    pub fn periodic_from(n: usize, pairs: Vec<(Word, Word)>) -> Result<Self> {
        let canonical = |w: &Word| w.len() == n && least_period(w) == n && least_rotation(w) == *w;
        if let Some((a, b)) = pairs.iter().find(|(a, b)| !canonical(a) || !canonical(b)) {
            return Err(Error::InvalidInput(format!("pair {a:?} -> {b:?} is not a pair of canonical orbits of period {n}")));
        }
        Self::build(InjectionKind::Periodic, n, pairs)
    }

    fn build(kind: InjectionKind, n: usize, pairs: Vec<(Word, Word)>) -> Result<Self> {
        let mut forward = BTreeMap::new();
        let mut backward = BTreeMap::new();
        for (a, b) in pairs {
            if forward.insert(a.clone(), b.clone()).is_some() {
                return Err(Error::InvalidInput(format!("input {a:?} appears twice")));
            }
            if backward.insert(b.clone(), a).is_some() {
                return Err(Error::InvalidInput(format!("output {b:?} is hit twice")));
            }
        }
        Ok(BlockInjection { kind, n, forward, backward })
    }

    /// Pairs the `n`-blocks of `z` with the first `(n - ell)`-blocks of `w`, both in
    /// lexicographic order.
    pub fn moderate(z: &Presentation, w: &Presentation, n: usize, ell: usize, budget: &Budget) -> Result<Self> {
        if n <= ell {
            return Err(Error::InvalidInput(format!("block length {n} does not exceed ell = {ell}")));
        }
        let ins = language_blocks(z, n, budget)?;
        let outs = language_blocks(w, n - ell, budget)?;
        if ins.len() > outs.len() {
            return Err(Error::CountingHypothesisViolated(format!(
                "{} input blocks of length {n} but {} output blocks of length {}",
                ins.len(),
                outs.len(),
                n - ell
            )));
        }
        Self::moderate_from(n, ell, ins.into_iter().zip(outs).collect())
    }

    /// Pairs the input orbits with the first output orbits, both sorted.
    pub fn periodic(n: usize, inputs: impl IntoIterator<Item = Word>, outputs: impl IntoIterator<Item = Word>) -> Result<Self> {
        let ins: BTreeSet<Word> = inputs.into_iter().map(|w| least_rotation(&w)).collect();
        let outs: BTreeSet<Word> = outputs.into_iter().map(|w| least_rotation(&w)).collect();
        if ins.len() > outs.len() {
            return Err(Error::CountingHypothesisViolated(format!(
                "{} input orbits of period {n} but {} output orbits",
                ins.len(),
                outs.len()
            )));
        }
        Self::periodic_from(n, ins.into_iter().zip(outs).collect())
    }

    pub fn kind(&self) -> InjectionKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn get(&self, input: &[crate::shift_core::Sym]) -> Option<&Word> {
        self.forward.get(input)
    }

    pub fn invert(&self, output: &[crate::shift_core::Sym]) -> Option<&Word> {
        self.backward.get(output)
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&Word, &Word)> {
        self.forward.iter()
    }

    pub fn outputs(&self) -> impl Iterator<Item = &Word> {
        self.forward.values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{golden_mean, no_descent};
    use crate::shift_core::Presentation;

    #[test]
    fn moderate_pairs_in_order() {
        let b = Budget::default();
        let d = BlockInjection::moderate(&no_descent(), &Presentation::full_shift(2), 3, 1, &b).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.get(&[0, 0, 0]), Some(&vec![0, 0]));
        assert_eq!(d.get(&[1, 1, 1]), Some(&vec![1, 1]));
        assert_eq!(d.invert(&[0, 1]), Some(&vec![0, 0, 1]));
        assert!(d.outputs().all(|w| w.len() == 2));
    }

    #[test]
    fn too_few_outputs_violate_the_count() {
        let b = Budget::default();
        let e = BlockInjection::moderate(&Presentation::full_shift(2), &golden_mean(), 3, 1, &b);
        assert!(matches!(e, Err(Error::CountingHypothesisViolated(_))));
    }

    #[test]
    fn periodic_tables_are_canonical_and_injective() {
        let c = BlockInjection::periodic(2, [vec![1, 0]], [vec![1, 2], vec![0, 1]]).unwrap();
        assert_eq!(c.get(&[0, 1]), Some(&vec![0, 1]));
        assert!(BlockInjection::periodic_from(2, vec![(vec![0, 0], vec![0, 1])]).is_err());
        let twice = vec![(vec![0, 1], vec![0, 2]), (vec![0, 2], vec![0, 2])];
        assert!(matches!(BlockInjection::periodic_from(2, twice), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn survives_serialization() {
        let b = Budget::default();
        let d = BlockInjection::moderate(&no_descent(), &Presentation::full_shift(2), 4, 1, &b).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(serde_json::from_str::<BlockInjection>(&text).unwrap(), d);
    }
}

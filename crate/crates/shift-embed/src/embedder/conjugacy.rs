use std::collections::{HashMap, HashSet};

use super::periodic_phase;
use crate::codes::BlockMap;
use crate::constructions::{blanks_shift, BlanksSpec};
use crate::error::{Budget, Error, Result};
use crate::invariants::{least_rotation, CyclicWord};
use crate::shift_core::{language_blocks, Alphabet, Sym, Word};

/// Inverse of the blank-preserving extension of the channel. A data run of at most `2n`
/// symbols between visible blanks is a block and goes through `kappa`; anything longer is
/// an orbit stretch and goes through `lambda` in phase.
pub(crate) struct BlanksInverse {
    source: Alphabet,
    target: Alphabet,
    n: usize,
    kappa: HashMap<Word, Word>,
    /// Canonical output orbit to the input lift aligned with it.
    lambda: HashMap<Word, Word>,
}

impl BlanksInverse {
    pub(crate) fn new(
        source: Alphabet,
        target: Alphabet,
        n: usize,
        kappa: impl IntoIterator<Item = (Word, Word)>,
        lambda: impl IntoIterator<Item = (Word, Word)>,
    ) -> Result<Self> {
        let kappa: HashMap<Word, Word> = kappa.into_iter().collect();
        let lambda: HashMap<Word, Word> = lambda.into_iter().collect();
        if let Some((b, _)) = kappa.iter().find(|(b, l)| b.len() != l.len() || b.len() > 2 * n) {
            return Err(Error::NotConjugate(format!("block {b:?} has no lift of its length")));
        }
        if let Some((d, _)) = lambda.iter().find(|(d, l)| d.len() != l.len() || d.len() >= 2 * n) {
            return Err(Error::NotConjugate(format!("orbit {d:?} has no aligned lift")));
        }
        Ok(BlanksInverse { source, target, n, kappa, lambda })
    }

    pub(crate) fn radius(&self) -> usize {
        2 * self.n + 1
    }

    fn blank_in(&self) -> Sym {
        self.source.len() as Sym - 1
    }

    fn blank_out(&self) -> Sym {
        self.target.len() as Sym - 1
    }

    pub(crate) fn eval(&self, w: &[Sym]) -> Result<Sym> {
        let (c, blank) = (self.radius(), self.blank_in());
        if w[c] == blank {
            return Ok(self.blank_out());
        }
        let l = (0..c).rev().find(|&j| w[j] == blank);
        let r = (c + 1..w.len()).find(|&j| w[j] == blank);
        if let (Some(l), Some(r)) = (l, r) {
            if r - l - 1 <= 2 * self.n {
                let block = &w[l + 1..r];
                let lift = self
                    .kappa
                    .get(block)
                    .ok_or_else(|| Error::NotConjugate(format!("data block {} has no lift", self.source.render(block))))?;
                return Ok(lift[c - l - 1]);
            }
        }
        let (lo, hi) = (l.map_or(0, |l| l + 1), r.unwrap_or(w.len()));
        let len = 2 * self.n + 1;
        if hi - lo < len {
            return Err(Error::NotConjugate(format!("data run {} is too short", self.source.render(&w[lo..hi]))));
        }
        let s = lo.max(c.saturating_sub(2 * self.n)).min(hi - len);
        let seg = &w[s..s + len];
        let (d, t) = periodic_phase(seg, 2 * self.n).ok_or_else(|| {
            Error::NotConjugate(format!("data stretch {} is not an orbit stretch", self.source.render(seg)))
        })?;
        let lift = self
            .lambda
            .get(&d)
            .ok_or_else(|| Error::NotConjugate(format!("orbit {} has no lift", self.source.render(&d))))?;
        Ok(lift[(t + c - s) % d.len()])
    }

    pub(crate) fn tabulate<'a>(&self, windows: impl IntoIterator<Item = &'a Word>) -> Result<BlockMap> {
        let r = self.radius();
        BlockMap::tabulate_fallible(&self.source, &self.target, r, r, windows, |w| self.eval(w))
    }
}

/// The channel extended by fixing the blank, from the blanks shift over the input to the
/// blanks shift over the output, and its inverse tabulated on every window of the output
/// blanks shift. Fails unless the channel maps the input data bijectively onto the output
/// data, blocks to blocks of equal length and orbits to orbits of equal period.
pub fn blanks_conjugacy(v_spec: &BlanksSpec, w_spec: &BlanksSpec, pi: &BlockMap, budget: &Budget) -> Result<(BlockMap, BlockMap)> {
    if v_spec.n != w_spec.n || v_spec.ell != w_spec.ell {
        return Err(Error::NotConjugate("the specs have different scales".into()));
    }
    if !pi.is_one_block() || pi.source() != &v_spec.alphabet || pi.target() != &w_spec.alphabet {
        return Err(Error::InvalidInput("the channel must be a 1-block code between the spec alphabets".into()));
    }
    let image = |w: &Word| pi.apply(w);
    let mut kappa = Vec::new();
    for b in &v_spec.blocks {
        kappa.push((image(b)?, b.clone()));
    }
    let mut lambda = Vec::new();
    for o in &v_spec.orbits {
        let img = image(o.canonical())?;
        let d = least_rotation(&img);
        if CyclicWord::new(&d).least_period() != o.len() {
            return Err(Error::NotConjugate(format!("orbit {:?} loses its period", o.canonical())));
        }
        let shift = (0..d.len()).find(|&s| (0..d.len()).all(|j| img[(s + j) % d.len()] == d[j])).expect("a rotation");
        let aligned: Word = (0..d.len()).map(|j| o.canonical()[(shift + j) % d.len()]).collect();
        lambda.push((d, aligned));
    }
    let distinct = |pairs: &[(Word, Word)]| pairs.iter().map(|(a, _)| a).collect::<HashSet<_>>().len() == pairs.len();
    if !distinct(&kappa) || !distinct(&lambda) {
        return Err(Error::NotConjugate("the channel identifies two data items".into()));
    }
    let covers = kappa.iter().map(|(a, _)| a).collect::<HashSet<_>>() == w_spec.blocks.iter().collect::<HashSet<_>>()
        && lambda.iter().map(|(a, _)| CyclicWord::new(a)).collect::<HashSet<_>>() == w_spec.orbits.iter().cloned().collect();
    if !covers {
        return Err(Error::NotConjugate("the image data differ from the output spec".into()));
    }
    let (vb, wb) = (v_spec.blank_alphabet()?, w_spec.blank_alphabet()?);
    let blank_v = v_spec.blank();
    let forward = BlockMap::one_block(&vb, &wb, |a| if a == blank_v { w_spec.blank() } else { pi.symbol(a).expect("1-block") });
    let inverse = BlanksInverse::new(wb, vb, w_spec.n, kappa, lambda)?;
    let windows = language_blocks(&blanks_shift(w_spec)?, 2 * inverse.radius() + 1, budget)?;
    let back = inverse.tabulate(&windows)?;
    for w in &windows {
        let v = back.apply(w)?;
        if forward.apply(&v)? != w[inverse.radius()..=inverse.radius()] {
            return Err(Error::NotConjugate(format!("round trip fails on {}", w_spec.blank_alphabet()?.render(w))));
        }
    }
    Ok((forward, back))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::ti_channel;
    use crate::shift_core::Alphabet;

    fn spec(alphabet: Alphabet, blocks: &[&[Sym]], orbits: &[&[Sym]]) -> BlanksSpec {
        BlanksSpec {
            alphabet,
            blocks: blocks.iter().map(|b| b.to_vec()).collect(),
            orbits: orbits.iter().map(|o| CyclicWord::new(o)).collect(),
            n: 2,
            ell: 1,
        }
    }

    #[test]
    fn identity_channel_gives_identity_pair() {
        let b = Budget::default();
        let s = spec(Alphabet::digits(2), &[&[0, 1], &[1, 1, 0]], &[&[0], &[0, 1]]);
        let pi = BlockMap::identity(&s.alphabet);
        let (fwd, back) = blanks_conjugacy(&s, &s, &pi, &b).unwrap();
        assert!(fwd.table().iter().all(|(w, &a)| w[0] == a));
        assert!(back.table().iter().all(|(w, &a)| w[back.memory()] == a));
    }

    #[test]
    fn ti_channel_round_trip() {
        let b = Budget::default();
        let (_, pi) = ti_channel();
        let (x3, y2) = (pi.source().clone(), pi.target().clone());
        let v = spec(x3, &[&[0, 2], &[1, 0, 0]], &[&[2], &[0, 1]]);
        let w = spec(y2, &[&[0, 1], &[1, 0, 0]], &[&[1], &[0, 1]]);
        let (fwd, back) = blanks_conjugacy(&v, &w, &pi, &b).unwrap();
        let wb = blanks_shift(&w).unwrap();
        let len = back.width() + 6;
        for u in language_blocks(&wb, len, &b).unwrap() {
            let lifted = back.apply(&u).unwrap();
            assert_eq!(fwd.apply(&lifted).unwrap(), u[back.memory()..len - back.anticipation()].to_vec());
        }
    }

    #[test]
    fn merged_blocks_are_not_a_conjugacy() {
        let b = Budget::default();
        let (_, pi) = ti_channel();
        let v = spec(pi.source().clone(), &[&[0, 1], &[0, 2]], &[]);
        let w = spec(pi.target().clone(), &[&[0, 1]], &[]);
        assert!(matches!(blanks_conjugacy(&v, &w, &pi, &b), Err(Error::NotConjugate(_))));
    }
}

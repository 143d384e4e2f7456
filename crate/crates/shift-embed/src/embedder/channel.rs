use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::codes::{check_injective, lift_word, recode_one_block, BlockMap};
use crate::combinatorics::Stamp;
use crate::constructions::{blanks_shift, BlanksSpec};
use crate::error::{Budget, Error, Result};
use crate::shift_core::{language_blocks, structure, Alphabet, Presentation, Sym, Word};

/// The lifted stamp and the connecting words that splice it between data symbols.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Connectors {
    pub gap: usize,
    pub mu_hat: Word,
    /// `b γ⁺(b) μ̂` is a word of the input shift.
    pub plus: BTreeMap<Sym, Word>,
    /// `μ̂ γ⁻(a) a` is a word of the input shift.
    pub minus: BTreeMap<Sym, Word>,
}

impl Connectors {
    pub fn ell(&self) -> usize {
        self.mu_hat.len() + 2 * self.gap
    }
}

/// Lexicographically least word of length `len` read from `start` to a vertex with an
/// edge labeled `then`, in a 1-step presentation.
fn least_path(x: &Presentation, start: usize, len: usize, then: Sym) -> Option<Word> {
    let n = x.vertex_count();
    let mut good = vec![vec![false; n]; len + 1];
    for e in x.edges_labeled(then) {
        good[len][e.from] = true;
    }
    for j in (0..len).rev() {
        for e in x.edges() {
            if good[j + 1][e.to] {
                good[j][e.from] = true;
            }
        }
    }
    if !good[0][start] {
        return None;
    }
    let mut v = start;
    let mut out = Vec::with_capacity(len);
    for j in 0..len {
        let e = x.out_edges(v).filter(|e| good[j + 1][e.to]).min_by_key(|e| e.label)?;
        out.push(e.label);
        v = e.to;
    }
    Some(out)
}

/// Lifts the stamp and builds both connector tables with paths of length `gap`.
pub fn connectors(x: &Presentation, pi: &BlockMap, stamp: &Stamp, gap: usize) -> Result<Connectors> {
    if !x.is_one_step() {
        return Err(Error::InvalidInput("the channel input must be a 1-step presentation".into()));
    }
    let mu_hat = lift_word(x, pi, &stamp.word)?;
    let (first, last) = (mu_hat[0], mu_hat[mu_hat.len() - 1]);
    let after_last = x.label_target(last).expect("a symbol of the lift");
    let mut plus = BTreeMap::new();
    let mut minus = BTreeMap::new();
    for a in x.alphabet().symbols() {
        let Some(t) = x.label_target(a) else { continue };
        let p = least_path(x, t, gap, first)
            .ok_or_else(|| Error::ConnectorNotFound(format!("after {}", x.alphabet().name(a))))?;
        let m = least_path(x, after_last, gap, a)
            .ok_or_else(|| Error::ConnectorNotFound(format!("before {}", x.alphabet().name(a))))?;
        plus.insert(a, p);
        minus.insert(a, m);
    }
    Ok(Connectors { gap, mu_hat, plus, minus })
}

/// Replaces each blank run `*^ℓ` between `b` and `a` by `γ⁺(b) μ̂ γ⁻(a)`.
pub(crate) struct ChannelRule<'a> {
    source: Alphabet,
    target: Alphabet,
    c: &'a Connectors,
}

impl<'a> ChannelRule<'a> {
    pub(crate) fn new(source: Alphabet, target: Alphabet, c: &'a Connectors) -> Self {
        ChannelRule { source, target, c }
    }

    pub(crate) fn radius(&self) -> usize {
        self.c.ell()
    }

    pub(crate) fn eval(&self, w: &[Sym]) -> Result<Sym> {
        let blank = self.source.len() as Sym - 1;
        let (i, ell, g) = (self.radius(), self.c.ell(), self.c.gap);
        if w[i] != blank {
            return Ok(w[i]);
        }
        let s = (0..=i).rev().take_while(|&j| w[j] == blank).last().expect("the centre is blank");
        let bad = || Error::InvalidInput(format!("blank run in {} is not of length {ell}", self.source.render(w)));
        if s == 0 || w.get(s + ell).is_none_or(|&a| a == blank) || w[s..s + ell].iter().any(|&a| a != blank) {
            return Err(bad());
        }
        let (b, a) = (w[s - 1], w[s + ell]);
        let j = i - s;
        let m = self.c.mu_hat.len();
        let pick = |table: &BTreeMap<Sym, Word>, key: Sym, k: usize| {
            table.get(&key).map(|t| t[k]).ok_or_else(|| Error::ConnectorNotFound(self.source.name(key).to_string()))
        };
        if j < g {
            pick(&self.c.plus, b, j)
        } else if j < g + m {
            Ok(self.c.mu_hat[j - g])
        } else {
            pick(&self.c.minus, a, j - g - m)
        }
    }

    pub(crate) fn tabulate<'w>(&self, windows: impl IntoIterator<Item = &'w Word>) -> Result<BlockMap> {
        let r = self.radius();
        BlockMap::tabulate_fallible(&self.source, &self.target, r, r, windows, |w| self.eval(w))
    }
}

/// Splicing code from the blanks shift of `v_spec` into `x`, tabulated on every window of
/// the blanks shift, with `π∘γ` checked injective.
pub fn channel_embed(v_spec: &BlanksSpec, x: &Presentation, pi: &BlockMap, stamp: &Stamp, budget: &Budget) -> Result<BlockMap> {
    let g = structure(x, budget)?
        .gap
        .ok_or_else(|| Error::InvalidInput("the channel input must be mixing".into()))?;
    if v_spec.ell != stamp.word.len() + 2 * g {
        return Err(Error::InvalidInput(format!("ell = {} but |μ| + 2g = {}", v_spec.ell, stamp.word.len() + 2 * g)));
    }
    if let Some(b) = v_spec.blocks.iter().find(|b| b.len() < stamp.word.len()) {
        return Err(Error::InvalidInput(format!("data block {b:?} is shorter than the stamp")));
    }
    if !stamp.check.valid {
        return Err(Error::StampInvalid(pi.target().render(&stamp.word)));
    }
    let c = connectors(x, pi, stamp, g)?;
    let rule = ChannelRule::new(v_spec.blank_alphabet()?, x.alphabet().clone(), &c);
    let vb = blanks_shift(v_spec)?;
    let windows = language_blocks(&vb, 2 * rule.radius() + 1, budget)?;
    let gamma = rule.tabulate(&windows)?;
    let (vk, one, _, _) = recode_one_block(&vb, &pi.compose(&gamma, budget)?)?;
    let report = check_injective(&vk, &one)?;
    if !report.injective {
        return Err(Error::VerificationFailed(format!("splicing code is not injective after the channel: {:?}", report.witness)));
    }
    Ok(gamma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::find_stamp;
    use crate::instances::ti_channel;
    use crate::invariants::CyclicWord;
    use crate::shift_core::membership;

    fn ti_setup() -> (Presentation, BlockMap, Stamp) {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let y = Presentation::full_shift_over(pi.target().clone());
        let w = crate::constructions::avoiding(&y, &[0, 0]).unwrap();
        let stamp = find_stamp(&y, &w, 1, 8, &b).unwrap();
        (x, pi, stamp)
    }

    #[test]
    fn connectors_make_legal_words() {
        let (x, pi, stamp) = ti_setup();
        let c = connectors(&x, &pi, &stamp, 1).unwrap();
        assert_eq!(pi.apply(&c.mu_hat).unwrap(), stamp.word);
        for a in x.alphabet().symbols() {
            let mut w = vec![a];
            w.extend(&c.plus[&a]);
            w.extend(&c.mu_hat);
            w.extend(&c.minus[&a]);
            w.push(a);
            assert!(membership(&x, &w));
        }
    }

    #[test]
    fn ti_channel_splice_is_injective() {
        let b = Budget::default();
        let (x, pi, stamp) = ti_setup();
        let ell = stamp.word.len() + 2;
        let n = stamp.word.len();
        // data blocks lift words of the output shift avoiding 00
        let blocks = vec![vec![1; n], vec![0; 1].into_iter().chain(vec![1; n]).collect(), vec![2; n + 1]];
        let v = BlanksSpec { alphabet: x.alphabet().clone(), blocks, orbits: vec![CyclicWord::new(&[1])], n: n + 1, ell };
        let gamma = channel_embed(&v, &x, &pi, &stamp, &b).unwrap();
        assert_eq!(gamma.memory(), ell);
    }

    #[test]
    fn wrong_blank_length_is_rejected() {
        let b = Budget::default();
        let (x, pi, stamp) = ti_setup();
        let n = stamp.word.len();
        let v = BlanksSpec { alphabet: x.alphabet().clone(), blocks: vec![vec![1; n]], orbits: vec![], n, ell: n };
        assert!(matches!(channel_embed(&v, &x, &pi, &stamp, &b), Err(Error::InvalidInput(_))));
        let short = BlanksSpec { ell: n + 2, blocks: vec![vec![1; n - 1]], ..v };
        assert!(matches!(channel_embed(&short, &x, &pi, &stamp, &b), Err(Error::InvalidInput(_))));
    }
}

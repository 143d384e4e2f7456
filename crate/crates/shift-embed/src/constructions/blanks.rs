use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::{accepts_periodic, CyclicWord};
use crate::shift_core::{membership, Alphabet, Edge, Presentation, Sym, Word};

/// Data of a subshift with blanks adjoined: blank runs of length exactly `ell` separate
/// data segments that are either words of `blocks` or segments of at least `2n + 1`
/// symbols (or rays, or whole points) of an orbit in `orbits`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlanksSpec {
    /// Alphabet of the base shift, without the blank.
    pub alphabet: Alphabet,
    pub blocks: Vec<Word>,
    pub orbits: Vec<CyclicWord>,
    pub n: usize,
    pub ell: usize,
}

impl BlanksSpec {
    /// The base alphabet followed by the blank.
    pub fn blank_alphabet(&self) -> Result<Alphabet> {
        self.alphabet.extend_with_blank()
    }

    pub fn blank(&self) -> Sym {
        self.alphabet.len() as Sym
    }

    /// Shortest periodic data segment.
    pub fn min_segment(&self) -> usize {
        2 * self.n + 1
    }

    /// Checks the shape constraints, and membership in `base` when given.
    pub fn validate(&self, base: Option<&Presentation>) -> Result<()> {
        if self.alphabet.blank().is_some() {
            return Err(Error::InvalidInput("the base alphabet already contains the blank".into()));
        }
        if self.ell == 0 || self.n == 0 {
            return Err(Error::InvalidInput("blank runs and the scale must be positive".into()));
        }
        let k = self.alphabet.len() as Sym;
        for b in &self.blocks {
            if b.is_empty() || b.len() > 2 * self.n || b.iter().any(|&a| a >= k) {
                return Err(Error::InvalidInput(format!("data block {b:?} has the wrong shape")));
            }
        }
        for o in &self.orbits {
            if o.is_empty() || o.least_period() != o.len() || o.len() >= 2 * self.n || o.canonical().iter().any(|&a| a >= k) {
                return Err(Error::InvalidInput(format!("orbit {:?} has the wrong shape", o.canonical())));
            }
        }
        if let Some(base) = base {
            if base.alphabet() != &self.alphabet {
                return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", base.alphabet(), self.alphabet)));
            }
            if let Some(b) = self.blocks.iter().find(|b| !membership(base, b)) {
                return Err(Error::InvalidInput(format!("data block {} is not in the base shift", self.alphabet.render(b))));
            }
            if let Some(o) = self.orbits.iter().find(|o| !accepts_periodic(base, o.canonical())) {
                return Err(Error::InvalidInput(format!("orbit {} is not in the base shift", self.alphabet.render(o.canonical()))));
            }
        }
        Ok(())
    }
}

/// Acceptor for the blanks subshift over the base alphabet plus the blank.
///
/// Vertices: `j` blanks read (`1..=ell`); a proper or complete prefix of a data block;
/// an orbit, the phase of its next symbol and the saturating segment length so far.
pub fn blanks_shift(spec: &BlanksSpec) -> Result<Presentation> {
    spec.validate(None)?;
    if spec.blocks.is_empty() && spec.orbits.is_empty() {
        return Err(Error::EmptyShift);
    }
    let alphabet = spec.blank_alphabet()?;
    let blank = spec.blank();
    let mut names: Vec<String> = (1..=spec.ell).map(|j| format!("*{j}")).collect();
    let mut edges = Vec::new();
    let run = |j: usize| j - 1;
    for j in 1..spec.ell {
        edges.push(Edge { from: run(j), to: run(j + 1), label: blank });
    }
    let after_run = run(spec.ell);

    let mut prefix: BTreeMap<&[Sym], usize> = BTreeMap::new();
    for b in &spec.blocks {
        for i in 1..=b.len() {
            prefix.entry(&b[..i]).or_insert_with(|| {
                names.push(format!("m:{}", spec.alphabet.render(&b[..i])));
                names.len() - 1
            });
        }
    }
    for (p, &v) in &prefix {
        let from = if p.len() == 1 { after_run } else { prefix[&p[..p.len() - 1]] };
        edges.push(Edge { from, to: v, label: p[p.len() - 1] });
    }
    for b in &spec.blocks {
        edges.push(Edge { from: prefix[b.as_slice()], to: run(1), label: blank });
    }

    let cap = spec.min_segment();
    for o in &spec.orbits {
        let c = o.canonical();
        let p = c.len();
        let base = names.len();
        for r in 0..p {
            for k in 1..=cap {
                names.push(format!("q:{}:{r}:{k}", spec.alphabet.render(c)));
            }
        }
        let id = |r: usize, k: usize| base + r * cap + (k - 1);
        for (r, &a) in c.iter().enumerate() {
            edges.push(Edge { from: after_run, to: id((r + 1) % p, 1), label: a });
            for k in 1..=cap {
                edges.push(Edge { from: id(r, k), to: id((r + 1) % p, (k + 1).min(cap)), label: a });
            }
            edges.push(Edge { from: id(r, cap), to: run(1), label: blank });
        }
    }
    Presentation::new(alphabet, names, edges)
}

/// Reference check that a word over the blank alphabet is a factor of some point of the
/// blanks subshift, by splitting it into maximal blank runs and data segments.
pub fn parse_blanks(spec: &BlanksSpec, w: &[Sym]) -> bool {
    let blank = spec.blank();
    let mut pieces: Vec<(bool, &[Sym])> = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let is_blank = w[i] == blank;
        let j = (i..w.len()).find(|&j| (w[j] == blank) != is_blank).unwrap_or(w.len());
        pieces.push((is_blank, &w[i..j]));
        i = j;
    }
    let last = pieces.len().saturating_sub(1);
    pieces.iter().enumerate().all(|(idx, &(is_blank, s))| {
        let (open_left, open_right) = (idx == 0, idx == last);
        if is_blank {
            return if open_left || open_right { s.len() <= spec.ell } else { s.len() == spec.ell };
        }
        let in_orbit = |need: usize| {
            s.len() >= need
                && spec.orbits.iter().any(|o| {
                    let c = o.canonical();
                    (0..c.len()).any(|r| s.iter().enumerate().all(|(t, &a)| c[(r + t) % c.len()] == a))
                })
        };
        match (open_left, open_right) {
            (false, false) => spec.blocks.iter().any(|b| b.as_slice() == s) || in_orbit(spec.min_segment()),
            (true, false) => spec.blocks.iter().any(|b| b.ends_with(s)) || in_orbit(0),
            (false, true) => spec.blocks.iter().any(|b| b.starts_with(s)) || in_orbit(0),
            (true, true) => spec.blocks.iter().any(|b| b.windows(s.len()).any(|x| x == s)) || in_orbit(0),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::shift_core::language_blocks;

    fn spec(blocks: &[&[Sym]], orbits: &[&[Sym]], n: usize, ell: usize) -> BlanksSpec {
        BlanksSpec {
            alphabet: Alphabet::digits(2),
            blocks: blocks.iter().map(|b| b.to_vec()).collect(),
            orbits: orbits.iter().map(|o| CyclicWord::new(o)).collect(),
            n,
            ell,
        }
    }

    fn all_words(k: usize, n: usize) -> Vec<Word> {
        (0..(k as u64).pow(n as u32))
            .map(|mut x| {
                (0..n)
                    .map(|_| {
                        let a = (x % k as u64) as Sym;
                        x /= k as u64;
                        a
                    })
                    .collect()
            })
            .collect()
    }

    fn agrees_with_parser(s: &BlanksSpec) {
        let p = blanks_shift(s).unwrap();
        let b = Budget::default();
        for n in 1..=3 * s.n {
            let mut accepted = language_blocks(&p, n, &b).unwrap();
            accepted.sort();
            let mut parsed: Vec<Word> = all_words(s.alphabet.len() + 1, n).into_iter().filter(|w| parse_blanks(s, w)).collect();
            parsed.sort();
            assert_eq!(accepted, parsed, "length {n}");
        }
    }

    #[test]
    fn single_block_alternates_with_blanks() {
        let s = spec(&[&[0]], &[], 1, 1);
        let p = blanks_shift(&s).unwrap();
        let b = Budget::default();
        let words: Vec<String> = language_blocks(&p, 3, &b).unwrap().iter().map(|w| p.alphabet().render(w)).collect();
        assert_eq!(words, vec!["0*0", "*0*"]);
    }

    #[test]
    fn bi_infinite_orbit_is_a_point() {
        let s = spec(&[], &[&[0]], 2, 2);
        let p = blanks_shift(&s).unwrap();
        assert!(accepts_periodic(&p, &[0]));
        assert!(!accepts_periodic(&p, &[0, 0, 0, 0, 2, 2]));
        assert!(accepts_periodic(&p, &[0, 0, 0, 0, 0, 2, 2]));
    }

    #[test]
    fn blank_in_base_alphabet_is_rejected() {
        let mut s = spec(&[&[0]], &[], 1, 1);
        s.alphabet = Alphabet::with_blank(["0", "*"]).unwrap();
        assert!(matches!(blanks_shift(&s), Err(Error::InvalidInput(_))));
        assert_eq!(blanks_shift(&spec(&[], &[], 1, 1)), Err(Error::EmptyShift));
    }

    #[test]
    fn language_matches_reference_parser() {
        agrees_with_parser(&spec(&[&[0, 1], &[1, 1, 0], &[0]], &[], 2, 2));
        agrees_with_parser(&spec(&[&[1, 0, 1]], &[&[0], &[0, 1]], 2, 1));
        agrees_with_parser(&spec(&[&[1], &[0, 1, 1]], &[&[1]], 2, 3));
    }
}

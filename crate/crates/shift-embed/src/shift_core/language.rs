use std::collections::{BTreeSet, HashMap};

use super::alphabet::{Alphabet, Sym, Word};
use super::determinize::SubsetAutomaton;
use super::presentation::{Edge, Presentation};
use crate::codes::BlockMap;
use crate::error::{Budget, Error, Result};

/// A finite set of forbidden words over an alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenWordSet {
    pub alphabet: Alphabet,
    pub words: BTreeSet<Word>,
}

impl ForbiddenWordSet {
    pub fn new(alphabet: Alphabet, words: impl IntoIterator<Item = Word>) -> Self {
        ForbiddenWordSet {
            alphabet,
            words: words.into_iter().collect(),
        }
    }

    /// Parses forbidden words written as by [`Alphabet::render`].
    pub fn parse(alphabet: Alphabet, words: &[&str]) -> Result<Self> {
        let words = words
            .iter()
            .map(|w| alphabet.parse(w))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(alphabet, words))
    }

    fn avoids(&self, w: &[Sym]) -> bool {
        !self
            .words
            .iter()
            .any(|f| !f.is_empty() && w.windows(f.len()).any(|x| x == f.as_slice()))
    }
}

/// SFT presentation of the shift avoiding `f`: vertices are allowed (k-1)-words and
/// edges allowed k-words labeled by their last symbol, with k = max(2, longest word).
pub fn from_forbidden(f: &ForbiddenWordSet) -> Result<Presentation> {
    if f.words.iter().any(|w| w.is_empty()) {
        return Err(Error::EmptyShift);
    }
    let k = f.words.iter().map(Vec::len).max().unwrap_or(0).max(2);
    let a = f.alphabet.len() as Sym;
    let mut verts: Vec<Word> = vec![Vec::new()];
    for _ in 0..k - 1 {
        verts = verts
            .iter()
            .flat_map(|w| {
                (0..a).map(move |s| {
                    let mut v = w.clone();
                    v.push(s);
                    v
                })
            })
            .filter(|v| f.avoids(v))
            .collect();
    }
    let index: HashMap<&Word, usize> = verts.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut edges = Vec::new();
    for (i, u) in verts.iter().enumerate() {
        for s in 0..a {
            let mut w = u.clone();
            w.push(s);
            if !f.avoids(&w) {
                continue;
            }
            if let Some(&j) = index.get(&w[1..].to_vec()) {
                edges.push(Edge { from: i, to: j, label: s });
            }
        }
    }
    let names = verts.iter().map(|w| f.alphabet.render(w)).collect();
    Presentation::new(f.alphabet.clone(), names, edges)
}

/// Whether `w` is in the language of the presented shift.
pub fn membership(p: &Presentation, w: &[Sym]) -> bool {
    p.follow(w).iter().any(|&b| b)
}

/// All words of length `n` in the language, in lexicographic order.
pub fn language_blocks(p: &Presentation, n: usize, budget: &Budget) -> Result<Vec<Word>> {
    if path_count(p, n) > budget.max_words as u128 {
        let words = count_blocks(p, n, budget)?[n];
        if words > budget.max_words as u128 {
            return Err(Error::limit("language enumeration", budget.max_words));
        }
    }
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(n);
    let start = vec![true; p.vertex_count()];
    extend(p, &start, n, &mut word, &mut out, budget)?;
    Ok(out)
}

/// Number of paths of length `n`, an upper bound on `|B_n|`.
fn path_count(p: &Presentation, n: usize) -> u128 {
    let mut ending = vec![1u128; p.vertex_count()];
    for _ in 0..n {
        let mut next = vec![0u128; p.vertex_count()];
        for e in p.edges() {
            next[e.to] = next[e.to].saturating_add(ending[e.from]);
        }
        ending = next;
    }
    ending.iter().fold(0u128, |a, &b| a.saturating_add(b))
}

fn extend(
    p: &Presentation,
    cur: &[bool],
    n: usize,
    word: &mut Word,
    out: &mut Vec<Word>,
    budget: &Budget,
) -> Result<()> {
    if word.len() == n {
        out.push(word.clone());
        return budget.check_words(out.len() as u64, "language enumeration");
    }
    for a in p.alphabet().symbols() {
        let next = p.step(cur, a);
        if next.iter().any(|&b| b) {
            word.push(a);
            extend(p, &next, n, word, out, budget)?;
            word.pop();
        }
    }
    Ok(())
}

/// `|B_m|` for every `m <= n`, counted through the subset automaton.
pub fn count_blocks(p: &Presentation, n: usize, budget: &Budget) -> Result<Vec<u128>> {
    Ok(SubsetAutomaton::build(p, budget)?.count_words(n))
}

/// Presentation of the k-th higher block shift together with the conjugacy
/// (window of length k, output aligned to the window start) and its 1-block inverse.
pub fn higher_block(p: &Presentation, k: usize) -> Result<(Presentation, BlockMap, BlockMap)> {
    if k == 0 {
        return Err(Error::InvalidInput("block length must be at least 1".into()));
    }
    let mut level: Vec<(usize, Word)> = (0..p.vertex_count()).map(|v| (v, Vec::new())).collect();
    for _ in 0..k - 1 {
        let mut next = BTreeSet::new();
        for (v, u) in &level {
            for e in p.out_edges(*v) {
                let mut w = u.clone();
                w.push(e.label);
                next.insert((e.to, w));
            }
        }
        level = next.into_iter().collect();
    }
    let state: HashMap<&(usize, Word), usize> = level.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut words: BTreeSet<Word> = BTreeSet::new();
    let mut raw = Vec::new();
    for (i, (v, u)) in level.iter().enumerate() {
        for e in p.out_edges(*v) {
            let mut w = u.clone();
            w.push(e.label);
            let key = (e.to, w[1..].to_vec());
            let j = state[&key];
            words.insert(w.clone());
            raw.push((i, j, w));
        }
    }
    let words: Vec<Word> = words.into_iter().collect();
    let sym: HashMap<&Word, Sym> = words.iter().enumerate().map(|(i, w)| (w, i as Sym)).collect();
    let alphabet = p.alphabet().of_words(&words)?;
    let edges = raw
        .iter()
        .map(|(i, j, w)| Edge { from: *i, to: *j, label: sym[w] })
        .collect();
    let names = level
        .iter()
        .map(|(v, u)| {
            if k == 1 {
                p.vertex_names()[*v].clone()
            } else {
                format!("{}:{}", p.vertex_names()[*v], p.alphabet().render(u))
            }
        })
        .collect();
    let hb = Presentation::new(alphabet.clone(), names, edges)?;
    let encode = BlockMap::tabulate(p.alphabet(), &alphabet, 0, k - 1, &words, |w| sym[&w.to_vec()])?;
    let decode = BlockMap::one_block(&alphabet, p.alphabet(), |s| words[s as usize][0]);
    Ok((hb, encode, decode))
}

/// The n-th Markov approximation: the SFT allowing exactly the oracle's n-blocks.
pub fn markov_approximation(
    alphabet: &Alphabet,
    blocks: impl Fn(usize) -> Result<Vec<Word>>,
    n: usize,
) -> Result<Presentation> {
    if n == 0 {
        return Err(Error::InvalidInput("approximation order must be at least 1".into()));
    }
    let top: BTreeSet<Word> = blocks(n)?.into_iter().collect();
    if top.iter().any(|w| w.len() != n) {
        return Err(Error::InconsistentOracle(format!("oracle returned a word of wrong length for n = {n}")));
    }
    if n == 1 {
        let edges = top.iter().map(|w| Edge { from: 0, to: 0, label: w[0] }).collect();
        return Presentation::from_edges(alphabet.clone(), 1, edges);
    }
    let lower: BTreeSet<Word> = blocks(n - 1)?.into_iter().collect();
    let index: HashMap<&Word, usize> = lower.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut edges = Vec::new();
    for w in &top {
        let (Some(&i), Some(&j)) = (index.get(&w[..n - 1].to_vec()), index.get(&w[1..].to_vec())) else {
            return Err(Error::InconsistentOracle(format!(
                "block {} has a subblock missing at length {}",
                alphabet.render(w),
                n - 1
            )));
        };
        edges.push(Edge { from: i, to: j, label: w[n - 1] });
    }
    let names = lower.iter().map(|w| alphabet.render(w)).collect();
    Presentation::new(alphabet.clone(), names, edges)
}

/// Markov approximation using a presentation's own language as the oracle.
pub fn markov_of(p: &Presentation, n: usize, budget: &Budget) -> Result<Presentation> {
    markov_approximation(p.alphabet(), |m| language_blocks(p, m, budget), n)
}

/// Label sequence of a uniform random walk of `len` steps from a uniform vertex.
pub fn random_word(p: &Presentation, len: usize, rng: &mut impl rand::Rng) -> Word {
    let out: Vec<Vec<&Edge>> = (0..p.vertex_count()).map(|v| p.out_edges(v).collect()).collect();
    let mut v = rng.gen_range(0..p.vertex_count());
    (0..len)
        .map(|_| {
            let e = out[v][rng.gen_range(0..out[v].len())];
            v = e.to;
            e.label
        })
        .collect()
}

/// Label product: presents the intersection of the two shifts.
pub fn intersect(p: &Presentation, q: &Presentation) -> Result<Presentation> {
    if p.alphabet() != q.alphabet() {
        return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", p.alphabet(), q.alphabet())));
    }
    let m = q.vertex_count();
    let mut edges = Vec::new();
    for a in p.alphabet().symbols() {
        for e in p.edges_labeled(a) {
            for f in q.edges_labeled(a) {
                edges.push(Edge {
                    from: e.from * m + f.from,
                    to: e.to * m + f.to,
                    label: a,
                });
            }
        }
    }
    let names = (0..p.vertex_count() * m)
        .map(|i| format!("({},{})", p.vertex_names()[i / m], q.vertex_names()[i % m]))
        .collect();
    Presentation::new(p.alphabet().clone(), names, edges)
}

#[cfg(test)]
pub(crate) mod fixtures {
    pub use crate::instances::{even_shift, golden_mean};
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn all_words(k: u32, n: usize) -> Vec<Word> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..k).map(move |a| {
                        let mut v = w.clone();
                        v.push(a);
                        v
                    })
                })
                .collect();
        }
        out
    }

    /// Reference: words avoiding the forbidden list that extend to length n + 2r on both
    /// sides, r large enough for a 1-step or 2-step SFT to be exact.
    fn brute_language(f: &ForbiddenWordSet, n: usize) -> Vec<Word> {
        let k = f.alphabet.len() as u32;
        let pad = 4;
        let long: Vec<Word> = all_words(k, n + 2 * pad).into_iter().filter(|w| f.avoids(w)).collect();
        let mut set: BTreeSet<Word> = BTreeSet::new();
        for w in long {
            set.insert(w[pad..pad + n].to_vec());
        }
        set.into_iter().collect()
    }

    #[test]
    fn golden_mean_from_forbidden() {
        let gm = golden_mean();
        assert_eq!(gm.vertex_count(), 2);
        assert_eq!(gm.edges().len(), 3);
        assert!(gm.sft_flag() && gm.is_one_step());
        let f = ForbiddenWordSet::parse(Alphabet::digits(2), &["11"]).unwrap();
        let b = Budget::default();
        for n in 0..=8 {
            assert_eq!(language_blocks(&gm, n, &b).unwrap(), brute_language(&f, n));
        }
    }

    #[test]
    fn forbidden_edge_cases() {
        let one = from_forbidden(&ForbiddenWordSet::new(Alphabet::new(["a"]).unwrap(), [])).unwrap();
        assert_eq!(one.vertex_count(), 1);
        assert_eq!(one.edges().len(), 1);
        let none = ForbiddenWordSet::parse(Alphabet::digits(2), &["0", "1"]).unwrap();
        assert_eq!(from_forbidden(&none), Err(Error::EmptyShift));
    }

    #[test]
    fn three_step_forbidden_language() {
        let f = ForbiddenWordSet::parse(Alphabet::digits(2), &["111", "0100"]).unwrap();
        let p = from_forbidden(&f).unwrap();
        assert!(p.sft_flag());
        assert!(!p.is_one_step());
        let b = Budget::default();
        for n in 0..=7 {
            assert_eq!(language_blocks(&p, n, &b).unwrap(), brute_language(&f, n));
        }
    }

    #[test]
    fn membership_examples() {
        let gm = golden_mean();
        let a = gm.alphabet().clone();
        assert!(!membership(&gm, &a.parse("0110").unwrap()));
        assert!(membership(&gm, &a.parse("0101").unwrap()));
        assert!(!membership(&even_shift(), &a.parse("101").unwrap()));
        assert!(membership(&even_shift(), &a.parse("1001").unwrap()));
    }

    #[test]
    fn block_lists_and_counts() {
        let b = Budget::default();
        let gm = golden_mean();
        let a = gm.alphabet().clone();
        let two: Vec<String> = language_blocks(&gm, 2, &b).unwrap().iter().map(|w| a.render(w)).collect();
        assert_eq!(two, ["00", "01", "10"]);
        assert_eq!(language_blocks(&Presentation::full_shift(2), 3, &b).unwrap().len(), 8);
        assert_eq!(count_blocks(&gm, 6, &b).unwrap(), vec![1, 2, 3, 5, 8, 13, 21]);
        let tight = Budget { max_words: 5, ..b };
        assert!(language_blocks(&Presentation::full_shift(2), 3, &tight).unwrap_err().is_resource_limit());
    }

    #[test]
    fn higher_block_shapes_and_round_trip() {
        let b = Budget::default();
        let gm = golden_mean();
        let (h1, e1, d1) = higher_block(&gm, 1).unwrap();
        assert_eq!(h1.edges().len(), 3);
        assert!(e1.is_one_block() && d1.is_one_block());
        let (h2, enc, dec) = higher_block(&gm, 2).unwrap();
        assert_eq!(h2.alphabet().names(), ["00", "01", "10"]);
        assert!(h2.is_one_step());
        for w in language_blocks(&gm, 12, &b).unwrap() {
            let up = enc.apply(&w).unwrap();
            assert!(membership(&h2, &up));
            assert_eq!(dec.apply(&up).unwrap(), w[..w.len() - 1].to_vec());
        }
        let (h3, _, _) = higher_block(&Presentation::full_shift(2), 3).unwrap();
        assert_eq!(h3.alphabet().len(), 8);
    }

    #[test]
    fn markov_approximations() {
        let b = Budget::default();
        let gm = golden_mean();
        let m2 = markov_of(&gm, 2, &b).unwrap();
        for n in 0..=8 {
            assert_eq!(language_blocks(&m2, n, &b).unwrap(), language_blocks(&gm, n, &b).unwrap());
        }
        let even = even_shift();
        let e2 = markov_of(&even, 2, &b).unwrap();
        let w = even.alphabet().parse("101").unwrap();
        assert!(membership(&e2, &w) && !membership(&even, &w));
        let e3 = markov_of(&even, 3, &b).unwrap();
        for m in 0..=8 {
            let big: BTreeSet<Word> = language_blocks(&e2, m, &b).unwrap().into_iter().collect();
            for w in language_blocks(&e3, m, &b).unwrap() {
                assert!(big.contains(&w));
            }
        }
        let bad = markov_approximation(&Alphabet::digits(2), |n| Ok(if n == 2 { vec![vec![0, 1]] } else { vec![vec![0]] }), 2);
        assert!(matches!(bad, Err(Error::InconsistentOracle(_))));
    }

    #[test]
    fn intersections() {
        let b = Budget::default();
        let gm = golden_mean();
        let same = intersect(&gm, &gm).unwrap();
        for n in 0..=8 {
            assert_eq!(language_blocks(&same, n, &b).unwrap(), language_blocks(&gm, n, &b).unwrap());
        }
        let no00 = from_forbidden(&ForbiddenWordSet::parse(Alphabet::digits(2), &["00"]).unwrap()).unwrap();
        let alt = intersect(&gm, &no00).unwrap();
        assert_eq!(language_blocks(&alt, 6, &b).unwrap().len(), 2);
        let no0 = from_forbidden(&ForbiddenWordSet::parse(Alphabet::digits(2), &["0"]).unwrap()).unwrap();
        assert_eq!(intersect(&gm, &no0), Err(Error::EmptyShift));
    }
}

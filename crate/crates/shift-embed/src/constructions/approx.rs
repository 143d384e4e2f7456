use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::gap::{gap_sft, gap_sft_entropy_bound, GapSft};
use crate::codes::BlockMap;
use crate::combinatorics::{find_stamp, max_self_overlap, Matcher, Stamp};
use crate::error::{Budget, Error, Result};
use crate::shift_core::{
    determinize, entropy, language_blocks, language_included, markov_of, structure, Edge, Interval, Presentation,
    Word,
};

const MAX_BLOCK: usize = 160;
const EXTRA_SYNC: usize = 8;
const CANDIDATES_PER_LENGTH: usize = 6;

/// An SFT inside a sofic shift, with the entropy of both.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InnerApproximation {
    #[serde(skip)]
    pub presentation: Option<Presentation>,
    /// Word opening every block, absent when the input was returned unchanged.
    pub sync_word: Option<Word>,
    pub block_length: Option<usize>,
    pub h_y: Interval,
    pub h_u: Interval,
    pub language_included: bool,
}

impl InnerApproximation {
    pub fn shift(&self) -> &Presentation {
        self.presentation.as_ref().expect("built with a presentation")
    }
}

/// Shortest word after which a right-resolving presentation is in a single vertex.
pub fn synchronizing_word(d: &Presentation, budget: &Budget) -> Result<(Word, usize)> {
    let start = vec![true; d.vertex_count()];
    let mut parent: HashMap<Vec<bool>, Option<(Vec<bool>, u32)>> = HashMap::from([(start.clone(), None)]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let live: Vec<usize> = (0..cur.len()).filter(|&v| cur[v]).collect();
        if live.len() == 1 {
            let mut word = Vec::new();
            let mut at = cur;
            while let Some(Some((prev, a))) = parent.get(&at) {
                word.push(*a);
                at = prev.clone();
            }
            word.reverse();
            return Ok((word, live[0]));
        }
        for a in d.alphabet().symbols() {
            let next = d.step(&cur, a);
            if next.iter().any(|&b| b) && !parent.contains_key(&next) {
                parent.insert(next.clone(), Some((cur.clone(), a)));
                budget.check_states(parent.len(), "synchronizing word search")?;
                queue.push_back(next);
            }
        }
    }
    Err(Error::NoSynchronizingWord)
}

/// Points of `d` cut into blocks of length `len` that begin with `s`, where `s` occurs
/// nowhere else. Vertices track the `d` vertex, the matched prefix of `s` and the block
/// position.
fn marked_blocks(d: &Presentation, s: &[u32], len: usize) -> Result<Presentation> {
    let m = Matcher::new(s);
    let (nd, ns) = (d.vertex_count(), s.len());
    let id = |v: usize, k: usize, j: usize| (v * ns + k) * len + j;
    let mut edges = Vec::new();
    for e in d.edges() {
        for k in 0..ns {
            let (k2, hit) = m.step(k, e.label);
            for j in 0..len {
                if hit != (j == (ns - 1) % len) {
                    continue;
                }
                edges.push(Edge {
                    from: id(e.from, k, j),
                    to: id(e.to, k2, (j + 1) % len),
                    label: e.label,
                });
            }
        }
    }
    let names = (0..nd * ns * len)
        .map(|i| format!("{}.{}.{}", i / (ns * len), (i / len) % ns, i % len))
        .collect();
    Presentation::new(d.alphabet().clone(), names, edges)
}

/// Number of blocks: closed walks of length `len` through the vertex reached right
/// after `s`, saturating.
fn block_count(d: &Presentation, s: &[u32], len: usize) -> u128 {
    let Some(v) = d.follow(s).iter().position(|&b| b) else {
        return 0;
    };
    let m = Matcher::new(s);
    let k0 = s.iter().fold(0, |k, &a| m.step(k, a).0);
    let (nd, ns) = (d.vertex_count(), s.len());
    let mut count = vec![0u128; nd * ns];
    count[v * ns + k0] = 1;
    for step in 0..len {
        let j = (ns + step) % len;
        let mut next = vec![0u128; nd * ns];
        for e in d.edges() {
            for k in 0..ns {
                let c = count[e.from * ns + k];
                if c == 0 {
                    continue;
                }
                let (k2, hit) = m.step(k, e.label);
                if hit == (j == (ns - 1) % len) {
                    next[e.to * ns + k2] = next[e.to * ns + k2].saturating_add(c);
                }
            }
        }
        count = next;
    }
    count[v * ns + k0]
}

/// Entropy of a full shift on `blocks` words of length `len`.
fn block_entropy(blocks: u128, len: usize) -> Interval {
    let h = (blocks as f64).ln() / len as f64;
    Interval {
        lo: h.next_down().next_down().max(0.0),
        hi: h.next_up().next_up(),
    }
}

/// Synchronizing words of `d` with no proper border, shortest first.
fn marker_words(d: &Presentation, budget: &Budget) -> Result<Vec<Word>> {
    let (s0, _) = synchronizing_word(d, budget)?;
    let mut out = Vec::new();
    for m in s0.len().max(1)..=s0.len().max(1) + EXTRA_SYNC {
        let found = language_blocks(d, m, budget)?
            .into_iter()
            .filter(|w| max_self_overlap(w) == 0 && d.follow(w).iter().filter(|&&b| b).count() == 1)
            .take(CANDIDATES_PER_LENGTH);
        out.extend(found);
    }
    Ok(out)
}

/// SFT of fixed-length blocks opened by a synchronizing word, with entropy above `target`.
/// The blocks parse uniquely, so the result is conjugate to a full shift on the blocks.
pub fn marked_block_sft(y: &Presentation, target: f64, budget: &Budget) -> Result<InnerApproximation> {
    let h_y = entropy(y, 1e-9, budget)?;
    let d = determinize(y, budget)?;
    let words = marker_words(&d, budget)?;
    for len in 2..=MAX_BLOCK {
        for s in words.iter().filter(|s| s.len() < len) {
            let blocks = block_count(&d, s, len);
            if blocks == u128::MAX {
                return Err(Error::limit("marked block count", u128::MAX as u64));
            }
            let h_u = block_entropy(blocks, len);
            if h_u.lo <= target {
                continue;
            }
            let u = marked_blocks(&d, s, len)?;
            if !language_included(&u, y, budget)? {
                return Err(Error::VerificationFailed("marked blocks left the language".into()));
            }
            return Ok(InnerApproximation {
                presentation: Some(u),
                sync_word: Some(s.clone()),
                block_length: Some(len),
                h_y,
                h_u,
                language_included: true,
            });
        }
    }
    Err(Error::limit("marked block length", MAX_BLOCK as u64))
}

/// Irreducible SFT inside `y` with entropy above `h(y) - epsilon`; `y` itself when it is
/// already of finite type.
pub fn inner_sft_approximation(y: &Presentation, epsilon: f64, budget: &Budget) -> Result<InnerApproximation> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let h_y = entropy(y, 1e-9, budget)?;
    if h_y.hi <= 0.0 {
        return Err(Error::InvalidInput("the shift has zero entropy".into()));
    }
    if y.sft_flag() {
        return Ok(InnerApproximation {
            presentation: Some(y.clone()),
            sync_word: None,
            block_length: None,
            h_y,
            h_u: h_y,
            language_included: true,
        });
    }
    marked_block_sft(y, h_y.hi - epsilon, budget)
}

/// A mixing SFT containing a subshift, with the 1-block inclusion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingCover {
    #[serde(skip)]
    pub presentation: Option<Presentation>,
    pub inclusion: BlockMap,
    pub markov_order: usize,
    pub stamp: Option<Stamp>,
    pub gap: Option<GapSft>,
    pub h_z: Interval,
    pub h_v: Interval,
    /// Whether the language of the input was checked to lie in the cover; `None` when the
    /// check ran out of budget.
    pub contains_input: Option<bool>,
}

impl MixingCover {
    pub fn shift(&self) -> &Presentation {
        self.presentation.as_ref().expect("built with a presentation")
    }
}

/// Mixing SFT `V ⊇ z` with `h(V) < h(z) + epsilon`: a Markov approximation close in
/// entropy, then stamp-separated blocks of it inside the full shift.
pub fn embed_into_mixing(z: &Presentation, epsilon: f64, budget: &Budget) -> Result<MixingCover> {
    const MAX_ORDER: usize = 24;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let h_z = entropy(z, 1e-9, budget)?;
    let full = Presentation::full_shift_over(z.alphabet().clone());
    let inclusion = BlockMap::identity(z.alphabet());
    let (order, zm) = (1..=MAX_ORDER)
        .find_map(|m| {
            let zm = markov_of(z, m, budget);
            match zm.and_then(|zm| Ok((entropy(&zm, 1e-9, budget)?, zm))) {
                Ok((h, zm)) if h.hi < h_z.lo + epsilon / 2.0 => Some(Ok((m, zm))),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            }
        })
        .ok_or_else(|| Error::limit("Markov approximation order", MAX_ORDER as u64))??;
    if language_included(&full, &zm, budget)? {
        let h_v = entropy(&full, 1e-9, budget)?;
        return Ok(MixingCover {
            presentation: Some(full),
            inclusion,
            markov_order: order,
            stamp: None,
            gap: None,
            h_z,
            h_v,
            contains_input: Some(true),
        });
    }
    let g = structure(&full, budget)?.gap.unwrap_or(1);
    let stamp = find_stamp(&full, &zm, g, 16, budget)?;
    let bound = gap_sft_entropy_bound(&full, &zm, &stamp, epsilon / 2.0, budget)?;
    let v = gap_sft(&full, &zm, &stamp, bound.n, budget)?;
    let h_v = entropy(v.shift(), 1e-9, budget)?;
    if h_v.hi >= h_z.lo + epsilon {
        return Err(Error::VerificationFailed(format!("entropy {} not below {}", h_v.hi, h_z.lo + epsilon)));
    }
    let contains_input = match language_included(z, v.shift(), budget) {
        Ok(b) => Some(b),
        Err(e) if e.is_resource_limit() => None,
        Err(e) => return Err(e),
    };
    if contains_input == Some(false) {
        return Err(Error::VerificationFailed("the cover misses words of the input".into()));
    }
    Ok(MixingCover {
        presentation: v.presentation.clone(),
        inclusion,
        markov_order: order,
        stamp: Some(stamp),
        gap: Some(v),
        h_z,
        h_v,
        contains_input,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::fixtures::{even_shift, golden_mean};
    use crate::shift_core::{count_blocks, membership, random_word};
    use rand::SeedableRng;

    #[test]
    fn synchronizing_word_of_even_shift() {
        let b = Budget::default();
        let d = determinize(&even_shift(), &b).unwrap();
        let (w, v) = synchronizing_word(&d, &b).unwrap();
        assert_eq!(w, vec![1]);
        assert_eq!(d.follow(&w).iter().position(|&x| x), Some(v));
    }

    #[test]
    fn block_count_matches_the_language() {
        let b = Budget::default();
        let d = determinize(&even_shift(), &b).unwrap();
        for (s, len) in [(vec![1u32, 0, 0], 7), (vec![1, 1, 0], 9)] {
            let u = marked_blocks(&d, &s, len).unwrap();
            let framed = language_blocks(&u, len + s.len(), &b)
                .unwrap()
                .into_iter()
                .filter(|w| w.starts_with(&s) && w.ends_with(&s))
                .count();
            assert_eq!(block_count(&d, &s, len), framed as u128, "{s:?} {len}");
        }
    }

    #[test]
    fn even_shift_inner_approximation() {
        let b = Budget::default();
        let y = even_shift();
        let u = inner_sft_approximation(&y, 0.1, &b).unwrap();
        assert!(u.h_u.lo > u.h_y.hi - 0.1);
        assert!(u.shift().sft_flag());
        assert!(structure(u.shift(), &b).unwrap().irreducible);
        assert!(language_included(u.shift(), &y, &b).unwrap());
        let s = u.sync_word.clone().unwrap();
        let len = u.block_length.unwrap();
        // the opening word recurs exactly every block
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let w = random_word(u.shift(), 3 * len, &mut rng);
            let occ: Vec<usize> = crate::combinatorics::occurrences(&w, &s);
            assert!(occ.windows(2).all(|p| p[1] - p[0] == len), "{w:?}");
        }
    }

    #[test]
    fn sft_input_is_returned_unchanged() {
        let b = Budget::default();
        let u = inner_sft_approximation(&golden_mean(), 0.1, &b).unwrap();
        assert_eq!(u.shift(), &golden_mean());
        assert!(u.sync_word.is_none());
    }

    #[test]
    fn zero_entropy_is_rejected() {
        let b = Budget::default();
        assert!(matches!(inner_sft_approximation(&Presentation::full_shift(1), 0.1, &b), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn full_shift_covers_itself() {
        let b = Budget::default();
        let c = embed_into_mixing(&Presentation::full_shift(2), 0.1, &b).unwrap();
        assert_eq!(c.shift(), &Presentation::full_shift(2));
        assert!(c.stamp.is_none());
    }

    #[test]
    fn two_fixed_points() {
        let b = Budget::default();
        let z = Presentation::from_triples(&["0", "1"], &[("p", "p", "0"), ("q", "q", "1")]).unwrap();
        let c = embed_into_mixing(&z, 0.5, &b).unwrap();
        assert!(c.h_v.hi < 0.5);
        assert!(structure(c.shift(), &b).unwrap().mixing);
        assert_eq!(c.contains_input, Some(true));
        assert!(membership(c.shift(), &[0; 20]) && membership(c.shift(), &[1; 20]));
        assert!(count_blocks(c.shift(), 6, &b).unwrap()[6] < 64);
    }

    #[test]
    fn golden_mean_cover() {
        let b = Budget::default();
        let c = embed_into_mixing(&golden_mean(), 0.05, &b).unwrap();
        assert!(c.h_v.hi < c.h_z.lo + 0.05);
        assert!(structure(c.shift(), &b).unwrap().mixing);
        assert_ne!(c.contains_input, Some(false));
        assert!(language_included(&golden_mean(), c.shift(), &b).unwrap());
    }
}

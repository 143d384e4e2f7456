use crate::error::{Error, Result};
use crate::shift_core::{membership, Edge, Presentation, Sym};

/// Automaton state of a longest-prefix matcher for `pattern`.
pub(crate) struct Matcher {
    pattern: Vec<Sym>,
    fail: Vec<usize>,
}

impl Matcher {
    pub(crate) fn new(pattern: &[Sym]) -> Self {
        let mut fail = vec![0usize; pattern.len()];
        let mut k = 0;
        for i in 1..pattern.len() {
            while k > 0 && pattern[i] != pattern[k] {
                k = fail[k - 1];
            }
            if pattern[i] == pattern[k] {
                k += 1;
            }
            fail[i] = k;
        }
        Matcher {
            pattern: pattern.to_vec(),
            fail,
        }
    }

    /// Next matched-prefix length and whether a full occurrence just ended.
    pub(crate) fn step(&self, state: usize, a: Sym) -> (usize, bool) {
        let mut k = state;
        while k > 0 && self.pattern[k] != a {
            k = self.fail[k - 1];
        }
        if self.pattern[k] == a {
            k += 1;
        }
        if k == self.pattern.len() {
            (self.fail[k - 1], true)
        } else {
            (k, false)
        }
    }
}

/// Points of `y` in which `theta` occurs inside every window of length `n`.
pub fn syndetic_subshift(y: &Presentation, theta: &[Sym], n: usize) -> Result<Presentation> {
    if theta.is_empty() || theta.len() > n {
        return Err(Error::InvalidInput(format!("need 1 ≤ |θ| ≤ n, got |θ| = {} and n = {n}", theta.len())));
    }
    if !membership(y, theta) {
        return Err(Error::InvalidInput(format!("θ = {} is not a word of Y", y.alphabet().render(theta))));
    }
    let m = Matcher::new(theta);
    // symbols read since the last occurrence ended; the next one must end within slack + 1
    let slack = n - theta.len();
    let (vy, kmp, waits) = (y.vertex_count(), theta.len(), slack + 1);
    let id = |v: usize, k: usize, w: usize| (v * kmp + k) * waits + w;
    let mut edges = Vec::new();
    for e in y.edges() {
        for k in 0..kmp {
            let (next, hit) = m.step(k, e.label);
            for w in 0..waits {
                let to = if hit {
                    0
                } else if w < slack {
                    w + 1
                } else {
                    continue;
                };
                edges.push(Edge {
                    from: id(e.from, k, w),
                    to: id(e.to, next, to),
                    label: e.label,
                });
            }
        }
    }
    let names = (0..vy * kmp * waits)
        .map(|i| format!("{}|{}|{}", y.vertex_names()[i / (kmp * waits)], i / waits % kmp, i % waits))
        .collect();
    Presentation::new(y.alphabet().clone(), names, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::invariants::count_periodic;
    use crate::shift_core::fixtures::golden_mean;
    use crate::shift_core::{entropy, language_blocks, language_included};

    #[test]
    fn ones_every_two_is_golden_mean_like() {
        let b = Budget::default();
        let s = syndetic_subshift(&Presentation::full_shift(2), &[1], 2).unwrap();
        let gm = golden_mean();
        let flipped = gm.relabel(gm.alphabet().clone(), |a| 1 - a).unwrap();
        assert!(language_included(&s, &flipped, &b).unwrap() && language_included(&flipped, &s, &b).unwrap());
        let h = entropy(&s, 1e-9, &b).unwrap();
        assert!(h.contains(((1.0 + 5f64.sqrt()) / 2.0).ln()));
    }

    #[test]
    fn fixed_point_stays_fixed() {
        let b = Budget::default();
        let f = Presentation::full_shift(1);
        let s = syndetic_subshift(&f, &[0], 1).unwrap();
        assert_eq!(language_blocks(&s, 5, &b).unwrap(), vec![vec![0; 5]]);
    }

    #[test]
    fn double_ones_every_three() {
        let b = Budget::default();
        let s = syndetic_subshift(&Presentation::full_shift(2), &[1, 1], 3).unwrap();
        let c = count_periodic(&s, 4, &b).unwrap();
        assert_eq!(c.q(1), 1);
        // brute force: every 3-window of allowed words of length 8 contains 11
        let full = language_blocks(&Presentation::full_shift(2), 8, &b).unwrap();
        let expect: Vec<_> = full
            .into_iter()
            .filter(|w| w.windows(3).all(|t| t.windows(2).any(|p| p == [1, 1])))
            .collect();
        let got = language_blocks(&s, 8, &b).unwrap();
        assert!(got.iter().all(|w| expect.contains(w)));
    }

    #[test]
    fn windows_are_syndetic() {
        let b = Budget::default();
        let s = syndetic_subshift(&golden_mean(), &[0, 1], 4).unwrap();
        for w in language_blocks(&s, 10, &b).unwrap() {
            assert!(w.windows(4).all(|t| t.windows(2).any(|p| p == [0, 1])));
        }
    }
}

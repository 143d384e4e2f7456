use serde::{Deserialize, Serialize};

use crate::error::{Budget, Error, Result};
use crate::shift_core::{language_blocks, membership, Presentation, Sym, Word};

/// A word of `Y` outside the language of `W` that occurs exactly once in every
/// context `u₁ v₁ μ v₂ u₂` with `uᵢ` words of `W` and `vᵢ` words of `Y` of length `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stamp {
    pub word: Word,
    pub context_k: usize,
    pub check: StampCheck,
}

/// A context in which the candidate occurs the wrong number of times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StampViolation {
    pub context: Word,
    pub occurrences: Vec<usize>,
    pub expected: usize,
}

/// Outcome of a stamp verification with the amount of work done.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StampCheck {
    pub valid: bool,
    pub len_bound: usize,
    pub contexts_checked: u64,
    pub sandwiches_checked: u64,
    pub violation: Option<StampViolation>,
    pub reason: Option<String>,
}

impl StampCheck {
    fn reject(len_bound: usize, reason: &str) -> Self {
        StampCheck {
            valid: false,
            len_bound,
            contexts_checked: 0,
            sandwiches_checked: 0,
            violation: None,
            reason: Some(reason.to_string()),
        }
    }
}

pub(crate) fn occurrences(text: &[Sym], pattern: &[Sym]) -> Vec<usize> {
    if pattern.is_empty() || text.len() < pattern.len() {
        return Vec::new();
    }
    text.windows(pattern.len())
        .enumerate()
        .filter(|(_, w)| *w == pattern)
        .map(|(i, _)| i)
        .collect()
}

/// Words of `p` of every length in `0..=max`.
fn words_up_to(p: &Presentation, max: usize, budget: &Budget) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for n in 0..=max {
        out.extend(language_blocks(p, n, budget)?);
    }
    Ok(out)
}

/// Checks the stamp property of `mu` for `W`-words up to `len_bound` on either side and the
/// two-occurrence property of `μ γ⁻ w γ⁺ μ` for `W`-words `w` with `|μ| ≤ |w| ≤ |μ| + 2`.
///
/// A second occurrence of μ cannot lie inside a `W`-word, so it meets `v₁ μ v₂` and only the
/// last (first) `|μ| - 1` symbols of `u₁` (`u₂`) matter; longer `uᵢ` repeat these cases.
/// Left and right extra occurrences are independent and are checked separately.
pub fn verify_stamp(y: &Presentation, w: &Presentation, k: usize, mu: &[Sym], len_bound: usize, budget: &Budget) -> Result<StampCheck> {
    if mu.is_empty() || !membership(y, mu) {
        return Ok(StampCheck::reject(len_bound, "not a word of Y"));
    }
    if membership(w, mu) {
        return Ok(StampCheck::reject(len_bound, "a word of W"));
    }
    let reach = len_bound.min(mu.len() - 1);
    let us = words_up_to(w, reach, budget)?;
    let vs = language_blocks(y, k, budget)?;
    let mut check = StampCheck {
        valid: true,
        len_bound,
        contexts_checked: 0,
        sandwiches_checked: 0,
        violation: None,
        reason: None,
    };
    let fail = |context: Word, expected: usize, found: Vec<usize>, check: &mut StampCheck| {
        check.valid = false;
        check.violation = Some(StampViolation {
            context,
            occurrences: found,
            expected,
        });
    };
    for u in &us {
        for v in &vs {
            let mut left = u.clone();
            left.extend(v);
            left.extend(mu);
            let mut right = mu.to_vec();
            right.extend(v);
            right.extend(u);
            for ctx in [left, right] {
                check.contexts_checked += 1;
                budget.check_words(check.contexts_checked, "stamp contexts")?;
                let occ = occurrences(&ctx, mu);
                if occ.len() != 1 {
                    fail(ctx, 1, occ, &mut check);
                    return Ok(check);
                }
            }
        }
    }
    for len in mu.len()..=mu.len() + 2 {
        for mid in language_blocks(w, len, budget)? {
            for g1 in &vs {
                for g2 in &vs {
                    let mut s = mu.to_vec();
                    s.extend(g1);
                    s.extend(&mid);
                    s.extend(g2);
                    s.extend(mu);
                    check.sandwiches_checked += 1;
                    budget.check_words(check.sandwiches_checked, "stamp sandwiches")?;
                    let occ = occurrences(&s, mu);
                    if occ.len() != 2 {
                        fail(s, 2, occ, &mut check);
                        return Ok(check);
                    }
                }
            }
        }
    }
    Ok(check)
}

/// Shortest stamp, searching lengths upward and each length in lexicographic order.
pub fn find_stamp(y: &Presentation, w: &Presentation, k: usize, max_len: usize, budget: &Budget) -> Result<Stamp> {
    let mut examined = 0u64;
    for n in 1..=max_len {
        for mu in language_blocks(y, n, budget)? {
            if membership(w, &mu) {
                continue;
            }
            examined += 1;
            let check = verify_stamp(y, w, k, &mu, (2 * mu.len()).max(16), budget)?;
            if check.valid {
                return Ok(Stamp {
                    word: mu,
                    context_k: k,
                    check,
                });
            }
        }
    }
    Err(Error::NotFound(format!(
        "no stamp of length ≤ {max_len} ({examined} candidates outside W examined)"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::fixtures::even_shift;

    fn zeros() -> Presentation {
        Presentation::full_shift(1).relabel(crate::shift_core::Alphabet::digits(2), |_| 0).unwrap()
    }

    /// Literal check over every context with `|uᵢ| ≤ bound`.
    fn brute(y: &Presentation, w: &Presentation, k: usize, mu: &[Sym], bound: usize) -> bool {
        let b = Budget::default();
        let us = words_up_to(w, bound, &b).unwrap();
        let vs = language_blocks(y, k, &b).unwrap();
        for u1 in &us {
            for v1 in &vs {
                for v2 in &vs {
                    for u2 in &us {
                        let ctx: Word = [u1, v1, &mu.to_vec(), v2, u2].iter().flat_map(|s| s.iter().copied()).collect();
                        if occurrences(&ctx, mu).len() != 1 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn full_shift_over_zero_point() {
        let b = Budget::default();
        let y = Presentation::full_shift(2);
        let s = find_stamp(&y, &zeros(), 1, 8, &b).unwrap();
        assert_eq!(y.alphabet().render(&s.word), "011");
        assert!(s.check.valid);
        assert!(brute(&y, &zeros(), 1, &s.word, 7));
    }

    #[test]
    fn reduced_check_agrees_with_brute_force() {
        let b = Budget::default();
        let y = Presentation::full_shift(2);
        let w = even_shift();
        for n in 1..=6 {
            for mu in language_blocks(&y, n, &b).unwrap() {
                if membership(&w, &mu) {
                    continue;
                }
                let fast = verify_stamp(&y, &w, 1, &mu, 8, &b).unwrap();
                let stamp_only = brute(&y, &w, 1, &mu, n + 1);
                if fast.valid {
                    assert!(stamp_only, "{:?}", mu);
                } else if fast.violation.as_ref().is_some_and(|v| v.expected == 1) {
                    assert!(!stamp_only, "{:?}", mu);
                }
            }
        }
    }

    #[test]
    fn rejections() {
        let b = Budget::default();
        let y = Presentation::full_shift(2);
        let c = verify_stamp(&y, &y, 1, &[1, 1], 8, &b).unwrap();
        assert!(!c.valid && c.reason.as_deref() == Some("a word of W"));
        assert!(matches!(find_stamp(&y, &y, 1, 4, &b), Err(Error::NotFound(_))));
        let c = verify_stamp(&y, &zeros(), 1, &[1], 8, &b).unwrap();
        assert!(!c.valid);
        let v = c.violation.unwrap();
        assert!(v.occurrences.len() > 1);
    }

    #[test]
    fn stamp_against_even_shift() {
        let b = Budget::default();
        let y = Presentation::full_shift(2);
        let s = find_stamp(&y, &even_shift(), 2, 12, &b).unwrap();
        assert!(s.word.len() <= 12);
        assert!(verify_stamp(&y, &even_shift(), 2, &s.word, (2 * s.word.len()).max(16), &b).unwrap().valid);
    }
}

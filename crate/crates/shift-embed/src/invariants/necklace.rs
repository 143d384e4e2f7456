use serde::{Deserialize, Serialize};

use crate::error::{Budget, Result};
use crate::shift_core::{Presentation, Sym, Word};

/// A periodic orbit written as its lexicographically least rotation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CyclicWord {
    canonical: Word,
    least_period: usize,
}

impl CyclicWord {
    pub fn new(w: &[Sym]) -> Self {
        CyclicWord {
            canonical: least_rotation(w),
            least_period: least_period(w),
        }
    }

    pub fn canonical(&self) -> &Word {
        &self.canonical
    }

    pub fn least_period(&self) -> usize {
        self.least_period
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    /// The same orbit written with its primitive period.
    pub fn primitive(&self) -> CyclicWord {
        CyclicWord::new(&self.canonical[..self.least_period])
    }

    /// Symbols of the orbit at positions `start..start+len`, reading the canonical word cyclically.
    pub fn segment(&self, start: usize, len: usize) -> Word {
        let n = self.canonical.len();
        (0..len).map(|i| self.canonical[(start + i) % n]).collect()
    }
}

/// Least `p` dividing `|w|` with `w` invariant under rotation by `p`.
pub fn least_period(w: &[Sym]) -> usize {
    let n = w.len();
    (1..=n)
        .find(|&p| n.is_multiple_of(p) && (0..n).all(|i| w[i] == w[(i + p) % n]))
        .unwrap_or(0)
}

/// Lexicographically least rotation (Booth's algorithm).
pub fn least_rotation(w: &[Sym]) -> Word {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let s: Vec<Sym> = w.iter().chain(w.iter()).copied().collect();
    let mut f = vec![-1i64; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j];
        let mut i = f[j - k - 1];
        while i != -1 && sj != s[k + i as usize + 1] {
            if sj < s[k + i as usize + 1] {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        if sj != s[k + (i + 1) as usize] {
            if sj < s[k] {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    s[k..k + n].to_vec()
}

/// Whether `w^∞` is a point of the presented shift: the relation "a path labeled `w`
/// leads from u to v" contains a cycle.
pub fn accepts_periodic(p: &Presentation, w: &[Sym]) -> bool {
    let n = p.vertex_count();
    let mut rel: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let mut cur = vec![false; n];
        cur[v] = true;
        for &a in w {
            cur = p.step(&cur, a);
        }
        rel.push((0..n).filter(|&u| cur[u]).collect());
    }
    has_cycle(&rel)
}

fn has_cycle(rel: &[Vec<usize>]) -> bool {
    let (comp, _) = crate::shift_core::graph::scc(rel.len(), rel);
    let mut size = vec![0usize; rel.len()];
    for &c in &comp {
        size[c] += 1;
    }
    rel.iter()
        .enumerate()
        .any(|(v, s)| s.iter().any(|&u| u == v || (comp[u] == comp[v] && size[comp[v]] > 1)))
}

/// Visits every Lyndon word (aperiodic least rotation) of length `n` whose infinite
/// repetition lies in the shift, in lexicographic order.
pub fn for_each_periodic_orbit(
    p: &Presentation,
    n: usize,
    budget: &Budget,
    mut visit: impl FnMut(&Word),
) -> Result<()> {
    periodic_orbits_while(p, n, budget, |w| {
        visit(w);
        true
    })
}

/// As [`for_each_periodic_orbit`], stopping once `visit` returns false.
pub fn periodic_orbits_while(
    p: &Presentation,
    n: usize,
    budget: &Budget,
    mut visit: impl FnMut(&Word) -> bool,
) -> Result<()> {
    if n == 0 {
        return Ok(());
    }
    let k = p.alphabet().len() as Sym;
    let mut a = vec![0 as Sym; n + 1];
    let mut visited = 0u64;
    let start = vec![true; p.vertex_count()];
    let mut states = vec![start];
    gen(p, n, k, 1, 1, &mut a, &mut states, &mut visited, budget, &mut visit).map(|_| ())
}

/// Returns whether to keep going.
#[allow(clippy::too_many_arguments)]
fn gen(
    p: &Presentation,
    n: usize,
    k: Sym,
    t: usize,
    per: usize,
    a: &mut Vec<Sym>,
    states: &mut Vec<Vec<bool>>,
    visited: &mut u64,
    budget: &Budget,
    visit: &mut impl FnMut(&Word) -> bool,
) -> Result<bool> {
    if t > n {
        if per == n {
            *visited += 1;
            budget.check_words(*visited, "necklace enumeration")?;
            let w = a[1..].to_vec();
            if accepts_periodic(p, &w) {
                return Ok(visit(&w));
            }
        }
        return Ok(true);
    }
    let mut try_symbol = |sym: Sym, next_per: usize, a: &mut Vec<Sym>, states: &mut Vec<Vec<bool>>| -> Result<bool> {
        let next = p.step(states.last().expect("state stack"), sym);
        if !next.iter().any(|&b| b) {
            return Ok(true);
        }
        a[t] = sym;
        states.push(next);
        let r = gen(p, n, k, t + 1, next_per, a, states, visited, budget, visit);
        states.pop();
        r
    };
    let copy = a[t - per];
    if !try_symbol(copy, per, a, states)? {
        return Ok(false);
    }
    for sym in copy + 1..k {
        if !try_symbol(sym, t, a, states)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::fixtures::*;
    use proptest::prelude::*;

    #[test]
    fn canonical_forms() {
        let c = CyclicWord::new(&[1, 0, 1, 0]);
        assert_eq!(c.canonical(), &vec![0, 1, 0, 1]);
        assert_eq!(c.least_period(), 2);
        assert_eq!(CyclicWord::new(&[2, 1, 1]).canonical(), &vec![1, 1, 2]);
    }

    #[test]
    fn lyndon_counts_on_full_shift() {
        let b = Budget::default();
        let counts: Vec<usize> = (1..=6)
            .map(|n| {
                let mut c = 0;
                for_each_periodic_orbit(&Presentation::full_shift(2), n, &b, |_| c += 1).unwrap();
                c
            })
            .collect();
        assert_eq!(counts, vec![2, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn periodic_acceptance_uses_powers() {
        let even = even_shift();
        assert!(accepts_periodic(&even, &[0]));
        assert!(!accepts_periodic(&even, &[0, 1]));
        assert!(accepts_periodic(&golden_mean(), &[0, 1]));
        assert!(!accepts_periodic(&golden_mean(), &[1]));
    }

    proptest! {
        #[test]
        fn least_rotation_is_minimal(w in proptest::collection::vec(0u32..3, 1..12)) {
            let r = least_rotation(&w);
            for i in 0..w.len() {
                let rot: Vec<u32> = w[i..].iter().chain(&w[..i]).copied().collect();
                prop_assert!(r <= rot);
            }
            prop_assert_eq!(w.len() % least_period(&w), 0);
        }
    }
}

use super::recode::require_one_block;
use super::BlockMap;
use crate::error::{Budget, Error, Result};
use crate::invariants::{accepts_periodic, CyclicWord};
use crate::shift_core::{Presentation, Sym, Word};

fn preimages(x: &Presentation, c: &BlockMap, b: Sym) -> Vec<Sym> {
    x.alphabet()
        .symbols()
        .filter(|&a| c.symbol(a) == Some(b) && x.edges_labeled(a).next().is_some())
        .collect()
}

/// Lexicographically least word of `x` mapping onto `w`.
pub fn lift_word(x: &Presentation, c: &BlockMap, w: &[Sym]) -> Result<Word> {
    require_one_block(x, c)?;
    let n = x.vertex_count();
    let pre: Vec<Vec<Sym>> = c.target().symbols().map(|b| preimages(x, c, b)).collect();
    // feasible[i]: vertices from which some lift of w[i..] can be read
    let mut feasible = vec![vec![true; n]; w.len() + 1];
    for i in (0..w.len()).rev() {
        let mut f = vec![false; n];
        for &a in &pre[w[i] as usize] {
            for e in x.edges_labeled(a) {
                if feasible[i + 1][e.to] {
                    f[e.from] = true;
                }
            }
        }
        feasible[i] = f;
    }
    if !feasible[0].iter().any(|&b| b) {
        return Err(Error::NoPreimage(c.target().render(w)));
    }
    let mut cur = vec![true; n];
    let mut out = Vec::with_capacity(w.len());
    for i in 0..w.len() {
        let choice = pre[w[i] as usize].iter().find_map(|&a| {
            let mut next = vec![false; n];
            let mut any = false;
            for e in x.edges_labeled(a) {
                if cur[e.from] && feasible[i + 1][e.to] {
                    next[e.to] = true;
                    any = true;
                }
            }
            any.then_some((a, next))
        });
        let (a, next) = choice.expect("feasibility guarantees a continuation");
        out.push(a);
        cur = next;
    }
    Ok(out)
}

/// Least canonical orbit of `x` with the same least period as `y` mapping onto `y`.
pub fn lift_orbit(x: &Presentation, c: &BlockMap, y: &CyclicWord, budget: &Budget) -> Result<CyclicWord> {
    require_one_block(x, c)?;
    let target = y.canonical();
    let n = target.len();
    let period = y.least_period();
    let pre: Vec<Vec<Sym>> = target.iter().map(|&b| preimages(x, c, b)).collect();
    let mut best: Option<CyclicWord> = None;
    let mut word = Vec::with_capacity(n);
    let mut visited = 0u64;
    let start = vec![true; x.vertex_count()];
    search(x, &pre, &start, &mut word, &mut visited, budget, &mut |w| {
        if crate::invariants::least_period(w) == period && accepts_periodic(x, w) {
            let cand = CyclicWord::new(w);
            if best.as_ref().is_none_or(|b| cand < *b) {
                best = Some(cand);
            }
        }
    })?;
    best.ok_or_else(|| Error::NoEqualPeriodPreimage(c.target().render(target)))
}

fn search(
    x: &Presentation,
    pre: &[Vec<Sym>],
    cur: &[bool],
    word: &mut Word,
    visited: &mut u64,
    budget: &Budget,
    visit: &mut impl FnMut(&Word),
) -> Result<()> {
    let i = word.len();
    if i == pre.len() {
        *visited += 1;
        budget.check_words(*visited, "orbit lifts")?;
        visit(word);
        return Ok(());
    }
    for &a in &pre[i] {
        let next = x.step(cur, a);
        if next.iter().any(|&b| b) {
            word.push(a);
            search(x, pre, &next, word, visited, budget, visit)?;
            word.pop();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::tests::{even_labeling, ti_channel};

    #[test]
    fn lexicographic_word_lifts() {
        let (x, pi) = ti_channel();
        let y = pi.target().clone();
        assert_eq!(x.alphabet().render(&lift_word(&x, &pi, &y.parse("ab").unwrap()).unwrap()), "01");
        let (x, pi) = even_labeling();
        let w = lift_word(&x, &pi, &[1, 1]).unwrap();
        assert_eq!(x.alphabet().render(&w), "ll");
        assert!(matches!(lift_word(&x, &pi, &[1, 0, 1]), Err(Error::NoPreimage(_))));
        let gm = crate::shift_core::fixtures::golden_mean();
        let id = BlockMap::identity(gm.alphabet());
        assert_eq!(lift_word(&gm, &id, &[0, 1, 0]).unwrap(), vec![0, 1, 0]);
    }

    #[test]
    fn orbit_lifts() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let ab = CyclicWord::new(&[0, 1]);
        assert_eq!(x.alphabet().render(lift_orbit(&x, &pi, &ab, &b).unwrap().canonical()), "01");
        let (x, pi) = even_labeling();
        let zero = CyclicWord::new(&[0]);
        assert!(matches!(lift_orbit(&x, &pi, &zero, &b), Err(Error::NoEqualPeriodPreimage(_))));
        let one = CyclicWord::new(&[1]);
        assert_eq!(x.alphabet().render(lift_orbit(&x, &pi, &one, &b).unwrap().canonical()), "l");
    }
}

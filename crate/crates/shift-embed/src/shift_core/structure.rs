use serde::{Deserialize, Serialize};

use super::determinize::determinize;
use super::graph;
use super::presentation::Presentation;
use crate::error::{Budget, Result};

/// Irreducibility data of a presentation's graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Structure {
    pub irreducible: bool,
    pub mixing: bool,
    /// Least `g` with a path of length exactly `g` between every ordered vertex pair.
    pub gap: Option<usize>,
    pub period: usize,
}

/// Structure of an SFT presentation; other presentations are determinized first.
pub fn structure(p: &Presentation, budget: &Budget) -> Result<Structure> {
    if p.sft_flag() {
        Ok(graph_structure(p))
    } else {
        Ok(graph_structure(&determinize(p, budget)?))
    }
}

pub fn graph_structure(p: &Presentation) -> Structure {
    let n = p.vertex_count();
    let adj = p.adjacency_lists();
    let (comp, ncomp) = graph::scc(n, &adj);
    let irreducible = ncomp == 1;
    let period = if irreducible {
        graph::period_of(&(0..n).collect::<Vec<_>>(), &adj, &comp)
    } else {
        0
    };
    let mixing = irreducible && period == 1;
    let gap = if mixing { Some(primitivity_exponent(n, &adj)) } else { None };
    Structure {
        irreducible,
        mixing,
        gap,
        period,
    }
}

/// Least `g` with every entry of `A^g` positive, for a primitive graph.
fn primitivity_exponent(n: usize, adj: &[Vec<usize>]) -> usize {
    let words = n.div_ceil(64);
    let full = |row: &[u64]| (0..n).all(|j| row[j / 64] >> (j % 64) & 1 == 1);
    let mut reach: Vec<Vec<u64>> = vec![vec![0; words]; n];
    for (v, succ) in adj.iter().enumerate() {
        for &w in succ {
            reach[v][w / 64] |= 1 << (w % 64);
        }
    }
    let mut g = 1;
    while !reach.iter().all(|r| full(r)) {
        let mut next = vec![vec![0u64; words]; n];
        for (v, succ) in adj.iter().enumerate() {
            for &w in succ {
                for (x, y) in next[v].iter_mut().zip(&reach[w]) {
                    *x |= *y;
                }
            }
        }
        reach = next;
        g += 1;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::language::fixtures::*;
    use crate::shift_core::language::{language_blocks, membership};

    #[test]
    fn examples() {
        let b = Budget::default();
        let gm = structure(&golden_mean(), &b).unwrap();
        assert_eq!(
            gm,
            Structure {
                irreducible: true,
                mixing: true,
                gap: Some(2),
                period: 1
            }
        );
        let loop1 = structure(&Presentation::full_shift(1), &b).unwrap();
        assert_eq!(loop1.gap, Some(1));
        let cycle = Presentation::from_triples(&["a", "b"], &[("x", "y", "a"), ("y", "x", "b")]).unwrap();
        let s = structure(&cycle, &b).unwrap();
        assert!(s.irreducible && !s.mixing);
        assert_eq!(s.period, 2);
        assert_eq!(structure(&Presentation::full_shift(3), &b).unwrap().gap, Some(1));
    }

    #[test]
    fn gap_connects_all_short_words() {
        let b = Budget::default();
        for p in [golden_mean(), even_shift(), Presentation::full_shift(2)] {
            let g = structure(&p, &b).unwrap().gap.unwrap();
            let conn = language_blocks(&p, g, &b).unwrap();
            for lu in 1..=4 {
                for lw in 1..=4 {
                    for u in language_blocks(&p, lu, &b).unwrap() {
                        for w in language_blocks(&p, lw, &b).unwrap() {
                            assert!(conn.iter().any(|v| {
                                let mut x = u.clone();
                                x.extend(v);
                                x.extend(&w);
                                membership(&p, &x)
                            }));
                        }
                    }
                }
            }
        }
    }
}

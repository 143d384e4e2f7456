use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::recode::require_one_block;
use super::BlockMap;
use crate::error::Result;
use crate::shift_core::graph::{essential_vertices, scc};
use crate::shift_core::{Presentation, Word};

/// Pairs of edges of `x` with equal images under a 1-block code, trimmed to the part
/// lying on bi-infinite paths.
#[derive(Debug, Clone)]
pub struct PairGraph {
    n: usize,
    /// `(from pair, to pair, edge of left path, edge of right path)`.
    edges: Vec<(usize, usize, usize, usize)>,
    alive: Vec<bool>,
}

/// Two label sequences with equal image that read along a pair path from `start` to `end`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollisionWitness {
    pub left: Word,
    pub right: Word,
    pub start: (usize, usize),
    pub end: (usize, usize),
    /// The pair path is a cycle, so the words describe two periodic points.
    pub periodic: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InjectivityReport {
    pub injective: bool,
    pub witness: Option<CollisionWitness>,
}

impl PairGraph {
    pub fn new(x: &Presentation, c: &BlockMap) -> Result<Self> {
        require_one_block(x, c)?;
        let n = x.vertex_count();
        let mut by_image: Vec<Vec<usize>> = vec![Vec::new(); c.target().len()];
        for (i, e) in x.edges().iter().enumerate() {
            by_image[c.symbol(e.label).expect("checked total") as usize].push(i);
        }
        let mut edges = Vec::new();
        for group in &by_image {
            for &i in group {
                for &j in group {
                    let (e, f) = (&x.edges()[i], &x.edges()[j]);
                    edges.push((e.from * n + f.from, e.to * n + f.to, i, j));
                }
            }
        }
        let pairs: Vec<(usize, usize)> = edges.iter().map(|&(a, b, _, _)| (a, b)).collect();
        let alive = essential_vertices(n * n, &pairs);
        Ok(PairGraph { n, edges, alive })
    }

    fn live_edges(&self) -> impl Iterator<Item = &(usize, usize, usize, usize)> {
        self.edges.iter().filter(|e| self.alive[e.0] && self.alive[e.1])
    }

    fn pair(&self, v: usize) -> (usize, usize) {
        (v / self.n, v % self.n)
    }
}

/// Decides injectivity of a 1-block code on an SFT presentation.
pub fn check_injective(x: &Presentation, c: &BlockMap) -> Result<InjectivityReport> {
    let g = PairGraph::new(x, c)?;
    let Some(&bad) = g.live_edges().find(|e| e.2 != e.3) else {
        return Ok(InjectivityReport {
            injective: true,
            witness: None,
        });
    };
    Ok(InjectivityReport {
        injective: false,
        witness: Some(witness(&g, x, bad)),
    })
}

fn witness(g: &PairGraph, x: &Presentation, bad: (usize, usize, usize, usize)) -> CollisionWitness {
    let nn = g.n * g.n;
    let mut out: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); nn];
    let mut inc: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); nn];
    for &(a, b, i, j) in g.live_edges() {
        out[a].push((b, i, j));
        inc[b].push((a, i, j));
    }
    let label = |i: usize| x.edges()[i].label;
    if let Some(path) = bfs(&out, bad.1, |v| v == bad.0) {
        let mut left = vec![label(bad.2)];
        let mut right = vec![label(bad.3)];
        left.extend(path.iter().map(|&(i, _)| label(i)));
        right.extend(path.iter().map(|&(_, j)| label(j)));
        return CollisionWitness {
            left,
            right,
            start: g.pair(bad.0),
            end: g.pair(bad.0),
            periodic: true,
        };
    }
    let adj: Vec<Vec<usize>> = out.iter().map(|o| o.iter().map(|e| e.0).collect()).collect();
    let (comp, nc) = scc(nn, &adj);
    let mut size = vec![0usize; nc];
    for v in 0..nn {
        size[comp[v]] += 1;
    }
    let cyclic = |v: usize| size[comp[v]] > 1 || adj[v].contains(&v);
    let back = bfs(&inc, bad.0, cyclic).unwrap_or_default();
    let fwd = bfs(&out, bad.1, cyclic).unwrap_or_default();
    let mut start = bad.0;
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for &(i, j) in back.iter().rev() {
        left.push(label(i));
        right.push(label(j));
        start = x.edges()[i].from * g.n + x.edges()[j].from;
    }
    left.push(label(bad.2));
    right.push(label(bad.3));
    let mut end = bad.1;
    for &(i, j) in &fwd {
        left.push(label(i));
        right.push(label(j));
        end = x.edges()[i].to * g.n + x.edges()[j].to;
    }
    CollisionWitness {
        left,
        right,
        start: g.pair(start),
        end: g.pair(end),
        periodic: false,
    }
}

/// Shortest edge path from `from` to a vertex satisfying `goal` (edge pairs along it).
fn bfs(
    next: &[Vec<(usize, usize, usize)>],
    from: usize,
    goal: impl Fn(usize) -> bool,
) -> Option<Vec<(usize, usize)>> {
    if goal(from) {
        return Some(Vec::new());
    }
    let mut prev: Vec<Option<(usize, usize, usize)>> = vec![None; next.len()];
    let mut seen = vec![false; next.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &(w, i, j) in &next[v] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            prev[w] = Some((v, i, j));
            if goal(w) {
                let mut path = Vec::new();
                let mut cur = w;
                while let Some((p, i, j)) = prev[cur] {
                    path.push((i, j));
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            queue.push_back(w);
        }
    }
    None
}

/// Finite-to-one iff no diamond: two distinct equal-image paths with common endpoints.
pub fn check_finite_to_one(x: &Presentation, c: &BlockMap) -> Result<bool> {
    let g = PairGraph::new(x, c)?;
    let nn = g.n * g.n;
    let mut out: Vec<Vec<(usize, bool)>> = vec![Vec::new(); nn];
    for &(a, b, i, j) in &g.edges {
        out[a].push((b, i != j));
    }
    let diagonal = |v: usize| v / g.n == v % g.n;
    let mut seen = vec![false; nn];
    let mut stack = Vec::new();
    for u in 0..g.n {
        let d = u * g.n + u;
        for &(w, off) in &out[d] {
            if off && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    while let Some(v) = stack.pop() {
        if diagonal(v) {
            return Ok(false);
        }
        for &(w, _) in &out[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::tests::{even_labeling, ti_channel};
    use crate::error::Budget;

    #[test]
    fn identity_is_injective() {
        let x = crate::shift_core::fixtures::golden_mean();
        let id = BlockMap::identity(x.alphabet());
        assert!(check_injective(&x, &id).unwrap().injective);
        assert!(check_finite_to_one(&x, &id).unwrap());
    }

    #[test]
    fn ti_channel_collides_on_fixed_points() {
        let (x, pi) = ti_channel();
        let r = check_injective(&x, &pi).unwrap();
        assert!(!r.injective);
        let w = r.witness.unwrap();
        assert!(w.periodic);
        assert_ne!(w.left, w.right);
        assert_eq!(pi.apply(&w.left).unwrap(), pi.apply(&w.right).unwrap());
        assert_eq!(w.left.len(), 1);
        assert!(!check_finite_to_one(&x, &pi).unwrap());
    }

    #[test]
    fn right_resolving_labeling_is_finite_to_one() {
        let (x, pi) = even_labeling();
        assert!(check_finite_to_one(&x, &pi).unwrap());
        assert!(!check_injective(&x, &pi).unwrap().injective);
    }

    /// Brute-force oracle: two distinct paths of length L with equal image and equal
    /// endpoints exist for some L exactly when the code is not finite-to-one.
    #[test]
    fn finite_to_one_matches_path_counting() {
        let (x, pi) = even_labeling();
        let b = Budget::default();
        let words = crate::shift_core::language_blocks(&x, 6, &b).unwrap();
        let mut seen = std::collections::HashMap::new();
        let mut diamond = false;
        for w in words {
            let key = (x.edges_labeled(w[0]).next().unwrap().from, x.label_target(*w.last().unwrap()), pi.apply(&w).unwrap());
            if seen.insert(key, w).is_some() {
                diamond = true;
            }
        }
        assert!(!diamond);
    }
}

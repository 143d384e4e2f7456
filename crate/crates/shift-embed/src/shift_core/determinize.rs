use std::collections::HashMap;

use super::graph;
use super::presentation::{Edge, Presentation};
use crate::error::{Budget, Result};

/// Subset construction started from the full vertex set. State 0 is the full set;
/// a missing transition means the word leaves the language.
#[derive(Debug, Clone)]
pub struct SubsetAutomaton {
    pub states: Vec<Vec<usize>>,
    pub delta: Vec<Vec<Option<usize>>>,
}

impl SubsetAutomaton {
    pub fn build(p: &Presentation, budget: &Budget) -> Result<Self> {
        let k = p.alphabet().len();
        let full: Vec<usize> = (0..p.vertex_count()).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::from([(full.clone(), 0)]);
        let mut states = vec![full];
        let mut delta: Vec<Vec<Option<usize>>> = Vec::new();
        let mut i = 0;
        while i < states.len() {
            let mut row = vec![None; k];
            for a in p.alphabet().symbols() {
                let mut member = vec![false; p.vertex_count()];
                for &v in &states[i] {
                    member[v] = true;
                }
                let next = p.step(&member, a);
                let set: Vec<usize> = (0..next.len()).filter(|&v| next[v]).collect();
                if set.is_empty() {
                    continue;
                }
                let id = match index.get(&set) {
                    Some(&id) => id,
                    None => {
                        let id = states.len();
                        budget.check_states(id + 1, "subset construction states")?;
                        index.insert(set.clone(), id);
                        states.push(set);
                        id
                    }
                };
                row[a as usize] = Some(id);
            }
            delta.push(row);
            i += 1;
        }
        Ok(SubsetAutomaton { states, delta })
    }

    /// Number of words of each length 0..=n in the language.
    pub fn count_words(&self, n: usize) -> Vec<u128> {
        let mut counts = vec![0u128; self.states.len()];
        counts[0] = 1;
        let mut out = vec![1u128];
        for _ in 0..n {
            let mut next = vec![0u128; self.states.len()];
            for (s, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for t in self.delta[s].iter().flatten() {
                    next[*t] = next[*t].saturating_add(c);
                }
            }
            counts = next;
            out.push(counts.iter().fold(0u128, |a, &b| a.saturating_add(b)));
        }
        out
    }

    /// Follower-set minimization (Moore refinement); returns the block of each state.
    fn minimize(&self) -> (Vec<usize>, usize) {
        let n = self.states.len();
        let mut block = vec![0usize; n];
        let mut nblocks = 1;
        loop {
            let mut sig: HashMap<(usize, Vec<Option<usize>>), usize> = HashMap::new();
            let mut next = vec![0usize; n];
            for s in 0..n {
                let key = (
                    block[s],
                    self.delta[s].iter().map(|t| t.map(|t| block[t])).collect(),
                );
                let len = sig.len();
                next[s] = *sig.entry(key).or_insert(len);
            }
            let count = sig.len();
            block = next;
            if count == nblocks {
                return (block, count);
            }
            nblocks = count;
        }
    }
}

/// Right-resolving presentation of the same shift via follower-set determinization.
/// An irreducible input yields the terminal irreducible component of the result.
pub fn determinize(p: &Presentation, budget: &Budget) -> Result<Presentation> {
    let auto = SubsetAutomaton::build(p, budget)?;
    let (block, nblocks) = auto.minimize();
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (s, row) in auto.delta.iter().enumerate() {
        for (a, t) in row.iter().enumerate() {
            if let Some(t) = t {
                let e = Edge {
                    from: block[s],
                    to: block[*t],
                    label: a as u32,
                };
                if seen.insert(e) {
                    edges.push(e);
                }
            }
        }
    }
    let full = Presentation::from_edges(p.alphabet().clone(), nblocks, edges)?;
    match terminal_component(&full) {
        Some(t) if language_included(&full, &t, budget)? => Ok(t),
        _ => Ok(full),
    }
}

/// Whether every word of `p` is a word of `q` (deterministic subset product).
pub fn language_included(p: &Presentation, q: &Presentation, budget: &Budget) -> Result<bool> {
    if p.alphabet() != q.alphabet() {
        return Ok(false);
    }
    let a = SubsetAutomaton::build(p, budget)?;
    let b = SubsetAutomaton::build(q, budget)?;
    let mut seen = std::collections::HashSet::from([(0usize, 0usize)]);
    let mut stack = vec![(0usize, 0usize)];
    while let Some((s, t)) = stack.pop() {
        for (x, y) in a.delta[s].iter().zip(&b.delta[t]) {
            match (x, y) {
                (Some(_), None) => return Ok(false),
                (Some(x), Some(y))
                    if seen.insert((*x, *y)) => {
                        budget.check_states(seen.len(), "inclusion product states")?;
                        stack.push((*x, *y));
                    }
                _ => {}
            }
        }
    }
    Ok(true)
}

/// The unique terminal strongly connected component, if there is exactly one.
fn terminal_component(p: &Presentation) -> Option<Presentation> {
    let adj = p.adjacency_lists();
    let (comp, n) = graph::scc(p.vertex_count(), &adj);
    if n == 1 {
        return Some(p.clone());
    }
    let mut terminal = vec![true; n];
    for e in p.edges() {
        if comp[e.from] != comp[e.to] {
            terminal[comp[e.from]] = false;
        }
    }
    let ts: Vec<usize> = (0..n).filter(|&c| terminal[c]).collect();
    if ts.len() != 1 {
        return None;
    }
    let c = ts[0];
    let edges = p
        .edges()
        .iter()
        .filter(|e| comp[e.from] == c && comp[e.to] == c)
        .copied()
        .collect();
    Presentation::new(p.alphabet().clone(), p.vertex_names().to_vec(), edges).ok()
}

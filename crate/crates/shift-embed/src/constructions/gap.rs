use serde::{Deserialize, Serialize};

use crate::combinatorics::{verify_stamp, Stamp};
use crate::error::{Budget, Error, Result};
use crate::invariants::least_period;
use crate::shift_core::{
    count_blocks, entropy, language_included, markov_of, structure, Edge, Interval, Presentation, Structure, Word,
};

/// Stamp-separated blocks of a subshift with their mixing and finite-type evidence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapSft {
    #[serde(skip)]
    pub presentation: Option<Presentation>,
    pub n: usize,
    /// Length of `γ⁺ μ γ⁻`.
    pub ell: usize,
    pub structure: Structure,
    /// Window length after which the shift is defined by its allowed blocks.
    pub memory_bound: Option<usize>,
    /// Whether the language equals that of its Markov approximation at `memory_bound + 1`;
    /// `None` when the check ran out of budget.
    pub sft_verified: Option<bool>,
    /// Two closed paths of coprime lengths.
    pub coprime_orbits: (Word, Word),
}

impl GapSft {
    pub fn shift(&self) -> &Presentation {
        self.presentation.as_ref().expect("built with a presentation")
    }
}

/// Steps after which the terminal vertex of a path is determined by its label, if ever.
pub(crate) fn sft_memory(p: &Presentation, max: usize) -> Option<usize> {
    let n = p.vertex_count();
    let mut pairs = vec![false; n * n];
    for u in 0..n {
        for v in 0..n {
            pairs[u * n + v] = u != v;
        }
    }
    for m in 0..=max {
        if !pairs.iter().any(|&b| b) {
            return Some(m);
        }
        let mut next = vec![false; n * n];
        for e in p.edges() {
            for f in p.edges_labeled(e.label) {
                let src = e.from * n + f.from;
                if (e.from == f.from || pairs[src]) && e.to != f.to {
                    next[e.to * n + f.to] = true;
                }
            }
        }
        pairs = next;
    }
    None
}

fn check_inputs(x: &Presentation, v0: &Presentation, stamp: &Stamp, n: usize, budget: &Budget) -> Result<usize> {
    if !x.is_one_step() {
        return Err(Error::InvalidInput("the ambient shift must be a 1-step presentation".into()));
    }
    if v0.alphabet() != x.alphabet() {
        return Err(Error::AlphabetMismatch(format!("{:?} vs {:?}", v0.alphabet(), x.alphabet())));
    }
    let g = structure(x, budget)?
        .gap
        .ok_or_else(|| Error::InvalidInput("the ambient shift must be mixing".into()))?;
    if g > stamp.context_k {
        return Err(Error::InvalidInput(format!("gap {g} exceeds the stamp context {}", stamp.context_k)));
    }
    if n < stamp.word.len() {
        return Err(Error::InvalidInput(format!("block length {n} is below |μ| = {}", stamp.word.len())));
    }
    let mu = &stamp.word;
    // re-check when affordable; past the budget a passed carried check stands
    let valid = match verify_stamp(x, v0, stamp.context_k, mu, (2 * mu.len()).max(16), budget) {
        Ok(check) => check.valid,
        Err(e) if e.is_resource_limit() && stamp.check.valid => true,
        Err(e) => return Err(e),
    };
    if !valid {
        return Err(Error::StampInvalid(x.alphabet().render(mu)));
    }
    Ok(g)
}

/// Presentation of the closure of points `… v₋₁ γ⁺ μ γ⁻ v₀ γ⁺ μ γ⁻ v₁ …` in `x` with
/// `vᵢ` words of `v0` of length at least `n` and free connectors `γ±` of length `k`.
///
/// Vertices: `(x vertex, v0 vertex, block length so far, saturating at n)` inside data
/// blocks, and `(x vertex, symbols of γ⁺ μ γ⁻ read)` inside links.
fn build(x: &Presentation, v0: &Presentation, mu: &[u32], k: usize, n: usize, budget: &Budget) -> Result<Presentation> {
    let (nx, nv) = (x.vertex_count(), v0.vertex_count());
    let ell = mu.len() + 2 * k;
    let data = |xv: usize, vv: usize, c: usize| (xv * nv + vv) * n + (c - 1);
    let base = nx * nv * n;
    let link = |xv: usize, j: usize| base + xv * (ell + 1) + j;
    let total = base + nx * (ell + 1);
    budget.check_states(total, "gap shift vertices")?;
    let mut names = Vec::with_capacity(total);
    for xv in 0..nx {
        for vv in 0..nv {
            for c in 1..=n {
                names.push(format!("d{xv}.{vv}.{c}"));
            }
        }
    }
    for xv in 0..nx {
        for j in 0..=ell {
            names.push(format!("l{xv}.{j}"));
        }
    }
    let mut edges = Vec::new();
    for e in x.edges() {
        for f in v0.edges_labeled(e.label) {
            for c in 1..=n {
                edges.push(Edge { from: data(e.from, f.from, c), to: data(e.to, f.to, (c + 1).min(n)), label: e.label });
            }
            edges.push(Edge { from: link(e.from, ell), to: data(e.to, f.to, 1), label: e.label });
        }
        for j in 0..ell {
            if (k..k + mu.len()).contains(&j) && mu[j - k] != e.label {
                continue;
            }
            let from = if j == 0 { None } else { Some(link(e.from, j)) };
            let to = link(e.to, j + 1);
            match from {
                Some(from) => edges.push(Edge { from, to, label: e.label }),
                None => {
                    for vv in 0..nv {
                        edges.push(Edge { from: data(e.from, vv, n), to, label: e.label });
                    }
                }
            }
        }
    }
    Presentation::new(x.alphabet().clone(), names, edges)
}

/// Closed walks of lengths `p` and `p + 1` for the least such `p`, as label words.
fn coprime_walks(p: &Presentation, max_len: usize) -> Option<(Word, Word)> {
    let n = p.vertex_count();
    for s in 0..n {
        // reach[t][v]: a walk of length t from s ends at v
        let mut reach = vec![vec![false; n]; max_len + 1];
        reach[0][s] = true;
        for t in 0..max_len {
            for e in p.edges() {
                if reach[t][e.from] {
                    reach[t + 1][e.to] = true;
                }
            }
        }
        if let Some(len) = (1..max_len).find(|&t| reach[t][s] && reach[t + 1][s]) {
            let walk = |t: usize| {
                let mut w = Vec::with_capacity(t);
                let mut v = s;
                for i in (0..t).rev() {
                    let e = p.edges().iter().find(|e| e.to == v && reach[i][e.from]).expect("reachable");
                    w.push(e.label);
                    v = e.from;
                }
                w.reverse();
                w
            };
            return Some((walk(len), walk(len + 1)));
        }
    }
    None
}

/// Builds the stamp-separated shift and certifies it: mixing via the graph structure,
/// a pair of coprime closed walks, and finite type via its Markov approximation.
pub fn gap_sft(x: &Presentation, v0: &Presentation, stamp: &Stamp, n: usize, budget: &Budget) -> Result<GapSft> {
    check_inputs(x, v0, stamp, n, budget)?;
    let k = stamp.context_k;
    let ell = stamp.word.len() + 2 * k;
    let p = build(x, v0, &stamp.word, k, n, budget)?;
    let st = structure(&p, budget)?;
    if !st.mixing {
        return Err(Error::ConstructionFailed("the stamp-separated shift is not mixing".into()));
    }
    let coprime = coprime_walks(&p, 4 * (n + ell) + 8)
        .ok_or_else(|| Error::ConstructionFailed("no closed walks of coprime lengths".into()))?;
    debug_assert_eq!(gcd(least_period(&coprime.0), least_period(&coprime.1)), 1);
    let memory_bound = sft_memory(v0, 64).map(|m0| m0.max(n) + 2 * ell);
    let sft_verified = match memory_bound {
        Some(m) => match markov_of(&p, m + 1, budget).and_then(|mk| language_included(&mk, &p, budget)) {
            Ok(b) => Some(b),
            Err(e) if e.is_resource_limit() => None,
            Err(e) => return Err(e),
        },
        None => None,
    };
    Ok(GapSft {
        presentation: Some(p),
        n,
        ell,
        structure: st,
        memory_bound,
        sft_verified,
        coprime_orbits: coprime,
    })
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Block length for the stamp-separated shift with entropy below `h(v0) + epsilon`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapEntropyBound {
    /// Least verified block length.
    pub n: usize,
    pub h_v0: Interval,
    pub h_v1: Interval,
    /// Block length from the counting argument, for comparison.
    pub proof_n: Option<usize>,
}

/// Least block length whose stamp-separated shift has entropy certified below
/// `h(v0) + epsilon`, found by doubling and bisection (the shifts shrink as n grows).
pub fn gap_sft_entropy_bound(x: &Presentation, v0: &Presentation, stamp: &Stamp, epsilon: f64, budget: &Budget) -> Result<GapEntropyBound> {
    const MAX_N: usize = 1 << 12;
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    check_inputs(x, v0, stamp, stamp.word.len(), budget)?;
    let h_v0 = entropy(v0, 1e-9, budget)?;
    let k = stamp.context_k;
    let h_at = |n: usize| -> Result<Interval> { entropy(&build(x, v0, &stamp.word, k, n, budget)?, 1e-9, budget) };
    let ok = |iv: &Interval| iv.hi < h_v0.lo + epsilon;
    let mut lo = stamp.word.len();
    let mut h_lo = h_at(lo)?;
    let (n, h_v1) = if ok(&h_lo) {
        (lo, h_lo)
    } else {
        let mut hi = lo.max(1) * 2;
        let mut h_hi = h_at(hi)?;
        while !ok(&h_hi) {
            if hi >= MAX_N {
                return Err(Error::limit("stamp-separated block length", MAX_N as u64));
            }
            (lo, h_lo) = (hi, h_hi);
            hi *= 2;
            h_hi = h_at(hi)?;
        }
        let _ = h_lo;
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            let h_mid = h_at(mid)?;
            if ok(&h_mid) {
                (hi, h_hi) = (mid, h_mid);
            } else {
                lo = mid;
            }
        }
        (hi, h_hi)
    };
    Ok(GapEntropyBound {
        n,
        h_v0,
        h_v1,
        proof_n: proof_block_length(x, v0, k, h_v0, epsilon, budget).ok(),
    })
}

/// The counting argument's block length: `N₀` with `(1/n) log|B_n(V₀)| < h + ε/4` beyond it,
/// then the least `N > 2N₀` with `(1/N) max{log N, 2 log|B_k(X)|, log|B_{N₀}(V₀)|} < ε/4`.
fn proof_block_length(x: &Presentation, v0: &Presentation, k: usize, h: Interval, epsilon: f64, budget: &Budget) -> Result<usize> {
    let s = (h.hi + epsilon / 4.0).exp();
    let n0 = crate::combinatorics::growth_threshold(v0, s, budget)?;
    let bx = count_blocks(x, k, budget)?[k] as f64;
    let bv = count_blocks(v0, n0, budget)?[n0] as f64;
    let c = (2.0 * bx.ln()).max(bv.ln());
    let mut n = 2 * n0 + 1;
    while ((n as f64).ln().max(c)) / n as f64 >= epsilon / 4.0 {
        n += 1;
        if n > 1 << 40 {
            return Err(Error::limit("proof block length", 1 << 40));
        }
    }
    Ok(n)
}

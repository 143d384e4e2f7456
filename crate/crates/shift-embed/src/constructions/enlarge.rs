use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::approx::{marked_block_sft, InnerApproximation};
use super::gap::{gap_sft, GapSft};
use crate::codes::{image, lift_word, preimage_sft, BlockMap};
use crate::combinatorics::{find_stamp, Matcher, Stamp};
use crate::error::{Budget, Error, Result};
use crate::invariants::{
    accepts_periodic, count_liftable, for_each_periodic_orbit, liftable_counts, CyclicWord, LiftedOrbit,
};
use crate::shift_core::{determinize, entropy, language_blocks, language_included, membership, structure, Edge, Interval, Presentation, Sym, Word};

const MAX_EXCLUDED_PERIOD: usize = 24;
const MAX_AVOIDED: usize = 14;
const MAX_N1: usize = 28;
const SPOT_CHECKS: usize = 4;

/// Points of `y` in which `theta` never occurs.
pub fn avoiding(y: &Presentation, theta: &[Sym]) -> Result<Presentation> {
    if theta.is_empty() {
        return Err(Error::InvalidInput("the avoided word is empty".into()));
    }
    let m = Matcher::new(theta);
    let t = theta.len();
    let mut edges = Vec::new();
    for e in y.edges() {
        for k in 0..t {
            let (k2, hit) = m.step(k, e.label);
            if !hit {
                edges.push(Edge {
                    from: e.from * t + k,
                    to: e.to * t + k2,
                    label: e.label,
                });
            }
        }
    }
    let names = (0..y.vertex_count() * t).map(|i| format!("{}.{}", y.vertex_names()[i / t], i % t)).collect();
    Presentation::new(y.alphabet().clone(), names, edges)
}

/// Mixing subshift of the input whose image contains `W₀` and misses a periodic orbit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Enlargement {
    #[serde(skip)]
    pub v0: Option<Presentation>,
    #[serde(skip)]
    pub image: Option<Presentation>,
    pub v1: GapSft,
    pub stamp: Stamp,
    /// Stamp of the output shift against `W₀`; `stamp` lifts it.
    pub output_stamp: Stamp,
    /// Orbit of the output shift outside the image.
    pub excluded: CyclicWord,
    /// Every block of this length of the excluded orbit is forbidden in `W₀`.
    pub forbidden_length: usize,
    pub image_excludes_orbit: bool,
    pub image_contains_w0: bool,
}

/// `V₁ ⊆ x` mixing with `w0 ⊆ π(V₁) ⊊ Y`: stamp-separated long blocks of `π⁻¹(w0)`.
/// A block of length at least `forbidden_length` of the excluded orbit never occurs in
/// `w0`, so no preimage of that orbit survives.
pub fn enlarge_mixing(x: &Presentation, pi: &BlockMap, w0: &Presentation, budget: &Budget) -> Result<Enlargement> {
    if !x.is_one_step() {
        return Err(Error::InvalidInput("the channel input must be a 1-step presentation".into()));
    }
    let y = image(x, pi)?;
    if language_included(&y, w0, budget)? {
        return Err(Error::InvalidInput("the subshift to enlarge is all of the output shift".into()));
    }
    let g = structure(x, budget)?
        .gap
        .ok_or_else(|| Error::InvalidInput("the channel input must be mixing".into()))?;
    let v0 = preimage_sft(x, pi, w0, budget)?;
    let excluded = excluded_orbit(&y, w0, g, budget)?;
    let k = excluded.len();
    let k_prime = (1..=64 * k + w0.vertex_count())
        .find(|&j| !membership(w0, &excluded.segment(0, j)))
        .ok_or_else(|| Error::ConstructionFailed("the excluded orbit has arbitrarily long blocks in W₀".into()))?;
    let forbidden_length = k + k_prime;
    // occurrences of a lift map onto occurrences of the output stamp in a context over
    // W₀, so the output check certifies the lift against V₀
    let output_stamp = find_stamp(&determinize(&y, budget)?, w0, g, 16, budget)?;
    let mu = lift_word(x, pi, &output_stamp.word)?;
    let stamp = Stamp { word: mu, context_k: g, check: output_stamp.check.clone() };
    let n = forbidden_length.max(stamp.word.len());
    let v1 = gap_sft(x, &v0, &stamp, n, budget)?;
    let img = image(v1.shift(), pi)?;
    let image_excludes_orbit = !accepts_periodic(&img, excluded.canonical());
    let image_contains_w0 = language_included(w0, &img, budget)?;
    if !image_excludes_orbit || !image_contains_w0 {
        return Err(Error::VerificationFailed(format!(
            "excludes orbit: {image_excludes_orbit}, contains W₀: {image_contains_w0}"
        )));
    }
    Ok(Enlargement {
        v0: Some(v0),
        image: Some(img),
        v1,
        stamp,
        output_stamp,
        excluded,
        forbidden_length,
        image_excludes_orbit,
        image_contains_w0,
    })
}

fn excluded_orbit(y: &Presentation, w0: &Presentation, g: usize, budget: &Budget) -> Result<CyclicWord> {
    for k in g.max(1)..=MAX_EXCLUDED_PERIOD {
        let mut found: Option<Word> = None;
        for_each_periodic_orbit(y, k, budget, |w| {
            if found.is_none() && !accepts_periodic(w0, w) {
                found = Some(w.clone());
            }
        })?;
        if let Some(w) = found {
            return Ok(CyclicWord::new(&w));
        }
    }
    Err(Error::NoExcludablePoint(MAX_EXCLUDED_PERIOD))
}

/// Proper SFT inside `y` with entropy above `target`: `y` avoiding one word when `y` is
/// of finite type, otherwise marked blocks.
pub fn proper_inner_sft(y: &Presentation, target: f64, budget: &Budget) -> Result<InnerApproximation> {
    let h_y = entropy(y, 1e-9, budget)?;
    if !y.sft_flag() {
        return marked_block_sft(y, target, budget);
    }
    for m in 1..=MAX_AVOIDED {
        for theta in language_blocks(y, m, budget)? {
            let u = match avoiding(y, &theta) {
                Ok(u) => u,
                Err(Error::EmptyShift) => continue,
                Err(e) => return Err(e),
            };
            let h_u = entropy(&u, 1e-9, budget)?;
            if h_u.lo > target {
                return Ok(InnerApproximation {
                    presentation: Some(u),
                    sync_word: Some(theta),
                    block_length: None,
                    h_y,
                    h_u,
                    language_included: true,
                });
            }
        }
    }
    Err(Error::limit("avoided word length", MAX_AVOIDED as u64))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RRow {
    pub n: usize,
    /// `r_n` of the whole channel.
    pub r_pi: u128,
    /// `r_n` restricted to `V`.
    pub r_v: u128,
    /// Orbits already liftable inside `V₁`.
    pub from_v1: usize,
    /// Orbits adjoined with a lift.
    pub adjoined: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthSpot {
    pub n: usize,
    pub r_v1: u128,
    pub bound: f64,
}

/// `V ⊆ X` and `W = π(V) ⊊ Y` with nearly full entropy, keeping every liftable orbit
/// up to period `n1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuantSummary {
    #[serde(skip)]
    pub v: Option<Presentation>,
    #[serde(skip)]
    pub w: Option<Presentation>,
    pub epsilon: f64,
    pub n1: usize,
    pub h_y: Interval,
    /// Entropy of the inner SFT, a lower bound for `h(W)`.
    pub h_w_lower: Interval,
    pub inner: InnerApproximation,
    pub enlargement: Enlargement,
    pub r_table: Vec<RRow>,
    pub growth: Vec<GrowthSpot>,
    /// Orbit of `Y` outside `W` with period above `n1`.
    pub proper_witness: CyclicWord,
    pub adjoined: Vec<LiftedOrbit>,
}

impl QuantSummary {
    pub fn v(&self) -> &Presentation {
        self.v.as_ref().expect("built with a presentation")
    }

    pub fn w(&self) -> &Presentation {
        self.w.as_ref().expect("built with a presentation")
    }
}

/// Disjoint union of presentations over one alphabet and of the cycles reading `cycles`.
fn union_with_cycles(base: &Presentation, cycles: &[&Word]) -> Result<Presentation> {
    let mut names: Vec<String> = base.vertex_names().to_vec();
    let mut edges = base.edges().to_vec();
    for (c, w) in cycles.iter().enumerate() {
        let start = names.len();
        for i in 0..w.len() {
            names.push(format!("c{c}.{i}"));
            edges.push(Edge {
                from: start + i,
                to: start + (i + 1) % w.len(),
                label: w[i],
            });
        }
    }
    Presentation::new(base.alphabet().clone(), names, edges)
}

/// Subshifts `V ⊆ X` and `W = π(V)` with `W` proper, `h(W) > h(Y) - ε`, `r_n(π|V) = r_n(π)`
/// for `n ≤ N₁`, and `r_n(π|V) > exp(n(h(Y) - ε))` on spot checks from `N₁` on.
///
/// `W₀` is a proper inner SFT, `V₁` enlarges `π⁻¹(W₀)` to a mixing SFT with proper image,
/// and every liftable orbit of period at most `N₁` is adjoined with one lift.
pub fn quant_summary(x: &Presentation, pi: &BlockMap, epsilon: f64, n0: usize, budget: &Budget) -> Result<QuantSummary> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidInput(format!("epsilon must be positive, got {epsilon}")));
    }
    let y = determinize(&image(x, pi)?, budget)?;
    let h_y = entropy(&y, 1e-9, budget)?;
    let inner = proper_inner_sft(&y, h_y.hi - epsilon / 2.0, budget)?;
    let enlargement = enlarge_mixing(x, pi, inner.shift(), budget)?;
    let v1 = enlargement.v1.shift();

    let bound = |n: usize| (n as f64 * (h_y.hi - epsilon)).exp();
    let mut found = None;
    // the census grows exponentially in the period, so widen the range only on demand
    for top in (8..=MAX_N1 + SPOT_CHECKS).step_by(4) {
        let r = liftable_counts(v1, pi, top, budget)?;
        let grows = |n: usize| (n..n + SPOT_CHECKS).all(|m| r[m - 1] as f64 > bound(m));
        if let Some(n) = (n0.max(1)..=(top + 1 - SPOT_CHECKS).min(MAX_N1)).find(|&n| grows(n)) {
            found = Some((n, r));
            break;
        }
    }
    let (n1, r_v1) = found.ok_or_else(|| Error::limit("liftable growth threshold", MAX_N1 as u64))?;
    let growth = (n1..n1 + SPOT_CHECKS)
        .map(|n| GrowthSpot { n, r_v1: r_v1[n - 1], bound: bound(n) })
        .collect();

    let all = count_liftable(x, pi, n1, budget)?;
    let inside = count_liftable(v1, pi, n1, budget)?;
    let r_pi = liftable_counts(x, pi, n1, budget)?;
    let mut r_table = Vec::with_capacity(n1);
    let mut adjoined = Vec::new();
    for n in 1..=n1 {
        let kept: BTreeSet<&CyclicWord> = inside.rows[n - 1].orbits.iter().map(|o| &o.image).collect();
        let missing: Vec<&LiftedOrbit> = all.rows[n - 1].orbits.iter().filter(|o| !kept.contains(&o.image)).collect();
        let union: BTreeSet<&CyclicWord> = kept.iter().copied().chain(missing.iter().map(|o| &o.image)).collect();
        r_table.push(RRow {
            n,
            r_pi: r_pi[n - 1],
            r_v: union.len() as u128 * n as u128,
            from_v1: kept.len(),
            adjoined: missing.len(),
        });
        adjoined.extend(missing.into_iter().cloned());
    }
    if let Some(row) = r_table.iter().find(|r| r.r_v != r.r_pi) {
        return Err(Error::VerificationFailed(format!("r_{} differs: {} vs {}", row.n, row.r_v, row.r_pi)));
    }

    let img = enlargement.image.as_ref().expect("built with an image");
    let w_cycles: Vec<&Word> = adjoined.iter().map(|o| o.image.canonical()).collect();
    let v_cycles: Vec<&Word> = adjoined.iter().map(|o| o.witness.canonical()).collect();
    let w = union_with_cycles(img, &w_cycles)?;
    let v = union_with_cycles(v1, &v_cycles)?;
    let proper_witness = outside_orbit(&y, img, n1, budget)?;
    Ok(QuantSummary {
        v: Some(v),
        w: Some(w),
        epsilon,
        n1,
        h_y,
        h_w_lower: inner.h_u,
        inner,
        enlargement,
        r_table,
        growth,
        proper_witness,
        adjoined,
    })
}

/// An orbit of `y` of period above `n1` missing from `img`; adjoined orbits have period at
/// most `n1`, so it is missing from `W` as well.
fn outside_orbit(y: &Presentation, img: &Presentation, n1: usize, budget: &Budget) -> Result<CyclicWord> {
    for n in n1 + 1..=n1 + MAX_EXCLUDED_PERIOD {
        let mut found: Option<Word> = None;
        for_each_periodic_orbit(y, n, budget, |w| {
            if found.is_none() && !accepts_periodic(img, w) {
                found = Some(w.clone());
            }
        })?;
        if let Some(w) = found {
            return Ok(CyclicWord::new(&w));
        }
    }
    Err(Error::NoExcludablePoint(n1 + MAX_EXCLUDED_PERIOD))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::BlockMap;
    use crate::instances::ti_channel;
    use crate::shift_core::fixtures::golden_mean;
    use crate::shift_core::{count_blocks, Alphabet};

    fn a_fixed_point() -> Presentation {
        Presentation::full_shift(1).relabel(Alphabet::new(["a", "b"]).unwrap(), |_| 0).unwrap()
    }

    #[test]
    fn avoiding_a_word() {
        let b = Budget::default();
        let u = avoiding(&Presentation::full_shift(2), &[1, 1]).unwrap();
        assert_eq!(count_blocks(&u, 6, &b).unwrap()[6], 21);
    }

    #[test]
    fn ti_channel_around_a_fixed_point() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let e = enlarge_mixing(&x, &pi, &a_fixed_point(), &b).unwrap();
        assert!(e.v1.structure.mixing);
        assert!(e.image_excludes_orbit && e.image_contains_w0);
        assert_eq!(e.excluded.canonical(), &vec![1]);
        let img = e.image.as_ref().unwrap();
        assert!(accepts_periodic(img, &[0]));
        assert!(!accepts_periodic(img, &[1]));
        // no preimage point of the excluded orbit lies in V₁
        assert!(!accepts_periodic(e.v1.shift(), &[1]) && !accepts_periodic(e.v1.shift(), &[2]));
    }

    #[test]
    fn whole_output_or_empty_is_rejected() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let y = image(&x, &pi).unwrap();
        assert!(matches!(enlarge_mixing(&x, &pi, &y, &b), Err(Error::InvalidInput(_))));
        let empty = avoiding(&Presentation::full_shift(1), &[0]);
        assert_eq!(empty.unwrap_err(), Error::EmptyShift);
    }

    #[test]
    fn ti_channel_summary() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let q = quant_summary(&x, &pi, 0.3, 1, &b).unwrap();
        assert!(q.h_w_lower.lo > 2f64.ln() - 0.3);
        assert!(q.r_table.iter().all(|r| r.r_v == r.r_pi));
        assert_eq!(q.r_table.len(), q.n1);
        assert!(q.growth.iter().all(|g| g.r_v1 as f64 > g.bound));
        assert!(!accepts_periodic(q.w(), q.proper_witness.canonical()));
        assert!(q.proper_witness.len() > q.n1);
        let oracle = crate::invariants::liftable_counts(&x, &pi, q.n1, &b).unwrap();
        assert_eq!(q.r_table.iter().map(|r| r.r_v).collect::<Vec<_>>(), oracle);
    }

    #[test]
    fn large_epsilon_still_proper() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let q = quant_summary(&x, &pi, 1.0, 1, &b).unwrap();
        assert!(!accepts_periodic(q.w(), q.proper_witness.canonical()));
    }

    #[test]
    fn identity_channel_on_golden_mean() {
        let b = Budget::default();
        let x = golden_mean();
        let pi = BlockMap::identity(x.alphabet());
        let q = quant_summary(&x, &pi, 0.1, 1, &b).unwrap();
        let census = crate::invariants::count_periodic_sft(&x, q.n1).unwrap();
        for r in &q.r_table {
            assert_eq!(r.r_v, census.q(r.n));
        }
    }
}

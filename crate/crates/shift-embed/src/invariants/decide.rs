use serde::{Deserialize, Serialize};

use super::census::count_periodic;
use super::liftable::liftable_counts;
use crate::codes::{image, recode_one_block, BlockMap};
use crate::combinatorics::OverlapConstants;
use crate::error::{Budget, Error, Result};
use crate::shift_core::{compare_entropy, count_blocks, entropy, spectral_radius, structure, EntropyOrder, Interval, Presentation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Certified,
    Practical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Embeddable,
    NotEmbeddable,
    Unknown,
    /// The entropies are equal, so the strict inequality the criterion needs fails.
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub n: usize,
    pub q_z: u128,
    pub r_pi: u128,
}

/// Upper bound `q_n(Z) ≤ factor · growth^n`, valid for `n ≥ from`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicUpperBound {
    pub factor: f64,
    pub growth: f64,
    pub from: usize,
    pub kind: BoundKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Closed paths of an injectively labeled presentation.
    Trace,
    /// Submultiplicative block counts.
    Blocks,
}

/// Data behind the certified lower bound `r_n ≥ c·e^{n·h_y}/n` for `n ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailCertificate {
    pub gap: usize,
    pub h_x: Interval,
    pub h_y: Interval,
    pub c: f64,
    pub lemma: OverlapConstants,
    /// Block length used in the counting bound.
    pub lemma_n: usize,
    pub start: usize,
    pub z_bound: PeriodicUpperBound,
    /// Least n from which the lower bound on `r_n` exceeds the upper bound on `q_n(Z)`.
    pub crossover: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    pub verdict: Verdict,
    pub requested_mode: Mode,
    pub mode: Mode,
    pub entropy_order: EntropyOrder,
    pub h_z: Interval,
    pub h_y: Interval,
    /// Every n up to this value was compared exactly.
    pub threshold: Option<usize>,
    pub table: Vec<DecisionRow>,
    /// Least n with `q_n(Z) > r_n(π)`.
    pub witness: Option<usize>,
    pub tail: Option<TailCertificate>,
    /// Whether every n beyond the threshold is covered by the certified tail bound.
    pub tail_certified: bool,
    pub notes: Vec<String>,
}

pub const DEFAULT_ALPHA: f64 = 1.0 / 3.0;
const MAX_THRESHOLD: usize = 120;
const PRACTICAL_MARGIN: usize = 8;

/// Decides whether `z` embeds into `x` with `pi` injective on the image, by comparing
/// entropies and the counts `q_n(z) ≤ r_n(pi)`.
pub fn decide_embeddable(x: &Presentation, pi: &BlockMap, z: &Presentation, mode: Mode, budget: &Budget) -> Result<DecisionReport> {
    if !x.sft_flag() {
        return Err(Error::InvalidInput("the channel input must be an SFT presentation".into()));
    }
    let sx = structure(x, budget)?;
    let gap = sx
        .gap
        .ok_or_else(|| Error::InvalidInput("the channel input must be mixing".into()))?;
    let (x, pi) = if pi.is_one_block() {
        (x.clone(), pi.clone())
    } else {
        let (xk, one, _, _) = recode_one_block(x, pi)?;
        (xk, one)
    };
    let y = image(&x, &pi)?;
    let (order, h_z, h_y) = compare_entropy(z, &y, budget)?;
    let mut report = DecisionReport {
        verdict: Verdict::Unknown,
        requested_mode: mode,
        mode,
        entropy_order: order,
        h_z,
        h_y,
        threshold: None,
        table: Vec::new(),
        witness: None,
        tail: None,
        tail_certified: false,
        notes: Vec::new(),
    };
    match order {
        EntropyOrder::Less => {}
        EntropyOrder::Greater => {
            report.verdict = Verdict::NotEmbeddable;
            report.notes.push("h(Z) > h(Y)".into());
            return Ok(report);
        }
        EntropyOrder::Equal => {
            report.verdict = Verdict::NotApplicable;
            report.notes.push("h(Z) = h(Y); the criterion needs strict inequality".into());
            return Ok(report);
        }
        EntropyOrder::Unknown => {
            report.notes.push("entropy order could not be certified".into());
            return Ok(report);
        }
    }
    let tail = tail_certificate(&x, &y, z, gap, h_y, budget);
    let affordable = |n: usize| n <= MAX_THRESHOLD;
    let threshold = match (&tail, mode) {
        (Ok(t), _) if affordable(t.crossover - 1) => {
            report.tail_certified = true;
            t.crossover - 1
        }
        (tail, _) => {
            match tail {
                Ok(t) => report.notes.push(format!(
                    "certified threshold {} exceeds the enumeration limit {MAX_THRESHOLD}",
                    t.crossover - 1
                )),
                Err(e) => report.notes.push(format!("no certified tail bound: {e}")),
            }
            if mode == Mode::Certified {
                report.notes.push("downgraded to practical mode".into());
            }
            report.mode = Mode::Practical;
            practical_threshold(z, h_y, budget)?
        }
    };
    report.tail = tail.ok();
    report.threshold = Some(threshold);
    let q = count_periodic(z, threshold, budget)?;
    let r = liftable_counts(&x, &pi, threshold, budget)?;
    for n in 1..=threshold {
        let row = DecisionRow {
            n,
            q_z: q.q(n),
            r_pi: r[n - 1],
        };
        report.table.push(row);
        if row.q_z > row.r_pi {
            report.witness = Some(n);
            report.verdict = Verdict::NotEmbeddable;
            return Ok(report);
        }
    }
    report.verdict = Verdict::Embeddable;
    if !report.tail_certified {
        report.notes.push(format!("n > {threshold} not verified"));
    }
    Ok(report)
}

fn tail_certificate(x: &Presentation, y: &Presentation, z: &Presentation, gap: usize, h_y: Interval, budget: &Budget) -> Result<TailCertificate> {
    let lemma = OverlapConstants::compute(y, DEFAULT_ALPHA, budget)?;
    let h_x = entropy(x, 1e-10, budget)?;
    let c = 0.5 * (-(gap as f64) * h_x.hi).exp();
    let (lemma_n, b) = best_lemma_length(&lemma);
    let half = (std::f64::consts::LN_2 / b).ceil() as usize;
    let start = (lemma_n.max(half) + gap).max(4 * gap + 1);
    let z_bound = periodic_upper_bound(z, h_y.lo, budget)?;
    let slope = h_y.lo - z_bound.growth.ln();
    if slope <= 0.0 {
        return Err(Error::InvalidInput("entropy gap too small for the certified bound".into()));
    }
    // log of lower bound minus log of upper bound; increasing once n·slope > 1
    let margin = |n: usize| c.ln() + n as f64 * slope - (n as f64).ln() - z_bound.factor.ln();
    let mut n = start.max((1.0 / slope).ceil() as usize).max(z_bound.from).max(1);
    while margin(n) <= 1e-9 {
        n += 1;
        if n > 1_000_000 {
            return Err(Error::limit("certified crossover search", 1_000_000));
        }
    }
    Ok(TailCertificate {
        gap,
        h_x,
        h_y,
        c,
        lemma,
        lemma_n,
        start,
        z_bound,
        crossover: n,
    })
}

/// Any block length `N` above the lemma's minimum is admissible with
/// `b = c₀ − log C₂ / N`; pick the one that lets the bound `1 − e^{−b n} ≥ 1/2` start earliest.
fn best_lemma_length(l: &OverlapConstants) -> (usize, f64) {
    let c0 = l.alpha * l.h - (1.0 - l.alpha) * l.epsilon;
    let log_c2 = l.c2.ln();
    (l.big_n..l.big_n * 8 + 8)
        .map(|n| (n, c0 - log_c2 / n as f64))
        .filter(|&(_, b)| b > 0.0)
        .min_by_key(|&(n, b)| n.max((std::f64::consts::LN_2 / b).ceil() as usize))
        .unwrap_or((l.big_n, l.b))
}

/// Rigorous `q_n(Z) ≤ factor · growth^n`: traces of an injectively labeled presentation
/// are at most `|V| ρ^n`; otherwise `q_n ≤ |B_n|` bounded by submultiplicativity.
fn periodic_upper_bound(z: &Presentation, target: f64, budget: &Budget) -> Result<PeriodicUpperBound> {
    if z.sft_flag() {
        let rho = spectral_radius(z, 1e-12)?;
        return Ok(PeriodicUpperBound {
            factor: z.vertex_count() as f64,
            growth: rho.hi,
            from: 1,
            kind: BoundKind::Trace,
        });
    }
    const MAX_M: usize = 96;
    let counts = count_blocks(z, MAX_M, budget)?;
    for m in 1..=MAX_M {
        let t = (counts[m] as f64).powf(1.0 / m as f64) * (1.0 + 1e-12);
        if t.ln() >= target {
            continue;
        }
        let k = (0..m).map(|j| counts[j] as f64 / t.powi(j as i32)).fold(1.0f64, f64::max) * (1.0 + 1e-12);
        return Ok(PeriodicUpperBound {
            factor: k,
            growth: t,
            from: 1,
            kind: BoundKind::Blocks,
        });
    }
    Err(Error::limit("block growth bound for Z", MAX_M as u64))
}

/// Empirical crossover of `e^{n h(Y)}` over the growth of `q_n(Z)`, plus a safety margin.
fn practical_threshold(z: &Presentation, h_y: Interval, budget: &Budget) -> Result<usize> {
    let h_z = entropy(z, 1e-10, budget)?;
    let slope = h_y.lo - h_z.hi;
    let cross = if slope > 0.0 {
        (z.vertex_count() as f64).ln() / slope
    } else {
        MAX_THRESHOLD as f64
    };
    Ok((cross.ceil().max(1.0) as usize + PRACTICAL_MARGIN).min(MAX_THRESHOLD))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::tests::{even_labeling, ti_channel};
    use crate::shift_core::fixtures::golden_mean;

    fn two_fixed_points() -> Presentation {
        Presentation::from_triples(&["0", "1"], &[("a", "a", "0"), ("b", "b", "1")]).unwrap()
    }

    #[test]
    fn ti_instance_is_certified_embeddable() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let rep = decide_embeddable(&x, &pi, &golden_mean(), Mode::Certified, &b).unwrap();
        assert_eq!(rep.verdict, Verdict::Embeddable);
        assert_eq!(rep.mode, Mode::Certified);
        assert!(rep.tail_certified);
        let t = rep.tail.unwrap();
        assert_eq!(rep.threshold, Some(t.crossover - 1));
        assert_eq!(rep.table[0], DecisionRow { n: 1, q_z: 1, r_pi: 2 });
    }

    #[test]
    fn even_labeling_rejects_two_fixed_points() {
        let b = Budget::default();
        let (x, pi) = even_labeling();
        for mode in [Mode::Certified, Mode::Practical] {
            let rep = decide_embeddable(&x, &pi, &two_fixed_points(), mode, &b).unwrap();
            assert_eq!(rep.verdict, Verdict::NotEmbeddable);
            assert_eq!(rep.witness, Some(1));
            assert_eq!(rep.table, vec![DecisionRow { n: 1, q_z: 2, r_pi: 1 }]);
        }
    }

    #[test]
    fn entropy_tie_is_not_applicable() {
        let b = Budget::default();
        let x = Presentation::full_shift(2);
        let id = BlockMap::identity(x.alphabet());
        let rep = decide_embeddable(&x, &id, &x, Mode::Certified, &b).unwrap();
        assert_eq!(rep.verdict, Verdict::NotApplicable);
        let big = Presentation::full_shift(3);
        let rep = decide_embeddable(&x, &id, &big, Mode::Certified, &b).unwrap();
        assert_eq!(rep.verdict, Verdict::NotEmbeddable);
        assert_eq!(rep.witness, None);
    }

    /// The certified tail bound holds on the computed range beyond the crossover.
    #[test]
    fn tail_bound_is_sound_past_crossover() {
        let b = Budget::default();
        let (x, pi) = ti_channel();
        let y = image(&x, &pi).unwrap();
        let gm = golden_mean();
        let t = tail_certificate(&x, &y, &gm, 1, entropy(&y, 1e-10, &b).unwrap(), &b).unwrap();
        let n_max = t.crossover + 6;
        let r = liftable_counts(&x, &pi, n_max, &b).unwrap();
        let q = count_periodic(&gm, n_max, &b).unwrap();
        for n in t.start..=n_max {
            let lower = t.c * (n as f64 * t.h_y.lo).exp() / n as f64;
            assert!(r[n - 1] as f64 >= lower, "n={n}");
            if n >= t.crossover {
                let upper = t.z_bound.factor * t.z_bound.growth.powi(n as i32);
                assert!((q.q(n) as f64) <= upper && upper < lower);
            }
        }
    }

    #[test]
    fn sofic_target_uses_block_bound() {
        let b = Budget::default();
        let x = Presentation::full_shift(3);
        let id = BlockMap::identity(x.alphabet());
        let rep = decide_embeddable(&x, &id, &crate::shift_core::fixtures::even_shift(), Mode::Certified, &b).unwrap();
        assert_eq!(rep.verdict, Verdict::Embeddable);
        assert_eq!(rep.tail.unwrap().z_bound.kind, BoundKind::Blocks);
    }
}

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::determinize::determinize;
use super::graph;
use super::poly::{charpoly, largest_root, Poly};
use super::presentation::Presentation;
use crate::error::{Budget, Error, Result};

/// A closed interval of reals with `lo <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }

    /// Certain comparison; `None` when the intervals overlap.
    pub fn compare(&self, other: &Interval) -> Option<Ordering> {
        if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else if self.lo == self.hi && other.lo == other.hi && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }
}

const MAX_SWEEPS: usize = 400_000;
const EXACT_LIMIT: usize = 48;

/// A presentation whose path counts grow like its language: the input itself when its
/// labeling is injective or right-resolving, otherwise its determinization.
pub fn counting_presentation(p: &Presentation, budget: &Budget) -> Result<Presentation> {
    if p.is_right_resolving() || p.sft_flag() {
        Ok(p.clone())
    } else {
        determinize(p, budget)
    }
}

/// Certified interval (natural log) for the entropy of the presented shift, of width at
/// most `precision`.
pub fn entropy(p: &Presentation, precision: f64, budget: &Budget) -> Result<Interval> {
    let q = counting_presentation(p, budget)?;
    let rho = spectral_radius(&q, precision / 4.0)?;
    let iv = log_interval(rho);
    if iv.width() > precision {
        return Err(Error::limit(format!("entropy precision {precision:e}"), MAX_SWEEPS as u64));
    }
    Ok(iv)
}

fn log_interval(rho: Interval) -> Interval {
    if rho.lo == 1.0 && rho.hi == 1.0 {
        return Interval::point(0.0);
    }
    let lo = rho.lo.ln().next_down().next_down();
    let hi = rho.hi.ln().next_up().next_up();
    Interval {
        lo: if rho.lo >= 1.0 { lo.max(0.0) } else { lo },
        hi,
    }
}

/// Certified interval for the spectral radius of the adjacency matrix of `p`.
pub fn spectral_radius(p: &Presentation, rel_precision: f64) -> Result<Interval> {
    let n = p.vertex_count();
    let adj = p.adjacency_lists();
    let (comp, ncomp) = graph::scc(n, &adj);
    let mut members = vec![Vec::new(); ncomp];
    for v in 0..n {
        members[comp[v]].push(v);
    }
    let mut best = Interval::point(0.0);
    for m in members.iter().filter(|m| is_cyclic(m, &adj, &comp)) {
        let iv = component_radius(m, &adj, rel_precision)?;
        best = Interval {
            lo: best.lo.max(iv.lo),
            hi: best.hi.max(iv.hi),
        };
    }
    Ok(best)
}

fn is_cyclic(m: &[usize], adj: &[Vec<usize>], comp: &[usize]) -> bool {
    m.len() > 1 || adj[m[0]].iter().any(|&w| comp[w] == comp[m[0]])
}

fn component_radius(m: &[usize], adj: &[Vec<usize>], rel: f64) -> Result<Interval> {
    let k = m.len();
    let mut local = vec![usize::MAX; adj.len()];
    for (i, &v) in m.iter().enumerate() {
        local[v] = i;
    }
    let succ: Vec<Vec<usize>> = m
        .iter()
        .map(|&v| adj[v].iter().filter_map(|&w| (local[w] != usize::MAX).then_some(local[w])).collect())
        .collect();
    let mut v = vec![1.0f64; k];
    let mut best: Option<Interval> = None;
    for sweep in 0..MAX_SWEEPS {
        let mut next = v.clone();
        for i in 0..k {
            for &j in &succ[i] {
                next[i] += v[j];
            }
        }
        let top = next.iter().cloned().fold(0.0f64, f64::max);
        for x in &mut next {
            *x /= top;
        }
        v = next;
        if sweep % 16 == 0 {
            let iv = collatz_wielandt(&v, &succ);
            let iv = match best {
                Some(b) => iv.intersect(&b),
                None => iv,
            };
            best = Some(iv);
            if iv.width() <= rel * iv.lo.max(1.0) {
                return Ok(iv);
            }
        }
    }
    if k <= EXACT_LIMIT {
        return exact_radius(&succ, rel);
    }
    best.ok_or_else(|| Error::limit("spectral radius iterations", MAX_SWEEPS as u64))
}

/// Bounds `min (Av)_i / v_i <= rho <= max (Av)_i / v_i` computed exactly on an integer
/// scaling of the positive vector `v`.
fn collatz_wielandt(v: &[f64], succ: &[Vec<usize>]) -> Interval {
    let scale = (1u64 << 50) as f64;
    let vi: Vec<i128> = v.iter().map(|&x| ((x * scale).round() as i128).max(1)).collect();
    let mut lo: Option<(i128, i128)> = None;
    let mut hi: Option<(i128, i128)> = None;
    for (i, s) in succ.iter().enumerate() {
        let num: i128 = s.iter().map(|&j| vi[j]).sum();
        let den = vi[i];
        if lo.is_none_or(|(a, b)| num * b < a * den) {
            lo = Some((num, den));
        }
        if hi.is_none_or(|(a, b)| num * b > a * den) {
            hi = Some((num, den));
        }
    }
    let (ln, ld) = lo.expect("nonempty component");
    let (hn, hd) = hi.expect("nonempty component");
    Interval {
        lo: ratio_down(ln, ld),
        hi: ratio_up(hn, hd),
    }
}

fn ratio_down(n: i128, d: i128) -> f64 {
    if n % d == 0 && (n / d).abs() < (1 << 52) {
        return (n / d) as f64;
    }
    let r = n as f64 / d as f64;
    r.next_down().next_down().next_down()
}

fn ratio_up(n: i128, d: i128) -> f64 {
    if n % d == 0 && (n / d).abs() < (1 << 52) {
        return (n / d) as f64;
    }
    let r = n as f64 / d as f64;
    r.next_up().next_up().next_up()
}

fn matrix(succ: &[Vec<usize>]) -> Vec<Vec<i64>> {
    let k = succ.len();
    let mut a = vec![vec![0i64; k]; k];
    for (i, s) in succ.iter().enumerate() {
        for &j in s {
            a[i][j] += 1;
        }
    }
    a
}

fn exact_radius(succ: &[Vec<usize>], rel: f64) -> Result<Interval> {
    let a = matrix(succ);
    let (lo, hi) = perron_root(&a, rel)?;
    Ok(Interval {
        lo: rat_down(&lo),
        hi: rat_up(&hi),
    })
}

fn row_sum_bound(a: &[Vec<i64>]) -> i64 {
    a.iter().map(|r| r.iter().sum::<i64>()).max().unwrap_or(0).max(1)
}

/// Isolating interval for the largest real root of the characteristic polynomial.
fn perron_root(a: &[Vec<i64>], rel: f64) -> Result<(BigRational, BigRational)> {
    let p = Poly::from_ints(&charpoly(a));
    let hi = BigRational::from_integer(BigInt::from(row_sum_bound(a)));
    let lo = BigRational::new(BigInt::from(-1), BigInt::from(1));
    let width = rational(rel.max(1e-30));
    largest_root(&p, lo, hi, &width).ok_or_else(|| Error::InvalidInput("matrix has no real eigenvalue".into()))
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

fn rat_down(r: &BigRational) -> f64 {
    r.to_f64().expect("finite").next_down().next_down()
}

fn rat_up(r: &BigRational) -> f64 {
    r.to_f64().expect("finite").next_up().next_up()
}

/// Outcome of comparing two entropies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EntropyOrder {
    Less,
    Equal,
    Greater,
    Unknown,
}

/// Compares entropies by interval refinement, then exactly through characteristic
/// polynomials when the intervals overlap.
pub fn compare_entropy(a: &Presentation, b: &Presentation, budget: &Budget) -> Result<(EntropyOrder, Interval, Interval)> {
    let ia = entropy(a, 1e-12, budget)?;
    let ib = entropy(b, 1e-12, budget)?;
    if let Some(o) = ia.compare(&ib) {
        return Ok((from_ordering(o), ia, ib));
    }
    let qa = counting_presentation(a, budget)?;
    let qb = counting_presentation(b, budget)?;
    if qa.vertex_count() > EXACT_LIMIT || qb.vertex_count() > EXACT_LIMIT {
        return Ok((EntropyOrder::Unknown, ia, ib));
    }
    let ma = matrix(&qa.adjacency_lists());
    let mb = matrix(&qb.adjacency_lists());
    Ok((exact_compare(&ma, &mb), ia, ib))
}

fn from_ordering(o: Ordering) -> EntropyOrder {
    match o {
        Ordering::Less => EntropyOrder::Less,
        Ordering::Equal => EntropyOrder::Equal,
        Ordering::Greater => EntropyOrder::Greater,
    }
}

fn exact_compare(ma: &[Vec<i64>], mb: &[Vec<i64>]) -> EntropyOrder {
    let pa = Poly::from_ints(&charpoly(ma)).squarefree();
    let pb = Poly::from_ints(&charpoly(mb)).squarefree();
    let g = pa.gcd(&pb);
    let top = BigRational::from_integer(BigInt::from(row_sum_bound(ma).max(row_sum_bound(mb))));
    let bottom = BigRational::from_integer(BigInt::from(-1));
    let width = BigRational::new(BigInt::from(1), BigInt::from(1u64 << 40));
    let (Some((alo, ahi)), Some((blo, bhi))) = (
        largest_root(&pa, bottom.clone(), top.clone(), &width),
        largest_root(&pb, bottom, top, &width),
    ) else {
        return EntropyOrder::Unknown;
    };
    let in_g = |lo: &BigRational, hi: &BigRational| {
        g.degree() > 0 && super::poly::Sturm::new(&g).count(lo, hi) > 0
    };
    let a_root_of_b = in_g(&alo, &ahi);
    let b_root_of_a = in_g(&blo, &bhi);
    match (a_root_of_b, b_root_of_a) {
        (true, true) => EntropyOrder::Equal,
        (true, false) => EntropyOrder::Less,
        (false, true) => EntropyOrder::Greater,
        (false, false) => {
            let mut fine = width;
            for _ in 0..64 {
                let (Some((alo, ahi)), Some((blo, bhi))) = (
                    largest_root(&pa, BigRational::from_integer(BigInt::from(-1)), BigRational::from_integer(BigInt::from(row_sum_bound(ma))), &fine),
                    largest_root(&pb, BigRational::from_integer(BigInt::from(-1)), BigRational::from_integer(BigInt::from(row_sum_bound(mb))), &fine),
                ) else {
                    return EntropyOrder::Unknown;
                };
                if ahi < blo {
                    return EntropyOrder::Less;
                }
                if bhi < alo {
                    return EntropyOrder::Greater;
                }
                fine = &fine * BigRational::new(BigInt::from(1), BigInt::from(1u64 << 20));
                if fine.is_zero() {
                    break;
                }
            }
            EntropyOrder::Unknown
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift_core::language::fixtures::*;

    #[test]
    fn full_shifts_contain_log_k() {
        let b = Budget::default();
        for k in 2..=4 {
            let iv = entropy(&Presentation::full_shift(k), 1e-9, &b).unwrap();
            assert!(iv.contains((k as f64).ln()));
            assert!(iv.width() <= 1e-9);
        }
    }

    #[test]
    fn golden_mean_and_fixed_point() {
        let b = Budget::default();
        let iv = entropy(&golden_mean(), 1e-9, &b).unwrap();
        assert!(iv.contains(((1.0 + 5f64.sqrt()) / 2.0).ln()));
        assert!((iv.lo - 0.481212).abs() < 1e-6);
        let fixed = Presentation::full_shift(1);
        assert_eq!(entropy(&fixed, 1e-9, &b).unwrap(), Interval::point(0.0));
    }

    #[test]
    fn even_shift_matches_golden_mean() {
        let b = Budget::default();
        let (o, _, _) = compare_entropy(&even_shift(), &golden_mean(), &b).unwrap();
        assert_eq!(o, EntropyOrder::Equal);
        let (o, _, _) = compare_entropy(&golden_mean(), &Presentation::full_shift(2), &b).unwrap();
        assert_eq!(o, EntropyOrder::Less);
    }

    #[test]
    fn refinement_nests() {
        let b = Budget::default();
        let coarse = entropy(&golden_mean(), 1e-3, &b).unwrap();
        let fine = entropy(&golden_mean(), 1e-12, &b).unwrap();
        assert!(coarse.lo <= fine.lo && fine.hi <= coarse.hi);
    }

    #[test]
    fn exact_fallback_agrees() {
        let a = vec![vec![1, 1], vec![1, 0]];
        let (lo, hi) = perron_root(&a, 1e-12).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!(rat_down(&lo) <= phi && phi <= rat_up(&hi));
        assert_eq!(exact_compare(&a, &[vec![0, 1], vec![1, 1]]), EntropyOrder::Equal);
        assert_eq!(exact_compare(&a, &[vec![2]]), EntropyOrder::Less);
    }
}

//! Exact univariate polynomials over the rationals: characteristic polynomials,
//! gcds and Sturm-sequence root isolation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<BigRational>);

impl Poly {
    fn trim(mut c: Vec<BigRational>) -> Poly {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_ints(c: &[BigInt]) -> Poly {
        Self::trim(c.iter().map(|x| BigRational::from_integer(x.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("nonzero polynomial")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.0
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        Self::trim(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn monic(&self) -> Poly {
        let l = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &l).collect())
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let mut r = self.0.clone();
        let dd = d.degree();
        if r.len() < d.0.len() {
            return (Poly(Vec::new()), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        let lead = d.lead().clone();
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] / &lead;
            if !c.is_zero() {
                for (j, dj) in d.0.iter().enumerate() {
                    r[i + j] = &r[i + j] - &c * dj;
                }
            }
            q[i] = c;
        }
        (Self::trim(q), Self::trim(r))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }

    /// The squarefree part `p / gcd(p, p')`.
    pub fn squarefree(&self) -> Poly {
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.monic()
        } else {
            self.div_rem(&g).0.monic()
        }
    }
}

/// Characteristic polynomial `det(xI - A)` by Faddeev–LeVerrier in exact integers.
pub fn charpoly(a: &[Vec<i64>]) -> Vec<BigInt> {
    let n = a.len();
    let am: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut c = vec![BigInt::zero(); n + 1];
    c[n] = BigInt::one();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for (l, ail) in am[i].iter().enumerate() {
                if ail.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !m[l][j].is_zero() {
                        next[i][j] += ail * &m[l][j];
                    }
                }
            }
            next[i][i] += &c[n - k + 1];
        }
        m = next;
        let mut tr = BigInt::zero();
        for i in 0..n {
            for l in 0..n {
                if !am[i][l].is_zero() && !m[l][i].is_zero() {
                    tr += &am[i][l] * &m[l][i];
                }
            }
        }
        c[n - k] = -(tr / BigInt::from(k));
    }
    c
}

/// Sturm sequence of a squarefree polynomial.
pub struct Sturm(Vec<Poly>);

impl Sturm {
    pub fn new(p: &Poly) -> Sturm {
        let mut seq = vec![p.clone(), p.derivative()];
        while !seq.last().expect("nonempty").is_zero() {
            let k = seq.len();
            let r = seq[k - 2].div_rem(&seq[k - 1]).1.neg();
            if r.is_zero() {
                break;
            }
            seq.push(r);
        }
        seq.retain(|q| !q.is_zero());
        Sturm(seq)
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last = 0i8;
        for q in &self.0 {
            let v = q.eval(x);
            let s = if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            };
            if s != 0 {
                if last != 0 && s != last {
                    count += 1;
                }
                last = s;
            }
        }
        count
    }

    /// Number of distinct real roots in `(a, b]`.
    pub fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Isolating interval `(lo, hi]` for the largest real root in `(lo0, hi0]`, refined
/// until `hi - lo <= width`.
pub fn largest_root(
    p: &Poly,
    lo0: BigRational,
    hi0: BigRational,
    width: &BigRational,
) -> Option<(BigRational, BigRational)> {
    let sf = p.squarefree();
    let st = Sturm::new(&sf);
    if st.count(&lo0, &hi0) == 0 {
        return None;
    }
    let (mut lo, mut hi) = (lo0, hi0);
    let two = BigRational::from_integer(BigInt::from(2));
    while &hi - &lo > *width {
        let mid = (&lo + &hi) / &two;
        if st.count(&mid, &hi) > 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn golden_mean_charpoly() {
        let c = charpoly(&[vec![1, 1], vec![1, 0]]);
        assert_eq!(c, vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
    }

    #[test]
    fn largest_root_of_x2_minus_x_minus_1() {
        let p = Poly::from_ints(&charpoly(&[vec![1, 1], vec![1, 0]]));
        let (lo, hi) = largest_root(&p, q(0, 1), q(2, 1), &q(1, 1_000_000_000)).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let to_f = |r: &BigRational| r.numer().to_string().parse::<f64>().unwrap() / r.denom().to_string().parse::<f64>().unwrap();
        assert!(to_f(&lo) <= phi + 1e-12 && phi <= to_f(&hi) + 1e-12);
    }

    #[test]
    fn gcd_and_squarefree() {
        let p = Poly::from_ints(&[BigInt::from(1), BigInt::from(-2), BigInt::from(1)]);
        assert_eq!(p.squarefree().degree(), 1);
        let a = Poly::from_ints(&[BigInt::from(-1), BigInt::from(0), BigInt::from(1)]);
        let b = Poly::from_ints(&[BigInt::from(-1), BigInt::from(1)]);
        assert_eq!(a.gcd(&b).degree(), 1);
    }
}

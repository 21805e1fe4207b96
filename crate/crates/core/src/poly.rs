//! Polynomial utilities: dense rational polynomials with Sturm-sequence root
//! counting, and overflow-safe floating evaluation at `s = e^{-t}`.
//!
//! The rational layer is exact (arbitrary-precision `BigRational`
//! coefficients), so identities such as "this residual is the zero
//! polynomial" or "this polynomial has exactly j − 1 positive roots" are
//! decided by algebra, not by sampling.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Dense univariate polynomial over ℚ, coefficients in ascending degree
/// order. The zero polynomial is represented by an empty coefficient list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_integers(cs: &[i64]) -> Self {
        Self::new(
            cs.iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn constant_term(&self) -> BigRational {
        self.coeffs.first().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn derivative(&self) -> RatPoly {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect();
        RatPoly::new(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiply by `x^power`.
    pub fn shift_up(&self, power: usize) -> RatPoly {
        if self.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs = vec![BigRational::zero(); power];
        coeffs.extend(self.coeffs.iter().cloned());
        RatPoly::new(coeffs)
    }

    pub fn add(&self, other: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero);
            coeffs.push(a + b);
        }
        RatPoly::new(coeffs)
    }

    pub fn sub(&self, other: &RatPoly) -> RatPoly {
        self.add(&other.scale(&-BigRational::from_integer(BigInt::from(1))))
    }

    pub fn mul(&self, other: &RatPoly) -> RatPoly {
        if self.is_zero() || other.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::new(coeffs)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coeffs
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// Remainder of `self` divided by `div` (exact rational long division).
    pub fn rem(&self, div: &RatPoly) -> RatPoly {
        let dd = div.degree().expect("division by the zero polynomial");
        let dl = div.leading().unwrap().clone();
        let mut rem = self.clone();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let factor = rem.leading().unwrap() / &dl;
            let shift = rd - dd;
            let mut coeffs = rem.coeffs.clone();
            for (i, c) in div.coeffs.iter().enumerate() {
                coeffs[shift + i] = &coeffs[shift + i] - &factor * c;
            }
            // Force the leading term to cancel exactly.
            coeffs[rd] = BigRational::zero();
            rem = RatPoly::new(coeffs);
        }
        rem
    }

    /// Degree of gcd(self, other); `None` if both are zero.
    pub fn gcd_degree(&self, other: &RatPoly) -> Option<usize> {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.degree()
    }
}

fn sign_variations(signs: impl Iterator<Item = i8>) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn rational_sign(r: &BigRational) -> i8 {
    if r.is_zero() {
        0
    } else if r.is_negative() {
        -1
    } else {
        1
    }
}

/// Number of distinct real roots of `p` in the open interval (0, ∞),
/// by Sturm's theorem. Requires p(0) ≠ 0.
pub fn count_positive_roots(p: &RatPoly) -> usize {
    assert!(!p.is_zero(), "root count of the zero polynomial");
    assert!(
        !p.constant_term().is_zero(),
        "count_positive_roots requires p(0) != 0"
    );
    if p.degree() == Some(0) {
        return 0;
    }

    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        if seq[n - 1].degree() == Some(0) {
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        let neg = r.scale(&-BigRational::from_integer(BigInt::from(1)));
        seq.push(neg);
    }

    // Sign variations at 0+ (constant terms) and at +infinity (leading terms).
    let at_zero = sign_variations(seq.iter().map(|q| rational_sign(&q.constant_term())));
    let at_inf = sign_variations(
        seq.iter()
            .map(|q| q.leading().map(rational_sign).unwrap_or(0)),
    );
    at_zero - at_inf
}

// ---------------------------------------------------------------------------
// Floating-point helpers in the variable s = e^{-t}.
// ---------------------------------------------------------------------------

/// Horner evaluation of a dense f64 polynomial (ascending coefficients).
pub fn eval_f64(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Sign (−1, 0, or +1) and log of |p(e^{-t})|, safe for any t.
///
/// For t < 0 the argument s = e^{-t} can overflow, so the polynomial is
/// evaluated through its reversal: p(s) = s^d · rev(1/s) with 1/s = e^{t}
/// well inside the representable range.
pub fn signlog_at_exp(coeffs: &[f64], t: f64) -> (f64, f64) {
    assert!(!coeffs.is_empty(), "empty polynomial");
    let deg = coeffs.len() - 1;
    if t >= 0.0 {
        let s = (-t).exp();
        let v = eval_f64(coeffs, s);
        if v == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (v.signum(), v.abs().ln())
        }
    } else {
        let y = t.exp();
        // rev(y) = sum a_{deg-i} y^i
        let w = coeffs.iter().fold(0.0, |acc, &c| acc * y + c);
        if w == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (w.signum(), deg as f64 * (-t) + w.abs().ln())
        }
    }
}

/// Cauchy bound: every real root of p lies in (−B, B).
pub fn cauchy_root_bound(coeffs: &[f64]) -> f64 {
    let lead = *coeffs.last().expect("empty polynomial");
    assert!(lead != 0.0);
    let m = coeffs[..coeffs.len() - 1]
        .iter()
        .fold(0.0f64, |acc, &c| acc.max((c / lead).abs()));
    1.0 + m
}

/// Bisect a sign change of `f` on [a, b] down to a tight relative width.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a) <= 1e-15 * b.abs().max(a.abs()).max(1e-30) {
            break;
        }
    }
    Some(0.5 * (a + b))
}

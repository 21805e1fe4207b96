//! Recursive closed-form solutions of the Morse-form equation
//! v'' = (e^{-2t} − (2κ + 2j − 1)e^{-t} + κ²) v and the Dirac solutions and
//! angle functions built from them.
//!
//! The ground solution is v₁(t, κ) = e^{−e^{−t} − κt}; the chain is raised by
//! v_{j+1} = (κ + j − e^{−t}) v_j − v_j'. Writing s = e^{−t} and factoring
//! the weight, v_j(t) = p_j(s) · e^{−s − κt} with p₁ = 1 and
//!
//! ```text
//! p_{j+1}(s) = (2κ + j − 2s) p_j(s) + s p_j'(s),
//! ```
//!
//! so every claim about the chain becomes finite polynomial algebra:
//! deg p_j = j − 1, leading coefficient (−2)^{j−1}, constant term
//! ∏_{i=1}^{j−1} (2κ + i), exactly j − 1 simple positive roots, and the
//! ratio limits v_j/v_{j+1} → 1/(2κ + j) (t → +∞) and → 0 (t → −∞).
//!
//! Coefficients are carried exactly: a κ supplied as an `f64` is lifted to
//! the binary rational it denotes, so residuals and root counts are decided
//! by exact arithmetic in either case; floating-point images of the
//! coefficients are kept alongside for overflow-safe evaluation.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::poly::{self, RatPoly};

/// How κ was supplied.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithmeticMode {
    /// κ given as an explicit rational.
    ExactRational,
    /// κ given as a double (lifted losslessly to its binary rational).
    Floating,
}

/// The weighted-polynomial representation of the level-j chain member
/// v_j(t, κ) = p_j(e^{−t}) · e^{−e^{−t} − κt}.
#[derive(Debug, Clone)]
pub struct WeightedPolynomial {
    level: u32,
    kappa: BigRational,
    kappa_f64: f64,
    mode: ArithmeticMode,
    poly: RatPoly,
    coeffs_f64: Vec<f64>,
}

/// Sign and log-magnitude of a chain value; immune to under/overflow.
#[derive(Debug, Clone, Copy)]
pub struct LogValue {
    pub sign: f64,
    pub log_abs: f64,
}

impl LogValue {
    pub fn value(&self) -> f64 {
        self.sign * self.log_abs.exp()
    }
}

fn rational_from_f64(x: f64, what: &str) -> Result<BigRational> {
    BigRational::from_float(x)
        .ok_or_else(|| Error::Domain(format!("{what} must be finite, got {x}")))
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl WeightedPolynomial {
    /// Level-1 ground member, p₁ = 1, for κ ≥ 0 given as a double.
    pub fn ground(kappa: f64) -> Result<Self> {
        let r = rational_from_f64(kappa, "kappa")?;
        Self::from_kappa(r, ArithmeticMode::Floating)
    }

    /// Level-1 ground member for an exact rational κ = num/den ≥ 0.
    pub fn ground_exact(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("kappa denominator must be nonzero".into()));
        }
        let r = BigRational::new(BigInt::from(num), BigInt::from(den));
        Self::from_kappa(r, ArithmeticMode::ExactRational)
    }

    fn from_kappa(kappa: BigRational, mode: ArithmeticMode) -> Result<Self> {
        if kappa.is_negative() {
            return Err(Error::Domain("kappa must be nonnegative".into()));
        }
        let kappa_f64 = kappa.to_f64().unwrap_or(f64::NAN);
        let poly = RatPoly::from_integers(&[1]);
        let coeffs_f64 = poly.to_f64();
        Ok(Self {
            level: 1,
            kappa,
            kappa_f64,
            mode,
            poly,
            coeffs_f64,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn kappa(&self) -> f64 {
        self.kappa_f64
    }

    pub fn kappa_rational(&self) -> &BigRational {
        &self.kappa
    }

    pub fn mode(&self) -> ArithmeticMode {
        self.mode
    }

    pub fn poly(&self) -> &RatPoly {
        &self.poly
    }

    pub fn coefficients_f64(&self) -> &[f64] {
        &self.coeffs_f64
    }

    pub fn constant_term(&self) -> BigRational {
        self.poly.constant_term()
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.poly.leading().cloned().unwrap_or_else(BigRational::zero)
    }

    /// One raising step: p_{j+1} = (2κ + j − 2s) p_j + s p_j'.
    pub fn raise(&self) -> Self {
        let j = big(self.level as i64);
        let two_kappa = &self.kappa * big(2);
        let affine = RatPoly::new(vec![&two_kappa + &j, big(-2)]);
        let poly = affine
            .mul(&self.poly)
            .add(&self.poly.derivative().shift_up(1));
        let coeffs_f64 = poly.to_f64();
        Self {
            level: self.level + 1,
            kappa: self.kappa.clone(),
            kappa_f64: self.kappa_f64,
            mode: self.mode,
            poly,
            coeffs_f64,
        }
    }

    /// The polynomial factor of v_j'' − (s² − (2κ + 2j − 1)s + κ²) v_j after
    /// the weight is removed; identically zero exactly when v_j solves its
    /// second-order equation. Worked out in s, the factor is
    /// s² p'' + s(2κ + 1 − 2s) p' + 2(j − 1) s p.
    pub fn residual_polynomial(&self) -> RatPoly {
        let p = &self.poly;
        let dp = p.derivative();
        let ddp = dp.derivative();
        let two_kappa_plus_one = &self.kappa * big(2) + big(1);
        let term1 = ddp.shift_up(2);
        let term2 = dp
            .scale(&two_kappa_plus_one)
            .shift_up(1)
            .add(&dp.scale(&big(-2)).shift_up(2));
        let term3 = p.scale(&big(2 * (self.level as i64 - 1))).shift_up(1);
        term1.add(&term2).add(&term3)
    }

    /// Sign and log|v_j| at t, safe for any t (s = e^{−t} may overflow; the
    /// polynomial part is evaluated through its reversal).
    pub fn evaluate(&self, t: f64) -> LogValue {
        let (sign, plog) = poly::signlog_at_exp(&self.coeffs_f64, t);
        let s = (-t).exp();
        let log_abs = plog - s - self.kappa_f64 * t;
        LogValue { sign, log_abs }
    }

    /// Plain value v_j(t) (may under/overflow for extreme t).
    pub fn value(&self, t: f64) -> f64 {
        self.evaluate(t).value()
    }

    /// Value and derivative of v_j at t in plain f64, using
    /// v_j' = (−s p'(s) + (s − κ) p(s)) · weight.
    pub fn value_and_derivative(&self, t: f64) -> (f64, f64) {
        let s = (-t).exp();
        let weight = (-s - self.kappa_f64 * t).exp();
        let p = poly::eval_f64(&self.coeffs_f64, s);
        let dp = {
            let d: Vec<f64> = self
                .coeffs_f64
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect();
            poly::eval_f64(&d, s)
        };
        let v = p * weight;
        let vp = (-s * dp + (s - self.kappa_f64) * p) * weight;
        (v, vp)
    }

    /// Number of zeros of v_j on the line = number of positive roots of p_j,
    /// counted without multiplicity by exact Sturm sequences. A detected
    /// multiple root is an error: the zeros of a nontrivial solution of a
    /// second-order equation are simple.
    pub fn count_zeros(&self) -> Result<usize> {
        if self.poly.degree() == Some(0) {
            return Ok(0);
        }
        let gcd_deg = self.poly.gcd_degree(&self.poly.derivative());
        if gcd_deg.unwrap_or(0) > 0 {
            return Err(Error::MultipleRoot { level: self.level });
        }
        Ok(poly::count_positive_roots(&self.poly))
    }
}

/// Build the chain v₁, …, v_max for a given ground member.
pub fn chain(ground: WeightedPolynomial, max_level: u32) -> Vec<WeightedPolynomial> {
    assert!(max_level >= 1);
    let mut out = Vec::with_capacity(max_level as usize);
    out.push(ground);
    while (out.len() as u32) < max_level {
        let next = out.last().unwrap().raise();
        out.push(next);
    }
    out
}

/// The ratio limits of v_j/v_{j+1}: 1/(2κ + j) at t → +∞ and 0 at t → −∞.
///
/// Both are established by exact algebra on the computed chain — the
/// constant-term identity p_{j+1}(0) = (2κ + j) p_j(0) gives the first, and
/// the degree step plus leading-ratio −1/2 gives the second — before the
/// floating values are returned.
pub fn ratio_limits(j: u32, kappa: f64) -> Result<(f64, f64)> {
    if j < 1 {
        return Err(Error::Domain("level must be at least 1".into()));
    }
    let levels = chain(WeightedPolynomial::ground(kappa)?, j + 1);
    let pj = &levels[(j - 1) as usize];
    let pj1 = &levels[j as usize];

    let factor = pj.kappa_rational() * big(2) + big(j as i64);
    if pj.constant_term() * &factor != pj1.constant_term() {
        return Err(Error::Consistency(
            "constant-term recursion identity failed".into(),
        ));
    }
    if pj1.poly().degree() != pj.poly().degree().map(|d| d + 1) {
        return Err(Error::Consistency("degree step failed".into()));
    }
    let lead_ratio = pj.leading_coefficient() / pj1.leading_coefficient();
    if lead_ratio != BigRational::new(BigInt::from(-1), BigInt::from(2)) {
        return Err(Error::Consistency("leading-coefficient ratio failed".into()));
    }

    let limit = (BigRational::one() / factor).to_f64().unwrap();
    Ok((limit, 0.0))
}

/// The closed-form Dirac solution built from chain levels j and j + 1 with
/// κ = k − j: u = (v_{j+1}/√(2kj − j²), v_j) solves
///
/// ```text
/// u₁' = (e^{−t} − k) u₁ − c u₂,   u₂' = c u₁ + (k − e^{−t}) u₂
/// ```
///
/// with coupling c = −√(2kj − j²).
#[derive(Debug, Clone)]
pub struct DiracSolution {
    pub k: f64,
    pub j: u32,
    /// The coupling constant −√(2kj − j²).
    pub c: f64,
    /// True when j = k, i.e. c = −k sits on the boundary of (−k, 0).
    pub degenerate: bool,
    vj: WeightedPolynomial,
    vj1: WeightedPolynomial,
}

pub fn dirac_solution(k: f64, j: u32) -> Result<DiracSolution> {
    if j < 1 {
        return Err(Error::Domain("level must be at least 1".into()));
    }
    let jf = j as f64;
    if !(k.is_finite() && jf <= k) {
        return Err(Error::Domain(format!("requires j <= k, got j = {j}, k = {k}")));
    }
    let kappa = k - jf;
    let levels = chain(WeightedPolynomial::ground(kappa)?, j + 1);
    let c = -(jf * (2.0 * k - jf)).sqrt();
    Ok(DiracSolution {
        k,
        j,
        c,
        degenerate: jf == k,
        vj: levels[(j - 1) as usize].clone(),
        vj1: levels[j as usize].clone(),
    })
}

impl DiracSolution {
    pub fn vj(&self) -> &WeightedPolynomial {
        &self.vj
    }

    pub fn vj_plus_1(&self) -> &WeightedPolynomial {
        &self.vj1
    }

    /// Component values (u₁, u₂) in plain f64 (bounded windows only).
    pub fn components(&self, t: f64) -> [f64; 2] {
        let root = -self.c; // √(2kj − j²)
        [self.vj1.value(t) / root, self.vj.value(t)]
    }

    /// Components as sign/log pairs, safe for any t.
    pub fn components_log(&self, t: f64) -> [LogValue; 2] {
        let root = -self.c;
        let a = self.vj1.evaluate(t);
        let b = self.vj.evaluate(t);
        [
            LogValue {
                sign: a.sign,
                log_abs: a.log_abs - root.ln(),
            },
            b,
        ]
    }

    /// Maximum relative residual of the two Dirac equations at t.
    pub fn residual(&self, t: f64) -> f64 {
        let root = -self.c;
        let (vj, vj_p) = self.vj.value_and_derivative(t);
        let (vj1, vj1_p) = self.vj1.value_and_derivative(t);
        let u1 = vj1 / root;
        let u2 = vj;
        let u1_p = vj1_p / root;
        let u2_p = vj_p;
        let s = (-t).exp();

        let rhs1a = (s - self.k) * u1;
        let rhs1b = -self.c * u2;
        let r1 = (u1_p - rhs1a - rhs1b).abs()
            / (u1_p.abs() + rhs1a.abs() + rhs1b.abs() + 1e-300);

        let rhs2a = self.c * u1;
        let rhs2b = (self.k - s) * u2;
        let r2 = (u2_p - rhs2a - rhs2b).abs()
            / (u2_p.abs() + rhs2a.abs() + rhs2b.abs() + 1e-300);

        r1.max(r2)
    }
}

/// The continuous angle function of the level-j chain pair:
///
/// ```text
/// φ_j(t, κ) = arctan( v_j/v_{j+1} · √(2κj + j²) ) + π,
/// ```
///
/// unwound onto the single monotone non-increasing branch with
/// φ_j(−∞) = π. The branch drops by π across each of the j zeros of
/// v_{j+1}, ending at θ₋(−√(2κj + j²), κ + j) − (j − 1)π.
#[derive(Debug, Clone)]
pub struct AnglePhi {
    j: u32,
    kappa: f64,
    scale: f64,
    pj: Vec<f64>,
    pj1: Vec<f64>,
    /// Roots of p_{j+1} in s, ascending; all positive and simple.
    roots: Vec<f64>,
    lead_sign: f64,
}

impl AnglePhi {
    pub fn new(j: u32, kappa: f64) -> Result<Self> {
        if j < 1 {
            return Err(Error::Domain("level must be at least 1".into()));
        }
        let levels = chain(WeightedPolynomial::ground(kappa)?, j + 1);
        let polys: Vec<Vec<f64>> = levels.iter().map(|w| w.coefficients_f64().to_vec()).collect();
        let roots = positive_roots_by_interlacing(&polys)?;
        let pj1 = polys[j as usize].clone();
        let lead_sign = pj1.last().copied().unwrap_or(0.0).signum();
        Ok(Self {
            j,
            kappa,
            scale: ((2.0 * kappa * j as f64) + (j as f64) * (j as f64)).sqrt(),
            pj: polys[(j - 1) as usize].clone(),
            pj1,
            roots,
            lead_sign,
        })
    }

    pub fn level(&self) -> u32 {
        self.j
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// Zeros of v_{j+1} in the t variable, ascending.
    pub fn pole_positions(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.roots.iter().map(|&s| -s.ln()).collect();
        ts.reverse();
        ts
    }

    pub fn eval(&self, t: f64) -> f64 {
        let s = (-t).exp();
        // Crossings so far: roots of p_{j+1} above the current s (s runs
        // from +∞ down to 0 as t increases).
        let below = self.roots.partition_point(|&r| r <= s);
        let mut m = self.roots.len() - below;

        let (sign_j, log_j) = poly::signlog_at_exp(&self.pj, t);
        let (sign_j1, log_j1) = poly::signlog_at_exp(&self.pj1, t);

        if sign_j1 == 0.0 {
            // Exactly at a pole of the tangent: branch value π/2 mod π.
            return PI / 2.0 - m as f64 * PI;
        }

        // Near a root the evaluated sign is the ground truth for whether the
        // crossing has happened; re-align the crossing count with it.
        let expected = self.lead_sign * if m % 2 == 0 { 1.0 } else { -1.0 };
        if sign_j1 != expected {
            let nearest_above = below < self.roots.len() && {
                let up = self.roots[below] - s;
                let down = if below > 0 { s - self.roots[below - 1] } else { f64::INFINITY };
                up <= down
            };
            if nearest_above && m > 0 {
                m -= 1;
            } else if m < self.roots.len() {
                m += 1;
            }
        }

        let ratio = sign_j * sign_j1 * (log_j - log_j1).exp() * self.scale;
        ratio.atan() + PI - m as f64 * PI
    }
}

/// Convenience wrapper: φ_j(t, κ) for a single evaluation.
pub fn angle_phi(j: u32, kappa: f64, t: f64) -> Result<f64> {
    Ok(AnglePhi::new(j, kappa)?.eval(t))
}

/// Roots of each chain polynomial by interlacing: the roots of p_{j+1}
/// are separated by those of p_j, so every root is bracketed by a sign
/// change and found by bisection. Returns the roots of the last level.
fn positive_roots_by_interlacing(polys: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mut prev: Vec<f64> = Vec::new();
    for (idx, coeffs) in polys.iter().enumerate() {
        let expected = idx; // p_{idx+1} has idx positive roots
        if expected == 0 {
            prev = Vec::new();
            continue;
        }
        let bound = poly::cauchy_root_bound(coeffs);
        let mut edges = Vec::with_capacity(prev.len() + 2);
        edges.push(0.0);
        edges.extend(prev.iter().copied());
        edges.push(bound);
        let f = |x: f64| poly::eval_f64(coeffs, x);
        let mut roots = Vec::with_capacity(expected);
        for w in edges.windows(2) {
            match poly::bisect_root(f, w[0], w[1]) {
                Some(r) => roots.push(r),
                None => {
                    return Err(Error::Consistency(format!(
                        "lost a root bracket at level {}",
                        idx + 1
                    )))
                }
            }
        }
        if roots.len() != expected {
            return Err(Error::Consistency(format!(
                "level {} produced {} roots, expected {}",
                idx + 1,
                roots.len(),
                expected
            )));
        }
        prev = roots;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ground_rejects_negative_kappa() {
        assert!(WeightedPolynomial::ground(-0.5).is_err());
        assert!(WeightedPolynomial::ground(0.0).is_ok());
        assert!(WeightedPolynomial::ground_exact(1, 2).is_ok());
    }

    #[test]
    fn one_raise_matches_hand_computation() {
        // p₂ = (2κ + 1) − 2s
        for (num, den) in [(0i64, 1i64), (1, 2), (7, 3)] {
            let g = WeightedPolynomial::ground_exact(num, den).unwrap();
            let p2 = g.raise();
            let expect = RatPoly::new(vec![rat(2 * num + den, den), rat(-2, 1)]);
            assert_eq!(p2.poly(), &expect);
        }
    }

    #[test]
    fn two_raises_at_kappa_zero() {
        // p₃ = 4s² − 8s + 2 for κ = 0
        let g = WeightedPolynomial::ground_exact(0, 1).unwrap();
        let p3 = g.raise().raise();
        assert_eq!(p3.poly(), &RatPoly::from_integers(&[2, -8, 4]));
        assert_eq!(p3.leading_coefficient(), rat(4, 1));
        assert_eq!(p3.constant_term(), rat(2, 1));
    }

    #[test]
    fn residual_is_exactly_zero_along_the_chain() {
        for (num, den) in [(0i64, 1i64), (1, 2), (1, 1), (2, 1), (7, 3)] {
            let mut w = WeightedPolynomial::ground_exact(num, den).unwrap();
            for _ in 0..12 {
                assert!(w.residual_polynomial().is_zero(), "level {}", w.level());
                w = w.raise();
            }
        }
    }

    #[test]
    fn residual_zero_for_float_kappa_too() {
        let mut w = WeightedPolynomial::ground(2.3).unwrap();
        assert_eq!(w.mode(), ArithmeticMode::Floating);
        for _ in 0..12 {
            assert!(w.residual_polynomial().is_zero());
            w = w.raise();
        }
    }

    #[test]
    fn zero_counts_are_level_minus_one() {
        assert_eq!(
            WeightedPolynomial::ground_exact(0, 1).unwrap().count_zeros().unwrap(),
            0
        );
        let p2 = WeightedPolynomial::ground_exact(0, 1).unwrap().raise();
        assert_eq!(p2.count_zeros().unwrap(), 1); // root s = 1/2
        let p3 = p2.raise();
        assert_eq!(p3.count_zeros().unwrap(), 2); // roots 1 ± 1/√2
    }

    #[test]
    fn nontrivial_up_to_level_thirteen() {
        let mut w = WeightedPolynomial::ground_exact(1, 2).unwrap();
        for _ in 0..12 {
            w = w.raise();
            assert!(!w.poly().is_zero());
        }
    }

    #[test]
    fn leading_and_constant_terms() {
        let levels = chain(WeightedPolynomial::ground_exact(7, 3).unwrap(), 9);
        let kappa = rat(7, 3);
        for w in &levels {
            let j = w.level() as i64;
            let expect_lead = rat(-2, 1).pow((j - 1) as i32);
            assert_eq!(w.leading_coefficient(), expect_lead);
            let mut expect_const = rat(1, 1);
            for i in 1..j {
                expect_const *= &kappa * rat(2, 1) + rat(i, 1);
            }
            assert_eq!(w.constant_term(), expect_const);
        }
    }

    #[test]
    fn ratio_limit_values() {
        let (plus, minus) = ratio_limits(1, 0.0).unwrap();
        assert_relative_eq!(plus, 1.0);
        assert_eq!(minus, 0.0);

        let (plus, _) = ratio_limits(2, 0.0).unwrap();
        assert_relative_eq!(plus, 0.5);

        let (plus, _) = ratio_limits(5, 1.5).unwrap();
        assert_relative_eq!(plus, 1.0 / 8.0);
    }

    #[test]
    fn lowering_identity_closes_the_dirac_system() {
        // j p_{j+1} − s p_{j+1}' = j (2κ + j) p_j, exactly.
        for (num, den) in [(0i64, 1i64), (1, 1), (7, 3)] {
            let levels = chain(WeightedPolynomial::ground_exact(num, den).unwrap(), 9);
            for j in 1..levels.len() {
                let pj = levels[j - 1].poly();
                let pj1 = levels[j].poly();
                let lhs = pj1
                    .scale(&rat(j as i64, 1))
                    .sub(&pj1.derivative().shift_up(1));
                let factor = rat(j as i64, 1) * (rat(2 * num, den) + rat(j as i64, 1));
                assert_eq!(lhs, pj.scale(&factor), "level {j}");
            }
        }
    }

    #[test]
    fn chain_polynomials_share_no_roots() {
        let levels = chain(WeightedPolynomial::ground_exact(0, 1).unwrap(), 9);
        for w in levels.windows(2) {
            assert_eq!(w[0].poly().gcd_degree(w[1].poly()), Some(0));
        }
    }

    #[test]
    fn evaluation_examples() {
        // Level 1: sign +1 everywhere, log|v₁| = −e^{−t} − κt.
        let g = WeightedPolynomial::ground(0.5).unwrap();
        for &t in &[-3.0, 0.0, 2.0] {
            let v = g.evaluate(t);
            assert_eq!(v.sign, 1.0);
            assert_relative_eq!(v.log_abs, -(-t).exp() - 0.5 * t, epsilon = 1e-12);
        }

        // Level 2, κ = 0: sign flips at t = ln 2.
        let p2 = WeightedPolynomial::ground(0.0).unwrap().raise();
        assert_eq!(p2.evaluate(2.0f64.ln() - 0.2).sign, -1.0);
        assert_eq!(p2.evaluate(2.0f64.ln() + 0.2).sign, 1.0);

        // Deep negative t stays finite in the log domain.
        let v = p2.evaluate(-700.0);
        assert_eq!(v.sign, -1.0);
        assert!(v.log_abs < 0.0 && !v.log_abs.is_nan());
    }

    #[test]
    fn derivative_of_ground_is_logarithmic() {
        // v₁'/v₁ = e^{−t} − κ
        let g = WeightedPolynomial::ground(0.5).unwrap();
        for &t in &[-1.0, 0.0, 1.5] {
            let (v, vp) = g.value_and_derivative(t);
            assert_relative_eq!(vp / v, (-t).exp() - 0.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn dirac_solution_examples() {
        let sol = dirac_solution(2.0, 1).unwrap();
        assert_relative_eq!(sol.c, -3.0f64.sqrt(), epsilon = 1e-15);
        assert!(!sol.degenerate);
        for i in 0..=40 {
            let t = -5.0 + 0.25 * i as f64;
            assert!(sol.residual(t) < 1e-10, "t = {t}: {}", sol.residual(t));
        }

        assert!(dirac_solution(2.0, 3).is_err());
        assert!(dirac_solution(2.0, 2).unwrap().degenerate);
    }

    #[test]
    fn angle_limits_match_the_asymptotic_zeros() {
        // j = 1, κ = 1 (k = 2): terminal value θ₋(−√3, 2) = π/6.
        let phi = AnglePhi::new(1, 1.0).unwrap();
        assert_relative_eq!(phi.eval(40.0), PI / 6.0, epsilon = 1e-6);
        assert_relative_eq!(phi.eval(-40.0), PI, epsilon = 1e-6);

        // j = 2, κ = 0 is the degenerate c = −k case: θ₋ = π/4, shifted by π.
        let phi = AnglePhi::new(2, 0.0).unwrap();
        assert_relative_eq!(phi.eval(40.0), PI / 4.0 - PI, epsilon = 1e-6);
    }

    #[test]
    fn angle_is_monotone_and_continuous() {
        let phi = AnglePhi::new(3, 0.5).unwrap();
        let mut last = phi.eval(-30.0);
        for i in 1..=6000 {
            let t = -30.0 + i as f64 * 0.01;
            let v = phi.eval(t);
            assert!(v <= last + 1e-9, "increase at t = {t}");
            assert!((v - last).abs() < 0.2, "jump at t = {t}");
            last = v;
        }
    }

    #[test]
    fn angle_value_at_a_pole_is_half_pi_mod_pi() {
        // κ = 0, j = 1: v₂ vanishes at t = ln 2.
        let phi = AnglePhi::new(1, 0.0).unwrap();
        let poles = phi.pole_positions();
        assert_eq!(poles.len(), 1);
        assert_relative_eq!(poles[0], 2.0f64.ln(), epsilon = 1e-12);
        let v = phi.eval(poles[0]);
        assert!(crate::prufer::mod_pi_distance(v, PI / 2.0) < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn structural_identities_for_random_rational_kappa(
            num in 0i64..40, den in 1i64..12, levels in 2u32..8
        ) {
            let ws = chain(WeightedPolynomial::ground_exact(num, den).unwrap(), levels);
            let last = ws.last().unwrap();
            prop_assert!(last.residual_polynomial().is_zero());
            prop_assert_eq!(last.count_zeros().unwrap() as u32, levels - 1);
            let expect_lead = rat(-2, 1).pow((levels - 1) as i32);
            prop_assert_eq!(last.leading_coefficient(), expect_lead);
        }
    }
}

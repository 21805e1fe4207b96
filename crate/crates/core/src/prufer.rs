//! One-dimensional Dirac systems and the Prüfer transformation.
//!
//! A real two-component solution u of
//!
//! ```text
//! (-i σ₂ d/dx + m(x) σ₃ + l(x) σ₁ + q(x)) u(x) = 0,
//! ```
//!
//! written in polar form u = |u| (cos θ, sin θ), never vanishes, and its
//! angle satisfies the scalar Prüfer equation
//!
//! ```text
//! θ' = m cos 2θ + l sin 2θ + q,
//! ```
//!
//! while the amplitude is recovered by quadrature:
//! |u(x)| = |u(x₀)| exp ∫ (m sin 2θ − l cos 2θ).
//!
//! This module provides the coefficient container, continuous-branch angle
//! trajectories with certified mod-π bookkeeping, the equivalent vector
//! integration, amplitude recovery, and crossing counts.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode;

type CoeffFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The coefficient triple (m, l, q) of a one-dimensional Dirac system on an
/// interval. Unbounded ends are allowed; callers choose finite truncations.
#[derive(Clone)]
pub struct DiracCoefficients {
    m: CoeffFn,
    l: CoeffFn,
    q: CoeffFn,
    domain: (f64, f64),
}

impl std::fmt::Debug for DiracCoefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DiracCoefficients")
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl DiracCoefficients {
    pub fn new(
        m: impl Fn(f64) -> f64 + Send + Sync + 'static,
        l: impl Fn(f64) -> f64 + Send + Sync + 'static,
        q: impl Fn(f64) -> f64 + Send + Sync + 'static,
        domain: (f64, f64),
    ) -> Result<Self> {
        if !(domain.0 < domain.1) {
            return Err(Error::Domain("empty coefficient domain".into()));
        }
        Ok(Self {
            m: Arc::new(m),
            l: Arc::new(l),
            q: Arc::new(q),
            domain,
        })
    }

    /// Constant coefficients on the whole line.
    pub fn constants(m: f64, l: f64, q: f64) -> Self {
        Self {
            m: Arc::new(move |_| m),
            l: Arc::new(move |_| l),
            q: Arc::new(move |_| q),
            domain: (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && x >= self.domain.0 && x <= self.domain.1
    }

    fn eval(&self, f: &CoeffFn, x: f64, name: &str) -> Result<f64> {
        if !self.contains(x) {
            return Err(Error::Domain(format!("x = {x} outside coefficient domain")));
        }
        let v = f(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("coefficient {name} not finite at x = {x}")))
        }
    }

    pub fn m_at(&self, x: f64) -> Result<f64> {
        self.eval(&self.m, x, "m")
    }

    pub fn l_at(&self, x: f64) -> Result<f64> {
        self.eval(&self.l, x, "l")
    }

    pub fn q_at(&self, x: f64) -> Result<f64> {
        self.eval(&self.q, x, "q")
    }
}

/// Right-hand side of the Prüfer equation: m cos 2θ + l sin 2θ + q.
pub fn prufer_rhs(coeffs: &DiracCoefficients, x: f64, theta: f64) -> Result<f64> {
    let m = coeffs.m_at(x)?;
    let l = coeffs.l_at(x)?;
    let q = coeffs.q_at(x)?;
    let (s, c) = (2.0 * theta).sin_cos();
    Ok(m * c + l * s + q)
}

/// Integration direction of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

/// Error-control knobs shared by the integrations.
#[derive(Debug, Clone)]
pub struct IntegratorConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 0.25,
            max_steps: 2_000_000,
        }
    }
}

/// A continuous-branch sampled Prüfer angle θ(x).
///
/// Samples are strictly monotone in x (increasing forward, decreasing
/// backward). Trajectories produced by [`integrate_prufer`] additionally
/// satisfy |Δθ| < π between consecutive samples, which is what makes
/// crossing counts certifiable.
#[derive(Debug, Clone)]
pub struct AngleTrajectory {
    samples: Vec<(f64, f64)>,
    direction: Direction,
    tolerance_used: f64,
    branch_anchor: (f64, f64),
}

impl AngleTrajectory {
    /// Build a trajectory from raw samples. Monotonicity in x is enforced;
    /// branch continuity (|Δθ| < π) is the producer's responsibility and is
    /// re-checked by consumers that need it.
    pub fn from_samples(
        samples: Vec<(f64, f64)>,
        direction: Direction,
        tolerance_used: f64,
    ) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empty trajectory".into()));
        }
        for w in samples.windows(2) {
            let ok = match direction {
                Direction::Forward => w[1].0 > w[0].0,
                Direction::Backward => w[1].0 < w[0].0,
            };
            if !ok {
                return Err(Error::Domain("trajectory samples not monotone in x".into()));
            }
        }
        let branch_anchor = samples[0];
        Ok(Self {
            samples,
            direction,
            tolerance_used,
            branch_anchor,
        })
    }

    pub fn samples(&self) -> &[(f64, f64)] {
        &self.samples
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn tolerance_used(&self) -> f64 {
        self.tolerance_used
    }

    pub fn branch_anchor(&self) -> (f64, f64) {
        self.branch_anchor
    }

    pub fn first(&self) -> (f64, f64) {
        self.samples[0]
    }

    pub fn last(&self) -> (f64, f64) {
        *self.samples.last().unwrap()
    }

    /// Value at a sample point hit exactly during integration.
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|(xs, _)| *xs == x)
            .map(|(_, th)| *th)
    }

    /// Largest |Δθ| between consecutive samples.
    pub fn max_angle_jump(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0, f64::max)
    }
}

/// A sampled vector solution of the Dirac system.
#[derive(Debug, Clone)]
pub struct VectorTrajectory {
    samples: Vec<(f64, [f64; 2])>,
}

impl VectorTrajectory {
    pub fn samples(&self) -> &[(f64, [f64; 2])] {
        &self.samples
    }

    pub fn last(&self) -> (f64, [f64; 2]) {
        *self.samples.last().unwrap()
    }

    pub fn value_at(&self, x: f64) -> Option<[f64; 2]> {
        self.samples.iter().find(|(xs, _)| *xs == x).map(|(_, u)| *u)
    }
}

// Rejecting steps with |Δθ| ≥ 0.9π keeps every consecutive sample pair
// strictly inside one π-branch.
const ANGLE_STEP_CAP: f64 = 0.9 * PI;

/// Integrate the Prüfer equation from (x₀, θ₀) to x₁ (either direction),
/// producing the continuous branch through the anchor.
pub fn integrate_prufer(
    coeffs: &DiracCoefficients,
    x0: f64,
    theta0: f64,
    x1: f64,
    cfg: &IntegratorConfig,
) -> Result<AngleTrajectory> {
    integrate_prufer_with_stops(coeffs, x0, theta0, x1, cfg, &[])
}

/// As [`integrate_prufer`], landing exactly on each interior stop.
pub fn integrate_prufer_with_stops(
    coeffs: &DiracCoefficients,
    x0: f64,
    theta0: f64,
    x1: f64,
    cfg: &IntegratorConfig,
    stops: &[f64],
) -> Result<AngleTrajectory> {
    let mut f = |x: f64, y: &[f64; 1]| Ok([prufer_rhs(coeffs, x, y[0])?]);
    let mut samples = Vec::new();
    ode::integrate(
        &mut f,
        x0,
        [theta0],
        x1,
        cfg,
        Some(ANGLE_STEP_CAP),
        stops,
        &mut |x, y| samples.push((x, y[0])),
    )?;
    let direction = if x1 >= x0 {
        Direction::Forward
    } else {
        Direction::Backward
    };
    AngleTrajectory::from_samples(samples, direction, cfg.rel_tol)
}

/// Integrate the vector Dirac system u₁' = −l u₁ + (m − q) u₂,
/// u₂' = (m + q) u₁ + l u₂ from a nonzero initial vector.
pub fn integrate_dirac(
    coeffs: &DiracCoefficients,
    x0: f64,
    u0: [f64; 2],
    x1: f64,
    cfg: &IntegratorConfig,
) -> Result<VectorTrajectory> {
    if u0 == [0.0, 0.0] {
        return Err(Error::Domain("initial vector must be nonzero".into()));
    }
    let mut f = |x: f64, u: &[f64; 2]| {
        let m = coeffs.m_at(x)?;
        let l = coeffs.l_at(x)?;
        let q = coeffs.q_at(x)?;
        Ok([-l * u[0] + (m - q) * u[1], (m + q) * u[0] + l * u[1]])
    };
    let mut samples = Vec::new();
    ode::integrate(&mut f, x0, u0, x1, cfg, None, &[], &mut |x, u| {
        samples.push((x, *u))
    })?;
    Ok(VectorTrajectory { samples })
}

/// Recover the solution amplitude |u| along an angle trajectory by
/// quadrature of m sin 2θ − l cos 2θ, starting from |u(x₀)| = amp0 > 0.
///
/// Each integration interval is handled by Simpson's rule with the midpoint
/// angle taken from the cubic Hermite interpolant (the angle derivative is
/// re-evaluated from the Prüfer equation), so the quadrature error is of the
/// same order as the trajectory's own step error.
pub fn recover_amplitude(
    traj: &AngleTrajectory,
    coeffs: &DiracCoefficients,
    amp0: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(amp0 > 0.0) {
        return Err(Error::Domain(
            "amplitude anchor must be positive (nontrivial solution)".into(),
        ));
    }
    let integrand = |x: f64, theta: f64| -> Result<f64> {
        let m = coeffs.m_at(x)?;
        let l = coeffs.l_at(x)?;
        let (s, c) = (2.0 * theta).sin_cos();
        Ok(m * s - l * c)
    };

    let samples = traj.samples();
    let mut out = Vec::with_capacity(samples.len());
    let mut amp = amp0;
    out.push((samples[0].0, amp));
    for w in samples.windows(2) {
        let (xa, ta) = w[0];
        let (xb, tb) = w[1];
        let h = xb - xa;
        let da = prufer_rhs(coeffs, xa, ta)?;
        let db = prufer_rhs(coeffs, xb, tb)?;
        let xm = 0.5 * (xa + xb);
        let tm = 0.5 * (ta + tb) + 0.125 * h * (da - db);
        let ga = integrand(xa, ta)?;
        let gm = integrand(xm, tm)?;
        let gb = integrand(xb, tb)?;
        amp *= ((h / 6.0) * (ga + 4.0 * gm + gb)).exp();
        out.push((xb, amp));
    }
    Ok(out)
}

/// Count the interior points where θ(x) − offset crosses an integer multiple
/// of π (equivalently, sign changes of sin(θ − offset)).
///
/// A sample landing exactly on the lattice is counted once; the trajectory's
/// own starting value is not counted. Fails if consecutive samples are more
/// than π apart, since the count could not be certified.
pub fn count_crossings(traj: &AngleTrajectory, offset: f64) -> Result<usize> {
    let mut count = 0usize;
    for w in traj.samples().windows(2) {
        let (xa, ta) = w[0];
        let (_, tb) = w[1];
        let delta = (tb - ta).abs();
        if delta >= PI {
            return Err(Error::Refinement { x: xa, delta });
        }
        let a = (ta - offset) / PI;
        let b = (tb - offset) / PI;
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        // Lattice indices strictly inside the open interval.
        let mut n = lo.floor() + 1.0;
        while n < hi {
            if n > lo {
                count += 1;
            }
            n += 1.0;
        }
        // Landing exactly on the lattice counts once (skip degenerate pairs
        // that sit on the lattice without moving).
        if b != a && b == b.round() {
            count += 1;
        }
    }
    Ok(count)
}

/// Move `raw` onto the branch nearest to `reference` modulo π.
pub fn unwind_mod_pi(reference: f64, raw: f64) -> f64 {
    raw + PI * ((reference - raw) / PI).round()
}

/// Distance from a − b to the nearest integer multiple of π.
pub fn mod_pi_distance(a: f64, b: f64) -> f64 {
    let d = (a - b) / PI;
    (d - d.round()).abs() * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn rhs_matches_hand_values() {
        let c = DiracCoefficients::constants(1.0, 0.0, 0.0);
        assert_relative_eq!(prufer_rhs(&c, 0.0, 0.0).unwrap(), 1.0);

        let c = DiracCoefficients::constants(0.0, 1.0, 0.0);
        assert_relative_eq!(prufer_rhs(&c, 0.0, PI / 4.0).unwrap(), 1.0);

        let c = DiracCoefficients::constants(1.0, 2.0, 3.0);
        assert_relative_eq!(
            prufer_rhs(&c, 0.0, PI / 2.0).unwrap(),
            2.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn rhs_rejects_points_outside_domain() {
        let c = DiracCoefficients::new(|_| 0.0, |_| 0.0, |_| 0.0, (0.0, 1.0)).unwrap();
        assert!(prufer_rhs(&c, 2.0, 0.0).is_err());
    }

    #[test]
    fn constant_q_integrates_to_a_line() {
        let c = DiracCoefficients::constants(0.0, 0.0, 0.7);
        let traj = integrate_prufer(&c, 0.0, 0.3, 5.0, &cfg()).unwrap();
        for &(x, th) in traj.samples() {
            assert_relative_eq!(th, 0.3 + 0.7 * x, epsilon = 1e-9);
        }
        assert!(traj.max_angle_jump() < PI);
    }

    #[test]
    fn zero_coefficients_keep_the_angle_constant() {
        let c = DiracCoefficients::constants(0.0, 0.0, 0.0);
        let traj = integrate_prufer(&c, -1.0, 1.1, 4.0, &cfg()).unwrap();
        for &(_, th) in traj.samples() {
            assert_relative_eq!(th, 1.1, epsilon = 1e-12);
        }
    }

    #[test]
    fn backward_integration_retraces_forward() {
        let c = DiracCoefficients::constants(0.4, -0.3, 0.9);
        let fwd = integrate_prufer(&c, 0.0, 0.2, 6.0, &cfg()).unwrap();
        let (xe, te) = fwd.last();
        let back = integrate_prufer(&c, xe, te, 0.0, &cfg()).unwrap();
        assert_eq!(back.direction(), Direction::Backward);
        assert_relative_eq!(back.last().1, 0.2, epsilon = 1e-8);
    }

    #[test]
    fn dirac_and_prufer_agree_on_the_angle() {
        // m = 1, l = q = 0, u0 = (1, 0): the vector angle atan(tanh x)
        // satisfies θ' = cos 2θ.
        let c = DiracCoefficients::constants(1.0, 0.0, 0.0);
        let vec = integrate_dirac(&c, 0.0, [1.0, 0.0], 3.0, &cfg()).unwrap();
        let ang = integrate_prufer(&c, 0.0, 0.0, 3.0, &cfg()).unwrap();
        let (xe, u) = vec.last();
        assert_eq!(xe, 3.0);
        let raw = u[1].atan2(u[0]);
        let theta = ang.last().1;
        assert!(mod_pi_distance(raw, theta) < 1e-8);
        assert_relative_eq!(theta, (3.0f64.tanh()).atan(), epsilon = 1e-8);
    }

    #[test]
    fn amplitude_recovery_roundtrips_the_vector_norm() {
        let c = DiracCoefficients::new(
            |x: f64| 0.6 * x.cos(),
            |x: f64| 0.3 * (2.0 * x).sin(),
            |_| 0.8,
            (f64::NEG_INFINITY, f64::INFINITY),
        )
        .unwrap();
        let u0 = [0.8f64, -0.6];
        let theta0 = u0[1].atan2(u0[0]);
        let amp0 = (u0[0] * u0[0] + u0[1] * u0[1]).sqrt();

        let traj = integrate_prufer(&c, 0.0, theta0, 8.0, &cfg()).unwrap();
        let amps = recover_amplitude(&traj, &c, amp0).unwrap();

        for &x_end in &[2.0, 5.0, 8.0] {
            let vec = integrate_dirac(&c, 0.0, u0, x_end, &cfg()).unwrap();
            let (_, u) = vec.last();
            let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
            let amp = amps
                .iter()
                .rev()
                .find(|(x, _)| *x <= x_end)
                .map(|(_, a)| *a)
                .unwrap();
            // Compare at the nearest sample at or before x_end; for the exact
            // endpoints the trajectory contains the point.
            if amps.iter().any(|(x, _)| *x == x_end) {
                assert_relative_eq!(amp, norm, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn amplitude_with_vanishing_integrand_is_constant() {
        let c = DiracCoefficients::constants(0.0, 0.0, 1.3);
        let traj = integrate_prufer(&c, 0.0, 0.1, 4.0, &cfg()).unwrap();
        let amps = recover_amplitude(&traj, &c, 2.5).unwrap();
        for (_, a) in amps {
            assert_relative_eq!(a, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn amplitude_rejects_zero_anchor() {
        let c = DiracCoefficients::constants(0.0, 0.0, 0.0);
        let traj = integrate_prufer(&c, 0.0, 0.0, 1.0, &cfg()).unwrap();
        assert!(recover_amplitude(&traj, &c, 0.0).is_err());
    }

    #[test]
    fn crossing_count_linear_angle() {
        // θ descends linearly from π to −π/2: the only interior lattice
        // value is 0 (the starting value π is not counted).
        let samples: Vec<(f64, f64)> = (0..=100)
            .map(|i| {
                let x = i as f64 / 100.0;
                (x, PI + (-1.5 * PI) * x)
            })
            .collect();
        let traj = AngleTrajectory::from_samples(samples, Direction::Forward, 0.0).unwrap();
        assert_eq!(count_crossings(&traj, 0.0).unwrap(), 1);
    }

    #[test]
    fn crossing_count_constant_angle() {
        let samples = vec![(0.0, PI / 3.0), (1.0, PI / 3.0 + 1e-12), (2.0, PI / 3.0)];
        let traj = AngleTrajectory::from_samples(samples, Direction::Forward, 0.0).unwrap();
        assert_eq!(count_crossings(&traj, 0.0).unwrap(), 0);
    }

    #[test]
    fn crossing_count_requires_fine_sampling() {
        let samples = vec![(0.0, 0.1), (1.0, 0.1 + PI)];
        let traj = AngleTrajectory::from_samples(samples, Direction::Forward, 0.0).unwrap();
        assert!(matches!(
            count_crossings(&traj, 0.0),
            Err(Error::Refinement { .. })
        ));
    }

    #[test]
    fn shift_by_pi_is_equivariant() {
        let c = DiracCoefficients::new(
            |x: f64| 0.5 * x.sin(),
            |x: f64| 0.2 * x.cos(),
            |_| 0.6,
            (f64::NEG_INFINITY, f64::INFINITY),
        )
        .unwrap();
        let a = integrate_prufer(&c, 0.0, 0.4, 6.0, &cfg()).unwrap();
        let b = integrate_prufer(&c, 0.0, 0.4 + PI, 6.0, &cfg()).unwrap();
        assert_relative_eq!(b.last().1 - a.last().1, PI, epsilon = 1e-8);
    }

    #[test]
    fn trajectories_keep_branch_continuity() {
        let c = DiracCoefficients::constants(0.0, 0.0, 12.0); // fast rotation
        let traj = integrate_prufer(&c, 0.0, 0.0, 10.0, &cfg()).unwrap();
        assert!(traj.max_angle_jump() < PI);
        assert!(count_crossings(&traj, 0.0).is_ok());
    }
}

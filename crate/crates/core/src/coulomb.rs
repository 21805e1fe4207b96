//! The rescaled Coulomb–Dirac model equation and the numerical
//! exceptional-value finder.
//!
//! In the logarithmic variable t = log ϱ the Prüfer angle satisfies
//!
//! ```text
//! φ'(t) = c + (k − e^{−t}) sin 2φ(t),
//! ```
//!
//! the angle equation of the Dirac system with coefficients m = 0,
//! l = k − e^{−t}, q = c. For k > 0 and c ∈ (−k, 0) the field has the
//! asymptotic zeros θ± with sin 2θ± = −c/k and two distinguished solutions:
//! θ₀ with φ → π as t → −∞ (unstable there) and θ∞ with φ → θ₋ as t → +∞
//! (unstable there). Both are computed by integrating *away* from their
//! defining end, where the one-sided instability turns into contraction and
//! initialization errors die out.
//!
//! A coupling c is exceptional when θ₀ and θ∞ agree mod π; since θ₀(t̂, ·) is
//! non-decreasing and θ∞(t̂, ·) strictly decreasing in c, the mismatch
//! Δ(c) = θ₀(t_mid) − θ∞(t_mid) is monotone and the exceptional values are
//! the solutions of Δ(c) = −mπ, found by bracketing and bisection.
//!
//! Far below the turning point t = −log k the angle equation is stiff for an
//! explicit integrator (the attraction rate is 2e^{−t}), so both branches
//! are continued there by the quasi-static balance of the field —
//! φ ≈ π + ½ arcsin(c/(e^{−t} − k)) for θ₀ and the same expression around
//! π/2 mod π for θ∞ — whose error O(e^{2t}) is negligible at the switch
//! point and is annihilated by the forward contraction before the turning
//! point is reached.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::prufer::{AngleTrajectory, DiracCoefficients, Direction, IntegratorConfig};
use crate::{closed_form, ode};

/// Model parameters: angular parameter k > 0 and coupling constant c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub k: f64,
    pub c: f64,
}

impl ModelParams {
    pub fn new(k: f64, c: f64) -> Self {
        Self { k, c }
    }
}

/// The asymptotic zeros θ± of the angle field at t → +∞:
/// sin 2θ± = −c/k with θ₋ ∈ (0, π/4], θ₊ ∈ [π/4, π/2) and θ₋ + θ₊ = π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticAngles {
    pub theta_minus: f64,
    pub theta_plus: f64,
}

/// Everything the shooting computation needs: the truncation window, the
/// matching abscissa, integrator tolerances and the bisection/margin knobs.
#[derive(Debug, Clone)]
pub struct ShootingConfig {
    pub t_min: f64,
    pub t_max: f64,
    /// Matching abscissa; defaults to the turning point −log k.
    pub t_mid: Option<f64>,
    pub integrator: IntegratorConfig,
    /// Tolerance on c for the bisection.
    pub bisect_tol: f64,
    /// Exclusion margin around the degenerate edges c = −k and c = 0.
    pub c_margin: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            t_min: -40.0,
            t_max: 40.0,
            t_mid: None,
            integrator: IntegratorConfig::default(),
            bisect_tol: 1e-9,
            c_margin: 1e-4,
        }
    }
}

impl ShootingConfig {
    pub fn t_mid(&self, k: f64) -> f64 {
        self.t_mid.unwrap_or_else(|| -k.ln())
    }

    fn validate(&self, k: f64) -> Result<()> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Domain(format!("k must be positive, got {k}")));
        }
        let mid = self.t_mid(k);
        if !(self.t_min < mid && mid < self.t_max) {
            return Err(Error::Domain(
                "requires t_min < t_mid < t_max".into(),
            ));
        }
        if !(self.bisect_tol > 0.0 && self.c_margin > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        Ok(())
    }
}

/// Where a numeric exceptional value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    Numeric,
}

/// One exceptional coupling with its oscillation index.
#[derive(Debug, Clone, Copy)]
pub struct ExceptionalEntry {
    pub m: u32,
    pub c: f64,
    pub source: Provenance,
    /// Set when the root sits against the scan margin and could not be
    /// certified away from the boundary.
    pub boundary_uncertain: bool,
}

/// The ordered exceptional couplings for a given k (c strictly decreasing
/// as m increases, all inside (−k, 0)).
#[derive(Debug, Clone)]
pub struct ExceptionalValues {
    pub k: f64,
    pub entries: Vec<ExceptionalEntry>,
}

/// The coefficient set of the model equation: m = 0, l = k − e^{−t}, q = c.
pub fn model_coefficients(k: f64, c: f64) -> DiracCoefficients {
    DiracCoefficients::new(
        |_| 0.0,
        move |t: f64| k - (-t).exp(),
        move |_| c,
        (f64::NEG_INFINITY, f64::INFINITY),
    )
    .expect("whole-line domain")
}

/// θ± from sin 2θ± = −c/k, cross-checked against the stable form of the
/// tangent expression (k ± √(k² − c²))/(−c).
pub fn asymptotic_angles(p: ModelParams) -> Result<AsymptoticAngles> {
    let ModelParams { k, c } = p;
    if !(k > 0.0) {
        return Err(Error::Domain(format!("k must be positive, got {k}")));
    }
    if !(c >= -k && c < 0.0) {
        return Err(Error::Domain(format!(
            "c must lie in [-k, 0), got c = {c} for k = {k}"
        )));
    }
    let theta_minus = 0.5 * (-c / k).asin();
    let theta_plus = PI / 2.0 - theta_minus;

    // tan θ₋ = (k − √(k² − c²))/(−c) rationalized to −c/(k + √(k² − c²)),
    // which stays accurate for small |c|.
    let disc = (k * k - c * c).max(0.0).sqrt();
    let tan_minus_stable = -c / (k + disc);
    if (theta_minus.tan() - tan_minus_stable).abs()
        > 1e-10 * (1.0 + tan_minus_stable.abs())
    {
        return Err(Error::Consistency(
            "asymptotic angle failed the tangent cross-check".into(),
        ));
    }
    Ok(AsymptoticAngles {
        theta_minus,
        theta_plus,
    })
}

/// Switch point below which the angle equation is continued quasi-statically
/// instead of integrated: deep enough that the O(e^{2t}) balance error is
/// negligible, shallow enough that an explicit integrator can take over.
fn switch_point(k: f64, t_min: f64) -> f64 {
    t_min.max((-10.0f64).min(-k.ln() - 5.0))
}

/// Quasi-static branch of θ₀: φ = π + ½ arcsin(c/(e^{−t} − k)), valid for
/// e^{−t} ≫ k; equals π + (c/2)e^{t} + O(e^{2t}) as t → −∞.
fn quasistatic_theta0(k: f64, c: f64, t: f64) -> f64 {
    let denom = (-t).exp() - k;
    PI + 0.5 * (c / denom).asin()
}

/// Quasi-static continuation of θ∞ below the turning point, around π/2 mod π.
fn quasistatic_theta_inf_base(k: f64, c: f64, t: f64) -> f64 {
    let denom = (-t).exp() - k;
    PI / 2.0 - 0.5 * (c / denom).asin()
}

fn check_coupling(p: ModelParams, cfg: &ShootingConfig) -> Result<()> {
    cfg.validate(p.k)?;
    let lo = -p.k + cfg.c_margin;
    let hi = -cfg.c_margin;
    if !(p.c >= lo && p.c <= hi) {
        return Err(Error::Domain(format!(
            "c = {} outside the admissible window ({lo}, {hi})",
            p.c
        )));
    }
    Ok(())
}

fn check_t(t: f64, cfg: &ShootingConfig) -> Result<()> {
    if !(t >= cfg.t_min && t <= cfg.t_max) {
        return Err(Error::Domain(format!(
            "t = {t} outside the truncation window [{}, {}]",
            cfg.t_min, cfg.t_max
        )));
    }
    Ok(())
}

fn angle_rhs(k: f64, c: f64) -> impl Fn(f64, &[f64; 1]) -> Result<[f64; 1]> {
    move |t: f64, y: &[f64; 1]| Ok([c + (k - (-t).exp()) * (2.0 * y[0]).sin()])
}

/// θ₀ branch values at the requested abscissas (ascending, inside the
/// truncation window): the solution with φ → π as t → −∞.
pub fn theta0_values(p: ModelParams, cfg: &ShootingConfig, ts: &[f64]) -> Result<Vec<f64>> {
    check_coupling(p, cfg)?;
    for w in ts.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("abscissas must be strictly ascending".into()));
        }
    }
    for &t in ts {
        check_t(t, cfg)?;
    }
    if ts.is_empty() {
        return Ok(Vec::new());
    }

    let t_sw = switch_point(p.k, cfg.t_min);
    let mut out = vec![0.0f64; ts.len()];
    let mut idx = 0usize;
    while idx < ts.len() && ts[idx] <= t_sw {
        out[idx] = quasistatic_theta0(p.k, p.c, ts[idx]);
        idx += 1;
    }
    if idx == ts.len() {
        return Ok(out);
    }

    let start = (t_sw, quasistatic_theta0(p.k, p.c, t_sw));
    let t_end = ts[ts.len() - 1];
    let stops: Vec<f64> = ts[idx..ts.len() - 1]
        .iter()
        .copied()
        .filter(|&t| t > start.0)
        .collect();
    let mut f = angle_rhs(p.k, p.c);
    let mut wanted = idx;
    ode::integrate(
        &mut f,
        start.0,
        [start.1],
        t_end,
        &cfg.integrator,
        Some(0.9 * PI),
        &stops,
        &mut |t, y| {
            while wanted < ts.len() && ts[wanted] == t {
                out[wanted] = y[0];
                wanted += 1;
            }
        },
    )?;
    if wanted != ts.len() {
        return Err(Error::Consistency("missed a requested abscissa".into()));
    }
    Ok(out)
}

/// θ₀ at a single abscissa.
pub fn theta0(p: ModelParams, t: f64, cfg: &ShootingConfig) -> Result<f64> {
    Ok(theta0_values(p, cfg, &[t])?[0])
}

/// θ∞ branch values at the requested abscissas (ascending): the solution
/// with φ → θ₋ as t → +∞, computed backward from t_max.
pub fn theta_inf_values(p: ModelParams, cfg: &ShootingConfig, ts: &[f64]) -> Result<Vec<f64>> {
    check_coupling(p, cfg)?;
    for w in ts.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("abscissas must be strictly ascending".into()));
        }
    }
    for &t in ts {
        check_t(t, cfg)?;
    }
    if ts.is_empty() {
        return Ok(Vec::new());
    }

    let attraction = (p.k * p.k - p.c * p.c).max(0.0).sqrt();
    if attraction < 10.0 * cfg.c_margin {
        log::warn!(
            "theta_inf poorly conditioned: attraction rate 2*sqrt(k^2-c^2) = {:.3e} near c = -k",
            2.0 * attraction
        );
    }

    let angles = asymptotic_angles(ModelParams { k: p.k, c: p.c })?;
    let t_sw = switch_point(p.k, cfg.t_min);
    let need_continuation = ts[0] <= t_sw;
    let lowest_integrated = if need_continuation { t_sw } else { ts[0] };

    let mut out = vec![0.0f64; ts.len()];
    // Backward stops, descending, strictly inside (t_max, lowest).
    let stops: Vec<f64> = ts
        .iter()
        .rev()
        .copied()
        .filter(|&t| t > lowest_integrated && t < cfg.t_max)
        .collect();
    let mut f = angle_rhs(p.k, p.c);
    let mut pending: Vec<(usize, f64)> = ts
        .iter()
        .enumerate()
        .filter(|(_, &t)| t >= lowest_integrated)
        .map(|(i, &t)| (i, t))
        .collect();
    pending.sort_by(|a, b| b.1.total_cmp(&a.1));
    let mut next = 0usize;
    let terminal = ode::integrate(
        &mut f,
        cfg.t_max,
        [angles.theta_minus],
        lowest_integrated,
        &cfg.integrator,
        Some(0.9 * PI),
        &stops,
        &mut |t, y| {
            while next < pending.len() && pending[next].1 == t {
                out[pending[next].0] = y[0];
                next += 1;
            }
        },
    )?;
    if next != pending.len() {
        return Err(Error::Consistency("missed a requested abscissa".into()));
    }

    if need_continuation {
        // Glue the quasi-static branch around π/2 mod π to the integrated
        // value at the switch point (nearest-branch selection).
        let base_sw = quasistatic_theta_inf_base(p.k, p.c, t_sw);
        let shift = PI * ((terminal[0] - base_sw) / PI).round();
        for (i, &t) in ts.iter().enumerate() {
            if t < t_sw {
                out[i] = quasistatic_theta_inf_base(p.k, p.c, t) + shift;
            }
        }
    }
    Ok(out)
}

/// θ∞ at a single abscissa.
pub fn theta_inf(p: ModelParams, t: f64, cfg: &ShootingConfig) -> Result<f64> {
    Ok(theta_inf_values(p, cfg, &[t])?[0])
}

/// Full sampled trajectories of both branches over [t_min, t_max] at the
/// given abscissas, for tables and plots.
pub fn branch_trajectories(
    p: ModelParams,
    cfg: &ShootingConfig,
    ts: &[f64],
) -> Result<(AngleTrajectory, AngleTrajectory)> {
    let v0 = theta0_values(p, cfg, ts)?;
    let vi = theta_inf_values(p, cfg, ts)?;
    let fwd: Vec<(f64, f64)> = ts.iter().copied().zip(v0).collect();
    let bwd: Vec<(f64, f64)> = ts.iter().copied().zip(vi).collect();
    Ok((
        AngleTrajectory::from_samples(fwd, Direction::Forward, cfg.integrator.rel_tol)?,
        AngleTrajectory::from_samples(bwd, Direction::Forward, cfg.integrator.rel_tol)?,
    ))
}

/// The mismatch Δ(c) = θ₀(t_mid) − θ∞(t_mid); non-decreasing in c, with
/// exceptional couplings exactly at Δ = −mπ, m = 0, 1, 2, …
pub fn mismatch(p: ModelParams, cfg: &ShootingConfig) -> Result<f64> {
    let t_mid = cfg.t_mid(p.k);
    Ok(theta0(p, t_mid, cfg)? - theta_inf(p, t_mid, cfg)?)
}

/// Scan (−k + margin, −margin), bracket every lattice crossing of the
/// mismatch, and bisect each bracket to `bisect_tol`.
pub fn find_exceptional_numeric(k: f64, cfg: &ShootingConfig) -> Result<ExceptionalValues> {
    cfg.validate(k)?;
    let c_lo = -k + cfg.c_margin;
    let c_hi = -cfg.c_margin;
    if !(c_lo < c_hi) {
        return Err(Error::Domain("margins exhaust the coupling interval".into()));
    }

    let n_grid = 50usize.max(20 * k.ceil() as usize);
    let grid: Vec<f64> = (0..=n_grid)
        .map(|i| {
            if i == 0 {
                c_lo
            } else if i == n_grid {
                c_hi
            } else {
                c_lo + (c_hi - c_lo) * i as f64 / n_grid as f64
            }
        })
        .collect();
    let deltas: Vec<f64> = grid
        .par_iter()
        .map(|&c| mismatch(ModelParams { k, c }, cfg))
        .collect::<Result<Vec<f64>>>()?;

    // The mismatch must be monotone up to integration noise.
    const MONOTONE_SLACK: f64 = 1e-7;
    for w in deltas.windows(2) {
        if w[1] < w[0] - MONOTONE_SLACK {
            return Err(Error::Consistency(format!(
                "mismatch not monotone: {} -> {}",
                w[0], w[1]
            )));
        }
    }

    let mut entries: Vec<ExceptionalEntry> = Vec::new();
    for i in 0..n_grid {
        let (d_lo, d_hi) = (deltas[i], deltas[i + 1]);
        if !(d_hi >= d_lo) {
            continue;
        }
        // Lattice values −mπ inside [d_lo, d_hi].
        let m_max = (-d_lo / PI).floor();
        let m_min = (-d_hi / PI).ceil().max(0.0);
        if m_max < m_min {
            continue;
        }
        let mut m = m_min;
        while m <= m_max {
            let target = -m * PI;
            let g = |c: f64| -> Result<f64> {
                Ok(mismatch(ModelParams { k, c }, cfg)? - target)
            };
            let (mut a, mut b) = (grid[i], grid[i + 1]);
            let (mut ga, gb) = (d_lo - target, d_hi - target);
            if ga.signum() == gb.signum() && ga != 0.0 && gb != 0.0 {
                log::warn!("flat bracket for m = {m} at k = {k}; skipping cell");
                m += 1.0;
                continue;
            }
            while b - a > cfg.bisect_tol {
                let mid = 0.5 * (a + b);
                let gm = g(mid)?;
                if gm == 0.0 {
                    a = mid;
                    b = mid;
                    break;
                }
                if gm.signum() == ga.signum() {
                    a = mid;
                    ga = gm;
                } else {
                    b = mid;
                }
            }
            let root = 0.5 * (a + b);
            let boundary_uncertain =
                root - c_lo <= 10.0 * cfg.bisect_tol || c_hi - root <= 10.0 * cfg.bisect_tol;
            let m_idx = m as u32;
            if let Some(prev) = entries.iter().find(|e| e.m == m_idx) {
                if (prev.c - root).abs() > 2.0 * cfg.bisect_tol {
                    return Err(Error::Consistency(format!(
                        "two distinct roots for index m = {m_idx}"
                    )));
                }
            } else {
                entries.push(ExceptionalEntry {
                    m: m_idx,
                    c: root,
                    source: Provenance::Numeric,
                    boundary_uncertain,
                });
            }
            m += 1.0;
        }
    }

    entries.sort_by_key(|e| e.m);
    for w in entries.windows(2) {
        if !(w[0].c > w[1].c) {
            return Err(Error::Consistency(
                "numeric exceptional values not strictly decreasing".into(),
            ));
        }
    }
    Ok(ExceptionalValues { k, entries })
}

/// Which side of the exceptional ladder a coupling sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalIndex {
    /// c ∈ (c_n, c_{n−1}) with the convention c_{−1} = 0: the eigenfunctions
    /// carry n extra rapid oscillations near the origin.
    Interior(usize),
    /// |c − c_j| within tolerance of the exceptional value with index j;
    /// behaviour exactly on the ladder is left open.
    Boundary { m: u32 },
}

/// Locate c within the closed-form exceptional ladder for k.
pub fn interval_index(k: f64, c: f64, tol: f64) -> Result<IntervalIndex> {
    if !(k > 0.0) {
        return Err(Error::Domain("k must be positive".into()));
    }
    if !(c > -k && c < 0.0) {
        return Err(Error::Domain(format!("c must lie in (-{k}, 0)")));
    }
    let ladder = closed_form::exceptional_values(k);
    for e in &ladder.entries {
        if (c - e.c).abs() <= tol {
            return Ok(IntervalIndex::Boundary { m: e.m });
        }
    }
    let n = ladder.entries.iter().filter(|e| c < e.c).count();
    Ok(IntervalIndex::Interior(n))
}

//! Adaptive embedded Runge–Kutta driver (Dormand–Prince 5(4), FSAL).
//!
//! The driver controls the local error per step against the configured
//! relative/absolute tolerances, optionally rejects steps whose state change
//! exceeds a caller-supplied cap (used to certify angle bookkeeping mod π),
//! and can be forced to land exactly on a sorted list of interior stops.
//! Backward integration is handled by a forward integration in the reversed
//! variable.

use crate::error::{Error, Result};
use crate::prufer::IntegratorConfig;

const A: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the 5th- and the embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

fn rms<const N: usize>(v: &[f64; N]) -> f64 {
    let s: f64 = v.iter().map(|x| x * x).sum();
    (s / N as f64).sqrt()
}

fn validate_config(cfg: &IntegratorConfig) -> Result<()> {
    if !(cfg.rel_tol > 0.0 && cfg.abs_tol > 0.0 && cfg.max_step > 0.0) {
        return Err(Error::Domain(
            "integrator tolerances and max_step must be positive".into(),
        ));
    }
    if cfg.max_steps == 0 {
        return Err(Error::Domain("max_steps must be positive".into()));
    }
    Ok(())
}

/// Integrate dy/dx = f(x, y) from `x0` to `x1` (either direction).
///
/// `on_sample` receives the initial point and every accepted step, in
/// integration order. `stops` must be sorted in the direction of
/// integration and strictly inside (x0, x1); the driver lands on each one
/// exactly. Returns the final state at `x1`.
pub(crate) fn integrate<const N: usize>(
    f: &mut dyn FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    x0: f64,
    y0: [f64; N],
    x1: f64,
    cfg: &IntegratorConfig,
    step_cap: Option<f64>,
    stops: &[f64],
    on_sample: &mut dyn FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    validate_config(cfg)?;
    if !(x0.is_finite() && x1.is_finite()) {
        return Err(Error::Domain("integration endpoints must be finite".into()));
    }

    on_sample(x0, &y0);
    if x1 == x0 {
        return Ok(y0);
    }

    let dir = if x1 > x0 { 1.0 } else { -1.0 };
    let length = (x1 - x0).abs();
    // Internal variable sigma runs forward from 0 to length.
    let to_x = |sigma: f64| {
        if sigma >= length {
            x1
        } else {
            x0 + dir * sigma
        }
    };
    let mut g = |sigma: f64, y: &[f64; N]| -> Result<[f64; N]> {
        let mut dy = f(to_x(sigma), y)?;
        if dir < 0.0 {
            for v in dy.iter_mut() {
                *v = -*v;
            }
        }
        Ok(dy)
    };
    let stop_sigmas: Vec<f64> = stops.iter().map(|&s| dir * (s - x0)).collect();
    for w in stop_sigmas.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("stops must be sorted along the direction".into()));
        }
    }
    if stop_sigmas.iter().any(|&s| s <= 0.0 || s >= length) {
        return Err(Error::Domain("stops must lie strictly inside the span".into()));
    }

    let mut sigma = 0.0f64;
    let mut y = y0;
    let mut k: [[f64; N]; 7] = [[0.0; N]; 7];
    k[0] = g(0.0, &y)?;

    let mut h = initial_step(&mut g, sigma, &y, &k[0], length, cfg)?;
    let mut next_stop = 0usize;
    let mut trials = 0usize;

    while sigma < length {
        trials += 1;
        if trials > cfg.max_steps {
            return Err(Error::MaxSteps {
                steps: trials - 1,
                x: to_x(sigma),
            });
        }

        // Clamp to the span end and the next mandatory stop. Stop landings
        // are reported at the caller's exact coordinates; the sigma round
        // trip can lose a few ulps.
        let mut target: Option<f64> = None;
        let mut h_try = h.min(cfg.max_step);
        let mut at_stop = false;
        if let Some(&s) = stop_sigmas.get(next_stop) {
            if sigma + h_try >= s {
                h_try = s - sigma;
                target = Some(s);
                at_stop = true;
            }
        }
        if target.is_none() && sigma + h_try >= length {
            h_try = length - sigma;
            target = Some(length);
        }

        let h_floor = 16.0 * f64::EPSILON * sigma.abs().max(1.0);
        if h_try < h_floor {
            return Err(Error::StepUnderflow {
                x: to_x(sigma),
                h: h_try,
            });
        }

        // Stages 2..=6, then the FSAL stage at sigma + h.
        let mut failed = false;
        for i in 1..6 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(i) {
                let a = A[i][j];
                if a != 0.0 {
                    for n in 0..N {
                        yi[n] += h_try * a * kj[n];
                    }
                }
            }
            match g(sigma + C[i] * h_try, &yi) {
                Ok(ki) => k[i] = ki,
                Err(_) => {
                    failed = true;
                    break;
                }
            }
        }
        if failed {
            h = 0.5 * h_try;
            continue;
        }

        let mut y_new = y;
        for (i, ki) in k.iter().enumerate().take(6) {
            if B[i] != 0.0 {
                for n in 0..N {
                    y_new[n] += h_try * B[i] * ki[n];
                }
            }
        }
        let k_last = match g(sigma + h_try, &y_new) {
            Ok(v) => v,
            Err(_) => {
                h = 0.5 * h_try;
                continue;
            }
        };
        k[6] = k_last;

        let mut scaled_err = [0.0f64; N];
        for n in 0..N {
            let mut e = 0.0;
            for (i, ki) in k.iter().enumerate() {
                e += E[i] * ki[n];
            }
            let sc = cfg.abs_tol + cfg.rel_tol * y[n].abs().max(y_new[n].abs());
            scaled_err[n] = h_try * e / sc;
        }
        let err = rms(&scaled_err).max(1e-300);

        // Reject steps that move any component farther than the cap, so the
        // caller's mod-π bookkeeping stays certified.
        let cap_exceeded = step_cap.is_some_and(|cap| {
            (0..N).any(|n| (y_new[n] - y[n]).abs() >= cap)
        });

        if err <= 1.0 && !cap_exceeded {
            sigma = target.unwrap_or(sigma + h_try);
            y = y_new;
            k[0] = k[6];
            if at_stop {
                on_sample(stops[next_stop], &y);
                next_stop += 1;
            } else {
                on_sample(to_x(sigma), &y);
            }
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
            h = (h_try * fac).min(cfg.max_step);
        } else if cap_exceeded {
            h = 0.5 * h_try;
        } else {
            let fac = (0.9 * err.powf(-0.2)).clamp(0.2, 0.95);
            h = h_try * fac;
        }
    }

    Ok(y)
}

/// Classic two-evaluation initial step-size heuristic.
fn initial_step<const N: usize>(
    g: &mut impl FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    sigma: f64,
    y: &[f64; N],
    f0: &[f64; N],
    length: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let mut sc = [0.0f64; N];
    for n in 0..N {
        sc[n] = cfg.abs_tol + cfg.rel_tol * y[n].abs();
    }
    let mut r0 = [0.0f64; N];
    let mut r1 = [0.0f64; N];
    for n in 0..N {
        r0[n] = y[n] / sc[n];
        r1[n] = f0[n] / sc[n];
    }
    let d0 = rms(&r0);
    let d1 = rms(&r1);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    let h0 = h0.min(length).min(cfg.max_step);

    let mut y1 = *y;
    for n in 0..N {
        y1[n] += h0 * f0[n];
    }
    let f1 = g(sigma + h0, &y1)?;
    let mut r2 = [0.0f64; N];
    for n in 0..N {
        r2[n] = (f1[n] - f0[n]) / sc[n];
    }
    let d2 = rms(&r2) / h0;

    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    Ok((100.0 * h0).min(h1).min(length).min(cfg.max_step))
}

//! Acceptance suite: every shipped claim, one test per criterion, each
//! printing a pass/fail line with the measured quantity next to its
//! threshold (run with `--nocapture` to see the lines).

use std::f64::consts::PI;
use std::sync::Arc;
use std::time::Instant;

use coulomb_dirac::closed_form;
use coulomb_dirac::coulomb::{self, ModelParams, ShootingConfig};
use coulomb_dirac::factorization::{self, chain, AnglePhi, WeightedPolynomial};
use coulomb_dirac::ladder::{self, Harmonic, LadderFamily, Morse};
use coulomb_dirac::prufer::{self, DiracCoefficients, IntegratorConfig};

fn report(criterion: &str, ok: bool, detail: String) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

#[test]
fn acceptance_01_numeric_shooting_reproduces_closed_forms() {
    let start = Instant::now();
    let cfg = ShootingConfig::default();
    let mut worst = 0.0f64;
    let mut counts_ok = true;
    for &k in &[1.2, 2.0, 2.5, 3.0, 4.7] {
        let numeric = coulomb::find_exceptional_numeric(k, &cfg).unwrap();
        let expected = closed_form::count_exceptional(k);
        counts_ok &= numeric.entries.len() == expected;
        for e in &numeric.entries {
            let n = (e.m + 1) as f64;
            let closed = -(n * (2.0 * k - n)).sqrt();
            worst = worst.max((e.c - closed).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ok = counts_ok && worst <= 1e-6 && elapsed < 60.0;
    report(
        "1",
        ok,
        format!(
            "shooting vs closed form: max |delta| = {worst:.3e} (tol 1e-6), counts {}, {elapsed:.1} s (budget 60 s)",
            if counts_ok { "exact" } else { "MISMATCH" }
        ),
    );
}

#[test]
fn acceptance_02_count_law() {
    let mut ok = true;
    for i in 1..=100u32 {
        let k = 0.1 * i as f64;
        let expected = (k.ceil() - 1.0).max(0.0) as usize;
        ok &= closed_form::exceptional_values(k).entries.len() == expected;
        ok &= closed_form::count_exceptional(k) == expected;
    }
    report(
        "2",
        ok,
        "count = ceil(k) - 1 for k = 0.1 i, i = 1..=100 (exact)".into(),
    );
}

#[test]
fn acceptance_03_second_order_residual_identically_zero() {
    let mut ok = true;
    for (num, den) in [(0i64, 1i64), (1, 2), (1, 1), (2, 1), (7, 3)] {
        let levels = chain(WeightedPolynomial::ground_exact(num, den).unwrap(), 12);
        for w in &levels {
            ok &= w.residual_polynomial().is_zero();
        }
    }
    report(
        "3",
        ok,
        "residual polynomial exactly zero for j <= 12, kappa in {0, 1/2, 1, 2, 7/3}".into(),
    );
}

#[test]
fn acceptance_04_zero_counts() {
    let mut ok = true;
    for kappa in [0.0, 0.5, 1.0, 2.3] {
        let levels = chain(WeightedPolynomial::ground(kappa).unwrap(), 12);
        for w in &levels {
            match w.count_zeros() {
                Ok(n) => ok &= n as u32 == w.level() - 1,
                Err(_) => ok = false, // multiple root: must not happen
            }
        }
    }
    report(
        "4",
        ok,
        "zero count = j - 1 with simple roots for j <= 12, kappa in {0, 1/2, 1, 2.3} (exact)".into(),
    );
}

#[test]
fn acceptance_05_ratio_limits() {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    let rat = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));

    let mut ok = true;
    for (num, den) in [(0i64, 1i64), (1, 2), (3, 2), (7, 3)] {
        let levels = chain(WeightedPolynomial::ground_exact(num, den).unwrap(), 13);
        for j in 1..levels.len() {
            let pj = &levels[j - 1];
            let pj1 = &levels[j];
            // p_{j+1}(0) = (2 kappa + j) p_j(0), exactly.
            let factor = rat(2 * num, den) + rat(j as i64, 1);
            ok &= pj.constant_term() * factor == pj1.constant_term();
            // Degree +1 and leading ratio -1/2 per step give the 0 limit.
            ok &= pj1.poly().degree() == pj.poly().degree().map(|d| d + 1);
            ok &= pj.leading_coefficient() / pj1.leading_coefficient() == rat(-1, 2);
        }
    }
    // The floating wrapper agrees with the rational identity it asserts.
    let (plus, minus) = factorization::ratio_limits(5, 1.5).unwrap();
    ok &= (plus - 0.125).abs() < 1e-15 && minus == 0.0;
    report(
        "5",
        ok,
        "ratio limits 1/(2 kappa + j) and 0, exact constant-term/degree/leading identities".into(),
    );
}

#[test]
fn acceptance_06_closed_form_dirac_residual() {
    let ts = grid(-5.0, 5.0, 101);
    let mut worst = 0.0f64;
    for (k, j) in [(2.0, 1u32), (3.0, 1), (3.0, 2), (4.7, 3)] {
        let sol = factorization::dirac_solution(k, j).unwrap();
        for &t in &ts {
            worst = worst.max(sol.residual(t));
        }
    }
    report(
        "6",
        worst <= 1e-8,
        format!("closed-form Dirac residual on [-5, 5]: max = {worst:.3e} (tol 1e-8)"),
    );
}

#[test]
fn acceptance_07_angle_limits() {
    let mut worst_plus = 0.0f64;
    let mut worst_minus = 0.0f64;
    for j in 1..=5u32 {
        for kappa in [0.5, 1.0, 2.0] {
            let phi = AnglePhi::new(j, kappa).unwrap();
            let jf = j as f64;
            let c = -(2.0 * kappa * jf + jf * jf).sqrt();
            let angles = coulomb::asymptotic_angles(ModelParams::new(kappa + jf, c)).unwrap();
            let expect = angles.theta_minus - (jf - 1.0) * PI;
            worst_plus = worst_plus.max((phi.eval(40.0) - expect).abs());
            worst_minus = worst_minus.max((phi.eval(-40.0) - PI).abs());
        }
    }
    let ok = worst_plus <= 1e-4 && worst_minus <= 1e-4;
    report(
        "7",
        ok,
        format!(
            "angle limits: |phi(40) - (theta_minus - (j-1) pi)| = {worst_plus:.3e}, |phi(-40) - pi| = {worst_minus:.3e} (tol 1e-4)"
        ),
    );
}

#[test]
fn acceptance_08_shooting_matches_the_closed_form_angle() {
    // The identification is checked through the two stable representations
    // of the exceptional solution: the origin branch theta0 forward of its
    // quasi-static segment up to the turning point, and the infinity branch
    // theta_inf (shifted by m pi) from the turning point outward. A single
    // forward trajectory cannot certify the far right side in double
    // precision: past the turning point the branch is the unstable manifold
    // and roundoff grows like e^{2 sqrt(k^2-c^2) t}.
    let shoot = ShootingConfig {
        integrator: IntegratorConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..IntegratorConfig::default()
        },
        ..ShootingConfig::default()
    };
    let mut worst = 0.0f64;
    for (k, j) in [(2.0, 1u32), (3.0, 2)] {
        let jf = j as f64;
        let c = -(jf * (2.0 * k - jf)).sqrt();
        let m = (j - 1) as f64;
        let p = ModelParams::new(k, c);
        let phi = AnglePhi::new(j, k - jf).unwrap();
        let t_mid = shoot.t_mid(k);

        let left: Vec<f64> = grid(-30.0, t_mid, 120);
        let v0 = coulomb::theta0_values(p, &shoot, &left).unwrap();
        for (&t, &v) in left.iter().zip(&v0) {
            worst = worst.max(prufer::mod_pi_distance(v, phi.eval(t)));
        }

        let right: Vec<f64> = grid(t_mid, 30.0, 120);
        let vi = coulomb::theta_inf_values(p, &shoot, &right).unwrap();
        for (&t, &v) in right.iter().zip(&vi) {
            worst = worst.max((v - m * PI - phi.eval(t)).abs());
        }
    }
    report(
        "8",
        worst <= 1e-4,
        format!(
            "shooting vs closed-form angle on [-30, 30] for (k,j) = (2,1), (3,2): max deviation = {worst:.3e} (tol 1e-4)"
        ),
    );
}

#[test]
fn acceptance_09_ladder_contract() {
    // Harmonic eigenpairs: -v'' + x^2 v = (2n - 1) v to 1e-8 relative.
    let xs = grid(-6.0, 6.0, 121);
    let mut worst_h = 0.0f64;
    for n in 1..=8usize {
        let (state, lambda) = ladder::harmonic_example(n).unwrap();
        let vmax: f64 = xs.iter().map(|&x| state.value(x).abs()).fold(0.0, f64::max);
        for &x in &xs {
            let (v, _) = state.value_and_derivative(x);
            if v.abs() <= 1e-12 * vmax {
                continue;
            }
            let h = 5e-4 / (1.0 + x.abs());
            let d = |h: f64| {
                (state.value_and_derivative(x + h).1 - state.value_and_derivative(x - h).1)
                    / (2.0 * h)
            };
            let vpp = (4.0 * d(0.5 * h) - d(h)) / 3.0;
            let r = (-vpp + x * x * v - lambda * v).abs()
                / (vpp.abs() + (x * x * v).abs() + (lambda * v).abs() + 1e-300);
            worst_h = worst_h.max(r);
        }
    }

    // Morse ladder vs the weighted polynomials: one global constant.
    let mut worst_m = 0.0f64;
    for (kappa, n) in [(0.0, 1usize), (0.0, 2), (0.5, 3), (1.0, 5)] {
        let state = ladder::morse_example(kappa, n).unwrap();
        let polys = chain(WeightedPolynomial::ground(kappa).unwrap(), n as u32);
        let wp = &polys[n - 1];
        let mut ratio: Option<f64> = None;
        for &x in &grid(-4.0, 6.0, 80) {
            let b = wp.value(x);
            if b.abs() < 1e-10 {
                continue;
            }
            let r = state.value(x) / b;
            match ratio {
                None => ratio = Some(r),
                Some(r0) => worst_m = worst_m.max((r / r0 - 1.0).abs()),
            }
        }
    }

    // Chain identity holds exactly (double-precision algebra) for both
    // built-in families.
    let gridc = grid(-6.0, 6.0, 49);
    let rep_h = ladder::validate_chain(&Harmonic, 8, &gridc, 1e-9).unwrap();
    let rep_m = ladder::validate_chain(&Morse { kappa: 0.5 }, 8, &gridc, 1e-9).unwrap();

    let ok = worst_h <= 1e-8 && worst_m <= 1e-10 && rep_h.passed && rep_m.passed;
    report(
        "9",
        ok,
        format!(
            "harmonic residual {worst_h:.3e} (tol 1e-8), morse ratio drift {worst_m:.3e} (tol 1e-10), chain violations {:.3e}/{:.3e}",
            rep_h.max_violation, rep_m.max_violation
        ),
    );
}

#[test]
fn acceptance_10_amplitude_roundtrip() {
    let cfg = IntegratorConfig::default();
    let systems: Vec<(&str, DiracCoefficients)> = vec![
        (
            "trig",
            DiracCoefficients::new(
                |x: f64| 0.6 * x.cos(),
                |x: f64| 0.3 * (2.0 * x).sin(),
                |_| 0.8,
                (f64::NEG_INFINITY, f64::INFINITY),
            )
            .unwrap(),
        ),
        ("model k=2 c=-1", coulomb::model_coefficients(2.0, -1.0)),
    ];
    let mut worst = 0.0f64;
    for (_, coeffs) in &systems {
        let u0 = [0.8f64, -0.6];
        let theta0 = u0[1].atan2(u0[0]);
        let amp0 = (u0[0] * u0[0] + u0[1] * u0[1]).sqrt();
        let traj = prufer::integrate_prufer(coeffs, 0.0, theta0, 10.0, &cfg).unwrap();
        let amps = prufer::recover_amplitude(&traj, coeffs, amp0).unwrap();
        for &x_end in &[3.0, 7.0, 10.0] {
            let vec = prufer::integrate_dirac(coeffs, 0.0, u0, x_end, &cfg).unwrap();
            let (_, u) = vec.last();
            let norm = (u[0] * u[0] + u[1] * u[1]).sqrt();
            if let Some((_, amp)) = amps.iter().find(|(x, _)| *x == x_end) {
                worst = worst.max((amp - norm).abs() / norm);
            }
        }
        // Endpoint is always a sample.
        assert!(amps.iter().any(|(x, _)| *x == 10.0));
    }
    report(
        "10",
        worst <= 1e-6,
        format!("amplitude recovery vs direct vector norm: max relative = {worst:.3e} (tol 1e-6)"),
    );
}

#[test]
fn acceptance_11_stability_bound_consistency() {
    // No eigenvalue computation is in scope; the spectral-stability claims
    // are represented by criteria 1-2 plus this consistency property of the
    // linear bound: c^2 < 2k - 1 iff |c| < |c0(k)| for k > 1.
    let mut ok = true;
    for i in 0..200 {
        let k = 1.0 + 0.05 * (i + 1) as f64;
        let c0 = closed_form::exceptional_values(k).entries[0].c;
        for j in 1..40 {
            let c = -k * j as f64 / 40.0;
            if c >= 0.0 || c <= -k {
                continue;
            }
            let bound = closed_form::stability_bound_check(k, c);
            ok &= bound == (c.abs() < c0.abs());
        }
    }
    report(
        "11",
        ok,
        "c^2 < 2k - 1 iff |c| < |c0(k)| across the k-grid (eigenvalue computation out of scope)"
            .into(),
    );
}

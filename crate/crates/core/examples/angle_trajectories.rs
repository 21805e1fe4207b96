//! Sample both distinguished angle branches, at an exceptional coupling
//! (where they match mod pi) and at a generic one (where they separate).
//!
//! ```bash
//! cargo run --release --example angle_trajectories > angles.csv
//! ```

use coulomb_dirac::coulomb::{self, ModelParams, ShootingConfig};
use coulomb_dirac::prufer::mod_pi_distance;

fn main() {
    let k = 2.0;
    let cfg = ShootingConfig::default();
    let ts: Vec<f64> = (0..=160).map(|i| -20.0 + 0.25 * i as f64).collect();

    let exceptional = ModelParams::new(k, -(3.0f64.sqrt()));
    let generic = ModelParams::new(k, -1.0);

    let exc0 = coulomb::theta0_values(exceptional, &cfg, &ts).unwrap();
    let exc_inf = coulomb::theta_inf_values(exceptional, &cfg, &ts).unwrap();
    let gen0 = coulomb::theta0_values(generic, &cfg, &ts).unwrap();
    let gen_inf = coulomb::theta_inf_values(generic, &cfg, &ts).unwrap();

    println!("t,exc_phi0,exc_phi_inf,gen_phi0,gen_phi_inf");
    for (i, &t) in ts.iter().enumerate() {
        println!(
            "{t},{},{},{},{}",
            exc0[i], exc_inf[i], gen0[i], gen_inf[i]
        );
    }

    let t_mid = cfg.t_mid(k);
    let d_exc = coulomb::mismatch(exceptional, &cfg).unwrap();
    let d_gen = coulomb::mismatch(generic, &cfg).unwrap();
    eprintln!("matching abscissa t_mid = {t_mid:.6}");
    eprintln!(
        "exceptional c = -sqrt(3): mismatch = {d_exc:+.3e} (distance to pi lattice {:.1e})",
        mod_pi_distance(d_exc, 0.0)
    );
    eprintln!(
        "generic     c = -1:      mismatch = {d_gen:+.3e} (distance to pi lattice {:.1e})",
        mod_pi_distance(d_gen, 0.0)
    );
}

//! Compute the exceptional couplings for one k by both routes and compare.
//!
//! ```bash
//! cargo run --release --example exceptional_values
//! ```

use coulomb_dirac::closed_form;
use coulomb_dirac::coulomb::{self, ShootingConfig};

fn main() {
    let k = 2.5;
    let cfg = ShootingConfig::default();

    let closed = closed_form::exceptional_values(k);
    let numeric = coulomb::find_exceptional_numeric(k, &cfg).expect("shooting succeeds");

    println!("exceptional couplings for k = {k}");
    println!("{:<4} {:<22} {:<22} {:<10}", "m", "closed form", "shooting", "|delta|");
    for (c, n) in closed.entries.iter().zip(&numeric.entries) {
        println!(
            "{:<4} {:<22.16} {:<22.16} {:.2e}",
            c.m,
            c.c,
            n.c,
            (c.c - n.c).abs()
        );
    }

    // The largest coupling is the linear stability bound -sqrt(2k - 1).
    let c0 = closed.entries[0].c;
    println!();
    println!("c0 = {c0:.16} vs -sqrt(2k - 1) = {:.16}", -(2.0 * k - 1.0f64).sqrt());
    println!(
        "stability bound holds strictly inside: check(-1.9) = {}, check(-2.1) = {}",
        closed_form::stability_bound_check(k, -1.9),
        closed_form::stability_bound_check(k, -2.1)
    );
}

//! Closed-form staircase of the exceptional-value count: every time k
//! crosses an integer, a new coupling enters at -k and moves inward.
//!
//! ```bash
//! cargo run --example coupling_scan
//! ```

use coulomb_dirac::closed_form;

fn main() {
    println!("{:<6} {:<3} couplings", "k", "N");
    let mut k = 0.5;
    while k <= 6.0 {
        let v = closed_form::exceptional_values(k);
        let cs: Vec<String> = v.entries.iter().map(|e| format!("{:.6}", e.c)).collect();
        println!("{:<6.2} {:<3} [{}]", k, v.entries.len(), cs.join(", "));
        k += 0.25;
    }

    // Watch the emergence at k = 3: the third coupling starts at -3.
    println!();
    for eps in [1e-2, 1e-4, 1e-6] {
        let v = closed_form::exceptional_values(3.0 + eps);
        println!(
            "k = 3 + {eps:.0e}: newest coupling c_2 = {:.10}",
            v.entries.last().unwrap().c
        );
    }
}

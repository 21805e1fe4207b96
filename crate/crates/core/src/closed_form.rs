//! Closed-form exceptional coupling constants.
//!
//! For angular parameter k > 0 the exceptional couplings are
//! c_{n−1}(k) = −√(2kn − n²) for integers 1 ≤ n < k, so there are exactly
//! N of them in (−k, 0) when k ∈ (N, N + 1]. Their largest member is
//! c₀ = −√(2k − 1), which reproduces the linear spectral-stability bound
//! c² < 2k − 1.

use crate::coulomb::{ExceptionalEntry, ExceptionalValues, Provenance};

fn compensated_sqrt(r: f64) -> f64 {
    let x = r.sqrt();
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    // One Newton step with the residual r − x² taken exactly (fused
    // multiply-add), so the correctly rounded sqrt is preserved.
    let residual = (-x).mul_add(x, r);
    x + residual / (2.0 * x)
}

/// The exceptional value with oscillation index m = n − 1.
pub fn exceptional_value(k: f64, n: u32) -> f64 {
    let n = n as f64;
    -compensated_sqrt(n * (2.0 * k - n))
}

/// All exceptional values for a given k, ordered by index m (strictly
/// decreasing in c). Empty for k ≤ 1.
pub fn exceptional_values(k: f64) -> ExceptionalValues {
    assert!(k > 0.0, "k must be positive");
    let mut entries = Vec::new();
    let mut n = 1u32;
    while (n as f64) < k {
        entries.push(ExceptionalEntry {
            m: n - 1,
            c: exceptional_value(k, n),
            source: Provenance::ClosedForm,
            boundary_uncertain: false,
        });
        n += 1;
    }
    ExceptionalValues { k, entries }
}

/// N with k ∈ (N, N + 1], i.e. ⌈k⌉ − 1; equals the length of
/// [`exceptional_values`].
pub fn count_exceptional(k: f64) -> usize {
    assert!(k > 0.0, "k must be positive");
    (k.ceil() - 1.0).max(0.0) as usize
}

/// The linear spectral-stability bound: true iff c² < 2k − 1. For k > 1 this
/// is equivalent to |c| < |c₀(k)|.
pub fn stability_bound_check(k: f64, c: f64) -> bool {
    assert!(k > 0.0 && c < 0.0, "requires k > 0 and c < 0");
    c * c < 2.0 * k - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        let v = exceptional_values(2.0);
        assert_eq!(v.entries.len(), 1);
        assert_relative_eq!(v.entries[0].c, -3.0f64.sqrt(), epsilon = 1e-15);

        assert!(exceptional_values(1.0).entries.is_empty());

        let v = exceptional_values(3.0);
        assert_eq!(v.entries.len(), 2);
        assert_relative_eq!(v.entries[0].c, -5.0f64.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(v.entries[1].c, -8.0f64.sqrt(), epsilon = 1e-15);
        assert!(v.entries[0].c > v.entries[1].c);
    }

    #[test]
    fn counts_match_the_ceiling_law() {
        assert_eq!(count_exceptional(1.0), 0);
        assert_eq!(count_exceptional(3.0), 2);
        assert_eq!(count_exceptional(3.0001), 3);
        for i in 1..=100 {
            let k = 0.1 * i as f64;
            assert_eq!(exceptional_values(k).entries.len(), count_exceptional(k));
        }
    }

    #[test]
    fn a_new_value_emerges_at_minus_k() {
        for n in 1..=5u32 {
            let k = n as f64 + 1e-6;
            let v = exceptional_values(k);
            let last = v.entries.last().unwrap().c;
            assert!((last + n as f64).abs() < 1e-3);
        }
    }

    #[test]
    fn stability_bound_examples() {
        assert!(stability_bound_check(2.0, -1.0));
        assert!(!stability_bound_check(2.0, -1.8));
        assert!(stability_bound_check(1.0, -0.999));
        assert!(exceptional_values(1.0).entries.is_empty());
    }

    #[test]
    fn bound_is_the_first_exceptional_value_for_k_above_one() {
        for i in 0..200 {
            let k = 1.0 + 0.05 * (i + 1) as f64;
            let c0 = exceptional_values(k).entries[0].c;
            assert_relative_eq!(c0 * c0, 2.0 * k - 1.0, max_relative = 1e-14);
        }
    }

    proptest! {
        #[test]
        fn values_are_ordered_and_inside_the_interval(k in 0.05f64..20.0) {
            let v = exceptional_values(k);
            for w in v.entries.windows(2) {
                prop_assert!(w[0].c > w[1].c);
            }
            for e in &v.entries {
                prop_assert!(e.c > -k && e.c < 0.0);
            }
            prop_assert_eq!(v.entries.len(), count_exceptional(k));
        }
    }
}

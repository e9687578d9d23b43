#![allow(dead_code)]

pub mod lindley;
pub mod oracle;

use dualmode_core::{CanonicalParams, RateParams};
use proptest::prelude::*;

/// Valid canonical systems with finite rates, spanning all three classes.
pub fn canonical() -> impl Strategy<Value = CanonicalParams> {
    (0.2f64..5.0, 1.2f64..12.0, 0.02f64..0.9, 0.05f64..0.95).prop_map(|(mu0, k, a, b)| {
        let f1 = a;
        let f2 = f1 + b * (0.98 - f1).max(0.01);
        CanonicalParams::new(mu0, k, f1, f2.min(0.98)).unwrap()
    })
}

pub fn rates() -> impl Strategy<Value = RateParams> {
    canonical().prop_map(|c| c.to_rates().unwrap())
}

/// A system together with a load strictly inside its stability region.
pub fn loaded_system() -> impl Strategy<Value = (CanonicalParams, f64)> {
    (canonical(), 0.01f64..0.995).prop_map(|(c, t)| {
        let lambda = t * dualmode_core::stability_region_canonical(&c).lambda_max;
        (c, lambda)
    })
}

/// A system, a stable load and a `p` inside the open assignment range.
pub fn loaded_assignment() -> impl Strategy<Value = (CanonicalParams, f64, f64)> {
    (loaded_system(), 0.0f64..1.0).prop_map(|((c, lambda), u)| {
        let range = dualmode_core::assignment_range_canonical(&c, lambda).unwrap();
        let (lo, hi) = (range.lo().unwrap(), range.hi().unwrap());
        let p = lo + (hi - lo) * (0.001 + 0.998 * u);
        (c, lambda, p)
    })
}

mod support;

use dualmode_core::tunable::optimal_fraction;
use dualmode_core::{
    assignment_range_canonical, delay_decomposition, delay_dm, is_stable, lower_bound_gap,
    optimal_delay_dm, optimal_delay_dm_canonical, optimal_partition, CanonicalParams,
};
use proptest::prelude::*;
use support::oracle::{
    scaled_partition_gradient, partition_optimum, partitioned_delay, partitioned_delay_canonical, rel_diff,
};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn closed_form_partition_matches_brute_force((c, lambda, p) in support::loaded_assignment()) {
        let r = c.to_rates().unwrap();
        let op = optimal_partition(p, lambda, &r).unwrap();
        let (alpha, beta, delay) = partition_optimum(&r, p, lambda);
        prop_assert!((op.alpha - alpha).abs() <= 1e-5, "alpha {} vs {}", op.alpha, alpha);
        prop_assert!((op.beta - beta).abs() <= 1e-5, "beta {} vs {}", op.beta, beta);
        let closed = optimal_delay_dm(p, lambda, &r).unwrap();
        prop_assert!(rel_diff(closed, delay) <= 1e-8, "delay {closed} vs {delay}");
    }
}

proptest! {
    #[test]
    fn partition_is_stationary((c, lambda, p) in support::loaded_assignment()) {
        let r = c.to_rates().unwrap();
        let op = optimal_partition(p, lambda, &r).unwrap();
        prop_assert!(is_stable(&r, &op, lambda));
        let (ga, gb) = scaled_partition_gradient(&r, p, op.alpha, op.beta, lambda);
        prop_assert!(ga.abs() < 1e-6, "scaled d/dalpha {ga}");
        prop_assert!(gb.abs() < 1e-6, "scaled d/dbeta {gb}");
    }

    #[test]
    fn closed_form_delay_equals_delay_at_partition((c, lambda, p) in support::loaded_assignment()) {
        let r = c.to_rates().unwrap();
        let op = optimal_partition(p, lambda, &r).unwrap();
        let at_point = delay_dm(&op, lambda, &r).unwrap();
        let closed = optimal_delay_dm(p, lambda, &r).unwrap();
        prop_assert!(rel_diff(at_point, closed) <= 1e-10);
        prop_assert!(rel_diff(closed, partitioned_delay(&r, p, lambda)) <= 1e-10);
        let canonical = optimal_delay_dm_canonical(p, lambda, &c).unwrap();
        prop_assert!(rel_diff(closed, canonical) <= 1e-10);
    }

    #[test]
    fn decomposition_and_lower_bound((c, lambda, p) in support::loaded_assignment()) {
        let d = delay_decomposition(p, lambda, &c).unwrap();
        prop_assert!(rel_diff(d.total, d.tm_term + d.oh_term) <= 1e-10);
        prop_assert!(d.oh_term >= 0.0);
        prop_assert!(rel_diff(d.total, partitioned_delay_canonical(&c, p, lambda)) <= 1e-10);
        prop_assert!(lower_bound_gap(p, lambda, &c).unwrap() >= -1e-10);
    }

    #[test]
    fn single_mode_has_no_overhead((c, lambda) in support::loaded_system()) {
        let range = assignment_range_canonical(&c, lambda).unwrap();
        for p in [0.0, 1.0] {
            if range.contains(p) {
                let d = delay_decomposition(p, lambda, &c).unwrap();
                prop_assert_eq!(d.oh_term, 0.0);
                let f = if p == 1.0 { c.f1() } else { c.f2() };
                prop_assert!(rel_diff(d.total, d.tm_term) <= 1e-12);
                prop_assert_eq!(d.f_effective, f);
            }
        }
    }

    #[test]
    fn delay_is_finite_across_the_range((c, lambda) in support::loaded_system()) {
        let range = assignment_range_canonical(&c, lambda).unwrap();
        let (lo, hi) = (range.lo().unwrap(), range.hi().unwrap());
        for i in 1..200 {
            let p = lo + (hi - lo) * i as f64 / 200.0;
            let d = optimal_delay_dm_canonical(p, lambda, &c).unwrap();
            prop_assert!(d.is_finite() && d > 0.0);
        }
    }

    #[test]
    fn idealized_system_attains_the_bound(mu0 in 0.2f64..5.0, k in 1.2f64..12.0, t in 0.01f64..0.99) {
        let c = CanonicalParams::new(mu0, k, 0.0, 1.0).unwrap();
        let lambda = t * c.mu_star();
        let f_star = optimal_fraction(lambda, &c).unwrap().f_star;
        // f(p) = 1 - p here, so the bound is met where 1 - p = f*.
        let gap = lower_bound_gap(1.0 - f_star, lambda, &c).unwrap();
        let bound = optimal_fraction(lambda, &c).unwrap().t_star;
        prop_assert!(gap.abs() <= 1e-10 * bound.max(1.0), "gap {gap}");
    }
}

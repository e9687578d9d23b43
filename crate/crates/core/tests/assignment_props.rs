mod support;

use dualmode_core::assignment::{DEFAULT_P_TOL, ENDPOINT_TOL};
use dualmode_core::{
    breakaway_load, limit_assignment, optimal_assignment, optimal_assignment_canonical,
    optimal_delay_dm, predict_regime, presets, stability_region_canonical, structural_thresholds,
    AssignmentRegime, CanonicalParams, Prediction,
};
use proptest::prelude::*;
use support::oracle::{dense_scan_min, rel_diff};

fn below_share() -> impl Strategy<Value = CanonicalParams> {
    support::canonical().prop_filter("f1 < 1/(K+1)", |c| c.f1() < c.local_share())
}

fn throughput_efficient() -> impl Strategy<Value = CanonicalParams> {
    support::canonical().prop_filter("throughput efficient", |c| c.is_throughput_efficient())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn predictions_agree_with_numerical_optimum((c, lambda) in support::loaded_system()) {
        let pred = predict_regime(&c, lambda).unwrap();
        let opt = optimal_assignment_canonical(lambda, &c, DEFAULT_P_TOL).unwrap();
        match pred.prediction {
            Prediction::ForcedSm1 => prop_assert_eq!(opt.p_star, 1.0, "{}", pred.certificate),
            Prediction::ForcedSm2 => prop_assert_eq!(opt.p_star, 0.0, "{}", pred.certificate),
            Prediction::MustMix => prop_assert!(
                opt.p_star > ENDPOINT_TOL && opt.p_star < 1.0 - ENDPOINT_TOL,
                "p* = {} but {}", opt.p_star, pred.certificate
            ),
            Prediction::BreakawayRequired => prop_assert!(opt.p_star < 1.0),
            Prediction::NoPrediction => {}
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn optimizer_beats_dense_scan((c, lambda) in support::loaded_system()) {
        let r = c.to_rates().unwrap();
        let opt = optimal_assignment(lambda, &r, DEFAULT_P_TOL).unwrap();
        let (p, scan) = dense_scan_min(&r, lambda, 100_000);
        prop_assert!(
            scan >= opt.delay * (1.0 - 1e-8),
            "scan found {scan} at p = {p}, optimizer {} at {}", opt.delay, opt.p_star
        );
        prop_assert!(rel_diff(opt.delay, optimal_delay_dm(opt.p_star, lambda, &r).unwrap()) <= 1e-10);
        let regime = match opt.p_star {
            p if p == 1.0 => AssignmentRegime::ExclusiveSm1,
            p if p == 0.0 => AssignmentRegime::ExclusiveSm2,
            _ => AssignmentRegime::Mixed,
        };
        prop_assert_eq!(opt.regime, regime);
    }

    #[test]
    fn limit_is_approached_near_capacity(c in throughput_efficient()) {
        let lambda = 0.999 * stability_region_canonical(&c).lambda_max;
        let opt = optimal_assignment_canonical(lambda, &c, DEFAULT_P_TOL).unwrap();
        let limit = limit_assignment(&c).unwrap();
        prop_assert!((opt.p_star - limit).abs() < 0.02, "p* {} vs limit {limit}", opt.p_star);
        prop_assert!(rel_diff(c.effective_fraction(limit), c.local_share()) <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn breakaway_lies_in_structural_bracket(c in below_share()) {
        let t = structural_thresholds(&c);
        let (lo, hi) = (t.sm1_low_load.unwrap(), t.sm1_saturation.unwrap());
        let b = breakaway_load(&c, 1e-9).unwrap();
        prop_assert!(lo <= b && b <= hi, "{b} outside [{lo}, {hi}]");
        // Just below the breakaway load SM1 alone is still optimal.
        let before = optimal_assignment_canonical(b - 1e-6, &c, DEFAULT_P_TOL).unwrap();
        prop_assert_eq!(before.p_star, 1.0);
    }
}

#[test]
fn reference_system_regimes() {
    let (a, b, c) = (presets::system_a(), presets::system_b(), presets::system_c());
    for rho in [0.05, 0.2, 0.4, 0.6, 0.79] {
        let opt = optimal_assignment_canonical(rho * 5.0, &c, DEFAULT_P_TOL).unwrap();
        assert_eq!(opt.p_star, 1.0, "system C at rho {rho}");
    }
    for lambda in [2.0 / 0.55 + 1e-9, 4.0, 4.5, 4.7] {
        let opt = optimal_assignment_canonical(lambda, &b, DEFAULT_P_TOL).unwrap();
        assert_eq!(opt.p_star, 0.0, "system B at {lambda}");
    }
    let near = optimal_assignment_canonical(0.999 * 5.0, &a, DEFAULT_P_TOL).unwrap();
    assert!((near.p_star - 0.5).abs() < 0.02);

    let ba = breakaway_load(&a, 1e-9).unwrap();
    assert!((2.0 / 0.7..=4.0 / 0.9).contains(&ba));
    let bb = breakaway_load(&b, 1e-9).unwrap();
    assert!((2.0 / 0.85..=4.0 / 0.95).contains(&bb));
    assert!(breakaway_load(&c, 1e-9).is_err());
}

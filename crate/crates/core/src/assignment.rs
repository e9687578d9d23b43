//! Delay-optimal assignment parameter `p*(lambda)` and the structural
//! predictions about it.
//!
//! `p -> T*_DM(p; lambda)` can have several critical points, so the optimizer
//! scans a uniform grid over `P_lambda`, refines the best few grid basins by
//! golden-section search, and keeps the best point found. The structural
//! predicates (`predict_regime`) are closed-form conditions that pin `p*`
//! without any search; tests check one against the other.

use serde::Serialize;

use crate::allocation::{optimal_delay_dm, optimal_delay_dm_canonical};
use crate::error::{Error, Result};
use crate::model::{CanonicalParams, RateParams};
use crate::stability::{
    assignment_range, assignment_range_canonical, stability_region, stability_region_canonical,
    Interval,
};
use crate::tunable::load_for_fraction;

/// Number of grid points scanned across `P_lambda`.
pub const GRID_POINTS: usize = 512;
/// Number of grid basins refined by golden-section search.
pub const REFINED_BASINS: usize = 3;
/// Optimizer results this close to a feasible `p = 0` / `p = 1` snap onto it.
pub const ENDPOINT_TOL: f64 = 1e-6;
/// Default location tolerance in `p` for [`optimal_assignment`].
pub const DEFAULT_P_TOL: f64 = 1e-9;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AssignmentRegime {
    /// `p* = 1`
    ExclusiveSm1,
    /// `p* = 0`
    ExclusiveSm2,
    /// `0 < p* < 1`
    Mixed,
}

impl AssignmentRegime {
    fn of(p: f64) -> Self {
        if p == 1.0 {
            AssignmentRegime::ExclusiveSm1
        } else if p == 0.0 {
            AssignmentRegime::ExclusiveSm2
        } else {
            AssignmentRegime::Mixed
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            AssignmentRegime::ExclusiveSm1 => "sm1",
            AssignmentRegime::ExclusiveSm2 => "sm2",
            AssignmentRegime::Mixed => "mixed",
        }
    }
}

/// Optimal assignment at one load. Exact ties between candidate minimizers
/// are resolved toward the larger `p` (prefer SM1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AssignmentOptimum {
    pub p_star: f64,
    pub delay: f64,
    pub regime: AssignmentRegime,
}

/// Minimizes `objective` over the closure of `range` to within `tol` in `p`.
fn minimize_over(range: &Interval, tol: f64, objective: impl Fn(f64) -> f64) -> (f64, f64) {
    let (lo, hi) = range.bounds().expect("range checked non-empty");
    let (a, b) = (lo.value, hi.value);
    if b <= a {
        return (a, objective(a));
    }

    let xs: Vec<f64> = (0..GRID_POINTS)
        .map(|i| a + (b - a) * i as f64 / (GRID_POINTS - 1) as f64)
        .collect();
    let gs: Vec<f64> = xs.iter().map(|&x| objective(x)).collect();

    let mut basins: Vec<usize> = (0..GRID_POINTS)
        .filter(|&i| {
            gs[i].is_finite()
                && (i == 0 || gs[i] <= gs[i - 1])
                && (i + 1 == GRID_POINTS || gs[i] <= gs[i + 1])
        })
        .collect();
    basins.sort_by(|&i, &j| gs[i].total_cmp(&gs[j]).then(j.cmp(&i)));
    basins.truncate(REFINED_BASINS);

    let mut best = (f64::NAN, f64::INFINITY);
    let mut consider = |x: f64, g: f64| {
        if g < best.1 || (g == best.1 && x > best.0) {
            best = (x, g);
        }
    };
    for &i in &basins {
        consider(xs[i], gs[i]);
        let left = xs[i.saturating_sub(1)];
        let right = xs[(i + 1).min(GRID_POINTS - 1)];
        let (x, g) = golden_section(&objective, left, right, tol);
        consider(x, g);
    }

    let (mut p, mut g) = best;
    if lo.closed && p - a < ENDPOINT_TOL {
        p = a;
        g = objective(p);
    }
    if hi.closed && b - p < ENDPOINT_TOL {
        p = b;
        g = objective(p);
    }
    (p, g)
}

/// Golden-section search for a minimum of `f` on `[a, b]`; returns the best
/// point evaluated once the bracket is narrower than `tol`.
fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if c == d {
            break;
        }
    }
    if fd <= fc {
        (d, fd)
    } else {
        (c, fc)
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

fn finish(range: Interval, tol: f64, objective: impl Fn(f64) -> f64) -> AssignmentOptimum {
    let (p_star, delay) = minimize_over(&range, tol, objective);
    AssignmentOptimum {
        p_star,
        delay,
        regime: AssignmentRegime::of(p_star),
    }
}

/// Global minimizer of `p -> T*_DM(p; lambda)` over `P_lambda`.
pub fn optimal_assignment(lambda: f64, rates: &RateParams, tol: f64) -> Result<AssignmentOptimum> {
    check_tol(tol)?;
    let range = assignment_range(rates, lambda)?;
    if range.is_empty() {
        return Err(Error::Unstable {
            lambda,
            lambda_max: stability_region(rates).lambda_max,
        });
    }
    Ok(finish(range, tol, |p| {
        optimal_delay_dm(p, lambda, rates).unwrap_or(f64::INFINITY)
    }))
}

/// [`optimal_assignment`] in canonical form; also valid for `f1 = 0` / `f2 = 1`.
pub fn optimal_assignment_canonical(
    lambda: f64,
    canon: &CanonicalParams,
    tol: f64,
) -> Result<AssignmentOptimum> {
    check_tol(tol)?;
    let range = assignment_range_canonical(canon, lambda)?;
    if range.is_empty() {
        return Err(Error::Unstable {
            lambda,
            lambda_max: stability_region_canonical(canon).lambda_max,
        });
    }
    Ok(finish(range, tol, |p| {
        optimal_delay_dm_canonical(p, lambda, canon).unwrap_or(f64::INFINITY)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Prediction {
    ForcedSm1,
    ForcedSm2,
    MustMix,
    BreakawayRequired,
    NoPrediction,
}

impl Prediction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Prediction::ForcedSm1 => "forced-sm1",
            Prediction::ForcedSm2 => "forced-sm2",
            Prediction::MustMix => "must-mix",
            Prediction::BreakawayRequired => "breakaway",
            Prediction::NoPrediction => "none",
        }
    }
}

/// The structural result behind a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StructuralRule {
    /// `f1 >= 1/(K+1)`: SM2 is redundant at every load.
    RedundantSm2,
    /// `f1 < 1/(K+1)` and the load is below the SM1 low-load bound.
    LowLoadSm1,
    /// `f1 < 1/(K+1)` and SM1 alone cannot carry the load.
    BreakawayForced,
    /// Throughput-efficient and neither mode alone carries the load.
    BothModesRequired,
    /// `f2 <= 1/(K+1)` and the load is above the SM2 high-load bound.
    HighLoadSm2,
}

impl StructuralRule {
    pub fn as_str(&self) -> &'static str {
        match self {
            StructuralRule::RedundantSm2 => "redundant-sm2",
            StructuralRule::LowLoadSm1 => "low-load-sm1",
            StructuralRule::BreakawayForced => "breakaway-forced",
            StructuralRule::BothModesRequired => "both-modes-required",
            StructuralRule::HighLoadSm2 => "high-load-sm2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimePrediction {
    pub prediction: Prediction,
    pub rule: Option<StructuralRule>,
    /// The triggering inequality with numbers substituted.
    pub certificate: String,
}

/// Structural load thresholds of a system; `None` where a bound does not apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructuralThresholds {
    /// Up to this load SM1 alone is optimal (`f1 < 1/(K+1)` only).
    pub sm1_low_load: Option<f64>,
    /// From this load on SM1 alone is infeasible, `K mu0 / (1 - f1)`.
    pub sm1_saturation: Option<f64>,
    /// From this load on SM2 alone is optimal (`f2 <= 1/(K+1)` only).
    pub sm2_high_load: Option<f64>,
    /// Load beyond which neither mode alone is feasible (throughput-efficient only).
    pub both_modes: Option<f64>,
}

pub fn structural_thresholds(canon: &CanonicalParams) -> StructuralThresholds {
    let (mu0, k, f1, f2) = (canon.mu0(), canon.k(), canon.f1(), canon.f2());
    let share = canon.local_share();
    let below = f1 < share;
    StructuralThresholds {
        sm1_low_load: if below { load_for_fraction(f1, canon) } else { None },
        sm1_saturation: below.then(|| k * mu0 / (1.0 - f1)),
        sm2_high_load: if f2 <= share { load_for_fraction(f2, canon) } else { None },
        both_modes: canon
            .is_throughput_efficient()
            .then(|| (mu0 / f2).max(k * mu0 / (1.0 - f1))),
    }
}

/// Applies the structural results in order of strength: exact-regime claims
/// before existence claims.
pub fn predict_regime(canon: &CanonicalParams, lambda: f64) -> Result<RegimePrediction> {
    crate::error::check_lambda(lambda)?;
    let lambda_max = stability_region_canonical(canon).lambda_max;
    if lambda >= lambda_max {
        return Err(Error::Unstable { lambda, lambda_max });
    }
    let (f1, f2) = (canon.f1(), canon.f2());
    let share = canon.local_share();
    let t = structural_thresholds(canon);
    let hit = |prediction, rule, certificate: String| RegimePrediction {
        prediction,
        rule: Some(rule),
        certificate,
    };

    if f1 >= share {
        return Ok(hit(
            Prediction::ForcedSm1,
            StructuralRule::RedundantSm2,
            format!("f1 = {f1} >= 1/(K+1) = {share}"),
        ));
    }
    if let Some(bound) = t.sm2_high_load {
        if lambda >= bound {
            return Ok(hit(
                Prediction::ForcedSm2,
                StructuralRule::HighLoadSm2,
                format!("f2 = {f2} <= 1/(K+1) = {share} and lambda = {lambda} >= {bound}"),
            ));
        }
    }
    if let Some(bound) = t.both_modes {
        if lambda > bound {
            return Ok(hit(
                Prediction::MustMix,
                StructuralRule::BothModesRequired,
                format!("f1 = {f1} < 1/(K+1) = {share} < f2 = {f2} and lambda = {lambda} > {bound}"),
            ));
        }
    }
    if let Some(bound) = t.sm1_low_load {
        if lambda <= bound {
            return Ok(hit(
                Prediction::ForcedSm1,
                StructuralRule::LowLoadSm1,
                format!("f1 = {f1} < 1/(K+1) = {share} and lambda = {lambda} <= {bound}"),
            ));
        }
    }
    if let Some(bound) = t.sm1_saturation {
        if lambda >= bound {
            return Ok(hit(
                Prediction::BreakawayRequired,
                StructuralRule::BreakawayForced,
                format!("f1 = {f1} < 1/(K+1) = {share} and lambda = {lambda} >= {bound}"),
            ));
        }
    }
    Ok(RegimePrediction {
        prediction: Prediction::NoPrediction,
        rule: None,
        certificate: String::new(),
    })
}

/// Number of loads probed across the bracket before bisecting.
pub const BREAKAWAY_SCAN_POINTS: usize = 64;

/// Smallest load at which exclusive SM1 assignment stops being optimal,
/// located by bisection to within `tol`.
pub fn breakaway_load(canon: &CanonicalParams, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let t = structural_thresholds(canon);
    let (Some(mut lo), Some(mut hi)) = (t.sm1_low_load, t.sm1_saturation) else {
        return Err(Error::NotApplicable("breakaway requires f1 < 1/(K+1)"));
    };
    let breaks = |lambda: f64| -> Result<bool> {
        let opt = optimal_assignment_canonical(lambda, canon, DEFAULT_P_TOL)?;
        Ok(opt.p_star < 1.0 - ENDPOINT_TOL)
    };

    let (bracket_lo, bracket_hi) = (lo, hi);
    let mut seen_break = false;
    for j in 0..BREAKAWAY_SCAN_POINTS {
        let lambda = lo + (hi - lo) * j as f64 / (BREAKAWAY_SCAN_POINTS - 1) as f64;
        let b = breaks(lambda)?;
        if seen_break && !b {
            return Err(Error::NonMonotoneBreakaway { lo: bracket_lo, hi: bracket_hi });
        }
        seen_break |= b;
    }
    if !seen_break || breaks(lo)? {
        return Err(Error::NonMonotoneBreakaway { lo: bracket_lo, hi: bracket_hi });
    }

    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if breaks(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Limit of `p*(lambda)` as the load approaches capacity in a
/// throughput-efficient system; it balances `f(p)` to `1/(K+1)`.
pub fn limit_assignment(canon: &CanonicalParams) -> Result<f64> {
    if !canon.is_throughput_efficient() {
        return Err(Error::NotApplicable("limit assignment requires a throughput-efficient system"));
    }
    Ok((canon.f2() - canon.local_share()) / (canon.f2() - canon.f1()))
}

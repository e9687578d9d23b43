//! Stability region of the dual-mode system, the feasible assignment and
//! service-fraction intervals, and constructive stabilizing operating points.

use serde::Serialize;

use crate::error::{check_lambda, Error, Result};
use crate::model::{rel_close, CanonicalParams, OperatingPoint, RateParams, REL_TOL};

/// Interval endpoint with explicit openness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Endpoint {
    pub value: f64,
    pub closed: bool,
}

impl Endpoint {
    pub fn open(value: f64) -> Self {
        Self { value, closed: false }
    }

    pub fn closed(value: f64) -> Self {
        Self { value, closed: true }
    }
}

/// A subinterval of `[0, 1]`, typically `[0, 1] ∩ (lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Interval {
    Empty,
    Range { lo: Endpoint, hi: Endpoint },
}

/// Assignment parameters `p` that admit a stabilizing partition.
pub type AssignmentRange = Interval;

/// Service fractions `f` that stabilize the tunable-mode system.
pub type FractionRange = Interval;

impl Interval {
    /// `[0, 1] ∩ (lo, hi)`. Endpoints falling outside `[0, 1]` are replaced by
    /// the closed unit-interval bound.
    pub fn unit_intersect_open(lo: f64, hi: f64) -> Self {
        if lo.is_nan() || hi.is_nan() {
            return Interval::Empty;
        }
        let lo = if lo < 0.0 { Endpoint::closed(0.0) } else { Endpoint::open(lo) };
        let hi = if hi > 1.0 { Endpoint::closed(1.0) } else { Endpoint::open(hi) };
        if lo.value < hi.value || (lo.value == hi.value && lo.closed && hi.closed) {
            Interval::Range { lo, hi }
        } else {
            Interval::Empty
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Interval::Empty)
    }

    pub fn bounds(&self) -> Option<(Endpoint, Endpoint)> {
        match *self {
            Interval::Empty => None,
            Interval::Range { lo, hi } => Some((lo, hi)),
        }
    }

    pub fn lo(&self) -> Option<f64> {
        self.bounds().map(|(lo, _)| lo.value)
    }

    pub fn hi(&self) -> Option<f64> {
        self.bounds().map(|(_, hi)| hi.value)
    }

    pub fn width(&self) -> f64 {
        self.bounds().map_or(0.0, |(lo, hi)| hi.value - lo.value)
    }

    pub fn midpoint(&self) -> Option<f64> {
        self.bounds().map(|(lo, hi)| 0.5 * (lo.value + hi.value))
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Interval::Empty => false,
            Interval::Range { lo, hi } => {
                let above = if lo.closed { x >= lo.value } else { x > lo.value };
                let below = if hi.closed { x <= hi.value } else { x < hi.value };
                above && below
            }
        }
    }

    /// Maps `x` onto a closed endpoint when it misses the interval by at most
    /// `tol`. Open endpoints are never snapped to.
    pub fn snap(&self, x: f64, tol: f64) -> Option<f64> {
        if self.contains(x) {
            return Some(x);
        }
        let (lo, hi) = self.bounds()?;
        if lo.closed && (x - lo.value).abs() <= tol {
            Some(lo.value)
        } else if hi.closed && (x - hi.value).abs() <= tol {
            Some(hi.value)
        } else {
            None
        }
    }

    /// Whether `other` is a subset of `self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        match (self.bounds(), other.bounds()) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some((lo, hi)), Some((olo, ohi))) => {
                let lo_ok = olo.value > lo.value || (olo.value == lo.value && (lo.closed || !olo.closed));
                let hi_ok = ohi.value < hi.value || (ohi.value == hi.value && (hi.closed || !ohi.closed));
                lo_ok && hi_ok
            }
        }
    }
}

/// Which capacity limits the arrival rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BindingConstraint {
    /// The local server under SM1 (`mu_l1`).
    LocalCap,
    /// The cloud server under SM2 (`mu_c2`).
    CloudCap,
    /// Combined capacity `mu* = (K + 1) mu0`.
    SystemCap,
}

impl BindingConstraint {
    pub fn as_str(&self) -> &'static str {
        match self {
            BindingConstraint::LocalCap => "local",
            BindingConstraint::CloudCap => "cloud",
            BindingConstraint::SystemCap => "system",
        }
    }
}

/// The stability region `{ lambda : 0 <= lambda < lambda_max }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StabilityRegion {
    pub lambda_max: f64,
    pub binding: BindingConstraint,
}

impl StabilityRegion {
    fn from_caps(local: f64, cloud: f64, system: f64) -> Self {
        let lambda_max = local.min(cloud).min(system);
        // Ties go to the combined capacity, then local, then cloud.
        let binding = if rel_close(system, lambda_max, REL_TOL) {
            BindingConstraint::SystemCap
        } else if rel_close(local, lambda_max, REL_TOL) {
            BindingConstraint::LocalCap
        } else {
            BindingConstraint::CloudCap
        };
        Self { lambda_max, binding }
    }

    pub fn contains(&self, lambda: f64) -> bool {
        lambda >= 0.0 && lambda < self.lambda_max
    }
}

pub fn stability_region(rates: &RateParams) -> StabilityRegion {
    StabilityRegion::from_caps(rates.mu_l1(), rates.mu_c2(), rates.mu_star())
}

/// Stability region from canonical parameters; idealized systems with an
/// infinite local or cloud rate are supported.
pub fn stability_region_canonical(canon: &CanonicalParams) -> StabilityRegion {
    let ext = canon.to_rates_extended();
    StabilityRegion::from_caps(ext.mu_l1.value(), ext.mu_c2.value(), canon.mu_star())
}

/// `P_lambda = [0, 1] ∩ (p_min, p_max)`; empty outside the stability region.
pub fn assignment_range(rates: &RateParams, lambda: f64) -> Result<AssignmentRange> {
    check_lambda(lambda)?;
    if lambda >= stability_region(rates).lambda_max {
        return Ok(Interval::Empty);
    }
    let inv = 1.0 / lambda;
    let (il1, il2) = (1.0 / rates.mu_l1(), 1.0 / rates.mu_l2());
    let (ic1, ic2) = (1.0 / rates.mu_c1(), 1.0 / rates.mu_c2());
    let p_min = 1.0 - (inv - il1) / (il2 - il1);
    let p_max = (inv - ic2) / (ic1 - ic2);
    Ok(Interval::unit_intersect_open(p_min, p_max))
}

/// Canonical-form `P_lambda`: the `p` whose effective fraction
/// `f(p) = p f1 + (1 - p) f2` lies strictly inside the tunable-mode range.
pub fn assignment_range_canonical(canon: &CanonicalParams, lambda: f64) -> Result<AssignmentRange> {
    check_lambda(lambda)?;
    if lambda >= stability_region_canonical(canon).lambda_max {
        return Ok(Interval::Empty);
    }
    let (mu0, k, f1, f2) = (canon.mu0(), canon.k(), canon.f1(), canon.f2());
    let p_min = (f2 - mu0 / lambda) / (f2 - f1);
    let p_max = (f2 - 1.0 + k * mu0 / lambda) / (f2 - f1);
    Ok(Interval::unit_intersect_open(p_min, p_max))
}

/// `F_lambda = [0, 1] ∩ (1 - K mu0 / lambda, mu0 / lambda)`.
pub fn feasible_fractions(canon: &CanonicalParams, lambda: f64) -> Result<FractionRange> {
    check_lambda(lambda)?;
    if lambda >= canon.mu_star() {
        return Ok(Interval::Empty);
    }
    let lo = 1.0 - canon.k() * canon.mu0() / lambda;
    let hi = canon.mu0() / lambda;
    Ok(Interval::unit_intersect_open(lo, hi))
}

/// Builds a stabilizing operating point: `p` at the middle of `P_lambda` and
/// each partition halfway between its lower and upper stability limits.
pub fn witness_operating_point(rates: &RateParams, lambda: f64) -> Result<OperatingPoint> {
    let range = assignment_range(rates, lambda)?;
    let p = range.midpoint().ok_or(Error::Unstable {
        lambda,
        lambda_max: stability_region(rates).lambda_max,
    })?;
    let q = 1.0 - p;
    let alpha = 0.5 * (1.0 - lambda * q / rates.mu_l2() + lambda * p / rates.mu_l1());
    let beta = 0.5 * (1.0 - lambda * q / rates.mu_c2() + lambda * p / rates.mu_c1());
    OperatingPoint::new(p, alpha, beta)
}

/// Checks the four per-queue stability conditions at an operating point.
///
/// A queue that receives no traffic (`p = 0` or `p = 1`) is trivially stable,
/// so its condition is skipped rather than read as `0 < 0`.
pub fn is_stable(rates: &RateParams, op: &OperatingPoint, lambda: f64) -> bool {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return false;
    }
    let sm1 = lambda * op.p;
    let sm2 = lambda * (1.0 - op.p);
    queue_stable(sm1, op.alpha * rates.mu_l1())
        && queue_stable(sm2, (1.0 - op.alpha) * rates.mu_l2())
        && queue_stable(sm1, op.beta * rates.mu_c1())
        && queue_stable(sm2, (1.0 - op.beta) * rates.mu_c2())
}

fn queue_stable(arrivals: f64, capacity: f64) -> bool {
    arrivals == 0.0 || arrivals < capacity
}

//! Delay-optimal server partitioning for a fixed assignment parameter.
//!
//! For a given `p` each server's capacity is split between the two modes;
//! the optimal split has a closed form, and the resulting delay decomposes
//! into the tunable-mode delay at the effective fraction `f(p)` plus a
//! non-negative overhead for running two modes side by side.

use serde::Serialize;

use crate::error::{check_lambda, Error, Result};
use crate::model::{CanonicalParams, OperatingPoint, RateParams};
use crate::stability::{
    assignment_range, assignment_range_canonical, stability_region, stability_region_canonical,
    AssignmentRange,
};
use crate::tunable;

/// Assignment parameters within this distance of a closed endpoint of
/// `P_lambda` are treated as that endpoint.
pub const ENDPOINT_SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DelayBreakdown {
    pub total: f64,
    /// Tunable-mode delay at the effective fraction.
    pub tm_term: f64,
    /// Overhead of splitting the servers between two modes.
    pub oh_term: f64,
    pub f_effective: f64,
}

/// Mean delay at an arbitrary operating point: the sum of four M/M/1 sojourn
/// times weighted by the share of traffic each queue sees.
pub fn delay_dm(op: &OperatingPoint, lambda: f64, rates: &RateParams) -> Result<f64> {
    check_lambda(lambda)?;
    let q = 1.0 - op.p;
    let unstable = || Error::Unstable {
        lambda,
        lambda_max: stability_region(rates).lambda_max,
    };
    let terms = [
        (op.p, op.alpha * rates.mu_l1()),
        (q, (1.0 - op.alpha) * rates.mu_l2()),
        (op.p, op.beta * rates.mu_c1()),
        (q, (1.0 - op.beta) * rates.mu_c2()),
    ];
    let mut total = 0.0;
    for (share, capacity) in terms {
        if share == 0.0 {
            continue;
        }
        let slack = capacity - lambda * share;
        if slack <= 0.0 {
            return Err(unstable());
        }
        total += share / slack;
    }
    Ok(total)
}

fn feasible_p(range: &AssignmentRange, p: f64, lambda: f64) -> Result<f64> {
    range
        .snap(p, ENDPOINT_SNAP_TOL)
        .ok_or(Error::InfeasibleAssignment { p, lambda })
}

fn checked_range(rates: &RateParams, lambda: f64) -> Result<AssignmentRange> {
    let range = assignment_range(rates, lambda)?;
    if range.is_empty() {
        return Err(Error::Unstable {
            lambda,
            lambda_max: stability_region(rates).lambda_max,
        });
    }
    Ok(range)
}

fn checked_range_canonical(canon: &CanonicalParams, lambda: f64) -> Result<AssignmentRange> {
    let range = assignment_range_canonical(canon, lambda)?;
    if range.is_empty() {
        return Err(Error::Unstable {
            lambda,
            lambda_max: stability_region_canonical(canon).lambda_max,
        });
    }
    Ok(range)
}

/// Optimal SM1 share of one server, in terms of the inverse full-capacity
/// rates (mean service times) `t1` for SM1 and `t2` for SM2.
fn optimal_share(p: f64, lambda: f64, t1: f64, t2: f64) -> f64 {
    let q = 1.0 - p;
    let s1 = (p * t1).sqrt();
    let s2 = (q * t2).sqrt();
    (lambda * p * t1 * s2 + (1.0 - lambda * q * t2) * s1) / (s1 + s2)
}

fn server_delay(p: f64, lambda: f64, t1: f64, t2: f64) -> f64 {
    let q = 1.0 - p;
    let s = (p * t1).sqrt() + (q * t2).sqrt();
    s * s / (1.0 - lambda * (p * t1 + q * t2))
}

fn partition_from_times(p: f64, lambda: f64, times: [f64; 4]) -> OperatingPoint {
    // The idle mode's capacity goes to the active one.
    if p == 1.0 {
        return OperatingPoint { p, alpha: 1.0, beta: 1.0 };
    }
    if p == 0.0 {
        return OperatingPoint { p, alpha: 0.0, beta: 0.0 };
    }
    let [l1, l2, c1, c2] = times;
    OperatingPoint {
        p,
        alpha: optimal_share(p, lambda, l1, l2).clamp(0.0, 1.0),
        beta: optimal_share(p, lambda, c1, c2).clamp(0.0, 1.0),
    }
}

fn service_times(rates: &RateParams) -> [f64; 4] {
    [
        1.0 / rates.mu_l1(),
        1.0 / rates.mu_l2(),
        1.0 / rates.mu_c1(),
        1.0 / rates.mu_c2(),
    ]
}

fn canonical_service_times(canon: &CanonicalParams) -> [f64; 4] {
    let (mu0, k, f1, f2) = (canon.mu0(), canon.k(), canon.f1(), canon.f2());
    [f1 / mu0, f2 / mu0, (1.0 - f1) / (k * mu0), (1.0 - f2) / (k * mu0)]
}

/// Delay-optimal `(alpha, beta)` for assignment parameter `p`.
pub fn optimal_partition(p: f64, lambda: f64, rates: &RateParams) -> Result<OperatingPoint> {
    let range = checked_range(rates, lambda)?;
    let p = feasible_p(&range, p, lambda)?;
    Ok(partition_from_times(p, lambda, service_times(rates)))
}

/// [`optimal_partition`] in canonical form; also valid for `f1 = 0` / `f2 = 1`.
pub fn optimal_partition_canonical(
    p: f64,
    lambda: f64,
    canon: &CanonicalParams,
) -> Result<OperatingPoint> {
    let range = checked_range_canonical(canon, lambda)?;
    let p = feasible_p(&range, p, lambda)?;
    Ok(partition_from_times(p, lambda, canonical_service_times(canon)))
}

fn closed_form_delay(p: f64, lambda: f64, times: [f64; 4]) -> f64 {
    let [l1, l2, c1, c2] = times;
    server_delay(p, lambda, l1, l2) + server_delay(p, lambda, c1, c2)
}

/// Delay under the optimal partition, `T*_DM(p; lambda)`, from the raw rates.
pub fn optimal_delay_dm(p: f64, lambda: f64, rates: &RateParams) -> Result<f64> {
    let range = checked_range(rates, lambda)?;
    let p = feasible_p(&range, p, lambda)?;
    Ok(closed_form_delay(p, lambda, service_times(rates)))
}

/// `T*_DM(p; lambda)` written in canonical parameters.
pub fn optimal_delay_dm_canonical(p: f64, lambda: f64, canon: &CanonicalParams) -> Result<f64> {
    let range = checked_range_canonical(canon, lambda)?;
    let p = feasible_p(&range, p, lambda)?;
    Ok(canonical_delay(p, lambda, canon))
}

fn canonical_delay(p: f64, lambda: f64, canon: &CanonicalParams) -> f64 {
    let (mu0, k, f1, f2) = (canon.mu0(), canon.k(), canon.f1(), canon.f2());
    let q = 1.0 - p;
    let f = canon.effective_fraction(p);
    let local = (p * f1).sqrt() + (q * f2).sqrt();
    let cloud = (p * (1.0 - f1)).sqrt() + (q * (1.0 - f2)).sqrt();
    local * local / (mu0 - lambda * f) + cloud * cloud / (k * mu0 - lambda * (1.0 - f))
}

/// Splits `T*_DM(p; lambda)` into the tunable-mode delay at `f(p)` and the
/// mode-splitting overhead.
pub fn delay_decomposition(p: f64, lambda: f64, canon: &CanonicalParams) -> Result<DelayBreakdown> {
    let range = checked_range_canonical(canon, lambda)?;
    let p = feasible_p(&range, p, lambda)?;
    let (mu0, k, f1, f2) = (canon.mu0(), canon.k(), canon.f1(), canon.f2());
    let q = 1.0 - p;
    let f = canon.effective_fraction(p);
    let tm_term = tunable::delay_tm(f, lambda, canon)?;
    let oh_term = 2.0
        * (p * q).sqrt()
        * ((f1 * f2).sqrt() / (mu0 - lambda * f)
            + ((1.0 - f1) * (1.0 - f2)).sqrt() / (k * mu0 - lambda * (1.0 - f)));
    Ok(DelayBreakdown {
        total: canonical_delay(p, lambda, canon),
        tm_term,
        oh_term,
        f_effective: f,
    })
}

/// Excess of `T*_DM(p; lambda)` over the tunable-mode optimum `T*_TM(lambda)`.
pub fn lower_bound_gap(p: f64, lambda: f64, canon: &CanonicalParams) -> Result<f64> {
    let dm = optimal_delay_dm_canonical(p, lambda, canon)?;
    let tm = tunable::optimal_delay(lambda, canon)?;
    Ok(dm - tm)
}

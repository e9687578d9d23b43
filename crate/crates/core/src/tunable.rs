//! The tunable-mode benchmark: a single service mode whose local fraction `f`
//! can be set freely. Its optimal delay is a lower bound for any dual-mode
//! system with the same server capacities.

use serde::Serialize;

use crate::error::{check_lambda, Error, Result};
use crate::model::CanonicalParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TunableRegime {
    /// All work is done in the cloud (`f* = 0`).
    CloudOnly,
    /// `f*` is the interior stationary point of the delay.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TunableOptimum {
    pub f_star: f64,
    pub t_star: f64,
    pub regime: TunableRegime,
}

/// Mean sojourn time of the two-node tandem with local fraction `f`.
pub fn delay_tm(f: f64, lambda: f64, canon: &CanonicalParams) -> Result<f64> {
    check_lambda(lambda)?;
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::InfeasibleFraction { f, lambda });
    }
    let g = 1.0 - f;
    let local = canon.mu0() - f * lambda;
    let cloud = canon.k() * canon.mu0() - g * lambda;
    if local <= 0.0 || cloud <= 0.0 {
        return Err(Error::InfeasibleFraction { f, lambda });
    }
    Ok(f / local + g / cloud)
}

/// Load at and below which the cloud-only split is optimal, `(K - sqrt K) mu0`.
pub fn cloud_only_threshold(canon: &CanonicalParams) -> f64 {
    (canon.k() - canon.k().sqrt()) * canon.mu0()
}

/// The unconstrained stationary point `f_min(lambda)` of the tunable delay.
pub fn stationary_fraction(lambda: f64, canon: &CanonicalParams) -> f64 {
    let sk = canon.k().sqrt();
    (lambda - cloud_only_threshold(canon)) / (lambda * (1.0 + sk))
}

/// Delay-optimal service fraction and the resulting delay.
pub fn optimal_fraction(lambda: f64, canon: &CanonicalParams) -> Result<TunableOptimum> {
    check_lambda(lambda)?;
    let mu_star = canon.mu_star();
    if lambda >= mu_star {
        return Err(Error::Unstable { lambda, lambda_max: mu_star });
    }
    let (mu0, k) = (canon.mu0(), canon.k());
    // Decide the branch before dividing so tiny loads never form f_min.
    let opt = if lambda <= cloud_only_threshold(canon) {
        TunableOptimum {
            f_star: 0.0,
            t_star: 1.0 / (k * mu0 - lambda),
            regime: TunableRegime::CloudOnly,
        }
    } else {
        let s = k.sqrt() - 1.0;
        TunableOptimum {
            f_star: stationary_fraction(lambda, canon),
            t_star: (2.0 * lambda - s * s * mu0) / (lambda * (mu_star - lambda)),
            regime: TunableRegime::Interior,
        }
    };
    debug_assert!({
        let direct = delay_tm(opt.f_star, lambda, canon).unwrap_or(f64::NAN);
        (direct - opt.t_star).abs() <= 1e-12 * direct.abs().max(1.0) * closeness_scale(lambda, mu_star)
    });
    Ok(opt)
}

// Both closed forms lose relative accuracy like 1 / (mu* - lambda) near capacity.
fn closeness_scale(lambda: f64, mu_star: f64) -> f64 {
    (mu_star / (mu_star - lambda)).max(1.0)
}

/// `T*_TM(lambda)`, the tunable-mode lower bound on dual-mode delay.
pub fn optimal_delay(lambda: f64, canon: &CanonicalParams) -> Result<f64> {
    optimal_fraction(lambda, canon).map(|o| o.t_star)
}

/// Load at which `f*(lambda)` reaches a given fraction `f < 1/(K+1)`.
///
/// At this load a single mode with local fraction `f` meets the lower bound.
pub fn load_for_fraction(f: f64, canon: &CanonicalParams) -> Option<f64> {
    let sk = canon.k().sqrt();
    let den = 1.0 - f * (1.0 + sk);
    if f < 0.0 || den <= 0.0 {
        None
    } else {
        Some(cloud_only_threshold(canon) / den)
    }
}

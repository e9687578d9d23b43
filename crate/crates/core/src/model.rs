//! Domain types for the dual-mode system: raw service rates, the canonical
//! `(mu0, K, f1, f2)` representation, system classification and operating
//! points.
//!
//! Mode 1 (SM1) is the cloud-heavy mode and mode 2 (SM2) the local-heavy one,
//! so every valid rate set satisfies `mu_c1 < mu_c2` and `mu_l2 < mu_l1`.
//! In canonical form `mu0` and `K * mu0` are the effective local and cloud
//! capacities and `f_i` is the fraction of a mode-`i` job's work done locally.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for algebraic identities between equivalent closed forms.
pub const REL_TOL: f64 = 1e-12;

/// Unvalidated service rates, as read from a file or the command line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawRates {
    pub mu_l1: f64,
    pub mu_l2: f64,
    pub mu_c1: f64,
    pub mu_c2: f64,
}

impl RawRates {
    pub fn new(mu_l1: f64, mu_l2: f64, mu_c1: f64, mu_c2: f64) -> Self {
        Self { mu_l1, mu_l2, mu_c1, mu_c2 }
    }

    /// Relabels the system with the cloud server in front. Mode labels swap as
    /// well so that mode 1 stays the one doing less work on the (new) local server.
    pub fn swap_servers(&self) -> Self {
        Self {
            mu_l1: self.mu_c2,
            mu_l2: self.mu_c1,
            mu_c1: self.mu_l2,
            mu_c2: self.mu_l1,
        }
    }
}

/// Validated full-capacity service rates.
///
/// Construction guarantees positivity, the mode ordering, a non-singular
/// canonical map and `K > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateParams {
    mu_l1: f64,
    mu_l2: f64,
    mu_c1: f64,
    mu_c2: f64,
}

impl RateParams {
    /// Validates raw rates, rejecting systems whose cloud server is not the
    /// faster one with [`Error::CloudNotFaster`].
    pub fn new(raw: RawRates) -> Result<Self> {
        let rates = Self::check_structure(raw)?;
        let k = rates.canonical_k();
        if k > 1.0 {
            Ok(rates)
        } else {
            Err(Error::CloudNotFaster { k })
        }
    }

    /// Like [`RateParams::new`], but when `K < 1` the server roles are swapped
    /// to obtain an equivalent system with `K > 1`. The flag reports whether
    /// the swap happened. `K = 1` is still rejected.
    pub fn normalized(raw: RawRates) -> Result<(Self, bool)> {
        let rates = Self::check_structure(raw)?;
        let k = rates.canonical_k();
        if k > 1.0 {
            Ok((rates, false))
        } else if k < 1.0 {
            let swapped = Self::check_structure(raw.swap_servers())?;
            Ok((swapped, true))
        } else {
            Err(Error::CloudNotFaster { k })
        }
    }

    pub fn from_values(mu_l1: f64, mu_l2: f64, mu_c1: f64, mu_c2: f64) -> Result<Self> {
        Self::new(RawRates::new(mu_l1, mu_l2, mu_c1, mu_c2))
    }

    fn check_structure(raw: RawRates) -> Result<Self> {
        for (name, value) in [
            ("mu_l1", raw.mu_l1),
            ("mu_l2", raw.mu_l2),
            ("mu_c1", raw.mu_c1),
            ("mu_c2", raw.mu_c2),
        ] {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::NonPositiveRate { name, value });
            }
        }
        // Equal rates on either server collapse both modes onto one workload split.
        if raw.mu_l1 == raw.mu_l2 || raw.mu_c1 == raw.mu_c2 {
            return Err(Error::DegenerateModes);
        }
        if !(raw.mu_c1 < raw.mu_c2 && raw.mu_l2 < raw.mu_l1) {
            return Err(Error::ModeOrderingViolated);
        }
        // Implied by the ordering above; kept as an explicit guard on the map.
        if raw.mu_l1 * raw.mu_c2 - raw.mu_l2 * raw.mu_c1 <= 0.0 {
            return Err(Error::DegenerateModes);
        }
        Ok(Self {
            mu_l1: raw.mu_l1,
            mu_l2: raw.mu_l2,
            mu_c1: raw.mu_c1,
            mu_c2: raw.mu_c2,
        })
    }

    pub fn mu_l1(&self) -> f64 {
        self.mu_l1
    }

    pub fn mu_l2(&self) -> f64 {
        self.mu_l2
    }

    pub fn mu_c1(&self) -> f64 {
        self.mu_c1
    }

    pub fn mu_c2(&self) -> f64 {
        self.mu_c2
    }

    pub fn raw(&self) -> RawRates {
        RawRates::new(self.mu_l1, self.mu_l2, self.mu_c1, self.mu_c2)
    }

    fn denominator(&self) -> f64 {
        self.mu_l1 * self.mu_c2 - self.mu_l2 * self.mu_c1
    }

    fn canonical_k(&self) -> f64 {
        self.mu_c1 * self.mu_c2 * (self.mu_l1 - self.mu_l2)
            / (self.mu_l1 * self.mu_l2 * (self.mu_c2 - self.mu_c1))
    }

    /// Combined local + cloud capacity, evaluated directly on the raw rates.
    pub fn mu_star(&self) -> f64 {
        (self.mu_c1 * self.mu_c2 * (self.mu_l1 - self.mu_l2)
            + self.mu_l1 * self.mu_l2 * (self.mu_c2 - self.mu_c1))
            / self.denominator()
    }

    /// Maps the rates to `(mu0, K, f1, f2)`.
    pub fn to_canonical(&self) -> CanonicalParams {
        let d = self.denominator();
        let dc = self.mu_c2 - self.mu_c1;
        CanonicalParams {
            mu0: self.mu_l1 * self.mu_l2 * dc / d,
            k: self.canonical_k(),
            f1: self.mu_l2 * dc / d,
            f2: self.mu_l1 * dc / d,
        }
    }
}

/// A service rate that may be infinite, which happens for the idealized
/// systems with `f1 = 0` (SM1 skips the local server) or `f2 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Rate {
    Finite(f64),
    Infinite,
}

impl Rate {
    fn from_ratio(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Rate::Infinite
        } else {
            Rate::Finite(num / den)
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Rate::Finite(v) => v,
            Rate::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Rate::Infinite)
    }
}

/// Rates recovered from canonical parameters with infinite-rate sentinels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtendedRates {
    pub mu_l1: Rate,
    pub mu_l2: Rate,
    pub mu_c1: Rate,
    pub mu_c2: Rate,
}

/// Canonical parameters `(mu0, K, f1, f2)` with `mu0 > 0`, `K > 1` and
/// `0 <= f1 < f2 <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CanonicalParams {
    mu0: f64,
    k: f64,
    f1: f64,
    f2: f64,
}

impl CanonicalParams {
    pub fn new(mu0: f64, k: f64, f1: f64, f2: f64) -> Result<Self> {
        if !(mu0 > 0.0 && mu0.is_finite()) {
            return Err(Error::NonPositiveRate { name: "mu0", value: mu0 });
        }
        if !k.is_finite() || k.is_nan() {
            return Err(Error::NonPositiveRate { name: "K", value: k });
        }
        if k <= 1.0 {
            return Err(Error::CloudNotFaster { k });
        }
        for (name, value) in [("f1", f1), ("f2", f2)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::FractionOutOfRange { name, value });
            }
        }
        if f1 == f2 {
            return Err(Error::DegenerateModes);
        }
        if f1 > f2 {
            return Err(Error::ModeOrderingViolated);
        }
        Ok(Self { mu0, k, f1, f2 })
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn f1(&self) -> f64 {
        self.f1
    }

    pub fn f2(&self) -> f64 {
        self.f2
    }

    /// Total capacity `(K + 1) mu0`.
    pub fn mu_star(&self) -> f64 {
        (self.k + 1.0) * self.mu0
    }

    /// The local server's share of total capacity, `1 / (K + 1)`.
    pub fn local_share(&self) -> f64 {
        1.0 / (self.k + 1.0)
    }

    /// Effective local workload fraction when a fraction `p` of jobs use SM1.
    pub fn effective_fraction(&self, p: f64) -> f64 {
        p * self.f1 + (1.0 - p) * self.f2
    }

    /// Recovers the raw rates. Fails with [`Error::InfiniteRate`] for the
    /// idealized `f1 = 0` / `f2 = 1` systems.
    pub fn to_rates(&self) -> Result<RateParams> {
        if self.f1 == 0.0 || self.f2 == 1.0 {
            return Err(Error::InfiniteRate);
        }
        let rates = RateParams::new(RawRates {
            mu_l1: self.mu0 / self.f1,
            mu_l2: self.mu0 / self.f2,
            mu_c1: self.k * self.mu0 / (1.0 - self.f1),
            mu_c2: self.k * self.mu0 / (1.0 - self.f2),
        })?;
        Ok(rates)
    }

    /// Recovers the raw rates, mapping `f1 = 0` / `f2 = 1` to [`Rate::Infinite`].
    pub fn to_rates_extended(&self) -> ExtendedRates {
        ExtendedRates {
            mu_l1: Rate::from_ratio(self.mu0, self.f1),
            mu_l2: Rate::from_ratio(self.mu0, self.f2),
            mu_c1: Rate::from_ratio(self.k * self.mu0, 1.0 - self.f1),
            mu_c2: Rate::from_ratio(self.k * self.mu0, 1.0 - self.f2),
        }
    }

    pub fn classify(&self) -> SystemClass {
        let share = self.local_share();
        if self.f1 >= share {
            SystemClass::LocalBottleneck
        } else if self.f2 <= share {
            SystemClass::CloudBottleneck
        } else {
            SystemClass::ThroughputEfficient
        }
    }

    pub fn is_throughput_efficient(&self) -> bool {
        self.classify() == SystemClass::ThroughputEfficient
    }
}

/// Where a dual-mode system's throughput bottleneck sits, if anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SystemClass {
    /// `f1 < 1/(K+1) < f2`: both servers can be fully utilized.
    ThroughputEfficient,
    /// `f1 >= 1/(K+1)`: both modes overload the local server; SM2 is redundant.
    LocalBottleneck,
    /// `f2 <= 1/(K+1)`: both modes overload the cloud server.
    CloudBottleneck,
}

impl SystemClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            SystemClass::ThroughputEfficient => "throughput-efficient",
            SystemClass::LocalBottleneck => "local-bottleneck",
            SystemClass::CloudBottleneck => "cloud-bottleneck",
        }
    }
}

impl std::fmt::Display for SystemClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Assignment probability `p` of SM1 together with the local (`alpha`) and
/// cloud (`beta`) resource fractions reserved for SM1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl OperatingPoint {
    pub fn new(p: f64, alpha: f64, beta: f64) -> Result<Self> {
        for (name, value) in [("p", p), ("alpha", alpha), ("beta", beta)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidOperatingPoint { name, value });
            }
        }
        Ok(Self { p, alpha, beta })
    }
}

pub(crate) fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

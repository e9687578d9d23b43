use thiserror::Error;

/// Errors raised by the analytic models and the simulator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("service rate `{name}` must be positive and finite, got {value}")]
    NonPositiveRate { name: &'static str, value: f64 },

    #[error("service modes are mislabeled: need mu_c1 < mu_c2 and mu_l2 < mu_l1")]
    ModeOrderingViolated,

    #[error("the two service modes are indistinguishable (f1 = f2); use the tunable-mode model instead")]
    DegenerateModes,

    #[error("cloud capacity ratio K = {k} is not greater than 1")]
    CloudNotFaster { k: f64 },

    #[error("workload fraction `{name}` = {value} is outside [0, 1]")]
    FractionOutOfRange { name: &'static str, value: f64 },

    #[error("canonical parameters imply an infinite service rate (f1 = 0 or f2 = 1)")]
    InfiniteRate,

    #[error("arrival rate must be positive and finite, got {0}")]
    InvalidArrivalRate(f64),

    #[error("arrival rate {lambda} is outside the stability region (lambda_max = {lambda_max})")]
    Unstable { lambda: f64, lambda_max: f64 },

    #[error("service fraction {f} does not stabilize the tunable-mode system at lambda = {lambda}")]
    InfeasibleFraction { f: f64, lambda: f64 },

    #[error("assignment parameter {p} admits no stabilizing partition at lambda = {lambda}")]
    InfeasibleAssignment { p: f64, lambda: f64 },

    #[error("operating point component `{name}` = {value} is outside [0, 1]")]
    InvalidOperatingPoint { name: &'static str, value: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(&'static str),

    #[error("p*(lambda) < 1 is not monotone in lambda on [{lo}, {hi}]; bisection would be unsound")]
    NonMonotoneBreakaway { lo: f64, hi: f64 },

    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),

    #[error("operating point does not stabilize the system at lambda = {lambda}")]
    UnstableSimulation { lambda: f64 },

    #[error("active service mode {mode} has a zero service rate")]
    DegenerateConfig { mode: u8 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArrivalRate(lambda))
    }
}

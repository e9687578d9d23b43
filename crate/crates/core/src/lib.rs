//! Analysis of a two-stage (local then cloud) offloading system with two
//! service modes.
//!
//! Jobs arrive as a Poisson stream and are assigned to the cloud-heavy mode
//! SM1 with probability `p` or to the local-heavy mode SM2 otherwise. Each
//! server dedicates a fixed fraction of its capacity to each mode (`alpha`
//! locally, `beta` in the cloud). The crate computes:
//!
//! - the stability region and stabilizing operating points ([`stability`]),
//! - the tunable-mode delay lower bound ([`tunable`]),
//! - delay-optimal partitions for a fixed `p` ([`allocation`]),
//! - the delay-optimal `p*(lambda)` and structural regime predictions ([`assignment`]),
//! - a discrete-event simulator to check the formulas ([`sim`]).

pub mod allocation;
pub mod assignment;
pub mod error;
pub mod model;
pub mod presets;
pub mod sim;
pub mod stability;
pub mod tunable;

pub use allocation::{
    delay_decomposition, delay_dm, lower_bound_gap, optimal_delay_dm, optimal_delay_dm_canonical,
    optimal_partition, optimal_partition_canonical, DelayBreakdown,
};
pub use assignment::{
    breakaway_load, limit_assignment, optimal_assignment, optimal_assignment_canonical,
    predict_regime, structural_thresholds, AssignmentOptimum, AssignmentRegime, Prediction,
    RegimePrediction, StructuralRule, StructuralThresholds,
};
pub use error::{Error, Result};
pub use model::{CanonicalParams, OperatingPoint, RateParams, RawRates, SystemClass};
pub use sim::{simulate, validate_point, SimConfig, SimResult, ValidationRecord};
pub use stability::{
    assignment_range, assignment_range_canonical, feasible_fractions, is_stable,
    stability_region, stability_region_canonical, witness_operating_point, AssignmentRange,
    BindingConstraint, FractionRange, Interval, StabilityRegion,
};
pub use tunable::{delay_tm, optimal_fraction, TunableOptimum, TunableRegime};

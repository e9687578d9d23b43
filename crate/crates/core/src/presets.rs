//! Reference systems with `mu0 = 1` and `K = 4` (total capacity 5).

use crate::model::CanonicalParams;

/// Throughput-efficient: `f1 = 0.1`, `f2 = 0.3`.
pub fn system_a() -> CanonicalParams {
    CanonicalParams::new(1.0, 4.0, 0.1, 0.3).expect("valid preset")
}

/// Cloud-heavy: `f1 = 0.05`, `f2 = 0.15`.
pub fn system_b() -> CanonicalParams {
    CanonicalParams::new(1.0, 4.0, 0.05, 0.15).expect("valid preset")
}

/// Local-heavy: `f1 = 0.25`, `f2 = 0.4`.
pub fn system_c() -> CanonicalParams {
    CanonicalParams::new(1.0, 4.0, 0.25, 0.4).expect("valid preset")
}

pub const NAMES: [&str; 3] = ["systemA", "systemB", "systemC"];

pub fn by_name(name: &str) -> Option<CanonicalParams> {
    match name {
        "systemA" => Some(system_a()),
        "systemB" => Some(system_b()),
        "systemC" => Some(system_c()),
        _ => None,
    }
}

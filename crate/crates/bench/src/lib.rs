//! Benchmark fixtures shared by the criterion targets in `benches/`.

use dualmode_core::{presets, RateParams};

/// Raw rates of the three reference systems, in preset order.
pub fn reference_rates() -> Vec<(&'static str, RateParams)> {
    presets::NAMES
        .iter()
        .map(|&name| {
            let rates = presets::by_name(name)
                .and_then(|c| c.to_rates().ok())
                .expect("presets have finite rates");
            (name, rates)
        })
        .collect()
}

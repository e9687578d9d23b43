//! Scenario files, built-in presets and load grids.

use std::path::Path;

use dualmode_core::model::RawRates;
use dualmode_core::{presets, stability_region_canonical, CanonicalParams, RateParams};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

/// A system to analyze, in canonical form with raw rates when they are finite.
#[derive(Debug, Clone)]
pub struct System {
    pub name: String,
    pub canon: CanonicalParams,
    pub rates: Option<RateParams>,
    /// The local and cloud roles were swapped to obtain `K > 1`.
    pub swapped: bool,
}

impl System {
    pub fn preset(name: &str) -> CliResult<Self> {
        let canon = presets::by_name(name)
            .ok_or_else(|| CliError::Scenario(format!("unknown preset {name:?}")))?;
        Ok(Self::from_canonical(name.to_string(), canon))
    }

    fn from_canonical(name: String, canon: CanonicalParams) -> Self {
        Self { name, rates: canon.to_rates().ok(), canon, swapped: false }
    }

    pub fn lambda_max(&self) -> f64 {
        stability_region_canonical(&self.canon).lambda_max
    }

    pub fn mu_star(&self) -> f64 {
        self.canon.mu_star()
    }
}

/// How load grid values are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    /// Normalized load `rho = lambda / mu*`.
    Rho,
    /// Absolute arrival rate `lambda`.
    Lambda,
    /// Fraction of each system's own `lambda_max`.
    Fraction,
}

impl Axis {
    pub fn to_lambda(self, x: f64, system: &System) -> f64 {
        match self {
            Axis::Rho => x * system.mu_star(),
            Axis::Lambda => x,
            Axis::Fraction => x * system.lambda_max(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Text(String),
    List(Vec<f64>),
}

impl GridSpec {
    pub fn values(&self) -> CliResult<Vec<f64>> {
        match self {
            GridSpec::Text(s) => parse_grid(s),
            GridSpec::List(v) => check_grid(v.clone()),
        }
    }
}

/// Parses `a,b,c` or `lo:hi:n` (`n` evenly spaced points, both ends
/// included). An empty string is an empty grid.
pub fn parse_grid(text: &str) -> CliResult<Vec<f64>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let bad = |why: &str| CliError::Scenario(format!("grid {text:?}: {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("{s:?} is not a number")));
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [lo, hi, n] = parts[..] else {
            return Err(bad("range form is lo:hi:n"));
        };
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n: usize = n.trim().parse().map_err(|_| bad("point count must be a positive integer"))?;
        match n {
            0 => return Err(bad("point count must be a positive integer")),
            1 => vec![lo],
            _ => (0..n)
                .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
                .collect(),
        }
    } else {
        text.split(',').map(num).collect::<CliResult<_>>()?
    };
    check_grid(values)
}

fn check_grid(values: Vec<f64>) -> CliResult<Vec<f64>> {
    if let Some(x) = values.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(CliError::Scenario(format!("grid value {x} is not a positive number")));
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Scenario(format!(
            "grid must be strictly increasing ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(values)
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub loads: Option<GridSpec>,
    pub grid: Option<GridSpec>,
    pub axis: Option<Axis>,
    pub p_points: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub seed: Option<u64>,
    pub jobs: Option<u64>,
    pub warmup: Option<u64>,
    pub batches: Option<u64>,
    pub confidence: Option<f64>,
    pub pass_threshold: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RatesSection {
    mu_l1: f64,
    mu_l2: f64,
    mu_c1: f64,
    mu_c2: f64,
    #[serde(default)]
    normalize_server_order: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CanonicalSection {
    mu0: f64,
    k: f64,
    f1: f64,
    f2: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    name: Option<String>,
    rates: Option<RatesSection>,
    canonical: Option<CanonicalSection>,
    #[serde(default)]
    sweep: SweepSection,
    #[serde(default)]
    sim: SimSection,
}

/// One parsed scenario file.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system: System,
    pub sweep: SweepSection,
    pub sim: SimSection,
}

pub fn parse_scenario(text: &str, default_name: &str) -> CliResult<Scenario> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| CliError::Scenario(e.to_string()))?;
    let name = file.name.unwrap_or_else(|| default_name.to_string());
    let system = match (file.rates, file.canonical) {
        (Some(r), None) => {
            let raw = RawRates::new(r.mu_l1, r.mu_l2, r.mu_c1, r.mu_c2);
            let (rates, swapped) = if r.normalize_server_order {
                RateParams::normalized(raw)?
            } else {
                (RateParams::new(raw)?, false)
            };
            System { name, canon: rates.to_canonical(), rates: Some(rates), swapped }
        }
        (None, Some(c)) => System::from_canonical(name, CanonicalParams::new(c.mu0, c.k, c.f1, c.f2)?),
        _ => {
            return Err(CliError::Scenario(
                "exactly one of [rates] and [canonical] must be given".to_string(),
            ))
        }
    };
    Ok(Scenario { system, sweep: file.sweep, sim: file.sim })
}

pub fn load_scenario(path: &Path) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Scenario(format!("{}: {e}", path.display())))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    parse_scenario(&text, stem).map_err(|e| match e {
        CliError::Scenario(msg) => CliError::Scenario(format!("{}: {msg}", path.display())),
        other => other,
    })
}

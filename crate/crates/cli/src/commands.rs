//! The five subcommands. Each returns a [`Table`]; sweep points are computed
//! in parallel and collected in input order.

use dualmode_core::assignment::DEFAULT_P_TOL;
use dualmode_core::tunable::optimal_delay;
use dualmode_core::{
    breakaway_load, delay_decomposition, limit_assignment, optimal_assignment,
    optimal_assignment_canonical, optimal_partition_canonical, predict_regime,
    stability_region_canonical, structural_thresholds, validate_point, AssignmentOptimum,
    SimConfig, SystemClass,
};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::scenario::{Axis, System};
use crate::table::{Cell, Table};

/// Location tolerance for reported breakaway loads.
pub const BREAKAWAY_TOL: f64 = 1e-9;

/// Result of a command: the table to print and, for `validate`, a failure
/// to report after printing it.
pub struct Outcome {
    pub table: Table,
    pub failure: Option<CliError>,
}

impl From<Table> for Outcome {
    fn from(table: Table) -> Self {
        Self { table, failure: None }
    }
}

/// A load grid in the units of `axis`.
#[derive(Debug, Clone)]
pub struct Grid {
    pub values: Vec<f64>,
    pub axis: Axis,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    lambda: f64,
    rho: f64,
}

impl Grid {
    fn points(&self, system: &System) -> Vec<Point> {
        self.values
            .iter()
            .map(|&x| {
                let lambda = self.axis.to_lambda(x, system);
                Point { lambda, rho: lambda / system.mu_star() }
            })
            .collect()
    }

    /// All points of every system must be stable; otherwise the offending
    /// grid indices are listed per system.
    fn require_stable(&self, systems: &[System]) -> CliResult<()> {
        let mut problems = Vec::new();
        for s in systems {
            let bad: Vec<String> = self
                .points(s)
                .iter()
                .enumerate()
                .filter(|(_, p)| p.lambda >= s.lambda_max())
                .map(|(i, _)| i.to_string())
                .collect();
            if !bad.is_empty() {
                problems.push(format!(
                    "{}: grid indices [{}] at or beyond rho_max = {}",
                    s.name,
                    bad.join(", "),
                    s.lambda_max() / s.mu_star()
                ));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(CliError::Infeasible(problems.join("; ")))
        }
    }
}

fn regime_of(opt: &AssignmentOptimum) -> Cell {
    Cell::text(opt.regime.as_str())
}

fn breakaway(system: &System) -> Option<f64> {
    breakaway_load(&system.canon, BREAKAWAY_TOL).ok()
}

pub fn info(systems: &[System]) -> CliResult<Outcome> {
    let mut table = Table::new(
        "info",
        &[
            "system", "mu0", "k", "f1", "f2", "mu_l1", "mu_l2", "mu_c1", "mu_c2", "mu_star",
            "lambda_max", "rho_max", "binding", "class", "sm1_low_load", "sm1_saturation",
            "sm2_high_load", "both_modes", "limit_p", "breakaway_lambda", "breakaway_rho", "note",
        ],
    );
    let rows: Vec<Vec<Cell>> = systems
        .par_iter()
        .map(|s| {
            let c = &s.canon;
            let region = stability_region_canonical(c);
            let ext = c.to_rates_extended();
            let rate = |r: dualmode_core::model::Rate| {
                if r.is_infinite() { Cell::text("inf") } else { Cell::Num(r.value()) }
            };
            let t = structural_thresholds(c);
            let brk = breakaway(s);
            let class = c.classify();
            let mut notes = Vec::new();
            match class {
                SystemClass::LocalBottleneck => notes.push("SM2 redundant".to_string()),
                SystemClass::CloudBottleneck => notes.push("SM2 alone optimal at high load".to_string()),
                SystemClass::ThroughputEfficient => {}
            }
            if s.swapped {
                notes.push("server order normalized".to_string());
            }
            vec![
                Cell::text(&s.name),
                Cell::Num(c.mu0()),
                Cell::Num(c.k()),
                Cell::Num(c.f1()),
                Cell::Num(c.f2()),
                rate(ext.mu_l1),
                rate(ext.mu_l2),
                rate(ext.mu_c1),
                rate(ext.mu_c2),
                Cell::Num(c.mu_star()),
                Cell::Num(region.lambda_max),
                Cell::Num(region.lambda_max / c.mu_star()),
                Cell::text(region.binding.as_str()),
                Cell::text(class.as_str()),
                Cell::opt(t.sm1_low_load),
                Cell::opt(t.sm1_saturation),
                Cell::opt(t.sm2_high_load),
                Cell::opt(t.both_modes),
                Cell::opt(limit_assignment(c).ok()),
                Cell::opt(brk),
                Cell::opt(brk.map(|b| b / c.mu_star())),
                Cell::text(notes.join("; ")),
            ]
        })
        .collect();
    for row in rows {
        table.push(row);
    }
    Ok(table.into())
}

/// Evenly spaced `p` values over `[0, 1]`.
fn p_grid(points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![1.0],
        n => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn delay_vs_p(systems: &[System], loads: &Grid, p_points: usize) -> CliResult<Outcome> {
    loads.require_stable(systems)?;
    let mut table = Table::new(
        "delay-vs-p",
        &[
            "system", "lambda", "rho", "p", "status", "f_effective", "delay", "tm_term", "oh_term",
            "alpha", "beta", "is_pstar",
        ],
    );
    let jobs: Vec<(&System, Point)> = systems
        .iter()
        .flat_map(|s| loads.points(s).into_iter().map(move |pt| (s, pt)))
        .collect();
    let blocks: Vec<Vec<Vec<Cell>>> = jobs
        .par_iter()
        .map(|&(s, pt)| -> CliResult<Vec<Vec<Cell>>> {
            let opt = optimal_assignment_canonical(pt.lambda, &s.canon, DEFAULT_P_TOL)?;
            let mut ps = p_grid(p_points);
            if !ps.contains(&opt.p_star) {
                let at = ps.partition_point(|&p| p < opt.p_star);
                ps.insert(at, opt.p_star);
            }
            Ok(ps
                .into_iter()
                .map(|p| {
                    let head = [Cell::text(&s.name), Cell::Num(pt.lambda), Cell::Num(pt.rho), Cell::Num(p)];
                    let is_pstar = Cell::Bool(p == opt.p_star);
                    let body = match (
                        delay_decomposition(p, pt.lambda, &s.canon),
                        optimal_partition_canonical(p, pt.lambda, &s.canon),
                    ) {
                        (Ok(d), Ok(op)) => vec![
                            Cell::text("ok"),
                            Cell::Num(d.f_effective),
                            Cell::Num(d.total),
                            Cell::Num(d.tm_term),
                            Cell::Num(d.oh_term),
                            Cell::Num(op.alpha),
                            Cell::Num(op.beta),
                        ],
                        _ => {
                            let mut v = vec![Cell::text("infeasible"), Cell::Num(s.canon.effective_fraction(p))];
                            v.extend(std::iter::repeat_n(Cell::Null, 5));
                            v
                        }
                    };
                    head.into_iter().chain(body).chain([is_pstar]).collect()
                })
                .collect())
        })
        .collect::<CliResult<_>>()?;
    for row in blocks.into_iter().flatten() {
        table.push(row);
    }
    Ok(table.into())
}

pub fn pstar_vs_load(systems: &[System], grid: &Grid) -> CliResult<Outcome> {
    grid.require_stable(systems)?;
    let mut table = Table::new(
        "pstar-vs-load",
        &[
            "system", "lambda", "rho", "p_star", "regime", "delay", "alpha", "beta", "f_effective",
            "prediction", "rule", "breakaway_lambda", "breakaway_rho",
        ],
    );
    let breaks: Vec<Option<f64>> = systems.par_iter().map(breakaway).collect();
    let jobs: Vec<(usize, Point)> = systems
        .iter()
        .enumerate()
        .flat_map(|(i, s)| grid.points(s).into_iter().map(move |pt| (i, pt)))
        .collect();
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(i, pt)| -> CliResult<Vec<Cell>> {
            let s = &systems[i];
            let opt = optimal_assignment_canonical(pt.lambda, &s.canon, DEFAULT_P_TOL)?;
            let op = optimal_partition_canonical(opt.p_star, pt.lambda, &s.canon)?;
            let pred = predict_regime(&s.canon, pt.lambda)?;
            Ok(vec![
                Cell::text(&s.name),
                Cell::Num(pt.lambda),
                Cell::Num(pt.rho),
                Cell::Num(opt.p_star),
                regime_of(&opt),
                Cell::Num(opt.delay),
                Cell::Num(op.alpha),
                Cell::Num(op.beta),
                Cell::Num(s.canon.effective_fraction(opt.p_star)),
                Cell::text(pred.prediction.as_str()),
                pred.rule.map_or(Cell::Null, |r| Cell::text(r.as_str())),
                Cell::opt(breaks[i]),
                Cell::opt(breaks[i].map(|b| b / s.mu_star())),
            ])
        })
        .collect::<CliResult<_>>()?;
    for row in rows {
        table.push(row);
    }
    Ok(table.into())
}

pub fn delay_vs_load(systems: &[System], grid: &Grid) -> CliResult<Outcome> {
    let mut table = Table::new(
        "delay-vs-load",
        &[
            "system", "lambda", "rho", "status", "p_star", "regime", "delay", "lower_bound", "gap",
            "f_effective",
        ],
    );
    let jobs: Vec<(&System, Point)> = systems
        .iter()
        .flat_map(|s| grid.points(s).into_iter().map(move |pt| (s, pt)))
        .collect();
    let rows: Vec<Vec<Cell>> = jobs
        .par_iter()
        .map(|&(s, pt)| -> CliResult<Vec<Cell>> {
            let head = vec![Cell::text(&s.name), Cell::Num(pt.lambda), Cell::Num(pt.rho)];
            if pt.lambda >= s.lambda_max() {
                let mut row = head;
                row.push(Cell::text("infeasible"));
                row.extend(std::iter::repeat_n(Cell::Null, 6));
                return Ok(row);
            }
            let opt = optimal_assignment_canonical(pt.lambda, &s.canon, DEFAULT_P_TOL)?;
            let bound = optimal_delay(pt.lambda, &s.canon)?;
            let mut row = head;
            row.extend([
                Cell::text("ok"),
                Cell::Num(opt.p_star),
                regime_of(&opt),
                Cell::Num(opt.delay),
                Cell::Num(bound),
                Cell::Num(opt.delay - bound),
                Cell::Num(s.canon.effective_fraction(opt.p_star)),
            ]);
            Ok(row)
        })
        .collect::<CliResult<_>>()?;
    for row in rows {
        table.push(row);
    }
    Ok(table.into())
}

/// Simulation settings for `validate`.
#[derive(Debug, Clone)]
pub struct ValidateOptions {
    pub config: SimConfig,
    /// Minimum fraction of points that must pass.
    pub pass_threshold: f64,
}

pub fn validate(systems: &[System], grid: &Grid, opts: &ValidateOptions) -> CliResult<Outcome> {
    opts.config.validate()?;
    if !(0.0..=1.0).contains(&opts.pass_threshold) {
        return Err(CliError::Scenario(format!(
            "pass threshold must be in [0, 1], got {}",
            opts.pass_threshold
        )));
    }
    for s in systems {
        if s.rates.is_none() {
            return Err(CliError::Scenario(format!(
                "{}: system has an infinite service rate and cannot be simulated",
                s.name
            )));
        }
    }
    grid.require_stable(systems)?;
    let mut table = Table::new(
        "validate",
        &[
            "system", "lambda", "rho", "p_star", "alpha", "beta", "analytic", "simulated",
            "ci_half_width", "jobs", "little_ratio", "pass",
        ],
    );
    let jobs: Vec<(&System, Point)> = systems
        .iter()
        .flat_map(|s| grid.points(s).into_iter().map(move |pt| (s, pt)))
        .collect();
    let records: Vec<(Vec<Cell>, bool)> = jobs
        .par_iter()
        .map(|&(s, pt)| -> CliResult<(Vec<Cell>, bool)> {
            let rates = s.rates.as_ref().expect("checked above");
            let opt = optimal_assignment(pt.lambda, rates, DEFAULT_P_TOL)?;
            // Every point reuses the same seed (common random numbers).
            let rec = validate_point(rates, opt.p_star, pt.lambda, &opts.config)?;
            Ok((
                vec![
                    Cell::text(&s.name),
                    Cell::Num(pt.lambda),
                    Cell::Num(pt.rho),
                    Cell::Num(rec.point.p),
                    Cell::Num(rec.point.alpha),
                    Cell::Num(rec.point.beta),
                    Cell::Num(rec.analytic),
                    Cell::Num(rec.simulated),
                    Cell::Num(rec.ci_half_width),
                    Cell::Int(rec.sim.jobs_measured),
                    Cell::Num(rec.sim.little_ratio(pt.lambda)),
                    Cell::Bool(rec.pass),
                ],
                rec.pass,
            ))
        })
        .collect::<CliResult<_>>()?;
    let total = records.len();
    let passed = records.iter().filter(|r| r.1).count();
    let required = required_passes(total, opts.pass_threshold);
    for (row, _) in records {
        table.push(row);
    }
    let failure = (passed < required).then_some(CliError::Validation { passed, total, required });
    Ok(Outcome { table, failure })
}

/// `ceil(threshold * total)`, tolerant of the round-off in thresholds such
/// as `8/9` written in decimal.
pub fn required_passes(total: usize, threshold: f64) -> usize {
    ((threshold * total as f64) - 1e-6).ceil().max(0.0) as usize
}

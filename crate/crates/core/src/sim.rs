//! Discrete-event simulation of the dual-mode system.
//!
//! Poisson arrivals are split by a Bernoulli(`p`) coin into two independent
//! tandems (local then cloud), each a pair of FIFO single-server queues with
//! exponential service. Every stochastic source draws from its own ChaCha8
//! stream derived from the seed, so a run is reproducible bit for bit and
//! different operating points see common random numbers.
//!
//! Delay statistics use non-overlapping batch means over the departures that
//! follow a warmup prefix.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::allocation::{optimal_delay_dm, optimal_partition};
use crate::error::{check_lambda, Error, Result};
use crate::model::{OperatingPoint, RateParams};
use crate::stability::is_stable;

/// Simulated and analytic delays must agree within this multiple of the CI half-width.
pub const VALIDATION_SLACK: f64 = 1.2;

/// Minimum number of measured departures per batch.
pub const MIN_JOBS_PER_BATCH: u64 = 100;

pub type SimRng = ChaCha8Rng;

/// Independent random sources; each gets its own stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Source {
    Arrivals = 0,
    ModeCoin = 1,
    LocalSm1 = 2,
    CloudSm1 = 3,
    LocalSm2 = 4,
    CloudSm2 = 5,
}

impl Source {
    /// Service streams in queue order `mode * 2 + stage`.
    pub const SERVICE: [Source; 4] = [
        Source::LocalSm1,
        Source::CloudSm1,
        Source::LocalSm2,
        Source::CloudSm2,
    ];
}

/// The generator used for `source` under `seed`.
pub fn source_rng(seed: u64, source: Source) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(source as u64);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    /// Departures measured after warmup.
    pub horizon_jobs: u64,
    /// Departures discarded before measuring.
    pub warmup_jobs: u64,
    pub batches: u64,
    pub confidence: f64,
    /// Run even if the operating point is unstable; the horizon truncates the run.
    pub allow_unstable: bool,
}

impl SimConfig {
    /// 20 batches at 95% confidence with a warmup of 10% of the horizon.
    pub fn new(seed: u64, horizon_jobs: u64) -> Self {
        Self {
            seed,
            horizon_jobs,
            warmup_jobs: horizon_jobs / 10,
            batches: 20,
            confidence: 0.95,
            allow_unstable: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.batches < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 batches, got {}", self.batches)));
        }
        if self.horizon_jobs < self.batches * MIN_JOBS_PER_BATCH {
            return Err(Error::InvalidConfig(format!(
                "horizon of {} jobs is below {} batches x {MIN_JOBS_PER_BATCH}",
                self.horizon_jobs, self.batches
            )));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "confidence must be in (0, 1), got {}",
                self.confidence
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub mean_delay: f64,
    pub ci_half_width: f64,
    /// Mean delay of measured SM1 / SM2 jobs; `None` for a mode with no jobs.
    pub per_mode_mean: [Option<f64>; 2],
    pub per_mode_jobs: [u64; 2],
    /// Busy fraction over the measurement window for
    /// (SM1 local, SM1 cloud, SM2 local, SM2 cloud).
    pub per_queue_utilization: [f64; 4],
    pub jobs_measured: u64,
    /// Time-average number of jobs in the system over the measurement window.
    pub time_avg_in_system: f64,
    /// Length of the measurement window.
    pub measured_span: f64,
    /// Arrivals per mode over the whole run, warmup included.
    pub arrivals: [u64; 2],
}

impl SimResult {
    /// Ratio of the time-average number in system to `lambda * mean_delay`;
    /// Little's law says it tends to 1.
    pub fn little_ratio(&self, lambda: f64) -> f64 {
        self.time_avg_in_system / (lambda * self.mean_delay)
    }
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    Arrival,
    Completion(usize),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so that the max-heap pops the earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Agenda {
    heap: BinaryHeap<Event>,
    next_seq: u64,
}

impl Agenda {
    fn new() -> Self {
        Self { heap: BinaryHeap::new(), next_seq: 0 }
    }

    fn schedule(&mut self, time: f64, kind: EventKind) {
        self.heap.push(Event { time, seq: self.next_seq, kind });
        self.next_seq += 1;
    }

    fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }
}

/// Service rates of the four queues, indexed `mode * 2 + stage`.
fn queue_rates(rates: &RateParams, op: &OperatingPoint) -> [f64; 4] {
    [
        op.alpha * rates.mu_l1(),
        op.beta * rates.mu_c1(),
        (1.0 - op.alpha) * rates.mu_l2(),
        (1.0 - op.beta) * rates.mu_c2(),
    ]
}

pub fn simulate(
    rates: &RateParams,
    op: &OperatingPoint,
    lambda: f64,
    cfg: &SimConfig,
) -> Result<SimResult> {
    check_lambda(lambda)?;
    cfg.validate()?;
    let service_rates = queue_rates(rates, op);
    for (mode, share) in [(0usize, op.p), (1usize, 1.0 - op.p)] {
        if share > 0.0 && (service_rates[2 * mode] <= 0.0 || service_rates[2 * mode + 1] <= 0.0) {
            return Err(Error::DegenerateConfig { mode: mode as u8 + 1 });
        }
    }
    if !cfg.allow_unstable && !is_stable(rates, op, lambda) {
        return Err(Error::UnstableSimulation { lambda });
    }

    let interarrival = Exp::new(lambda).expect("lambda checked positive");
    let service: Vec<Option<Exp<f64>>> = service_rates.iter().map(|&r| Exp::new(r).ok().filter(|_| r > 0.0)).collect();
    let mut arrival_rng = source_rng(cfg.seed, Source::Arrivals);
    let mut coin_rng = source_rng(cfg.seed, Source::ModeCoin);
    let mut service_rng: Vec<SimRng> = Source::SERVICE.iter().map(|&s| source_rng(cfg.seed, s)).collect();

    let mut queues: [VecDeque<f64>; 4] = Default::default();
    let mut agenda = Agenda::new();
    agenda.schedule(interarrival.sample(&mut arrival_rng), EventKind::Arrival);

    let target = cfg.warmup_jobs + cfg.horizon_jobs;
    let batch_size = cfg.horizon_jobs / cfg.batches;
    let mut batch_sums = vec![0.0; cfg.batches as usize];
    let mut batch_counts = vec![0u64; cfg.batches as usize];

    let mut now = 0.0;
    let mut in_system = 0u64;
    let mut departures = 0u64;
    let mut arrivals = [0u64; 2];
    let mut measuring = cfg.warmup_jobs == 0;
    let mut window_start = 0.0;
    let mut area_in_system = 0.0;
    let mut busy = [0.0f64; 4];
    let mut mode_sums = [0.0f64; 2];
    let mut mode_counts = [0u64; 2];

    while departures < target {
        let event = agenda.pop().expect("an arrival is always pending");
        if measuring {
            let dt = event.time - now;
            area_in_system += in_system as f64 * dt;
            for (b, q) in busy.iter_mut().zip(&queues) {
                if !q.is_empty() {
                    *b += dt;
                }
            }
        }
        now = event.time;

        match event.kind {
            EventKind::Arrival => {
                agenda.schedule(now + interarrival.sample(&mut arrival_rng), EventKind::Arrival);
                let mode = if coin_rng.random::<f64>() < op.p { 0 } else { 1 };
                arrivals[mode] += 1;
                in_system += 1;
                let q = 2 * mode;
                queues[q].push_back(now);
                if queues[q].len() == 1 {
                    let s = service[q].as_ref().ok_or(Error::DegenerateConfig { mode: mode as u8 + 1 })?;
                    agenda.schedule(now + s.sample(&mut service_rng[q]), EventKind::Completion(q));
                }
            }
            EventKind::Completion(q) => {
                let arrived = queues[q].pop_front().expect("completion of a busy queue");
                if q % 2 == 0 {
                    let next = q + 1;
                    queues[next].push_back(arrived);
                    if queues[next].len() == 1 {
                        let s = service[next].as_ref().expect("active cloud queue has a rate");
                        agenda.schedule(now + s.sample(&mut service_rng[next]), EventKind::Completion(next));
                    }
                } else {
                    in_system -= 1;
                    if measuring {
                        let m = departures - cfg.warmup_jobs;
                        let b = ((m / batch_size) as usize).min(batch_sums.len() - 1);
                        let delay = now - arrived;
                        batch_sums[b] += delay;
                        batch_counts[b] += 1;
                        mode_sums[q / 2] += delay;
                        mode_counts[q / 2] += 1;
                    }
                    departures += 1;
                    if !measuring && departures == cfg.warmup_jobs {
                        measuring = true;
                        window_start = now;
                    }
                }
                if let Some(s) = queues[q].front().and(service[q].as_ref()) {
                    agenda.schedule(now + s.sample(&mut service_rng[q]), EventKind::Completion(q));
                }
            }
        }
    }

    let span = now - window_start;
    let measured = cfg.horizon_jobs;
    let total: f64 = mode_sums.iter().sum();
    let mean_delay = total / measured as f64;
    let batch_means: Vec<f64> = batch_sums
        .iter()
        .zip(&batch_counts)
        .map(|(s, &n)| s / n as f64)
        .collect();
    let ci_half_width = batch_half_width(&batch_means, cfg.confidence);

    let per_mode_mean = [0, 1].map(|m| (mode_counts[m] > 0).then(|| mode_sums[m] / mode_counts[m] as f64));
    Ok(SimResult {
        mean_delay,
        ci_half_width,
        per_mode_mean,
        per_mode_jobs: mode_counts,
        per_queue_utilization: busy.map(|b| b / span),
        jobs_measured: measured,
        time_avg_in_system: area_in_system / span,
        measured_span: span,
        arrivals,
    })
}

/// Normal-quantile half-width of the confidence interval for the grand mean
/// of the given batch means.
pub fn batch_half_width(batch_means: &[f64], confidence: f64) -> f64 {
    let n = batch_means.len() as f64;
    let mean = batch_means.iter().sum::<f64>() / n;
    let var = batch_means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let z = Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + 0.5 * confidence);
    z * (var / n).sqrt()
}

/// Simulated versus analytic delay at the optimal partition for `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationRecord {
    pub lambda: f64,
    pub point: OperatingPoint,
    pub analytic: f64,
    pub simulated: f64,
    pub ci_half_width: f64,
    pub pass: bool,
    pub sim: SimResult,
}

pub fn validate_point(rates: &RateParams, p: f64, lambda: f64, cfg: &SimConfig) -> Result<ValidationRecord> {
    let point = optimal_partition(p, lambda, rates)?;
    let analytic = optimal_delay_dm(point.p, lambda, rates)?;
    let sim = simulate(rates, &point, lambda, cfg)?;
    let pass = (analytic - sim.mean_delay).abs() <= sim.ci_half_width * VALIDATION_SLACK;
    Ok(ValidationRecord {
        lambda,
        point,
        analytic,
        simulated: sim.mean_delay,
        ci_half_width: sim.ci_half_width,
        pass,
        sim,
    })
}

//! Event-free re-derivation of the simulator's delay sample.
//!
//! With FIFO queues, departures obey the Lindley recursion
//! `D[k] = max(A[k], D[k-1]) + S[k]`, and the `k`-th job through a queue
//! consumes the `k`-th draw of that queue's stream. Feeding the same random
//! streams through the recursion must reproduce the simulator's mean delay.
#![allow(dead_code)]

use dualmode_core::sim::{source_rng, Source};
use dualmode_core::{OperatingPoint, RateParams, SimConfig};
use rand::Rng;
use rand_distr::{Distribution, Exp};

pub struct LindleyResult {
    pub mean_delay: f64,
    pub per_mode_jobs: [u64; 2],
}

pub fn lindley_mean_delay(rates: &RateParams, op: &OperatingPoint, lambda: f64, cfg: &SimConfig) -> LindleyResult {
    let target = (cfg.warmup_jobs + cfg.horizon_jobs) as usize;
    let service_rates = [
        op.alpha * rates.mu_l1(),
        op.beta * rates.mu_c1(),
        (1.0 - op.alpha) * rates.mu_l2(),
        (1.0 - op.beta) * rates.mu_c2(),
    ];
    let mut n = target + target / 5 + 1000;
    loop {
        let mut arrival_rng = source_rng(cfg.seed, Source::Arrivals);
        let mut coin_rng = source_rng(cfg.seed, Source::ModeCoin);
        let mut service_rng: Vec<_> = Source::SERVICE.iter().map(|&s| source_rng(cfg.seed, s)).collect();
        let inter = Exp::new(lambda).unwrap();
        let exps: Vec<Option<Exp<f64>>> = service_rates
            .iter()
            .map(|&r| (r > 0.0).then(|| Exp::new(r).unwrap()))
            .collect();

        let mut t = 0.0;
        let mut last_departure = [[0.0f64; 2]; 2];
        // (departure, arrival, mode)
        let mut jobs: Vec<(f64, f64, usize)> = Vec::with_capacity(n);
        for _ in 0..n {
            t += inter.sample(&mut arrival_rng);
            let mode = if coin_rng.random::<f64>() < op.p { 0 } else { 1 };
            let mut ready = t;
            for stage in 0..2 {
                let q = 2 * mode + stage;
                let start = ready.max(last_departure[mode][stage]);
                let s = exps[q].as_ref().unwrap().sample(&mut service_rng[q]);
                ready = start + s;
                last_departure[mode][stage] = ready;
            }
            jobs.push((ready, t, mode));
        }
        jobs.sort_by(|a, b| a.0.total_cmp(&b.0));
        // Unsimulated jobs arrive after `t`, so they cannot depart before it.
        if jobs[target - 1].0 >= t {
            n *= 2;
            continue;
        }
        let mut sums = [0.0f64; 2];
        let mut counts = [0u64; 2];
        for &(dep, arr, mode) in &jobs[cfg.warmup_jobs as usize..target] {
            sums[mode] += dep - arr;
            counts[mode] += 1;
        }
        return LindleyResult {
            mean_delay: (sums[0] + sums[1]) / cfg.horizon_jobs as f64,
            per_mode_jobs: counts,
        };
    }
}

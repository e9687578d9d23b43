//! Brute-force reference computations used to check the closed forms.
//!
//! Everything here is written from the model definitions directly (Poisson
//! splitting into M/M/1 tandems) and only borrows the parameter types from the
//! library.
#![allow(dead_code)]

use dualmode_core::{CanonicalParams, RateParams};

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization on `[a, b]`; `f` may return `+inf` for
/// infeasible points.
pub fn golden(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol && c < d {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd { (c, fc) } else { (d, fd) }
}

/// Uniform scan with `n` points followed by golden refinement of the best
/// grid cell.
pub fn scan_then_golden(f: &dyn Fn(f64) -> f64, a: f64, b: f64, n: usize) -> (f64, f64) {
    let x = |i: usize| a + (b - a) * i as f64 / (n - 1) as f64;
    let best = (0..n)
        .min_by(|&i, &j| f(x(i)).total_cmp(&f(x(j))))
        .unwrap();
    let (lo, hi) = (x(best.saturating_sub(1)), x((best + 1).min(n - 1)));
    let refined = golden(f, lo, hi, 1e-13);
    let at_grid = (x(best), f(x(best)));
    if refined.1 <= at_grid.1 { refined } else { at_grid }
}

fn mm1(share: f64, rate: f64, load: f64) -> f64 {
    if share == 0.0 {
        return 0.0;
    }
    if rate <= load {
        return f64::INFINITY;
    }
    share / (rate - load)
}

/// Mean sojourn of the tandem where a fraction `f` of each job runs locally.
pub fn tunable_delay(f: f64, lambda: f64, mu0: f64, k: f64) -> f64 {
    mm1(f, mu0, f * lambda) + mm1(1.0 - f, k * mu0, (1.0 - f) * lambda)
}

/// Minimizes the tunable delay over the stable fractions.
pub fn tunable_optimum(lambda: f64, mu0: f64, k: f64) -> (f64, f64) {
    let lo = (1.0 - k * mu0 / lambda).max(0.0);
    let hi = (mu0 / lambda).min(1.0);
    let f = |x: f64| tunable_delay(x, lambda, mu0, k);
    scan_then_golden(&f, lo, hi, 2001)
}

/// Mean delay of the dual-mode system at `(p, alpha, beta)`: four M/M/1
/// queues fed by Poisson splitting.
pub fn dual_delay(rates: &RateParams, p: f64, alpha: f64, beta: f64, lambda: f64) -> f64 {
    let q = 1.0 - p;
    mm1(p, alpha * rates.mu_l1(), lambda * p)
        + mm1(q, (1.0 - alpha) * rates.mu_l2(), lambda * q)
        + mm1(p, beta * rates.mu_c1(), lambda * p)
        + mm1(q, (1.0 - beta) * rates.mu_c2(), lambda * q)
}

/// Brute-force minimization of the dual-mode delay over the stable
/// `(alpha, beta)` rectangle for a fixed `0 < p < 1`: a coarse 2-D grid,
/// then nested golden sections around the best cell.
pub fn partition_optimum(rates: &RateParams, p: f64, lambda: f64) -> (f64, f64, f64) {
    let q = 1.0 - p;
    let (a_lo, a_hi) = (lambda * p / rates.mu_l1(), 1.0 - lambda * q / rates.mu_l2());
    let (b_lo, b_hi) = (lambda * p / rates.mu_c1(), 1.0 - lambda * q / rates.mu_c2());
    assert!(a_lo < a_hi && b_lo < b_hi, "p = {p} not stabilizable at lambda = {lambda}");

    const N: usize = 101;
    let grid = |lo: f64, hi: f64, i: usize| lo + (hi - lo) * (i as f64 + 0.5) / N as f64;
    let mut best = (0, 0, f64::INFINITY);
    for i in 0..N {
        for j in 0..N {
            let d = dual_delay(rates, p, grid(a_lo, a_hi, i), grid(b_lo, b_hi, j), lambda);
            if d < best.2 {
                best = (i, j, d);
            }
        }
    }
    let cell = |lo: f64, hi: f64, i: usize| {
        let w = (hi - lo) / N as f64;
        ((lo + w * (i as f64 - 0.5)).max(lo), (lo + w * (i as f64 + 1.5)).min(hi))
    };
    let (a0, a1) = cell(a_lo, a_hi, best.0);
    let (b0, b1) = cell(b_lo, b_hi, best.1);

    let inner = |alpha: f64| {
        let g = |beta: f64| dual_delay(rates, p, alpha, beta, lambda);
        golden(&g, b0, b1, 1e-13)
    };
    let outer = |alpha: f64| inner(alpha).1;
    let (alpha, delay) = golden(&outer, a0, a1, 1e-13);
    let beta = inner(alpha).0;
    (alpha, beta, delay)
}

/// Delay under the optimal partition, evaluated from the definition as the
/// sum over servers of the optimal two-class split (independent derivation
/// via Cauchy-Schwarz on service times).
pub fn partitioned_delay(rates: &RateParams, p: f64, lambda: f64) -> f64 {
    let q = 1.0 - p;
    let server = |t1: f64, t2: f64| {
        let load = lambda * (p * t1 + q * t2);
        if load >= 1.0 {
            return f64::INFINITY;
        }
        let s = (p * t1).sqrt() + (q * t2).sqrt();
        s * s / (1.0 - load)
    };
    server(1.0 / rates.mu_l1(), 1.0 / rates.mu_l2()) + server(1.0 / rates.mu_c1(), 1.0 / rates.mu_c2())
}

/// Same as [`partitioned_delay`] but from canonical parameters, valid for
/// infinite-rate corner cases.
pub fn partitioned_delay_canonical(c: &CanonicalParams, p: f64, lambda: f64) -> f64 {
    let (mu0, k, f1, f2) = (c.mu0(), c.k(), c.f1(), c.f2());
    let q = 1.0 - p;
    let server = |t1: f64, t2: f64| {
        let load = lambda * (p * t1 + q * t2);
        if load >= 1.0 {
            return f64::INFINITY;
        }
        let s = (p * t1).sqrt() + (q * t2).sqrt();
        s * s / (1.0 - load)
    };
    server(f1 / mu0, f2 / mu0) + server((1.0 - f1) / (k * mu0), (1.0 - f2) / (k * mu0))
}

/// Stable assignment probabilities, from the single-mode-at-a-time capacity
/// argument: each server must carry its total work below unit utilization.
pub fn stable_p_bounds(rates: &RateParams, lambda: f64) -> (f64, f64) {
    // local: lambda (p/mu_l1 + q/mu_l2) < 1, cloud: lambda (p/mu_c1 + q/mu_c2) < 1
    let (tl1, tl2) = (1.0 / rates.mu_l1(), 1.0 / rates.mu_l2());
    let (tc1, tc2) = (1.0 / rates.mu_c1(), 1.0 / rates.mu_c2());
    let lo = (tl2 - 1.0 / lambda) / (tl2 - tl1);
    let hi = (1.0 / lambda - tc2) / (tc1 - tc2);
    (lo.max(0.0), hi.min(1.0))
}

/// Dense scan of the optimal-partition delay over the stable `p` values.
pub fn dense_scan_min(rates: &RateParams, lambda: f64, n: usize) -> (f64, f64) {
    let (lo, hi) = stable_p_bounds(rates, lambda);
    let mut best = (f64::NAN, f64::INFINITY);
    for i in 0..n {
        let p = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let d = partitioned_delay(rates, p, lambda);
        if d < best.1 {
            best = (p, d);
        }
    }
    best
}

/// Central finite-difference partials of the dual delay in `(alpha, beta)`,
/// made dimensionless: each partial is multiplied by the distance to the
/// nearer stability limit of that coordinate and divided by the delay. The
/// step is a small fraction of that distance, so the check stays meaningful
/// when the stable rectangle is very thin.
pub fn scaled_partition_gradient(rates: &RateParams, p: f64, alpha: f64, beta: f64, lambda: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let margin_a = (alpha - lambda * p / rates.mu_l1()).min(1.0 - lambda * q / rates.mu_l2() - alpha);
    let margin_b = (beta - lambda * p / rates.mu_c1()).min(1.0 - lambda * q / rates.mu_c2() - beta);
    let d = |a: f64, b: f64| dual_delay(rates, p, a, b, lambda);
    let t = d(alpha, beta);
    let (ha, hb) = (1e-4 * margin_a, 1e-4 * margin_b);
    let ga = (d(alpha + ha, beta) - d(alpha - ha, beta)) / (2.0 * ha);
    let gb = (d(alpha, beta + hb) - d(alpha, beta - hb)) / (2.0 * hb);
    (ga * margin_a / t, gb * margin_b / t)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

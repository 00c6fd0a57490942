//! Reference computations shared by the integration and acceptance tests.
//!
//! Everything here is written directly from the defining formulas and does
//! not call the library routine it is used to check.

#![allow(dead_code)]

use l0combo::{FilterParams, RngSpec, Scenario, ScheduleKind, SchedulePolicy, SignalSource, SnrSegment};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random `(y1, y2, d)` histories of length `n`.
pub fn random_histories(seed: u64, n: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |scale: f64| -> Vec<f64> {
        (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
    };
    let y1 = draw(1.0);
    let y2 = draw(0.5);
    let d = draw(2.0);
    (y1, y2, d)
}

/// Exponentially weighted least-squares mixing weight with a prior term:
///
/// `argmin_lam  sum_k b^k (p - lam yd)^2 + b^(n+1) (lam - lam0)^2 / r0`
///
/// where the last sample carries weight `b^0`.
pub fn regularized_lambda(y1: &[f64], y2: &[f64], d: &[f64], beta_f: f64, lam0: f64, r0: f64) -> f64 {
    let n = y1.len();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        let w = beta_f.powi((n - 1 - i) as i32);
        let yd = y1[i] - y2[i];
        num += w * yd * (d[i] - y2[i]);
        den += w * yd * yd;
    }
    let prior = beta_f.powi(n as i32) / r0;
    (num + prior * lam0) / (den + prior)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// `1/2 (d - lambda(a) y1 - (1 - lambda(a)) y2)^2`.
pub fn half_sq_error(a: f64, y1: f64, y2: f64, d: f64) -> f64 {
    let lam = 1.0 / (1.0 + (-a).exp());
    let e = d - (lam * y1 + (1.0 - lam) * y2);
    0.5 * e * e
}

/// Central finite difference of `f` at `x`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Per-filter squared-deviation traces of masked plain-LMS filters driven by
/// the simulator's streams, written without the library's filter kernel.
pub fn reference_lms_traces(
    scenario: &Scenario,
    params: &[FilterParams],
    policy: ScheduleKind,
    base_seed: u64,
    run_index: u64,
) -> Vec<Vec<f64>> {
    let len = scenario.len();
    let sched = SchedulePolicy::new(policy, params.len(), len).unwrap();
    let mut src = SignalSource::new(scenario, RngSpec { base_seed, run_index });
    let mut w = vec![vec![0.0; len]; params.len()];
    let mut out = vec![Vec::new(); params.len()];
    for n in 0..scenario.horizon() {
        let (_, d) = src.gen_step(n);
        let x = src.window();
        for (k, wk) in w.iter_mut().enumerate() {
            let dev: f64 = wk.iter().zip(scenario.w_opt()).map(|(a, b)| (a - b) * (a - b)).sum();
            out[k].push(dev);
            let y: f64 = wk.iter().zip(x).map(|(a, b)| a * b).sum();
            let mu_e = params[k].mu * (d - y);
            for (i, (wi, xi)) in wk.iter_mut().zip(x).enumerate() {
                if sched.mask_for(k + 1, n).bits()[i] {
                    *wi += mu_e * xi;
                }
            }
        }
    }
    out
}

pub fn fixed_snr(snr_db: f64) -> Vec<SnrSegment> {
    vec![SnrSegment { start: 0, snr_db }]
}

/// Slope-free check that `series` never increases by more than `slack` (relative).
pub fn is_non_increasing(series: &[f64], slack: f64) -> bool {
    series.windows(2).all(|p| p[1] <= p[0] * (1.0 + slack))
}

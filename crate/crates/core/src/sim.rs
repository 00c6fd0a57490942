//! Scenario generation: unknown systems, white Gaussian input, and noise
//! following a piecewise-constant SNR schedule.
//!
//! SNR is the ratio of noiseless output power to noise power,
//! `sigma_x^2 ||w_opt||^2 / sigma_v^2`, expressed in dB.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::filter::dot;

/// One constant-SNR stretch starting at `start` (inclusive).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSegment {
    pub start: usize,
    pub snr_db: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    w_opt: Vec<f64>,
    input_variance: f64,
    snr_schedule: Vec<SnrSegment>,
    horizon: usize,
}

impl Scenario {
    pub fn new(
        w_opt: Vec<f64>,
        input_variance: f64,
        snr_schedule: Vec<SnrSegment>,
        horizon: usize,
    ) -> Result<Self> {
        if w_opt.is_empty() || w_opt.iter().all(|&w| w == 0.0) {
            return Err(Error::contract("unknown system must be nonzero"));
        }
        if !(input_variance.is_finite() && input_variance > 0.0) {
            return Err(Error::contract("input variance must be > 0"));
        }
        validate_schedule(&snr_schedule, horizon)?;
        Ok(Scenario {
            w_opt,
            input_variance,
            snr_schedule,
            horizon,
        })
    }

    pub fn w_opt(&self) -> &[f64] {
        &self.w_opt
    }

    pub fn len(&self) -> usize {
        self.w_opt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w_opt.is_empty()
    }

    pub fn input_variance(&self) -> f64 {
        self.input_variance
    }

    pub fn snr_schedule(&self) -> &[SnrSegment] {
        &self.snr_schedule
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Noise variance of each segment, in schedule order.
    pub fn noise_variances(&self) -> Vec<f64> {
        self.snr_schedule
            .iter()
            .map(|s| noise_variance_unchecked(&self.w_opt, self.input_variance, s.snr_db))
            .collect()
    }

    /// `[start, end)` iteration range of each segment.
    pub fn segment_ranges(&self) -> Vec<(usize, usize)> {
        segment_ranges(&self.snr_schedule, self.horizon)
    }
}

pub(crate) fn segment_ranges(schedule: &[SnrSegment], horizon: usize) -> Vec<(usize, usize)> {
    schedule
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let end = schedule.get(i + 1).map_or(horizon, |n| n.start);
            (s.start, end)
        })
        .collect()
}

pub(crate) fn validate_schedule(schedule: &[SnrSegment], horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::contract("horizon must be >= 1"));
    }
    let Some(first) = schedule.first() else {
        return Err(Error::contract("SNR schedule is empty"));
    };
    if first.start != 0 {
        return Err(Error::contract("SNR schedule must start at iteration 0"));
    }
    for pair in schedule.windows(2) {
        if pair[1].start <= pair[0].start {
            return Err(Error::contract(
                "SNR segment starts must be strictly increasing",
            ));
        }
    }
    if let Some(last) = schedule.last() {
        if last.start >= horizon {
            return Err(Error::contract("SNR segment starts must be < horizon"));
        }
    }
    if schedule.iter().any(|s| !s.snr_db.is_finite()) {
        return Err(Error::contract("SNR values must be finite"));
    }
    Ok(())
}

/// Length-`len` vector with `n_active` taps equal to `value` at seed-chosen distinct positions.
pub fn make_sparse_system(len: usize, n_active: usize, value: f64, placement_seed: u64) -> Result<Vec<f64>> {
    if n_active == 0 || n_active > len {
        return Err(Error::contract(format!(
            "need 0 < active taps <= L, got {n_active} of {len}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(placement_seed);
    let mut w = vec![0.0; len];
    for i in sample(&mut rng, len, n_active) {
        w[i] = value;
    }
    Ok(w)
}

/// Replaces exact zeros of `w` with uniform draws from `[-eps, eps]` excluding zero.
pub fn make_near_sparse(w: &[f64], eps: f64, seed: u64) -> Result<Vec<f64>> {
    let peak = w.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(eps > 0.0 && eps <= 0.1 * peak) {
        return Err(Error::contract(format!(
            "near-sparse amplitude must satisfy 0 < eps <= 0.1 max|w| = {}, got {eps}",
            0.1 * peak
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(w.iter()
        .map(|&v| {
            if v != 0.0 {
                return v;
            }
            loop {
                let draw = rng.random_range(-eps..=eps);
                if draw != 0.0 {
                    return draw;
                }
            }
        })
        .collect())
}

fn noise_variance_unchecked(w_opt: &[f64], sigma_x2: f64, snr_db: f64) -> f64 {
    sigma_x2 * dot(w_opt, w_opt) * 10f64.powf(-snr_db / 10.0)
}

/// `sigma_v^2 = sigma_x^2 ||w_opt||^2 10^(-snr_db / 10)`.
pub fn noise_variance_for_snr(w_opt: &[f64], sigma_x2: f64, snr_db: f64) -> Result<f64> {
    if w_opt.iter().all(|&w| w == 0.0) {
        return Err(Error::contract("SNR is undefined for a zero system"));
    }
    if !snr_db.is_finite() {
        return Err(Error::contract("SNR must be finite"));
    }
    Ok(noise_variance_unchecked(w_opt, sigma_x2, snr_db))
}

/// Seed of run `run_index` under `base_seed`: two rounds of the SplitMix64 finaliser.
pub fn run_seed(base_seed: u64, run_index: u64) -> u64 {
    splitmix64(splitmix64(base_seed) ^ run_index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Identifies the random stream of one ensemble member.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngSpec {
    pub base_seed: u64,
    pub run_index: u64,
}

impl RngSpec {
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(run_seed(self.base_seed, self.run_index))
    }
}

/// Streams `(x(n), d(n))` for one run and keeps the regressor window.
///
/// Each iteration draws `x(n)` and then `v(n)`, both standard normals scaled
/// to the configured variances.
#[derive(Debug, Clone)]
pub struct SignalSource<'a> {
    scenario: &'a Scenario,
    rng: ChaCha8Rng,
    noise_std: Vec<f64>,
    ranges: Vec<(usize, usize)>,
    input_std: f64,
    window: Vec<f64>,
    segment: usize,
}

impl<'a> SignalSource<'a> {
    pub fn new(scenario: &'a Scenario, spec: RngSpec) -> Self {
        SignalSource {
            scenario,
            rng: spec.rng(),
            noise_std: scenario.noise_variances().into_iter().map(f64::sqrt).collect(),
            ranges: scenario.segment_ranges(),
            input_std: scenario.input_variance.sqrt(),
            window: vec![0.0; scenario.len()],
            segment: 0,
        }
    }

    /// Current window `x(n), x(n-1), ..., x(n-L+1)`.
    pub fn window(&self) -> &[f64] {
        &self.window
    }

    /// Index of the SNR segment active at iteration `n`.
    pub fn segment_at(&self, n: usize) -> usize {
        self.ranges
            .iter()
            .position(|&(s, e)| n >= s && n < e)
            .unwrap_or(self.ranges.len() - 1)
    }

    /// Draws `x(n)`, shifts it into the window and returns `(x(n), d(n))`.
    pub fn gen_step(&mut self, n: usize) -> (f64, f64) {
        while self.segment + 1 < self.ranges.len() && n >= self.ranges[self.segment].1 {
            self.segment += 1;
        }
        if n < self.ranges[self.segment].0 {
            self.segment = self.segment_at(n);
        }
        let zx: f64 = self.rng.sample(StandardNormal);
        let zv: f64 = self.rng.sample(StandardNormal);
        let x = self.input_std * zx;
        let len = self.window.len();
        self.window.copy_within(0..len - 1, 1);
        self.window[0] = x;
        let d = dot(&self.scenario.w_opt, &self.window) + self.noise_std[self.segment] * zv;
        (x, d)
    }
}

//! Monte-Carlo ensemble runner.
//!
//! A run streams one realisation of the scenario through `M` component
//! filters (each with its own partial-update mask sequence) and a combiner,
//! recording per iteration the squared deviation of every component, of the
//! mixed coefficient vector, and the mixing weights. An ensemble averages runs
//! in run-index order, so results are bitwise reproducible whatever the thread
//! count.

use rayon::prelude::*;

use crate::combiner::{RlsCombiner2, SigmoidCombiner, SoftmaxCombinerM, DEFAULT_DELTA};
use crate::error::{Error, Result};
use crate::filter::{msd, FilterParams, FilterState};
use crate::schedule::{ScheduleKind, SchedulePolicy};
use crate::sim::{
    make_near_sparse, make_sparse_system, segment_ranges, validate_schedule, RngSpec, Scenario,
    SignalSource, SnrSegment,
};

/// How the unknown system is built.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec {
    pub len: usize,
    pub active_taps: usize,
    pub tap_value: f64,
    pub placement_seed: u64,
    /// Zero taps become uniform draws in `[-eps, eps]` when set.
    pub near_sparse_eps: Option<f64>,
    pub near_sparse_seed: u64,
}

impl SystemSpec {
    pub fn build(&self) -> Result<Vec<f64>> {
        let w = make_sparse_system(self.len, self.active_taps, self.tap_value, self.placement_seed)?;
        match self.near_sparse_eps {
            Some(eps) => make_near_sparse(&w, eps, self.near_sparse_seed),
            None => Ok(w),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub system: SystemSpec,
    pub input_variance: f64,
    pub snr_schedule: Vec<SnrSegment>,
    pub horizon: usize,
}

impl ScenarioSpec {
    pub fn build(&self) -> Result<Scenario> {
        Scenario::new(
            self.system.build()?,
            self.input_variance,
            self.snr_schedule.clone(),
            self.horizon,
        )
    }

    /// Single-segment schedule at `snr_db`.
    pub fn set_fixed_snr(&mut self, snr_db: f64) {
        self.snr_schedule = vec![SnrSegment { start: 0, snr_db }];
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CombinerKind {
    /// Sigmoid convex combination with gradient update; needs `M = 2`.
    GradSigmoid { mu_c: f64 },
    /// Sigmoid convex combination with least-squares update; needs `M = 2`.
    Rls2 { beta_f: f64 },
    /// Softmax combination of `M >= 2` filters.
    SoftmaxM { lambda_f: f64 },
    /// No combination; needs `M = 1`.
    None,
}

impl CombinerKind {
    pub fn name(&self) -> &'static str {
        match self {
            CombinerKind::GradSigmoid { .. } => "grad",
            CombinerKind::Rls2 { .. } => "rls2",
            CombinerKind::SoftmaxM { .. } => "softmax",
            CombinerKind::None => "none",
        }
    }

    /// Whether the trace carries a single `lambda` weight column.
    pub fn is_two_filter(&self) -> bool {
        matches!(self, CombinerKind::GradSigmoid { .. } | CombinerKind::Rls2 { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: ScenarioSpec,
    pub filters: Vec<FilterParams>,
    pub policy: ScheduleKind,
    pub combiner: CombinerKind,
    /// Regularisation of the least-squares combiners.
    pub delta: f64,
    pub runs: usize,
    pub base_seed: u64,
    /// Fraction of each SNR segment averaged for the steady-state summary.
    pub steady_window: f64,
    /// Skip and count diverging runs instead of aborting.
    pub exclude_divergent: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let m = self.filters.len();
        if m == 0 {
            return Err(Error::contract("at least one filter is required"));
        }
        for f in &self.filters {
            f.validate()?;
        }
        match self.combiner {
            CombinerKind::GradSigmoid { mu_c } => {
                if m != 2 {
                    return Err(Error::contract("gradient combiner needs exactly 2 filters"));
                }
                SigmoidCombiner::new(mu_c)?;
            }
            CombinerKind::Rls2 { beta_f } => {
                if m != 2 {
                    return Err(Error::contract("rls2 combiner needs exactly 2 filters"));
                }
                RlsCombiner2::with_delta(beta_f, self.delta)?;
            }
            CombinerKind::SoftmaxM { lambda_f } => {
                SoftmaxCombinerM::with_delta(m, lambda_f, self.delta)?;
            }
            CombinerKind::None => {
                if m != 1 {
                    return Err(Error::contract("combiner `none` needs exactly 1 filter"));
                }
            }
        }
        if self.runs < 1 {
            return Err(Error::contract("runs must be >= 1"));
        }
        if !(self.steady_window > 0.0 && self.steady_window < 1.0) {
            return Err(Error::contract("steady_window must lie in (0, 1)"));
        }
        let sys = &self.scenario.system;
        if m > sys.len {
            return Err(Error::contract("more filters than taps"));
        }
        validate_schedule(&self.scenario.snr_schedule, self.scenario.horizon)?;
        for (start, end) in segment_ranges(&self.scenario.snr_schedule, self.scenario.horizon) {
            if ((end - start) as f64 * self.steady_window) < 1.0 {
                return Err(Error::contract(
                    "steady_window selects no iterations of some SNR segment",
                ));
            }
        }
        Ok(())
    }

    pub fn num_filters(&self) -> usize {
        self.filters.len()
    }

    /// Full-update plain LMS with the step size of filter 1, on the same input streams.
    pub fn lms_baseline(&self) -> ExperimentConfig {
        ExperimentConfig {
            filters: vec![FilterParams {
                kappa: 0.0,
                ..self.filters[0]
            }],
            policy: ScheduleKind::FullUpdate,
            combiner: CombinerKind::None,
            ..self.clone()
        }
    }

    /// Same setup with every filter's attraction removed.
    pub fn without_attraction(&self) -> ExperimentConfig {
        let mut cfg = self.clone();
        for f in &mut cfg.filters {
            f.kappa = 0.0;
        }
        cfg
    }
}

impl Default for ExperimentConfig {
    /// One full-update l0-LMS filter on a 128-tap, 5-active-tap system at 20 dB.
    fn default() -> Self {
        ExperimentConfig {
            scenario: ScenarioSpec {
                system: SystemSpec {
                    len: 128,
                    active_taps: 5,
                    tap_value: 1.0,
                    placement_seed: 1,
                    near_sparse_eps: None,
                    near_sparse_seed: 2,
                },
                input_variance: 1.0,
                snr_schedule: vec![SnrSegment {
                    start: 0,
                    snr_db: 20.0,
                }],
                horizon: 15_000,
            },
            filters: vec![FilterParams::l0(0.005, 1e-5)],
            policy: ScheduleKind::FullUpdate,
            combiner: CombinerKind::None,
            delta: DEFAULT_DELTA,
            runs: 100,
            base_seed: 0,
            steady_window: 0.1,
            exclude_divergent: false,
        }
    }
}

/// Worst-case deviations from the mixing invariants seen during a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct InvariantStats {
    /// Largest distance of any mixing weight outside `[0, 1]`.
    pub weight_range_excess: f64,
    /// Largest `|sum(weights) - 1|`.
    pub weight_sum_error: f64,
    /// Largest distance of a mixed coefficient outside the componentwise envelope.
    pub envelope_excess: f64,
}

impl InvariantStats {
    fn merge(&mut self, other: &InvariantStats) {
        self.weight_range_excess = self.weight_range_excess.max(other.weight_range_excess);
        self.weight_sum_error = self.weight_sum_error.max(other.weight_sum_error);
        self.envelope_excess = self.envelope_excess.max(other.envelope_excess);
    }
}

/// Per-iteration record of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// `filter_msd[k][n]`.
    pub filter_msd: Vec<Vec<f64>>,
    pub comb_msd: Vec<f64>,
    /// `weights[k][n]`, the mixing weight of filter `k` in force at iteration `n`.
    pub weights: Vec<Vec<f64>>,
    /// Masked-in tap updates summed over filters and iterations.
    pub tap_updates: u64,
    pub saturations: u64,
    pub invariants: InvariantStats,
}

enum Mixer {
    Single,
    Grad(SigmoidCombiner),
    Rls(RlsCombiner2),
    Softmax(SoftmaxCombinerM),
}

impl Mixer {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        Ok(match cfg.combiner {
            CombinerKind::GradSigmoid { mu_c } => Mixer::Grad(SigmoidCombiner::new(mu_c)?),
            CombinerKind::Rls2 { beta_f } => Mixer::Rls(RlsCombiner2::with_delta(beta_f, cfg.delta)?),
            CombinerKind::SoftmaxM { lambda_f } => Mixer::Softmax(SoftmaxCombinerM::with_delta(
                cfg.filters.len(),
                lambda_f,
                cfg.delta,
            )?),
            CombinerKind::None => Mixer::Single,
        })
    }

    fn weights(&self, out: &mut [f64]) {
        match self {
            Mixer::Single => out[0] = 1.0,
            Mixer::Grad(c) => {
                let l = c.lambda();
                out[0] = l;
                out[1] = 1.0 - l;
            }
            Mixer::Rls(c) => {
                let l = c.lambda();
                out[0] = l;
                out[1] = 1.0 - l;
            }
            Mixer::Softmax(c) => out.copy_from_slice(c.weights()),
        }
    }

    fn step(&mut self, y: &[f64], d: f64) -> Result<f64> {
        Ok(match self {
            Mixer::Single => y[0],
            Mixer::Grad(c) => c.step(y[0], y[1], d),
            Mixer::Rls(c) => c.step(y[0], y[1], d),
            Mixer::Softmax(c) => c.step(y, d)?,
        })
    }

    fn saturations(&self) -> u64 {
        match self {
            Mixer::Rls(c) => c.saturations(),
            Mixer::Softmax(c) => c.saturations(),
            _ => 0,
        }
    }
}

/// Validated config with its materialised scenario and mask family.
struct Prepared<'a> {
    cfg: &'a ExperimentConfig,
    scenario: Scenario,
    policy: SchedulePolicy,
}

impl<'a> Prepared<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let scenario = cfg.scenario.build()?;
        let policy = SchedulePolicy::new(cfg.policy, cfg.filters.len(), scenario.len())?;
        Ok(Prepared {
            cfg,
            scenario,
            policy,
        })
    }

    fn run(&self, run_index: u64) -> Result<RunRecord> {
        let cfg = self.cfg;
        let m = cfg.filters.len();
        let horizon = self.scenario.horizon();
        let w_opt = self.scenario.w_opt();
        let len = w_opt.len();

        let mut filters = cfg
            .filters
            .iter()
            .map(|p| FilterState::new(len, *p))
            .collect::<Result<Vec<_>>>()?;
        let mut mixer = Mixer::new(cfg)?;
        let mut source = SignalSource::new(
            &self.scenario,
            RngSpec {
                base_seed: cfg.base_seed,
                run_index,
            },
        );

        let mut rec = RunRecord {
            filter_msd: vec![Vec::with_capacity(horizon); m],
            comb_msd: Vec::with_capacity(horizon),
            weights: vec![Vec::with_capacity(horizon); m],
            tap_updates: 0,
            saturations: 0,
            invariants: InvariantStats::default(),
        };
        let mut psi = vec![0.0; m];
        let mut y = vec![0.0; m];
        let mut w_comb = vec![0.0; len];

        for n in 0..horizon {
            let (_, d) = source.gen_step(n);

            mixer.weights(&mut psi);
            let mut wsum = 0.0;
            for (k, &wk) in psi.iter().enumerate() {
                rec.weights[k].push(wk);
                wsum += wk;
                let excess = (-wk).max(wk - 1.0).max(0.0);
                rec.invariants.weight_range_excess = rec.invariants.weight_range_excess.max(excess);
            }
            rec.invariants.weight_sum_error = rec.invariants.weight_sum_error.max((wsum - 1.0).abs());

            w_comb.fill(0.0);
            for (k, f) in filters.iter().enumerate() {
                rec.filter_msd[k].push(msd(f.weights(), w_opt)?);
                for (c, w) in w_comb.iter_mut().zip(f.weights()) {
                    *c += psi[k] * w;
                }
            }
            for (i, &c) in w_comb.iter().enumerate() {
                let (lo, hi) = filters.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
                    (lo.min(f.weights()[i]), hi.max(f.weights()[i]))
                });
                let excess = (lo - c).max(c - hi).max(0.0);
                rec.invariants.envelope_excess = rec.invariants.envelope_excess.max(excess);
            }
            rec.comb_msd.push(msd(&w_comb, w_opt)?);

            for (k, f) in filters.iter_mut().enumerate() {
                let mask = self.policy.mask_for(k + 1, n);
                rec.tap_updates += mask.count() as u64;
                let out = f
                    .l0lms_step(source.window(), d, mask)
                    .map_err(|e| match e {
                        Error::Divergence { .. } => Error::Divergence {
                            run: run_index,
                            iteration: n,
                            filter: k + 1,
                        },
                        other => other,
                    })?;
                y[k] = out.y;
            }
            mixer.step(&y, d)?;
        }
        rec.saturations = mixer.saturations();
        Ok(rec)
    }
}

/// Simulates ensemble member `run_index` of `cfg`.
pub fn run_single(cfg: &ExperimentConfig, run_index: u64) -> Result<RunRecord> {
    Prepared::new(cfg)?.run(run_index)
}

/// Ensemble-averaged learning curves.
#[derive(Debug, Clone, PartialEq)]
pub struct MsdTrace {
    pub filter_msd: Vec<Vec<f64>>,
    pub comb_msd: Vec<f64>,
    pub weights: Vec<Vec<f64>>,
    pub combiner: CombinerKind,
    pub segments: Vec<SegmentInfo>,
    pub runs_used: usize,
    pub runs_diverged: usize,
    /// Mean masked-in tap updates per iteration, over all filters.
    pub tap_updates_per_iter: f64,
    pub saturations: u64,
    /// Worst case over all runs.
    pub invariants: InvariantStats,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentInfo {
    pub start: usize,
    pub end: usize,
    pub snr_db: f64,
}

impl MsdTrace {
    pub fn horizon(&self) -> usize {
        self.comb_msd.len()
    }

    pub fn num_filters(&self) -> usize {
        self.filter_msd.len()
    }
}

/// Averages `cfg.runs` independent runs, accumulated in run-index order.
pub fn run_ensemble(cfg: &ExperimentConfig) -> Result<MsdTrace> {
    let prepared = Prepared::new(cfg)?;
    let m = cfg.filters.len();
    let horizon = cfg.scenario.horizon;

    let mut filter_sum = vec![vec![0.0; horizon]; m];
    let mut comb_sum = vec![0.0; horizon];
    let mut weight_sum = vec![vec![0.0; horizon]; m];
    let mut used = 0usize;
    let mut diverged = 0usize;
    let mut tap_updates = 0u64;
    let mut saturations = 0u64;
    let mut invariants = InvariantStats::default();

    let chunk = rayon::current_num_threads().max(1) * 2;
    let indices: Vec<u64> = (0..cfg.runs as u64).collect();
    for block in indices.chunks(chunk) {
        let records: Vec<Result<RunRecord>> =
            block.par_iter().map(|&r| prepared.run(r)).collect();
        for rec in records {
            let rec = match rec {
                Ok(rec) => rec,
                Err(Error::Divergence { .. }) if cfg.exclude_divergent => {
                    diverged += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            used += 1;
            for (acc, row) in filter_sum.iter_mut().zip(&rec.filter_msd) {
                add_into(acc, row);
            }
            add_into(&mut comb_sum, &rec.comb_msd);
            for (acc, row) in weight_sum.iter_mut().zip(&rec.weights) {
                add_into(acc, row);
            }
            tap_updates += rec.tap_updates;
            saturations += rec.saturations;
            invariants.merge(&rec.invariants);
        }
    }
    if used == 0 {
        return Err(Error::contract(format!("all {diverged} runs diverged")));
    }

    let scale = 1.0 / used as f64;
    let mean = |mut v: Vec<f64>| {
        v.iter_mut().for_each(|x| *x *= scale);
        v
    };
    let segments = segment_ranges(&cfg.scenario.snr_schedule, horizon)
        .into_iter()
        .zip(&cfg.scenario.snr_schedule)
        .map(|((start, end), s)| SegmentInfo {
            start,
            end,
            snr_db: s.snr_db,
        })
        .collect();
    Ok(MsdTrace {
        filter_msd: filter_sum.into_iter().map(mean).collect(),
        comb_msd: mean(comb_sum),
        weights: weight_sum.into_iter().map(mean).collect(),
        combiner: cfg.combiner,
        segments,
        runs_used: used,
        runs_diverged: diverged,
        tap_updates_per_iter: tap_updates as f64 / (used as f64 * horizon as f64),
        saturations,
        invariants,
    })
}

fn add_into(acc: &mut [f64], row: &[f64]) {
    for (a, r) in acc.iter_mut().zip(row) {
        *a += r;
    }
}

/// Steady-state averages of one SNR segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyRow {
    pub segment: usize,
    pub start: usize,
    pub end: usize,
    pub snr_db: f64,
    pub filter_msd: Vec<f64>,
    pub comb_msd: f64,
}

/// Mean of the final `window` fraction of `series[start..end]` (at least one sample).
pub fn tail_mean(series: &[f64], start: usize, end: usize, window: f64) -> f64 {
    let len = end - start;
    let take = ((len as f64 * window).round() as usize).clamp(1, len);
    let tail = &series[end - take..end];
    tail.iter().sum::<f64>() / take as f64
}

/// Per-segment means over the final `window` fraction of each SNR segment.
pub fn steady_state_msd(trace: &MsdTrace, window: f64) -> Vec<SteadyRow> {
    trace
        .segments
        .iter()
        .enumerate()
        .map(|(i, s)| SteadyRow {
            segment: i,
            start: s.start,
            end: s.end,
            snr_db: s.snr_db,
            filter_msd: trace
                .filter_msd
                .iter()
                .map(|f| tail_mean(f, s.start, s.end, window))
                .collect(),
            comb_msd: tail_mean(&trace.comb_msd, s.start, s.end, window),
        })
        .collect()
}

/// `10 log10(x)`.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Steady-state MSD indexed `[snr][kappa]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub snrs: Vec<f64>,
    pub kappas: Vec<f64>,
    pub msd: Vec<Vec<f64>>,
}

/// Single-filter, full-update, fixed-SNR ensembles over the `(snr, kappa)` grid.
///
/// Step size and attractor shape come from `base.filters[0]`. Rows are in
/// `snrs` order, columns in ascending `kappa`.
pub fn kappa_sweep(base: &ExperimentConfig, kappas: &[f64], snrs: &[f64]) -> Result<SweepTable> {
    if kappas.is_empty() || snrs.is_empty() {
        return Err(Error::contract("sweep grid must be non-empty"));
    }
    let mut kappas = kappas.to_vec();
    kappas.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(snrs.len());
    for &snr in snrs {
        let mut row = Vec::with_capacity(kappas.len());
        for &kappa in &kappas {
            let mut cfg = base.clone();
            cfg.scenario.set_fixed_snr(snr);
            cfg.filters = vec![FilterParams {
                kappa,
                ..base.filters[0]
            }];
            cfg.policy = ScheduleKind::FullUpdate;
            cfg.combiner = CombinerKind::None;
            let trace = run_ensemble(&cfg)?;
            row.push(steady_state_msd(&trace, cfg.steady_window)[0].filter_msd[0]);
        }
        rows.push(row);
    }
    Ok(SweepTable {
        snrs: snrs.to_vec(),
        kappas,
        msd: rows,
    })
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(runs: usize) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.system.len = 16;
        cfg.scenario.system.active_taps = 2;
        cfg.scenario.horizon = 600;
        cfg.scenario.set_fixed_snr(30.0);
        cfg.filters = vec![FilterParams::l0(0.02, 1e-4)];
        cfg.runs = runs;
        cfg
    }

    #[test]
    fn tail_mean_examples() {
        assert_eq!(tail_mean(&[2.5; 40], 0, 40, 0.1), 2.5);
        let n = 1001;
        let ramp: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        assert!((tail_mean(&ramp, 0, n, 0.1) - 0.95).abs() < 1e-3);
    }

    #[test]
    fn two_segments_give_two_rows() {
        let mut cfg = small(2);
        cfg.scenario.snr_schedule = vec![
            SnrSegment { start: 0, snr_db: 40.0 },
            SnrSegment { start: 300, snr_db: 10.0 },
        ];
        let trace = run_ensemble(&cfg).unwrap();
        let rows = steady_state_msd(&trace, 0.1);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].filter_msd.len(), 1);
        assert!(rows[1].filter_msd[0] > rows[0].filter_msd[0]);
    }

    #[test]
    fn single_filter_combined_equals_filter() {
        let trace = run_ensemble(&small(3)).unwrap();
        assert_eq!(trace.comb_msd, trace.filter_msd[0]);
        assert!(trace.weights[0].iter().all(|&w| w == 1.0));
    }

    #[test]
    fn one_run_ensemble_equals_run_single() {
        let cfg = small(1);
        let trace = run_ensemble(&cfg).unwrap();
        let rec = run_single(&cfg, 0).unwrap();
        assert_eq!(trace.filter_msd, rec.filter_msd);
        assert_eq!(trace.comb_msd, rec.comb_msd);
    }

    #[test]
    fn divergence_reports_context_or_is_excluded() {
        let mut cfg = small(3);
        cfg.filters[0].mu = 5.0;
        match run_ensemble(&cfg) {
            Err(Error::Divergence { run, filter, .. }) => {
                assert_eq!(run, 0);
                assert_eq!(filter, 1);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
        cfg.exclude_divergent = true;
        assert!(matches!(run_ensemble(&cfg), Err(Error::Contract(_))));
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = small(1);
        cfg.runs = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = small(1);
        cfg.combiner = CombinerKind::GradSigmoid { mu_c: 10.0 };
        assert!(cfg.validate().is_err());
        let mut cfg = small(1);
        cfg.filters.push(cfg.filters[0]);
        assert!(cfg.validate().is_err());
        cfg.combiner = CombinerKind::SoftmaxM { lambda_f: crate::combiner::DEFAULT_FORGETTING };
        assert!(cfg.validate().is_ok());
        cfg.steady_window = 1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_shape_and_order() {
        let cfg = small(2);
        let t = kappa_sweep(&cfg, &[1e-4, 0.0, 1e-5], &[20.0]).unwrap();
        assert_eq!(t.kappas, vec![0.0, 1e-5, 1e-4]);
        assert_eq!(t.msd.len(), 1);
        assert_eq!(t.msd[0].len(), 3);
        assert!(kappa_sweep(&cfg, &[], &[20.0]).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1e-6, 1e-4, 3);
        assert!((g[0] - 1e-6).abs() < 1e-18);
        assert!((g[1] - 1e-5).abs() < 1e-17);
        assert!((g[2] - 1e-4).abs() < 1e-16);
    }
}

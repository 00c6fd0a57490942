//! Sparse system identification with combinations of l0-LMS adaptive filters.
//!
//! * [`filter`]: LMS / l0-LMS kernels with masked (partial) coefficient updates.
//! * [`schedule`]: tap subsets and their rotation across filters and iterations.
//! * [`combiner`]: sigmoid-gradient, least-squares and softmax output mixing.
//! * [`sim`]: unknown systems, white Gaussian input, piecewise-constant SNR noise.
//! * [`harness`]: seeded Monte-Carlo ensembles, steady-state summaries, kappa sweeps.
//! * [`presets`], [`config`], [`report`]: named experiments, config files and CSV output.

pub mod combiner;
pub mod config;
pub mod error;
pub mod filter;
pub mod harness;
pub mod presets;
pub mod report;
pub mod schedule;
pub mod sim;

pub use combiner::{
    batch_lambda_opt, combine2, rls_gain2, rls_step2_direct, sigmoid_lambda, softmax_weights,
    DirectStep, RlsCombiner2, SigmoidCombiner, SoftmaxCombinerM,
};
pub use config::{apply_overrides, parse_config, parse_override, serialize_config};
pub use error::{Error, Result};
pub use filter::{f_beta, msd, FilterParams, FilterState, StepOutput};
pub use harness::{
    kappa_sweep, run_ensemble, run_single, steady_state_msd, to_db, CombinerKind,
    ExperimentConfig, MsdTrace, RunRecord, ScenarioSpec, SteadyRow, SweepTable, SystemSpec,
};
pub use presets::{preset, preset_variants, sweep_grid, Scale, Variant, PRESET_NAMES};
pub use report::{emit_csv, emit_steady_csv, emit_sweep_csv};
pub use schedule::{even_exclusive_masks, uneven_masks, ScheduleKind, SchedulePolicy, UpdateMask};
pub use sim::{
    make_near_sparse, make_sparse_system, noise_variance_for_snr, RngSpec, Scenario, SignalSource,
    SnrSegment,
};

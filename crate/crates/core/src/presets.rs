//! Named experiment setups at two scales.
//!
//! `paper` reproduces the published protocols (128 taps, five unit taps,
//! 15000-18000 iterations, 100 runs) except for the step size, which is set
//! to about a third of the LMS stability bound `2 / (L sigma_x^2)`.
//! `desk` shrinks everything to run in seconds: 32 taps, two unit taps,
//! 2000-4000 iterations, 25-50 runs, with `mu` and `kappa` rescaled together.

use std::fmt;
use std::str::FromStr;

use crate::combiner::DEFAULT_FORGETTING;
use crate::error::{Error, Result};
use crate::filter::FilterParams;
use crate::harness::{log_grid, CombinerKind, ExperimentConfig, ScenarioSpec, SystemSpec};
use crate::schedule::ScheduleKind;
use crate::sim::SnrSegment;

pub const PRESET_NAMES: [&str; 6] = ["exp1", "exp2", "exp3", "exp4", "pu_compare", "uneven"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Paper,
    Desk,
}

impl FromStr for Scale {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Scale::Paper),
            "desk" => Ok(Scale::Desk),
            other => Err(Error::contract(format!(
                "unknown scale `{other}` (expected paper or desk)"
            ))),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scale::Paper => "paper",
            Scale::Desk => "desk",
        })
    }
}

/// Per-scale constants.
#[derive(Debug, Clone, Copy)]
struct Dims {
    len: usize,
    active: usize,
    mu: f64,
    /// Multiplies every published `kappa` of the combination experiments.
    kappa_scale: f64,
    /// Multiplies the `[1e-6, 1e-4]` sweep range.
    sweep_scale: f64,
    /// Length of one SNR segment of the time-varying schedule.
    segment: usize,
    /// Horizon of fixed-SNR experiments.
    fixed_horizon: usize,
    runs: usize,
    /// `mu_c` of the gradient combiner is multiplied by this.
    mu_c_scale: f64,
    near_sparse_eps: f64,
}

fn dims(scale: Scale) -> Dims {
    match scale {
        Scale::Paper => Dims {
            len: 128,
            active: 5,
            mu: 0.005,
            kappa_scale: 1.0,
            sweep_scale: 1.0,
            segment: 6000,
            fixed_horizon: 15_000,
            runs: 100,
            mu_c_scale: 1.0,
            near_sparse_eps: 0.01,
        },
        Scale::Desk => Dims {
            len: 32,
            active: 2,
            mu: 0.02,
            kappa_scale: DESK_KAPPA_SCALE,
            sweep_scale: 1.0,
            segment: 1333,
            fixed_horizon: 3000,
            runs: 50,
            mu_c_scale: DESK_MU_C_SCALE,
            near_sparse_eps: 0.01,
        },
    }
}

/// With 32 taps and 4000 iterations the sigmoid combiner cannot re-track a
/// switch away from the filter that won the initial transient, so the desk
/// pair is placed where the larger `kappa` is the better filter at every SNR.
pub const DESK_KAPPA_SCALE: f64 = 0.01;
pub const DESK_MU_C_SCALE: f64 = 1.0;

/// A labelled member of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub label: String,
    pub config: ExperimentConfig,
}

fn base(d: &Dims) -> ExperimentConfig {
    ExperimentConfig {
        scenario: ScenarioSpec {
            system: SystemSpec {
                len: d.len,
                active_taps: d.active,
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
            horizon: d.fixed_horizon,
        },
        filters: vec![FilterParams::l0(d.mu, 1e-5 * d.kappa_scale)],
        policy: ScheduleKind::FullUpdate,
        combiner: CombinerKind::None,
        runs: d.runs,
        ..ExperimentConfig::default()
    }
}

fn filters(d: &Dims, kappas: &[f64]) -> Vec<FilterParams> {
    kappas
        .iter()
        .map(|k| FilterParams::l0(d.mu, k * d.kappa_scale))
        .collect()
}

fn varying_schedule(d: &Dims) -> (Vec<SnrSegment>, usize) {
    let s = [60.0, 40.0, 20.0]
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| SnrSegment {
            start: i * d.segment,
            snr_db,
        })
        .collect();
    (s, 3 * d.segment)
}

fn fixed(cfg: &ExperimentConfig, d: &Dims, snr_db: f64) -> ExperimentConfig {
    let mut cfg = cfg.clone();
    cfg.scenario.set_fixed_snr(snr_db);
    cfg.scenario.horizon = d.fixed_horizon;
    cfg
}

fn near_sparse(cfg: &ExperimentConfig, d: &Dims) -> ExperimentConfig {
    let mut cfg = cfg.clone();
    cfg.scenario.system.near_sparse_eps = Some(d.near_sparse_eps);
    cfg
}

fn v(label: impl Into<String>, config: ExperimentConfig) -> Variant {
    Variant {
        label: label.into(),
        config,
    }
}

const EXP2_KAPPAS: [f64; 2] = [5e-5, 5e-6];
const EXP4_KAPPAS: [f64; 4] = [0.0, 1e-6, 1e-5, 5e-5];

fn exp2(d: &Dims) -> ExperimentConfig {
    let mut cfg = base(d);
    let (schedule, horizon) = varying_schedule(d);
    cfg.scenario.snr_schedule = schedule;
    cfg.scenario.horizon = horizon;
    cfg.filters = filters(d, &EXP2_KAPPAS);
    cfg.combiner = CombinerKind::GradSigmoid {
        mu_c: 3000.0 * d.mu_c_scale,
    };
    cfg
}

fn exp4(d: &Dims, snr_db: f64) -> ExperimentConfig {
    let mut cfg = base(d);
    cfg.scenario.set_fixed_snr(snr_db);
    cfg.filters = filters(d, &EXP4_KAPPAS);
    cfg.policy = ScheduleKind::ExclusiveRotating;
    cfg.combiner = CombinerKind::SoftmaxM {
        lambda_f: DEFAULT_FORGETTING,
    };
    cfg
}

/// All labelled configurations of a preset; the first is the primary one.
pub fn preset_variants(name: &str, scale: Scale) -> Result<Vec<Variant>> {
    let d = dims(scale);
    Ok(match name {
        "exp1" => {
            let (_, snrs) = sweep_grid(scale);
            snrs.iter()
                .map(|&snr| {
                    let mut cfg = base(&d);
                    cfg.scenario.set_fixed_snr(snr);
                    v(format!("exp1_{snr}db"), cfg)
                })
                .collect()
        }
        "exp2" => vec![v("exp2", exp2(&d))],
        "exp3" => {
            let mut pu = exp2(&d);
            pu.policy = ScheduleKind::ExclusiveRotating;
            let combiners = [
                ("rls2", CombinerKind::Rls2 { beta_f: DEFAULT_FORGETTING }),
                ("grad1000", CombinerKind::GradSigmoid { mu_c: 1000.0 * d.mu_c_scale }),
                ("grad10000", CombinerKind::GradSigmoid { mu_c: 10000.0 * d.mu_c_scale }),
            ];
            let mut out = Vec::new();
            for (tag, snr) in [("tv", None), ("20db", Some(20.0)), ("40db", Some(40.0))] {
                let cfg = match snr {
                    Some(s) => fixed(&pu, &d, s),
                    None => pu.clone(),
                };
                for (cname, kind) in combiners {
                    let mut c = cfg.clone();
                    c.combiner = kind;
                    out.push(v(format!("exp3_{tag}_{cname}"), c));
                }
            }
            out
        }
        "exp4" => {
            let mut out: Vec<Variant> = [20.0, 40.0, 60.0]
                .iter()
                .map(|&snr| v(format!("exp4_{snr}db"), exp4(&d, snr)))
                .collect();
            out.push(v("exp4_40db_near_sparse", near_sparse(&exp4(&d, 40.0), &d)));
            out
        }
        "pu_compare" => [
            ScheduleKind::ExclusiveRotating,
            ScheduleKind::FullUpdate,
            ScheduleKind::SameSubsetRotating,
        ]
        .iter()
        .map(|&kind| {
            let mut cfg = near_sparse(&exp4(&d, 20.0), &d);
            cfg.policy = kind;
            v(format!("pu_compare_{}", kind.name()), cfg)
        })
        .collect(),
        "uneven" => {
            let mut out: Vec<Variant> = [20.0, 40.0, 60.0]
                .iter()
                .map(|&snr| {
                    let mut cfg = exp4(&d, snr);
                    cfg.policy = ScheduleKind::UnevenRotating;
                    v(format!("uneven_{snr}db"), cfg)
                })
                .collect();
            let mut ns = near_sparse(&exp4(&d, 40.0), &d);
            ns.policy = ScheduleKind::UnevenRotating;
            out.push(v("uneven_40db_near_sparse", ns));
            out
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// The primary configuration of a preset.
pub fn preset(name: &str, scale: Scale) -> Result<ExperimentConfig> {
    Ok(preset_variants(name, scale)?.swap_remove(0).config)
}

/// Default `(kappa grid, SNR list)` of the attraction-intensity sweep.
pub fn sweep_grid(scale: Scale) -> (Vec<f64>, Vec<f64>) {
    let d = dims(scale);
    let points = match scale {
        Scale::Paper => 25,
        Scale::Desk => 16,
    };
    (
        log_grid(1e-6 * d.sweep_scale, 1e-4 * d.sweep_scale, points),
        vec![10.0, 20.0, 30.0, 40.0],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp2_paper_schedule() {
        let cfg = preset("exp2", Scale::Paper).unwrap();
        let s: Vec<(usize, f64)> = cfg
            .scenario
            .snr_schedule
            .iter()
            .map(|s| (s.start, s.snr_db))
            .collect();
        assert_eq!(s, vec![(0, 60.0), (6000, 40.0), (12000, 20.0)]);
        assert_eq!(cfg.scenario.horizon, 18000);
        assert_eq!(cfg.runs, 100);
        assert_eq!(cfg.combiner, CombinerKind::GradSigmoid { mu_c: 3000.0 });
        let k: Vec<f64> = cfg.filters.iter().map(|f| f.kappa).collect();
        assert_eq!(k, vec![5e-5, 5e-6]);
    }

    #[test]
    fn exp1_paper() {
        let cfg = preset("exp1", Scale::Paper).unwrap();
        assert_eq!(cfg.filters[0].mu, 0.005);
        assert_eq!(cfg.filters[0].beta, 10.0);
        assert_eq!(cfg.scenario.horizon, 15000);
        assert_eq!(cfg.scenario.system.len, 128);
        assert_eq!(cfg.scenario.system.active_taps, 5);
        let (kappas, snrs) = sweep_grid(Scale::Paper);
        assert_eq!(snrs, vec![10.0, 20.0, 30.0, 40.0]);
        assert!((kappas[0] - 1e-6).abs() < 1e-18);
        assert!((kappas.last().unwrap() - 1e-4).abs() < 1e-16);
    }

    #[test]
    fn exp4_paper_filters() {
        let cfg = preset("exp4", Scale::Paper).unwrap();
        let k: Vec<f64> = cfg.filters.iter().map(|f| f.kappa).collect();
        assert_eq!(k, vec![0.0, 1e-6, 1e-5, 5e-5]);
        assert!(matches!(cfg.combiner, CombinerKind::SoftmaxM { .. }));
        let vars = preset_variants("exp4", Scale::Paper).unwrap();
        assert!(vars.iter().any(|v| v.config.scenario.system.near_sparse_eps.is_some()));
    }

    #[test]
    fn every_preset_is_valid_at_both_scales() {
        for name in PRESET_NAMES {
            for scale in [Scale::Paper, Scale::Desk] {
                for var in preset_variants(name, scale).unwrap() {
                    var.config.validate().unwrap();
                    if scale == Scale::Desk {
                        assert_eq!(var.config.scenario.system.len, 32);
                        assert!((2000..=4000).contains(&var.config.scenario.horizon));
                        assert!((25..=50).contains(&var.config.runs));
                    }
                }
            }
        }
        assert!(sweep_grid(Scale::Desk).0.len() <= 16);
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(preset("exp9", Scale::Desk), Err(Error::UnknownPreset(_))));
        assert!("huge".parse::<Scale>().is_err());
    }
}

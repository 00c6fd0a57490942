//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! preset = "exp2"          # optional base; applied before every other key
//! scale = "desk"           # paper (default) or desk
//! scenario.horizon = 3600
//! snr.segments = "0:60,1200:40,2400:20"
//! filters.count = 2
//! filters.2.kappa = 5e-6
//! combiner = "rls2"
//! ```
//!
//! Keys:
//!
//! | key | value |
//! |-----|-------|
//! | `preset`, `scale` | preset name, `paper`/`desk` |
//! | `scenario.length`, `scenario.active_taps`, `scenario.tap_value` | unknown system |
//! | `scenario.placement_seed`, `scenario.near_sparse_eps` (`none` or > 0), `scenario.near_sparse_seed` | |
//! | `scenario.input_variance`, `scenario.horizon` | |
//! | `snr.segments` | `start:snr_db` pairs, comma separated |
//! | `filters.count`, `filters.K.mu`, `filters.K.kappa`, `filters.K.beta` | `K` is 1-based |
//! | `policy` | `full`, `exclusive`, `same`, `uneven` |
//! | `combiner` | `grad`, `rls2`, `softmax`, `none` |
//! | `combiner.mu_c`, `combiner.forgetting`, `combiner.delta` | |
//! | `runs`, `seed`, `steady_window`, `exclude_divergent` | |
//!
//! Increasing `filters.count` appends copies of the last filter.

use std::fmt::Write as _;

use crate::combiner::DEFAULT_FORGETTING;
use crate::error::{Error, Result};
use crate::harness::{CombinerKind, ExperimentConfig};
use crate::presets::{preset, Scale};
use crate::schedule::ScheduleKind;
use crate::sim::SnrSegment;

const DEFAULT_MU_C: f64 = 3000.0;

/// Config under construction; combiner parameters are kept apart from the kind.
struct Draft {
    cfg: ExperimentConfig,
    combiner: String,
    mu_c: f64,
    forgetting: f64,
}

impl Draft {
    fn from_config(cfg: ExperimentConfig) -> Self {
        let (mu_c, forgetting) = match cfg.combiner {
            CombinerKind::GradSigmoid { mu_c } => (mu_c, DEFAULT_FORGETTING),
            CombinerKind::Rls2 { beta_f } => (DEFAULT_MU_C, beta_f),
            CombinerKind::SoftmaxM { lambda_f } => (DEFAULT_MU_C, lambda_f),
            CombinerKind::None => (DEFAULT_MU_C, DEFAULT_FORGETTING),
        };
        Draft {
            combiner: cfg.combiner.name().to_string(),
            cfg,
            mu_c,
            forgetting,
        }
    }

    fn finish(mut self) -> Result<ExperimentConfig> {
        self.cfg.combiner = match self.combiner.as_str() {
            "grad" => CombinerKind::GradSigmoid { mu_c: self.mu_c },
            "rls2" => CombinerKind::Rls2 {
                beta_f: self.forgetting,
            },
            "softmax" => CombinerKind::SoftmaxM {
                lambda_f: self.forgetting,
            },
            _ => CombinerKind::None,
        };
        self.cfg.validate().map_err(|e| Error::Config {
            line: 0,
            key: "<config>".into(),
            message: e.to_string(),
        })?;
        Ok(self.cfg)
    }

    fn set(&mut self, key: &str, raw: &str, line: usize) -> Result<()> {
        let v = Value { key, raw, line };
        let sys = &mut self.cfg.scenario.system;
        match key {
            "scenario.length" => sys.len = v.int_min(1)?,
            "scenario.active_taps" => sys.active_taps = v.int_min(1)?,
            "scenario.tap_value" => sys.tap_value = v.float_where(|x| x != 0.0, "nonzero")?,
            "scenario.placement_seed" => sys.placement_seed = v.u64()?,
            "scenario.near_sparse_eps" => {
                sys.near_sparse_eps = if v.text() == "none" {
                    None
                } else {
                    Some(v.float_where(|x| x > 0.0, "> 0 or `none`")?)
                }
            }
            "scenario.near_sparse_seed" => sys.near_sparse_seed = v.u64()?,
            "scenario.input_variance" => {
                self.cfg.scenario.input_variance = v.float_where(|x| x > 0.0, "> 0")?
            }
            "scenario.horizon" => self.cfg.scenario.horizon = v.int_min(1)?,
            "snr.segments" => self.cfg.scenario.snr_schedule = v.segments()?,
            "filters.count" => {
                let count = v.int_min(1)?;
                let last = *self.cfg.filters.last().expect("config has filters");
                self.cfg.filters.resize(count, last);
            }
            "policy" => {
                self.cfg.policy = ScheduleKind::from_name(v.text())
                    .ok_or_else(|| v.err("expected one of full, exclusive, same, uneven"))?
            }
            "combiner" => {
                let name = v.text();
                if !["grad", "rls2", "softmax", "none"].contains(&name) {
                    return Err(v.err("expected one of grad, rls2, softmax, none"));
                }
                self.combiner = name.to_string();
            }
            "combiner.mu_c" => self.mu_c = v.float_where(|x| x > 0.0, "> 0")?,
            "combiner.forgetting" => {
                self.forgetting = v.float_where(|x| x > 0.0 && x <= 1.0, "in (0, 1]")?
            }
            "combiner.delta" => self.cfg.delta = v.float_where(|x| x > 0.0, "> 0")?,
            "runs" => self.cfg.runs = v.int_min(1)?,
            "seed" => self.cfg.base_seed = v.u64()?,
            "steady_window" => {
                self.cfg.steady_window = v.float_where(|x| x > 0.0 && x < 1.0, "in (0, 1)")?
            }
            "exclude_divergent" => self.cfg.exclude_divergent = v.bool()?,
            _ => return self.set_filter(key, &v),
        }
        Ok(())
    }

    fn set_filter(&mut self, key: &str, v: &Value) -> Result<()> {
        let unknown = || v.err("unknown key");
        let rest = key.strip_prefix("filters.").ok_or_else(unknown)?;
        let (index, field) = rest.split_once('.').ok_or_else(unknown)?;
        let k: usize = index.parse().map_err(|_| unknown())?;
        let count = self.cfg.filters.len();
        if k < 1 || k > count {
            return Err(v.err(&format!(
                "filter index {k} out of range 1..={count}; set filters.count first"
            )));
        }
        let f = &mut self.cfg.filters[k - 1];
        match field {
            "mu" => f.mu = v.float_where(|x| x > 0.0, "> 0")?,
            "kappa" => f.kappa = v.float_where(|x| x >= 0.0, ">= 0")?,
            "beta" => f.beta = v.float_where(|x| x > 0.0, "> 0")?,
            _ => return Err(unknown()),
        }
        Ok(())
    }
}

struct Value<'a> {
    key: &'a str,
    raw: &'a str,
    line: usize,
}

impl Value<'_> {
    fn err(&self, message: &str) -> Error {
        Error::Config {
            line: self.line,
            key: self.key.to_string(),
            message: message.to_string(),
        }
    }

    fn text(&self) -> &str {
        unquote(self.raw)
    }

    fn float(&self) -> Result<f64> {
        self.text()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.err(&format!("expected a number, got `{}`", self.raw)))
    }

    fn float_where(&self, ok: impl Fn(f64) -> bool, what: &str) -> Result<f64> {
        let x = self.float()?;
        if ok(x) {
            Ok(x)
        } else {
            Err(self.err(&format!("must be {what}, got {x}")))
        }
    }

    fn u64(&self) -> Result<u64> {
        self.text()
            .parse()
            .map_err(|_| self.err(&format!("expected a non-negative integer, got `{}`", self.raw)))
    }

    fn int_min(&self, min: usize) -> Result<usize> {
        let n: usize = self
            .text()
            .parse()
            .map_err(|_| self.err(&format!("expected an integer, got `{}`", self.raw)))?;
        if n < min {
            return Err(self.err(&format!("must be >= {min}, got {n}")));
        }
        Ok(n)
    }

    fn bool(&self) -> Result<bool> {
        match self.text() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.err(&format!("expected true or false, got `{other}`"))),
        }
    }

    fn segments(&self) -> Result<Vec<SnrSegment>> {
        self.text()
            .split(',')
            .map(|part| {
                let (start, snr) = part
                    .trim()
                    .split_once(':')
                    .ok_or_else(|| self.err("expected `start:snr_db` pairs"))?;
                let start = start
                    .trim()
                    .parse()
                    .map_err(|_| self.err(&format!("bad segment start `{start}`")))?;
                let snr_db = snr
                    .trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| self.err(&format!("bad segment SNR `{snr}`")))?;
                Ok(SnrSegment { start, snr_db })
            })
            .collect()
    }
}

fn unquote(s: &str) -> &str {
    s.strip_prefix('"')
        .and_then(|s| s.strip_suffix('"'))
        .unwrap_or(s)
}

/// `(line, key, value)` triples of a document; blank and comment lines are skipped.
fn entries(text: &str) -> Result<Vec<(usize, &str, &str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = strip_comment(raw).trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Config {
            line,
            key: content.to_string(),
            message: "expected `key = value`".into(),
        })?;
        out.push((line, key.trim(), value.trim()));
    }
    Ok(out)
}

/// Drops a `#` comment that is not inside double quotes.
fn strip_comment(line: &str) -> &str {
    let mut quoted = false;
    for (i, c) in line.char_indices() {
        match c {
            '"' => quoted = !quoted,
            '#' if !quoted => return &line[..i],
            _ => {}
        }
    }
    line
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let entries = entries(text)?;
    let mut preset_name = None;
    let mut scale = Scale::Paper;
    for &(line, key, value) in &entries {
        match key {
            "preset" => preset_name = Some((line, unquote(value))),
            "scale" => {
                scale = unquote(value).parse().map_err(|e: Error| Error::Config {
                    line,
                    key: key.into(),
                    message: e.to_string(),
                })?
            }
            _ => {}
        }
    }
    let base = match preset_name {
        Some((line, name)) => preset(name, scale).map_err(|e| Error::Config {
            line,
            key: "preset".into(),
            message: e.to_string(),
        })?,
        None => ExperimentConfig::default(),
    };
    let mut draft = Draft::from_config(base);
    for (line, key, value) in entries {
        if key == "preset" || key == "scale" {
            continue;
        }
        draft.set(key, value, line)?;
    }
    draft.finish()
}

/// Applies `key=value` overrides on top of a config, in order.
pub fn apply_overrides(cfg: ExperimentConfig, overrides: &[(String, String)]) -> Result<ExperimentConfig> {
    let mut draft = Draft::from_config(cfg);
    for (key, value) in overrides {
        if key == "preset" || key == "scale" {
            return Err(Error::Config {
                line: 0,
                key: key.clone(),
                message: "cannot be overridden".into(),
            });
        }
        draft.set(key.trim(), value.trim(), 0)?;
    }
    draft.finish()
}

/// Splits `key=value`.
pub fn parse_override(s: &str) -> Result<(String, String)> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| Error::Config {
            line: 0,
            key: s.to_string(),
            message: "override must look like key=value".into(),
        })
}

/// Writes every field of `cfg` as a self-contained document.
pub fn serialize_config(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let sys = &cfg.scenario.system;
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("scenario.length", sys.len.to_string());
    put("scenario.active_taps", sys.active_taps.to_string());
    put("scenario.tap_value", format!("{:?}", sys.tap_value));
    put("scenario.placement_seed", sys.placement_seed.to_string());
    put(
        "scenario.near_sparse_eps",
        sys.near_sparse_eps
            .map_or_else(|| "none".to_string(), |e| format!("{e:?}")),
    );
    put("scenario.near_sparse_seed", sys.near_sparse_seed.to_string());
    put(
        "scenario.input_variance",
        format!("{:?}", cfg.scenario.input_variance),
    );
    put("scenario.horizon", cfg.scenario.horizon.to_string());
    let segments: Vec<String> = cfg
        .scenario
        .snr_schedule
        .iter()
        .map(|s| format!("{}:{:?}", s.start, s.snr_db))
        .collect();
    put("snr.segments", format!("\"{}\"", segments.join(",")));
    put("filters.count", cfg.filters.len().to_string());
    for (i, f) in cfg.filters.iter().enumerate() {
        let k = i + 1;
        put(&format!("filters.{k}.mu"), format!("{:?}", f.mu));
        put(&format!("filters.{k}.kappa"), format!("{:?}", f.kappa));
        put(&format!("filters.{k}.beta"), format!("{:?}", f.beta));
    }
    put("policy", format!("\"{}\"", cfg.policy.name()));
    put("combiner", format!("\"{}\"", cfg.combiner.name()));
    match cfg.combiner {
        CombinerKind::GradSigmoid { mu_c } => put("combiner.mu_c", format!("{mu_c:?}")),
        CombinerKind::Rls2 { beta_f: f } | CombinerKind::SoftmaxM { lambda_f: f } => {
            put("combiner.forgetting", format!("{f:?}"))
        }
        CombinerKind::None => {}
    }
    put("combiner.delta", format!("{:?}", cfg.delta));
    put("runs", cfg.runs.to_string());
    put("seed", cfg.base_seed.to_string());
    put("steady_window", format!("{:?}", cfg.steady_window));
    put("exclude_divergent", cfg.exclude_divergent.to_string());
    out
}

//! `l0combo` command-line front end.
//!
//! Exit status: 0 on success, 2 for usage and configuration errors, 3 when a
//! filter diverges, 4 for I/O failures.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use l0combo::harness::log_grid;
use l0combo::report::{steady_table, sweep_table};
use l0combo::{
    apply_overrides, emit_csv, emit_steady_csv, emit_sweep_csv, kappa_sweep, parse_config,
    parse_override, preset_variants, run_ensemble, serialize_config, steady_state_msd, sweep_grid,
    Error, ExperimentConfig, Scale, Variant, PRESET_NAMES,
};

#[derive(Parser)]
#[command(name = "l0combo", version, about = "Monte-Carlo simulator for combinations of l0-LMS filters")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every variant of a preset (or one config file) and write learning curves.
    Run {
        #[command(flatten)]
        source: Source,
        /// Also run a full-update plain LMS filter on the same streams.
        #[arg(long)]
        lms_baseline: bool,
    },
    /// Steady-state MSD of a single filter over a kappa grid and several SNRs.
    Sweep {
        #[command(flatten)]
        source: Source,
        /// Number of log-spaced kappa values.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        kappa_min: Option<f64>,
        #[arg(long)]
        kappa_max: Option<f64>,
        /// Comma-separated SNR values in dB.
        #[arg(long, value_delimiter = ',')]
        snr: Option<Vec<f64>>,
    },
    /// List preset names and their variants.
    PresetsList,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "input")]
struct Input {
    /// Named preset.
    #[arg(long)]
    preset: Option<String>,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct Source {
    #[command(flatten)]
    input: Input,
    /// Preset scale (ignored with --config, which sets its own).
    #[arg(long, default_value = "paper")]
    scale: Scale,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Base seed of the run ensemble.
    #[arg(long)]
    seed: Option<u64>,
    /// `key=value` override applied after loading; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Source {
    /// Loaded variants with overrides and the seed applied.
    fn variants(&self) -> Result<Vec<Variant>, Error> {
        let loaded = match (&self.input.preset, &self.input.config) {
            (Some(name), None) => preset_variants(name, self.scale)?,
            (None, Some(path)) => {
                let text = fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                let label = path
                    .file_stem()
                    .map_or_else(|| "config".to_string(), |s| s.to_string_lossy().into_owned());
                vec![Variant {
                    label,
                    config: parse_config(&text)?,
                }]
            }
            _ => unreachable!("clap enforces exactly one input"),
        };
        let overrides = self
            .overrides
            .iter()
            .map(|s| parse_override(s))
            .collect::<Result<Vec<_>, _>>()?;
        loaded
            .into_iter()
            .map(|v| {
                let mut config = apply_overrides(v.config, &overrides)?;
                if let Some(seed) = self.seed {
                    config.base_seed = seed;
                }
                Ok(Variant { config, ..v })
            })
            .collect()
    }

    fn out_dir(&self) -> Result<&Path, Error> {
        fs::create_dir_all(&self.out).map_err(|source| Error::Io {
            path: self.out.clone(),
            source,
        })?;
        Ok(&self.out)
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run_one(label: &str, cfg: &ExperimentConfig, out: &Path) -> Result<(), Error> {
    let trace = run_ensemble(cfg)?;
    let rows = steady_state_msd(&trace, cfg.steady_window);
    emit_csv(&trace, &out.join(format!("{label}.csv")))?;
    emit_steady_csv(&rows, &out.join(format!("{label}_steady.csv")))?;
    write_text(&out.join(format!("{label}.cfg")), &serialize_config(cfg))?;
    println!("{}", steady_table(label, &rows));
    if trace.runs_diverged > 0 {
        println!("  {} of {} runs diverged and were excluded", trace.runs_diverged, cfg.runs);
    }
    if trace.saturations > 0 {
        println!("  inverse-energy ceiling reached {} times", trace.saturations);
    }
    Ok(())
}

fn cmd_run(source: &Source, lms_baseline: bool) -> Result<(), Error> {
    let variants = source.variants()?;
    let out = source.out_dir()?;
    for v in &variants {
        run_one(&v.label, &v.config, out)?;
        if lms_baseline {
            run_one(&format!("{}_lms", v.label), &v.config.lms_baseline(), out)?;
        }
    }
    Ok(())
}

fn cmd_sweep(
    source: &Source,
    points: Option<usize>,
    kappa_min: Option<f64>,
    kappa_max: Option<f64>,
    snr: Option<Vec<f64>>,
) -> Result<(), Error> {
    let base = source.variants()?.swap_remove(0).config;
    let (default_grid, default_snrs) = sweep_grid(source.scale);
    let kappas = if points.is_some() || kappa_min.is_some() || kappa_max.is_some() {
        let lo = kappa_min.unwrap_or(default_grid[0]);
        let hi = kappa_max.unwrap_or(default_grid[default_grid.len() - 1]);
        let n = points.unwrap_or(default_grid.len());
        if !(lo > 0.0 && hi >= lo && n > 0) {
            return Err(Error::Config {
                line: 0,
                key: "--kappa-min/--kappa-max/--points".into(),
                message: format!("need 0 < min <= max and points > 0, got {lo}, {hi}, {n}"),
            });
        }
        log_grid(lo, hi, n)
    } else {
        default_grid
    };
    let snrs = snr.unwrap_or(default_snrs);
    let table = kappa_sweep(&base, &kappas, &snrs)?;
    let out = source.out_dir()?;
    emit_sweep_csv(&table, &out.join("sweep.csv"))?;
    print!("{}", sweep_table(&table));
    Ok(())
}

fn cmd_presets_list() -> Result<(), Error> {
    for name in PRESET_NAMES {
        let labels: Vec<String> = preset_variants(name, Scale::Desk)?
            .into_iter()
            .map(|v| v.label)
            .collect();
        println!("{name:<12} {}", labels.join(" "));
    }
    Ok(())
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Divergence { .. } => 3,
        Error::Io { .. } => 4,
        Error::Config { .. } | Error::UnknownPreset(_) | Error::Contract(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run {
            source,
            lms_baseline,
        } => cmd_run(source, *lms_baseline),
        Command::Sweep {
            source,
            points,
            kappa_min,
            kappa_max,
            snr,
        } => cmd_sweep(source, *points, *kappa_min, *kappa_max, snr.clone()),
        Command::PresetsList => cmd_presets_list(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

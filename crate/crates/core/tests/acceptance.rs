//! Acceptance report: one PASS/FAIL line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p l0combo --test acceptance`. Tolerances are the
//! constants below; the desk-scale experiments use the shipped presets.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use l0combo::combiner::SATURATION_CEILING;
use l0combo::harness::InvariantStats;
use l0combo::report::{write_steady, write_trace};
use l0combo::{
    even_exclusive_masks, kappa_sweep, preset, preset_variants, rls_step2_direct, run_ensemble,
    run_single, steady_state_msd, sweep_grid, to_db, ExperimentConfig, MsdTrace, Scale,
    ScheduleKind, SchedulePolicy, SigmoidCombiner, SteadyRow, PRESET_NAMES,
};

const ORACLE_REL_TOL: f64 = 1e-8;
const GRADIENT_REL_TOL: f64 = 1e-6;
const U_SHAPE_DB: f64 = 3.0;
const TRACK_BEST_DB: f64 = 1.0;
const BEAT_WORSE_DB: f64 = 3.0;
const LMS_GAP_DB: f64 = 3.0;
const RLS_VS_GRAD_DB: f64 = 1.0;
const SOFTMAX_VS_BEST_DB: f64 = 1.5;
const WEIGHT_SUM_TOL: f64 = 1e-12;
const ENVELOPE_TOL: f64 = 1e-12;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

/// Invariant statistics of every ensemble produced while checking the other criteria.
#[derive(Default)]
struct Seen {
    traces: usize,
    worst: InvariantStats,
}

impl Seen {
    fn ensemble(&mut self, cfg: &ExperimentConfig) -> MsdTrace {
        let trace = run_ensemble(cfg).expect("acceptance run failed");
        let s = &trace.invariants;
        self.worst.weight_range_excess = self.worst.weight_range_excess.max(s.weight_range_excess);
        self.worst.weight_sum_error = self.worst.weight_sum_error.max(s.weight_sum_error);
        self.worst.envelope_excess = self.worst.envelope_excess.max(s.envelope_excess);
        self.traces += 1;
        trace
    }

    fn steady(&mut self, cfg: &ExperimentConfig) -> Vec<SteadyRow> {
        let trace = self.ensemble(cfg);
        steady_state_msd(&trace, cfg.steady_window)
    }
}

fn c1_oracle_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for &beta_f in &[1.0, 0.99, 0.9] {
        for seq in 0..100 {
            let (y1, y2, d) = random_histories(1000 + seq, 200);
            let mut lam = 0.0;
            let mut r = SATURATION_CEILING;
            for n in 0..y1.len() {
                let s = rls_step2_direct(lam, r, y1[n], y2[n], d[n], beta_f);
                lam = s.lam;
                r = s.r_in;
            }
            let want = regularized_lambda(&y1, &y2, &d, beta_f, 0.0, SATURATION_CEILING);
            worst = worst.max(rel_err(lam, want));
        }
    }
    outcome(
        worst < ORACLE_REL_TOL,
        format!("max relative error {worst:.2e} (< {ORACLE_REL_TOL:.0e})"),
    )
}

fn c2_gradient_check() -> Outcome {
    let (y1, y2, d) = random_histories(5, 50);
    let mu_c = 1e-3;
    let mut worst: f64 = 0.0;
    for a in [-2.0, 0.0, 2.0] {
        for i in 0..y1.len() {
            let mut c = SigmoidCombiner::new(mu_c).unwrap().with_a(a);
            let lam = c.lambda();
            let e = d[i] - (lam * y1[i] + (1.0 - lam) * y2[i]);
            c.grad_step(e, y1[i], y2[i]);
            let analytic = -(c.a() - a) / mu_c;
            let numeric = central_diff(|t| half_sq_error(t, y1[i], y2[i], d[i]), a, 1e-5);
            worst = worst.max(rel_err(analytic, numeric));
        }
    }
    outcome(
        worst < GRADIENT_REL_TOL,
        format!("max relative error {worst:.2e} (< {GRADIENT_REL_TOL:.0e})"),
    )
}

fn c3_partition_rotation() -> Outcome {
    let mut checked = 0;
    for len in 1..=64usize {
        for m in 1..=len.min(8) {
            let masks = even_exclusive_masks(len, m).unwrap();
            let partition = (0..len).all(|i| masks.iter().filter(|x| x.bits()[i]).count() == 1);
            let p = SchedulePolicy::new(ScheduleKind::ExclusiveRotating, m, len).unwrap();
            let once_per_cycle = (0..2 * m).all(|start| {
                (1..=m).all(|k| {
                    let mut hits = vec![0; len];
                    for n in start..start + m {
                        p.mask_for(k, n).indices().for_each(|i| hits[i] += 1);
                    }
                    hits.iter().all(|&h| h == 1)
                })
            });
            let disjoint = (0..3 * m).all(|n| {
                (0..len).all(|i| (1..=m).filter(|&k| p.mask_for(k, n).bits()[i]).count() == 1)
            });
            if !(partition && once_per_cycle && disjoint) {
                return outcome(false, format!("fails at L={len} M={m}"));
            }
            checked += 1;
        }
    }
    outcome(true, format!("{checked} (L, M) pairs"))
}

fn c4_kappa_zero() -> Outcome {
    let cases = [
        (ScheduleKind::FullUpdate, 1),
        (ScheduleKind::ExclusiveRotating, 2),
        (ScheduleKind::SameSubsetRotating, 2),
        (ScheduleKind::UnevenRotating, 4),
    ];
    for (policy, m) in cases {
        let mut cfg = preset("exp4", Scale::Desk).unwrap().without_attraction();
        cfg.filters.truncate(m);
        cfg.policy = policy;
        if m == 1 {
            cfg.combiner = l0combo::CombinerKind::None;
        } else if m == 2 {
            cfg.combiner = l0combo::CombinerKind::Rls2 { beta_f: 0.99 };
        }
        let scenario = cfg.scenario.build().unwrap();
        for run in 0..3 {
            let rec = run_single(&cfg, run).unwrap();
            let want = reference_lms_traces(&scenario, &cfg.filters, policy, cfg.base_seed, run);
            let same = (0..m).all(|k| {
                rec.filter_msd[k]
                    .iter()
                    .zip(&want[k])
                    .all(|(a, b)| a.to_bits() == b.to_bits())
            });
            if !same {
                return outcome(false, format!("{} M={m} run {run} differs", policy.name()));
            }
        }
    }
    outcome(true, "bitwise equal for full, exclusive, same, uneven")
}

fn argmin(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] < v[best] { i } else { best })
}

fn c5_kappa_sweep(seen: &mut Seen) -> Outcome {
    let base = preset("exp1", Scale::Desk).unwrap();
    let (kappas, _) = sweep_grid(Scale::Desk);
    let table = kappa_sweep(&base, &kappas, &[10.0, 40.0]).unwrap();
    seen.traces += kappas.len() * 2;
    let mut pass = true;
    let mut detail = Vec::new();
    let mut mins = Vec::new();
    for (snr, row) in table.snrs.iter().zip(&table.msd) {
        let db: Vec<f64> = row.iter().map(|&v| to_db(v)).collect();
        let i = argmin(&db);
        let left = db[0] - db[i];
        let right = db[db.len() - 1] - db[i];
        pass &= left >= U_SHAPE_DB && right >= U_SHAPE_DB;
        mins.push(i);
        detail.push(format!(
            "{snr} dB: argmin kappa {:.2e}, {left:.2} / {right:.2} dB below ends",
            kappas[i]
        ));
    }
    pass &= mins[0] != mins[1];
    outcome(pass, detail.join("; "))
}

fn c6_experiment2(seen: &mut Seen) -> Outcome {
    let t = Instant::now();
    let cfg = preset("exp2", Scale::Desk).unwrap();
    let rows = seen.steady(&cfg);
    let lms = seen.steady(&cfg.lms_baseline());
    let mut pass = true;
    let mut beats_worse = false;
    let mut detail = Vec::new();
    for r in &rows {
        let f: Vec<f64> = r.filter_msd.iter().map(|&v| to_db(v)).collect();
        let best = f.iter().cloned().fold(f64::INFINITY, f64::min);
        let worst = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let comb = to_db(r.comb_msd);
        pass &= comb <= best + TRACK_BEST_DB;
        beats_worse |= comb <= worst - BEAT_WORSE_DB;
        detail.push(format!("{} dB: comb {comb:.1} best {best:.1} worse {worst:.1}", r.snr_db));
    }
    let best60 = rows[0].filter_msd.iter().cloned().fold(f64::INFINITY, f64::min);
    let gap = to_db(lms[0].filter_msd[0]) - to_db(best60);
    let secs = t.elapsed().as_secs_f64();
    pass &= beats_worse && gap >= LMS_GAP_DB && secs <= 120.0;
    detail.push(format!("LMS gap at 60 dB {gap:.1} dB; {secs:.1} s"));
    outcome(pass, detail.join("; "))
}

fn c7_experiment3(seen: &mut Seen) -> Outcome {
    let variants = preset_variants("exp3", Scale::Desk).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for tag in ["20db", "40db"] {
        let comb_db = |name: &str, seen: &mut Seen| {
            let v = variants
                .iter()
                .find(|v| v.label == format!("exp3_{tag}_{name}"))
                .expect("missing exp3 variant");
            to_db(seen.steady(&v.config)[0].comb_msd)
        };
        let rls = comb_db("rls2", seen);
        let grad = comb_db("grad1000", seen).min(comb_db("grad10000", seen));
        pass &= rls <= grad + RLS_VS_GRAD_DB;
        detail.push(format!("{tag}: rls {rls:.2} vs best gradient {grad:.2}"));
    }
    outcome(pass, detail.join("; "))
}

fn c8_experiment4(seen: &mut Seen) -> Outcome {
    let mut pass = true;
    let mut detail = Vec::new();
    for v in preset_variants("exp4", Scale::Desk).unwrap() {
        if v.label.contains("near_sparse") {
            continue;
        }
        let row = &seen.steady(&v.config)[0];
        let best = row.filter_msd.iter().map(|&x| to_db(x)).fold(f64::INFINITY, f64::min);
        let comb = to_db(row.comb_msd);
        pass &= comb <= best + SOFTMAX_VS_BEST_DB;
        detail.push(format!("{} dB: comb {comb:.1} best {best:.1}", row.snr_db));
    }
    outcome(pass, detail.join("; "))
}

fn csv_bytes(seen: &mut Seen, cfg: &ExperimentConfig) -> Vec<u8> {
    let trace = seen.ensemble(cfg);
    let mut buf = Vec::new();
    write_trace(&trace, &mut buf).unwrap();
    write_steady(&steady_state_msd(&trace, cfg.steady_window), &mut buf).unwrap();
    buf
}

fn c9_determinism(seen: &mut Seen) -> Outcome {
    let mut variants = 0;
    for name in PRESET_NAMES {
        for v in preset_variants(name, Scale::Desk).unwrap() {
            if csv_bytes(seen, &v.config) != csv_bytes(seen, &v.config) {
                return outcome(false, format!("{} differs between reruns", v.label));
            }
            variants += 1;
        }
    }
    outcome(true, format!("{variants} desk variants byte-identical"))
}

fn c10_invariants(seen: &Seen) -> Outcome {
    let w = &seen.worst;
    let pass = w.weight_range_excess == 0.0
        && w.weight_sum_error <= WEIGHT_SUM_TOL
        && w.envelope_excess <= ENVELOPE_TOL;
    outcome(
        pass,
        format!(
            "{} ensembles: weight range excess {:.1e}, sum error {:.1e}, envelope excess {:.1e}",
            seen.traces, w.weight_range_excess, w.weight_sum_error, w.envelope_excess
        ),
    )
}

fn main() -> ExitCode {
    let mut seen = Seen::default();
    let mut failed = 0;
    let mut report = |n: usize, name: &str, f: &mut dyn FnMut(&mut Seen) -> Outcome, seen: &mut Seen| {
        let t = Instant::now();
        let o = f(seen);
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {n:>2} {status} {name} [{:.1} s]: {}",
            t.elapsed().as_secs_f64(),
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    };
    report(1, "recursive vs batch mixing weight", &mut |_| c1_oracle_equivalence(), &mut seen);
    report(2, "sigmoid gradient check", &mut |_| c2_gradient_check(), &mut seen);
    report(3, "partition/rotation suite", &mut |_| c3_partition_rotation(), &mut seen);
    report(4, "kappa = 0 equals LMS", &mut |_| c4_kappa_zero(), &mut seen);
    report(5, "kappa sweep U-shape", &mut c5_kappa_sweep, &mut seen);
    report(6, "time-varying SNR combination", &mut c6_experiment2, &mut seen);
    report(7, "least-squares vs gradient combiner", &mut c7_experiment3, &mut seen);
    report(8, "softmax M = 4 robustness", &mut c8_experiment4, &mut seen);
    report(9, "determinism", &mut c9_determinism, &mut seen);
    report(10, "convexity/normalization invariants", &mut |s| c10_invariants(s), &mut seen);
    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria fail");
        ExitCode::FAILURE
    }
}

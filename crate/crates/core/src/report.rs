//! CSV writers and plain-text tables.
//!
//! Numbers are written with `{:.12e}`, which is locale independent and keeps
//! 13 significant digits.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::harness::{to_db, MsdTrace, SteadyRow, SweepTable};

fn num(x: f64) -> String {
    format!("{x:.12e}")
}

/// `iter,msd_f1..msd_fM,msd_comb,<weights>` with a single `lambda` weight column for
/// two-filter combiners and `w1..wM` otherwise.
pub fn write_trace<W: Write>(trace: &MsdTrace, mut out: W) -> io::Result<()> {
    let m = trace.num_filters();
    let two = trace.combiner.is_two_filter();
    let mut header = String::from("iter");
    for k in 1..=m {
        header.push_str(&format!(",msd_f{k}"));
    }
    header.push_str(",msd_comb");
    if two {
        header.push_str(",lambda");
    } else {
        for k in 1..=m {
            header.push_str(&format!(",w{k}"));
        }
    }
    writeln!(out, "{header}")?;
    let weight_cols = if two { 1 } else { m };
    let mut line = String::new();
    for n in 0..trace.horizon() {
        line.clear();
        line.push_str(&n.to_string());
        for f in &trace.filter_msd {
            line.push(',');
            line.push_str(&num(f[n]));
        }
        line.push(',');
        line.push_str(&num(trace.comb_msd[n]));
        for w in trace.weights.iter().take(weight_cols) {
            line.push(',');
            line.push_str(&num(w[n]));
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// `snr_db,kappa,steady_msd`, SNR-major then ascending kappa.
pub fn write_sweep<W: Write>(table: &SweepTable, mut out: W) -> io::Result<()> {
    writeln!(out, "snr_db,kappa,steady_msd")?;
    for (snr, row) in table.snrs.iter().zip(&table.msd) {
        for (kappa, msd) in table.kappas.iter().zip(row) {
            writeln!(out, "{},{},{}", num(*snr), num(*kappa), num(*msd))?;
        }
    }
    Ok(())
}

/// `segment,start,end,snr_db,msd_f1..msd_fM,msd_comb`.
pub fn write_steady<W: Write>(rows: &[SteadyRow], mut out: W) -> io::Result<()> {
    let m = rows.first().map_or(0, |r| r.filter_msd.len());
    let mut header = String::from("segment,start,end,snr_db");
    for k in 1..=m {
        header.push_str(&format!(",msd_f{k}"));
    }
    header.push_str(",msd_comb");
    writeln!(out, "{header}")?;
    for r in rows {
        write!(out, "{},{},{},{}", r.segment + 1, r.start, r.end, num(r.snr_db))?;
        for v in &r.filter_msd {
            write!(out, ",{}", num(*v))?;
        }
        writeln!(out, ",{}", num(r.comb_msd))?;
    }
    Ok(())
}

fn to_file(path: &Path, f: impl FnOnce(&mut io::BufWriter<fs::File>) -> io::Result<()>) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = fs::File::create(path).map_err(io_err)?;
    let mut w = io::BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).map_err(io_err)
}

pub fn emit_csv(trace: &MsdTrace, path: &Path) -> Result<()> {
    to_file(path, |w| write_trace(trace, w))
}

pub fn emit_sweep_csv(table: &SweepTable, path: &Path) -> Result<()> {
    to_file(path, |w| write_sweep(table, w))
}

pub fn emit_steady_csv(rows: &[SteadyRow], path: &Path) -> Result<()> {
    to_file(path, |w| write_steady(rows, w))
}

/// Aligned steady-state table in dB.
pub fn steady_table(label: &str, rows: &[SteadyRow]) -> String {
    let m = rows.first().map_or(0, |r| r.filter_msd.len());
    let mut s = format!("{label}\n{:>8} {:>8}", "segment", "snr_db");
    for k in 1..=m {
        s.push_str(&format!(" {:>10}", format!("f{k}_dB")));
    }
    s.push_str(&format!(" {:>10}\n", "comb_dB"));
    for r in rows {
        s.push_str(&format!("{:>8} {:>8.1}", r.segment + 1, r.snr_db));
        for v in &r.filter_msd {
            s.push_str(&format!(" {:>10.3}", to_db(*v)));
        }
        s.push_str(&format!(" {:>10.3}\n", to_db(r.comb_msd)));
    }
    s
}

/// Aligned sweep table in dB, one row per kappa.
pub fn sweep_table(table: &SweepTable) -> String {
    let mut s = format!("{:>12}", "kappa");
    for snr in &table.snrs {
        s.push_str(&format!(" {:>10}", format!("{snr}dB")));
    }
    s.push('\n');
    for (j, kappa) in table.kappas.iter().enumerate() {
        s.push_str(&format!("{kappa:>12.4e}"));
        for row in &table.msd {
            s.push_str(&format!(" {:>10.3}", to_db(row[j])));
        }
        s.push('\n');
    }
    s
}

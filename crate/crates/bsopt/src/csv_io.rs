//! CSV emission and parsing for sweep and CDF results.
//!
//! Floats are written in scientific notation with 17 significant digits,
//! which round-trips every `f64` exactly. Lines end in `\n`.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use bsopt_core::Strategy;

use crate::error::{HarnessError, Result};
use crate::harness::{CdfResult, CdfRow, SweepResult, SweepRow};

pub const SWEEP_HEADER: [&str; 8] = [
    "load",
    "strategy",
    "n_a",
    "m_a",
    "p_a",
    "p_cons",
    "feasible",
    "iterations",
];

pub const CDF_HEADER: [&str; 12] = [
    "preset",
    "td_savings",
    "load",
    "trials",
    "seed",
    "strategy",
    "rank",
    "trial",
    "n_a",
    "m_a",
    "p_cons",
    "cdf",
];

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_sweep<W: Write>(result: &SweepResult, w: W) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(SWEEP_HEADER)?;
    for r in &result.rows {
        out.write_record([
            fmt_f64(r.load),
            r.strategy.to_string(),
            r.n_a.to_string(),
            r.m_a.to_string(),
            fmt_f64(r.p_a),
            fmt_f64(r.p_cons),
            r.feasible.to_string(),
            r.iterations.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_cdf<W: Write>(result: &CdfResult, w: W) -> csv::Result<()> {
    let mut out = writer(w);
    out.write_record(CDF_HEADER)?;
    for r in &result.rows {
        out.write_record([
            r.preset.clone(),
            r.td_savings.clone(),
            fmt_f64(r.load),
            r.trials.to_string(),
            r.seed.to_string(),
            r.strategy.to_string(),
            r.rank.to_string(),
            r.trial.to_string(),
            r.n_a.to_string(),
            r.m_a.to_string(),
            fmt_f64(r.p_cons),
            fmt_f64(r.cdf),
        ])?;
    }
    out.flush()?;
    Ok(())
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize, name: &str) -> std::result::Result<T, String> {
    let raw = rec.get(i).ok_or_else(|| format!("missing column {name}"))?;
    raw.parse().map_err(|_| format!("bad value {raw:?} in column {name}"))
}

fn strategy(rec: &csv::StringRecord, i: usize) -> std::result::Result<Strategy, String> {
    let raw = rec.get(i).ok_or("missing column strategy")?;
    raw.parse().map_err(|_| format!("unknown strategy {raw:?}"))
}

fn check_header(rdr: &mut csv::Reader<impl Read>, expected: &[&str]) -> std::result::Result<(), String> {
    let header = rdr.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()));
    }
    Ok(())
}

pub fn read_sweep<R: Read>(r: R) -> std::result::Result<SweepResult, String> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &SWEEP_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(SweepRow {
            load: field(&rec, 0, "load")?,
            strategy: strategy(&rec, 1)?,
            n_a: field(&rec, 2, "n_a")?,
            m_a: field(&rec, 3, "m_a")?,
            p_a: field(&rec, 4, "p_a")?,
            p_cons: field(&rec, 5, "p_cons")?,
            feasible: field(&rec, 6, "feasible")?,
            iterations: field(&rec, 7, "iterations")?,
        });
    }
    Ok(SweepResult { rows })
}

pub fn read_cdf<R: Read>(r: R) -> std::result::Result<CdfResult, String> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, &CDF_HEADER)?;
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        rows.push(CdfRow {
            preset: field(&rec, 0, "preset")?,
            td_savings: field(&rec, 1, "td_savings")?,
            load: field(&rec, 2, "load")?,
            trials: field(&rec, 3, "trials")?,
            seed: field(&rec, 4, "seed")?,
            strategy: strategy(&rec, 5)?,
            rank: field(&rec, 6, "rank")?,
            trial: field(&rec, 7, "trial")?,
            n_a: field(&rec, 8, "n_a")?,
            m_a: field(&rec, 9, "m_a")?,
            p_cons: field(&rec, 10, "p_cons")?,
            cdf: field(&rec, 11, "cdf")?,
        });
    }
    Ok(CdfResult { rows })
}

/// Writes a sweep to `path`.
pub fn emit_sweep(result: &SweepResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_sweep(result, file).map_err(|e| HarnessError::csv(path, e))
}

/// Writes CDF rows to `path`.
pub fn emit_cdf(result: &CdfResult, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_cdf(result, file).map_err(|e| HarnessError::csv(path, e))
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::run::{fixed_statistics, Estimate, RunOutput, SweepOutput};
use crate::error::Result;

pub const SUMMARY_FILE: &str = "summary.csv";
pub const RECORDS_FILE: &str = "trials.jsonl";
pub const SWEEP_FILE: &str = "sweep.csv";

const SIGNIFICANT_DIGITS: i32 = 9;

/// Fixed-point rendering with nine significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (SIGNIFICANT_DIGITS - 1 - exponent).max(0) as usize;
    format!("{x:.decimals$}")
}

fn header(kind: &str, digest: &str, seed: u64) -> String {
    format!("# graph-union-lab {kind}\n# config_sha256={digest}\n# master_seed={seed}\n")
}

fn estimate_cells(e: &Estimate) -> String {
    format!("{},{},{}", fmt_sig(e.estimate), fmt_sig(e.lower), fmt_sig(e.upper))
}

pub fn render_summary_csv(run: &RunOutput) -> String {
    let mut out = header("run", &run.config.digest(), run.config.master_seed);
    out.push_str("statistic,trials,successes,estimate,ci_low,ci_high\n");
    for row in &run.summary {
        let e = &row.estimate;
        let _ = writeln!(out, "{},{},{},{}", row.statistic, e.trials, e.successes, estimate_cells(e));
    }
    out
}

pub fn render_records_jsonl(run: &RunOutput) -> Result<String> {
    let mut out = header("trials", &run.config.digest(), run.config.master_seed);
    for r in &run.records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// One row per sweep value. Skipped values appear as comment lines.
pub fn render_sweep_csv(sweep: &SweepOutput) -> String {
    let config = &sweep.config;
    let mut out = header("sweep", &config.digest(), config.master_seed);
    let parameter = match config.sweep {
        Some(super::config::Sweep::Lambda0 { .. }) => "lambda0",
        _ => "m",
    };
    let ks = config.kconn_levels();
    let stats = fixed_statistics(config);

    let mut cols = vec!["parameter".to_string(), "value".into(), "m".into(), "lambda0".into()];
    cols.extend(ks.iter().map(|k| format!("lambda_{k}")));
    cols.push("predicted_connected".into());
    cols.push("trials".into());
    for s in &stats {
        cols.extend([s.clone(), format!("{s}_ci_low"), format!("{s}_ci_high")]);
    }
    out.push_str(&cols.join(","));
    out.push('\n');

    let opt = |v: Option<f64>| v.map(fmt_sig).unwrap_or_default();
    for p in &sweep.points {
        let (Some(m), Some(run)) = (p.m, &p.run) else {
            let _ = writeln!(
                out,
                "# skipped {parameter}={}: {}",
                fmt_sig(p.value),
                p.note.as_deref().unwrap_or("")
            );
            continue;
        };
        let mut cells = vec![parameter.to_string(), fmt_sig(p.value), m.to_string(), opt(p.lambda0)];
        cells.extend(ks.iter().map(|k| opt(p.lambda_k.get(k).copied())));
        cells.push(opt(p.predicted));
        cells.push(run.records.len().to_string());
        for s in &stats {
            cells.push(run.get(s).map(estimate_cells).unwrap_or_else(|| ",,".into()));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes `summary.csv` and `trials.jsonl` into `dir`.
pub fn write_run(dir: &Path, run: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let summary = dir.join(SUMMARY_FILE);
    let records = dir.join(RECORDS_FILE);
    fs::write(&summary, render_summary_csv(run))?;
    fs::write(&records, render_records_jsonl(run)?)?;
    Ok(vec![summary, records])
}

pub fn write_sweep(dir: &Path, sweep: &SweepOutput) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(SWEEP_FILE);
    fs::write(&path, render_sweep_csv(sweep))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.36787944117144233), "0.367879441");
        assert_eq!(fmt_sig(1.0), "1.00000000");
        assert_eq!(fmt_sig(7601.0), "7601.00000");
        assert_eq!(fmt_sig(-0.0012345678912), "-0.00123456789");
        assert_eq!(fmt_sig(123456789012.0), "123456789012");
        assert_eq!(fmt_sig(0.0), "0");
    }
}

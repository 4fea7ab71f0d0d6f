//! CSV emission.
//!
//! Trial files hold one row per trial, with revenues as exact integers.
//! Sweep files hold one row per axis value, with per-value means. All
//! fractional numbers are printed with six decimals.

use std::io::Write;
use std::path::Path;

use dcae_core::experiment::DpCheckReport;
use dcae_core::{SweepResult, TrialResult};

use crate::fig2::Fig2Row;
use crate::CliError;

pub const TRIAL_HEADER: [&str; 9] = [
    "trial",
    "dcae_revenue",
    "random_revenue",
    "best_revenue",
    "min_revenue",
    "dcae_satisfaction",
    "random_satisfaction",
    "best_satisfaction",
    "seed",
];

const SWEEP_COLUMNS: [&str; 8] = [
    "dcae_revenue",
    "random_revenue",
    "best_revenue",
    "min_revenue",
    "dcae_satisfaction",
    "random_satisfaction",
    "best_satisfaction",
    "seed",
];

fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

fn io_err(path: &Path) -> impl Fn(csv::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

pub fn write_trials<W: Write>(out: W, trials: &[TrialResult], seed: u64) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRIAL_HEADER)?;
    for t in trials {
        w.write_record([
            t.trial_index.to_string(),
            t.dcae_revenue.to_string(),
            t.random_revenue.to_string(),
            t.best_revenue.to_string(),
            t.min_revenue.to_string(),
            fixed(t.dcae_satisfaction),
            fixed(t.random_satisfaction),
            fixed(t.best_satisfaction),
            seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, sweep: &SweepResult, seed: u64) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![sweep.axis.name()];
    header.extend(SWEEP_COLUMNS);
    w.write_record(&header)?;
    for point in &sweep.points {
        let s = &point.summary;
        w.write_record([
            point.value.to_string(),
            fixed(s.mean_dcae_revenue),
            fixed(s.mean_random_revenue),
            fixed(s.mean_best_revenue),
            fixed(s.mean_min_revenue),
            fixed(s.mean_dcae_satisfaction),
            fixed(s.mean_random_satisfaction),
            fixed(s.mean_best_satisfaction),
            seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_dp_check<W: Write>(out: W, report: &DpCheckReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["pair", "max_ratio", "bound"])?;
    for (i, r) in report.pair_ratios.iter().enumerate() {
        w.write_record([i.to_string(), format!("{r:.12}"), format!("{:.12}", report.bound)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_fig2<W: Write>(out: W, rows: &[Fig2Row]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["strategy", "candidates", "winners", "revenue", "winners_paying_above_bid"])?;
    for r in rows {
        let ids = |v: &[usize]| v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ");
        w.write_record([
            r.strategy.clone(),
            ids(&r.candidates),
            ids(&r.winners),
            r.revenue.to_string(),
            r.overpaying_winners.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `path` and fills it with `write`.
pub fn emit<F>(path: &Path, write: F) -> Result<(), CliError>
where
    F: FnOnce(std::fs::File) -> csv::Result<()>,
{
    let file = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    write(file).map_err(io_err(path))
}

//! Scoring of a finished run against ground truth: tracking-error moments,
//! convergence time, and locked intervals derived from the HNR trace.

use crate::engine::TickOutput;
use crate::error::{Error, Result};
use serde::Serialize;

/// Summary of one engine run against a known f0 trajectory.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrackingReport {
    pub mean_err_hz: f64,
    pub std_err_hz: f64,
    /// Leading fraction of the run excluded from the moments.
    pub exclude_fraction: f64,
    /// Seconds until the error first stays inside the tolerance, if ever.
    pub convergence_time_s: Option<f64>,
    /// Maximal spans with HNR above 0 dB, as (start_s, end_s) with the end
    /// exclusive.
    pub lock_intervals_s: Vec<(f64, f64)>,
    /// Mean HNR over the locked samples, absent if lock never happened.
    pub mean_hnr_db: Option<f64>,
}

/// Default convergence tolerance in Hz.
pub const DEFAULT_TOL_HZ: f64 = 1.0;
/// Default convergence hold time in seconds.
pub const DEFAULT_HOLD_S: f64 = 0.020;
/// Default leading fraction excluded from the error moments.
pub const DEFAULT_EXCLUDE_FRACTION: f64 = 0.10;

/// Mean and population standard deviation of `fc - f0` after dropping the
/// leading `exclude_fraction` of the run.
pub fn tracking_error(fc: &[f64], f0: &[f64], exclude_fraction: f64) -> Result<(f64, f64)> {
    if fc.len() != f0.len() {
        return Err(Error::config(format!(
            "trace lengths differ: {} vs {}",
            fc.len(),
            f0.len()
        )));
    }
    if !(0.0..1.0).contains(&exclude_fraction) {
        return Err(Error::config("exclude fraction must be in [0, 1)"));
    }
    let n0 = (exclude_fraction * fc.len() as f64).ceil() as usize;
    if n0 >= fc.len() {
        return Err(Error::config("evaluation window is empty"));
    }
    let err: Vec<f64> = fc[n0..].iter().zip(&f0[n0..]).map(|(a, b)| a - b).collect();
    let n = err.len() as f64;
    let mean = err.iter().sum::<f64>() / n;
    let var = err.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok((mean, var.sqrt()))
}

/// First time the error magnitude stays at or below `tol_hz` for
/// `hold_s` seconds without interruption; `None` if that never happens
/// within the trace.
pub fn convergence_time(
    fc: &[f64],
    f0: &[f64],
    fs: f64,
    tol_hz: f64,
    hold_s: f64,
) -> Result<Option<f64>> {
    if fc.len() != f0.len() {
        return Err(Error::config(format!(
            "trace lengths differ: {} vs {}",
            fc.len(),
            f0.len()
        )));
    }
    if !(tol_hz > 0.0) || hold_s < 0.0 {
        return Err(Error::config("need tol > 0 and hold >= 0"));
    }
    let hold = ((hold_s * fs).round() as usize).max(1);
    if fc.len() < hold {
        return Ok(None);
    }
    let ok: Vec<bool> = fc
        .iter()
        .zip(f0)
        .map(|(a, b)| (a - b).abs() <= tol_hz)
        .collect();
    let mut run = 0usize;
    for (i, &o) in ok.iter().enumerate() {
        if o {
            run += 1;
            if run == hold {
                return Ok(Some((i + 1 - hold) as f64 / fs));
            }
        } else {
            run = 0;
        }
    }
    Ok(None)
}

/// Maximal runs with HNR above 0 dB, in seconds with exclusive ends.
pub fn lock_intervals(hnr_db: &[f64], fs: f64) -> Vec<(f64, f64)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (i, &h) in hnr_db.iter().enumerate() {
        match (h > 0.0, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                spans.push((s as f64 / fs, i as f64 / fs));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        spans.push((s as f64 / fs, hnr_db.len() as f64 / fs));
    }
    spans
}

/// Full report for a run, with the default tolerance and hold.
pub fn report(
    outs: &[TickOutput],
    f0: &[f64],
    fs: f64,
    exclude_fraction: f64,
) -> Result<TrackingReport> {
    let fc: Vec<f64> = outs.iter().map(|o| o.fc_hz).collect();
    let hnr: Vec<f64> = outs.iter().map(|o| o.hnr_db).collect();
    let (mean_err_hz, std_err_hz) = tracking_error(&fc, f0, exclude_fraction)?;
    let convergence_time_s = convergence_time(&fc, f0, fs, DEFAULT_TOL_HZ, DEFAULT_HOLD_S)?;
    let lock_intervals_s = lock_intervals(&hnr, fs);
    let locked: Vec<f64> = hnr.iter().copied().filter(|&h| h > 0.0).collect();
    let mean_hnr_db = if locked.is_empty() {
        None
    } else {
        Some(locked.iter().sum::<f64>() / locked.len() as f64)
    };
    Ok(TrackingReport {
        mean_err_hz,
        std_err_hz,
        exclude_fraction,
        convergence_time_s,
        lock_intervals_s,
        mean_hnr_db,
    })
}

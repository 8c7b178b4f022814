//! The per-sample trace table. One row per input sample, scientific
//! notation with 9 significant digits, flags as 0/1. The writer adds
//! nothing beyond the tick outputs, so a written trace reparses to the
//! exact formatted values.

use crate::engine::TickOutput;
use crate::error::{Error, Result};
use std::io::{BufRead, Write};

pub const TRACE_HEADER: &str = "t_s,fc_hz,hnr_db,cs,strobe,locked";

/// One parsed row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub t_s: f64,
    pub fc_hz: f64,
    pub hnr_db: f64,
    pub cs: f64,
    pub strobe: bool,
    pub locked: bool,
}

/// Write the trace for a run starting at sample 0.
pub fn write_trace<W: Write>(w: &mut W, fs: f64, outs: &[TickOutput]) -> Result<()> {
    writeln!(w, "{TRACE_HEADER}")?;
    for (i, o) in outs.iter().enumerate() {
        writeln!(
            w,
            "{:.8e},{:.8e},{:.8e},{:.8e},{},{}",
            i as f64 / fs,
            o.fc_hz,
            o.hnr_db,
            o.cs,
            o.strobe as u8,
            o.locked as u8
        )?;
    }
    Ok(())
}

/// Parse a trace written by `write_trace`.
pub fn parse_trace<R: BufRead>(r: R) -> Result<Vec<TraceRow>> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format("empty trace file"))??;
    if header.trim_end() != TRACE_HEADER {
        return Err(Error::format(format!("unexpected trace header {header:?}")));
    }
    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::format(format!(
                "line {}: expected 6 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|e| Error::format(format!("line {}: {e}", lineno + 2)))
        };
        let flag = |i: usize| -> Result<bool> {
            match fields[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::format(format!(
                    "line {}: flag field {other:?}",
                    lineno + 2
                ))),
            }
        };
        rows.push(TraceRow {
            t_s: num(0)?,
            fc_hz: num(1)?,
            hnr_db: num(2)?,
            cs: num(3)?,
            strobe: flag(4)?,
            locked: flag(5)?,
        });
    }
    Ok(rows)
}

//! Hand-rolled CSV writers. Every field is numeric or a bare label, so no
//! quoting is ever needed; keeping the formatting in one place pins the
//! byte-level output format.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::algorithms::TraceRecord;
use crate::error::Result;
use crate::harness::runner::{CellSummary, PlotRow, RunRecord};

/// Shortest-roundtrip formatting for finite values, `nan` otherwise (the
/// marker for a statistic that a censored majority made meaningless).
pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "nan".to_string()
    }
}

/// runs.csv. `wall_ms` is measured, not derived, and is the one column
/// excluded from the byte-determinism guarantee.
pub fn write_runs_csv(path: &Path, rows: &[RunRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "algo,n,m,seed,success,evaluations,iterations,max_lambda,wall_ms"
    )?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.algo,
            r.n,
            r.m,
            r.seed,
            r.success,
            r.evaluations,
            r.iterations,
            fmt_f64(r.max_lambda),
            r.wall_ms
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv(path: &Path, rows: &[CellSummary]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(
        w,
        "algo,n,m,runs,censored,median_evals,iqr_evals,median_max_lambda,iqr_max_lambda"
    )?;
    for s in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            s.algo,
            s.n,
            s.m,
            s.runs,
            s.censored,
            fmt_f64(s.median_evals),
            fmt_f64(s.iqr_evals),
            fmt_f64(s.median_max_lambda),
            fmt_f64(s.iqr_max_lambda)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_plotdata_csv(path: &Path, rows: &[PlotRow]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "algo,n,median_evals_over_n")?;
    for p in rows {
        writeln!(w, "{},{},{}", p.algo, p.n, fmt_f64(p.median_evals_over_n))?;
    }
    w.flush()?;
    Ok(())
}

/// trace.csv. Rows at distance 0 are dropped because the λ* = √(n/d)
/// reference column is undefined there; an empty trace still gets the
/// header.
pub fn write_trace_csv(path: &Path, n: usize, trace: &[TraceRecord]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "iteration,evaluations,d,lambda,sqrt_n_over_d")?;
    for t in trace {
        if t.distance == 0 {
            continue;
        }
        let reference = (n as f64 / t.distance as f64).sqrt();
        writeln!(
            w,
            "{},{},{},{},{}",
            t.iteration,
            t.evaluations,
            t.distance,
            fmt_f64(t.lambda),
            fmt_f64(reference)
        )?;
    }
    w.flush()?;
    Ok(())
}

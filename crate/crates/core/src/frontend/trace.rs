//! Witness trajectories as CSV.

use std::io::Write;
use std::path::Path;

use crate::error::TraceError;
use crate::interval::Interval;
use crate::ode::enclose_flow;
use crate::solver::{Problem, SolverResult};

/// One enclosure slice along the witness trajectory. `state` follows
/// [`trace_columns`]; `None` where the slice's system lacks the variable.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub step: usize,
    pub mode: String,
    pub time: Interval,
    pub state: Vec<Option<Interval>>,
}

/// State variable names of the witness flows, in first-appearance order.
pub fn trace_columns(result: &SolverResult, p: &Problem) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for &i in &result.active_flows {
        for s in p.flows[i].system.state() {
            if !cols.contains(s) {
                cols.push(s.clone());
            }
        }
    }
    cols
}

/// Re-integrates every witness flow from the midpoint of its initial box
/// for the midpoint duration. Times accumulate across steps.
pub fn trace_records(result: &SolverResult, p: &Problem) -> Result<Vec<TraceRecord>, TraceError> {
    let w = result
        .witness
        .as_ref()
        .filter(|_| result.is_delta_sat())
        .ok_or(TraceError::NotSatisfiable)?;
    let cols = trace_columns(result, p);
    let eps = p.eps();
    let mut offset = 0.0;
    let mut out = Vec::new();
    for (step, &i) in result.active_flows.iter().enumerate() {
        let fc = &p.flows[i];
        let b0: Vec<Interval> = fc.x0.iter().map(|&v| Interval::point(w[v].mid())).collect();
        let t = w[fc.time].mid().max(0.0);
        let enc = enclose_flow(&fc.system, &b0, Interval::new(0.0, t), eps);
        let names = fc.system.state();
        for s in &enc.slices {
            let state = cols
                .iter()
                .map(|c| names.iter().position(|n| n == c).map(|k| s.state[k]))
                .collect();
            out.push(TraceRecord {
                step,
                mode: fc.system.name().to_string(),
                time: Interval::new(offset + s.time.lo(), offset + s.time.hi()),
                state,
            });
        }
        offset += t;
    }
    Ok(out)
}

pub fn write_trace(mut out: impl Write, result: &SolverResult, p: &Problem) -> Result<(), TraceError> {
    let records = trace_records(result, p)?;
    let cols = trace_columns(result, p);
    let mut header = String::from("step,mode,t_lo,t_hi");
    for c in &cols {
        header.push_str(&format!(",{c}_lo,{c}_hi"));
    }
    writeln!(out, "{header}")?;
    for r in &records {
        let mut line = format!("{},{},{},{}", r.step, r.mode, r.time.lo() + 0.0, r.time.hi() + 0.0);
        for s in &r.state {
            match s {
                Some(iv) => line.push_str(&format!(",{},{}", iv.lo() + 0.0, iv.hi() + 0.0)),
                None => line.push_str(",,"),
            }
        }
        writeln!(out, "{line}")?;
    }
    Ok(())
}

/// Writes the witness trace of a delta-sat `result` to `path`.
pub fn emit_trace(result: &SolverResult, p: &Problem, path: impl AsRef<Path>) -> Result<(), TraceError> {
    if !result.is_delta_sat() {
        return Err(TraceError::NotSatisfiable);
    }
    let file = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(file);
    write_trace(&mut w, result, p)?;
    w.flush()?;
    Ok(())
}

//! Trace files: one CSV row per accepted iteration, plus an optional binary
//! sidecar with the iterate vectors.
//!
//! Sidecar layout, little endian: magic `APXI`, `u32` version, `u64` dim,
//! `u64` count, then per record `y`, `x+`, `g(y)` as `f64` arrays.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::solver::{IterateSnapshot, IterationRecord, WeightedSums};

const MAGIC: &[u8; 4] = b"APXI";
const SIDECAR_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Row {
    k: usize,
    l_accepted: f64,
    inner_trials: usize,
    weight: f64,
    cumulative_s: f64,
    oracle_calls: u64,
}

pub fn write_trace_csv<W: Write>(trace: &[IterationRecord], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    for r in trace {
        w.serialize(Row {
            k: r.k,
            l_accepted: r.l_accepted,
            inner_trials: r.inner_trials,
            weight: r.weight,
            cumulative_s: r.cumulative_s,
            oracle_calls: r.oracle_calls_so_far,
        })?;
    }
    if trace.is_empty() {
        w.write_record(["k", "l_accepted", "inner_trials", "weight", "cumulative_s", "oracle_calls"])?;
    }
    w.flush().map_err(|e| HarnessError::Io { path: "<trace>".into(), message: e.to_string() })?;
    Ok(())
}

pub fn read_trace_csv<R: Read>(input: R) -> Result<Vec<IterationRecord>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize::<Row>() {
        let row = row?;
        out.push(IterationRecord {
            k: row.k,
            l_accepted: row.l_accepted,
            inner_trials: row.inner_trials,
            weight: row.weight,
            cumulative_s: row.cumulative_s,
            oracle_calls_so_far: row.oracle_calls,
            iterate: None,
        });
    }
    Ok(out)
}

/// Writes the iterate vectors of `trace`. Every record must carry them.
pub fn write_iterates<W: Write>(trace: &[IterationRecord], out: W) -> Result<(), HarnessError> {
    let dim = trace.first().and_then(|r| r.iterate.as_ref()).map_or(0, |s| s.y.len());
    let mut w = BufWriter::new(out);
    let io = |e: std::io::Error| HarnessError::Io { path: "<iterates>".into(), message: e.to_string() };
    w.write_all(MAGIC).map_err(io)?;
    w.write_all(&SIDECAR_VERSION.to_le_bytes()).map_err(io)?;
    w.write_all(&(dim as u64).to_le_bytes()).map_err(io)?;
    w.write_all(&(trace.len() as u64).to_le_bytes()).map_err(io)?;
    for r in trace {
        let s = r.iterate.as_ref().ok_or_else(|| HarnessError::Trace("record without iterate vectors".into()))?;
        for v in [&s.y, &s.x_next, &s.g_y] {
            if v.len() != dim {
                return Err(HarnessError::Trace(format!("iterate of length {} in a trace of dimension {dim}", v.len())));
            }
            for x in v.iter() {
                w.write_all(&x.to_le_bytes()).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

pub fn read_iterates<R: Read>(input: R) -> Result<Vec<IterateSnapshot>, HarnessError> {
    let mut r = BufReader::new(input);
    let io = |e: std::io::Error| HarnessError::Trace(format!("truncated iterate file: {e}"));
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic).map_err(io)?;
    if &magic != MAGIC {
        return Err(HarnessError::Trace("not an iterate file".into()));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4).map_err(io)?;
    if u32::from_le_bytes(b4) != SIDECAR_VERSION {
        return Err(HarnessError::Trace(format!("unsupported iterate file version {}", u32::from_le_bytes(b4))));
    }
    let mut b8 = [0u8; 8];
    r.read_exact(&mut b8).map_err(io)?;
    let dim = u64::from_le_bytes(b8) as usize;
    r.read_exact(&mut b8).map_err(io)?;
    let count = u64::from_le_bytes(b8) as usize;
    let mut read_vec = |r: &mut BufReader<R>| -> Result<Vec<f64>, HarnessError> {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            r.read_exact(&mut b8).map_err(io)?;
            v.push(f64::from_le_bytes(b8));
        }
        Ok(v)
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let y = read_vec(&mut r)?;
        let x_next = read_vec(&mut r)?;
        let g_y = read_vec(&mut r)?;
        out.push(IterateSnapshot { y, x_next, g_y });
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(io)? != 0 {
        return Err(HarnessError::Trace("trailing bytes after iterate records".into()));
    }
    Ok(out)
}

pub fn save_trace(trace: &[IterationRecord], csv_path: &Path, iterates_path: Option<&Path>) -> Result<(), HarnessError> {
    let f = File::create(csv_path).map_err(|e| HarnessError::io(csv_path, e))?;
    write_trace_csv(trace, f).map_err(|e| e.with_path(csv_path))?;
    if let Some(p) = iterates_path {
        let f = File::create(p).map_err(|e| HarnessError::io(p, e))?;
        write_iterates(trace, f).map_err(|e| e.with_path(p))?;
    }
    Ok(())
}

/// Loads a trace, attaching iterate vectors when a sidecar path is given.
pub fn load_trace(csv_path: &Path, iterates_path: Option<&Path>) -> Result<Vec<IterationRecord>, HarnessError> {
    let f = File::open(csv_path).map_err(|e| HarnessError::io(csv_path, e))?;
    let mut trace = read_trace_csv(f).map_err(|e| e.with_path(csv_path))?;
    if let Some(p) = iterates_path {
        let f = File::open(p).map_err(|e| HarnessError::io(p, e))?;
        let snaps = read_iterates(f).map_err(|e| e.with_path(p))?;
        if snaps.len() != trace.len() {
            return Err(HarnessError::Trace(format!(
                "{} trace rows but {} iterate records",
                trace.len(),
                snaps.len()
            )));
        }
        for (r, s) in trace.iter_mut().zip(snaps) {
            r.iterate = Some(s);
        }
    }
    Ok(trace)
}

/// Weighted sums rebuilt from a trace with iterate vectors.
pub fn sums_from_trace(trace: &[IterationRecord]) -> Result<WeightedSums, HarnessError> {
    let first = trace.first().ok_or_else(|| HarnessError::Trace("empty trace".into()))?;
    let dim = first.iterate.as_ref().map(|s| s.y.len()).ok_or_else(missing)?;
    let mut sums = WeightedSums::new(dim);
    for r in trace {
        let s = r.iterate.as_ref().ok_or_else(missing)?;
        sums.push(r.weight, &s.y, &s.g_y);
    }
    Ok(sums)
}

fn missing() -> HarnessError {
    HarnessError::Trace("trace has no iterate vectors; rerun with record_trace = true".into())
}

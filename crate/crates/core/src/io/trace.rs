//! CSV traces, one row per traced iteration.
//!
//! Diagnostics that are undefined at small `k` (for example `U` at `k = 1`)
//! are written as empty cells.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRecord;
use crate::scalar::Scalar;

pub const TRACE_HEADER: &str =
    "k,primal_infeas,dual_infeas,gap,U,delta,epsilon,recursion_residual,M,touch_count,wall_time_ns";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub primal_infeas: f64,
    pub dual_infeas: f64,
    pub gap: f64,
    #[serde(rename = "U")]
    pub potential: Option<f64>,
    pub delta: Option<f64>,
    pub epsilon: Option<f64>,
    pub recursion_residual: Option<f64>,
    #[serde(rename = "M")]
    pub saddle_gap: f64,
    pub touch_count: u64,
    pub wall_time_ns: u64,
}

impl TraceRow {
    pub fn from_record<T: Scalar>(rec: &DiagnosticsRecord<T>, wall_time_ns: u128) -> Self {
        Self {
            k: rec.k,
            primal_infeas: rec.primal_infeas.as_f64(),
            dual_infeas: rec.dual_infeas.as_f64(),
            gap: rec.gap.as_f64(),
            potential: rec.potential.map(Scalar::as_f64),
            delta: rec.delta.map(Scalar::as_f64),
            epsilon: rec.epsilon.map(Scalar::as_f64),
            recursion_residual: rec.recursion_residual.map(Scalar::as_f64),
            saddle_gap: rec.saddle_gap.as_f64(),
            touch_count: rec.touch_count,
            wall_time_ns: u64::try_from(wall_time_ns).unwrap_or(u64::MAX),
        }
    }
}

/// Streams rows to a CSV sink. The header is written with the first row,
/// or by [`TraceWriter::finish`] if there were none.
pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
    wrote_any: bool,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(sink: W) -> Self {
        Self { inner: csv::Writer::from_writer(sink), wrote_any: false }
    }

    pub fn write(&mut self, row: &TraceRow) -> csv::Result<()> {
        self.wrote_any = true;
        self.inner.serialize(row)
    }

    pub fn finish(mut self) -> csv::Result<W> {
        if !self.wrote_any {
            self.inner.write_record(TRACE_HEADER.split(','))?;
        }
        self.inner.into_inner().map_err(|e| e.into_error().into())
    }
}

pub fn write_trace<W: Write>(sink: W, rows: &[TraceRow]) -> csv::Result<W> {
    let mut w = TraceWriter::new(sink);
    for row in rows {
        w.write(row)?;
    }
    w.finish()
}

pub fn read_trace<R: Read>(source: R) -> csv::Result<Vec<TraceRow>> {
    csv::Reader::from_reader(source).deserialize().collect()
}

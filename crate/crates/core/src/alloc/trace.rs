use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::rdcore::{EncodeOutcome, QpAssignment};

/// One pass of a descend loop.
#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub k: usize,
    /// Distortion of the leading source selected this iteration.
    pub d_target: f64,
    /// Index of that source.
    pub argmax: usize,
    pub adjusted: Vec<usize>,
    /// Rate after the adjustment.
    pub total_bits: u64,
    /// Largest per-source distortion after the adjustment.
    pub max_distortion: f64,
    pub quality: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AllocTrace {
    pub records: Vec<IterRecord>,
    pub assignment: QpAssignment,
    /// Outcome of `assignment`.
    pub outcome: EncodeOutcome,
    pub initial_bits: u64,
    /// Loop passes executed, including one that was rolled back.
    pub n_iter: usize,
    /// Every source reached the QP floor while the loop still wanted to continue.
    pub saturated: bool,
    pub rolled_back: bool,
    pub hit_cap: bool,
    /// Iterations where rate fell or the largest distortion rose.
    pub monotonicity_violations: usize,
    /// Quality-constrained runs: iterations where frame quality fell.
    pub quality_violations: usize,
}

#[derive(Serialize)]
struct Row {
    iter: usize,
    d_target: f64,
    total_bits: u64,
    n_adjusted: usize,
}

impl AllocTrace {
    pub(crate) fn start(x: &QpAssignment, outcome: EncodeOutcome) -> Self {
        AllocTrace {
            records: Vec::new(),
            assignment: x.clone(),
            initial_bits: outcome.total_bits,
            outcome,
            n_iter: 0,
            saturated: false,
            rolled_back: false,
            hit_cap: false,
            monotonicity_violations: 0,
            quality_violations: 0,
        }
    }

    /// Appends an iteration and updates the audits against the previous state.
    pub(crate) fn push(
        &mut self,
        d_target: f64,
        argmax: usize,
        adjusted: Vec<usize>,
        outcome: &EncodeOutcome,
    ) {
        let prev_bits = self
            .records
            .last()
            .map_or(self.initial_bits, |r| r.total_bits);
        let prev_max = self
            .records
            .last()
            .map_or(self.outcome.max_distortion().1, |r| r.max_distortion);
        let prev_q = self
            .records
            .last()
            .map_or(self.outcome.frame_quality, |r| r.quality);
        let max_distortion = outcome.max_distortion().1;
        if outcome.total_bits < prev_bits || max_distortion > prev_max {
            self.monotonicity_violations += 1;
        }
        if let (Some(p), Some(q)) = (prev_q, outcome.frame_quality) {
            if q < p {
                self.quality_violations += 1;
            }
        }
        self.n_iter += 1;
        self.records.push(IterRecord {
            k: self.n_iter,
            d_target,
            argmax,
            adjusted,
            total_bits: outcome.total_bits,
            max_distortion,
            quality: outcome.frame_quality,
        });
    }

    /// `iter,d_target,total_bits,n_adjusted` per iteration.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(out);
        w.write_record(["iter", "d_target", "total_bits", "n_adjusted"])?;
        for r in &self.records {
            w.serialize(Row {
                iter: r.k,
                d_target: r.d_target,
                total_bits: r.total_bits,
                n_adjusted: r.adjusted.len(),
            })?;
        }
        w.flush()?;
        Ok(())
    }
}

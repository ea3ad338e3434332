use std::fmt;

use rand::Rng;

use crate::rdcore::{ChainTables, DependentSourceSet, QpAssignment, TableViolation, ViolationKind};

/// Outcome of an m.r.d. audit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MrdReport {
    pub probes: usize,
    pub rate_violations: usize,
    pub distortion_violations: usize,
    /// Table scans only: where each violation sits.
    pub locations: Vec<TableViolation>,
}

impl MrdReport {
    pub fn violations(&self) -> usize {
        self.rate_violations + self.distortion_violations
    }

    pub fn violation_rate(&self) -> f64 {
        if self.probes == 0 {
            0.0
        } else {
            self.violations() as f64 / self.probes as f64
        }
    }
}

impl fmt::Display for MrdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "probes={} rate_violations={} distortion_violations={} rate={:.4}",
            self.probes,
            self.rate_violations,
            self.distortion_violations,
            self.violation_rate()
        )
    }
}

/// Exhaustive scan of every adjacent QP pair of every table column.
pub fn mrd_audit_tables(t: &ChainTables) -> MrdReport {
    let columns: usize = (0..t.n_sources())
        .map(|s| if s == 0 { 1 } else { t.range().len() })
        .sum();
    let locations = t.mrd_violations();
    MrdReport {
        probes: columns * (t.range().len() - 1),
        rate_violations: locations
            .iter()
            .filter(|v| v.kind == ViolationKind::RateIncrease)
            .count(),
        distortion_violations: locations
            .iter()
            .filter(|v| v.kind == ViolationKind::DistortionDecrease)
            .count(),
        locations,
    }
}

/// Randomised probes: draw an assignment and a source above the QP floor,
/// lower that source's QP by one with the rest fixed, and count a drop in
/// its own rate or a rise in its own distortion.
pub fn mrd_audit<S: DependentSourceSet + ?Sized>(
    set: &S,
    sample_count: usize,
    rng: &mut impl Rng,
) -> MrdReport {
    let range = set.qp_range();
    let n = set.n_sources();
    let mut report = MrdReport::default();
    if range.min == range.max {
        return report;
    }
    for _ in 0..sample_count {
        let mut x = QpAssignment::new(
            (0..n)
                .map(|_| rng.gen_range(range.min..=range.max))
                .collect(),
        );
        let i = rng.gen_range(0..n);
        if x[i] == range.min {
            x[i] += 1;
        }
        let before = set.encode(&x).per_source[i];
        x[i] -= 1;
        let after = set.encode(&x).per_source[i];
        report.probes += 1;
        if after.rate_bits < before.rate_bits {
            report.rate_violations += 1;
        }
        if after.distortion > before.distortion {
            report.distortion_violations += 1;
        }
    }
    report
}

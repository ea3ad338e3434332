//! Shared optimization vocabulary: QP assignments, per-source outcomes,
//! constraints, and the [`DependentSourceSet`] capability every allocator
//! works against.

mod synthetic;

pub use synthetic::{
    planted_chain, random_mrd_chain, random_regular_chain, ChainTables, PlantedInstance,
    Regularity, SyntheticChainSet, TableViolation, ViolationKind,
};

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Default H.264-style QP bounds.
pub const QP_MIN: u8 = 0;
pub const QP_MAX: u8 = 51;

/// Inclusive QP interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QpRange {
    pub min: u8,
    pub max: u8,
}

impl QpRange {
    pub fn new(min: u8, max: u8) -> Result<Self> {
        if min > max {
            return Err(Error::InvalidConfig(format!(
                "qp range [{min}, {max}] is empty"
            )));
        }
        Ok(QpRange { min, max })
    }

    /// Number of permitted QPs, `|x|`.
    pub fn len(&self) -> usize {
        (self.max - self.min) as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, qp: u8) -> bool {
        (self.min..=self.max).contains(&qp)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = u8> + Clone {
        self.min..=self.max
    }

    /// `qp - step`, floored at `min`.
    pub fn step_down(&self, qp: u8, step: u8) -> u8 {
        qp.saturating_sub(step).max(self.min)
    }
}

impl Default for QpRange {
    fn default() -> Self {
        QpRange {
            min: QP_MIN,
            max: QP_MAX,
        }
    }
}

/// One QP per source: the candidate quantization scheme `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QpAssignment(Vec<u8>);

impl QpAssignment {
    pub fn new(qps: Vec<u8>) -> Self {
        QpAssignment(qps)
    }

    pub fn uniform(n: usize, qp: u8) -> Self {
        QpAssignment(vec![qp; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u8> {
        self.0.iter()
    }

    /// Checks length and bounds against a set.
    pub fn validate(&self, n_sources: usize, range: QpRange) -> Result<()> {
        if self.0.len() != n_sources {
            return Err(Error::DimensionMismatch {
                expected: n_sources,
                found: self.0.len(),
            });
        }
        for (index, &qp) in self.0.iter().enumerate() {
            if !range.contains(qp) {
                return Err(Error::QpOutOfRange {
                    index,
                    qp,
                    min: range.min,
                    max: range.max,
                });
            }
        }
        Ok(())
    }
}

impl From<Vec<u8>> for QpAssignment {
    fn from(qps: Vec<u8>) -> Self {
        QpAssignment(qps)
    }
}

impl Index<usize> for QpAssignment {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl IndexMut<usize> for QpAssignment {
    fn index_mut(&mut self, i: usize) -> &mut u8 {
        &mut self.0[i]
    }
}

/// Rate and distortion of one source under some assignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceOutcome {
    pub rate_bits: u64,
    pub distortion: f64,
}

/// Result of encoding every source of a set under one assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodeOutcome {
    pub per_source: Vec<SourceOutcome>,
    pub total_bits: u64,
    /// Frame-level MS-SSIM, present when a pixel codec backs the set.
    pub frame_quality: Option<f64>,
}

impl EncodeOutcome {
    pub fn new(per_source: Vec<SourceOutcome>, frame_quality: Option<f64>) -> Self {
        let total_bits = per_source.iter().map(|s| s.rate_bits).sum();
        EncodeOutcome {
            per_source,
            total_bits,
            frame_quality,
        }
    }

    pub fn distortions(&self) -> Vec<f64> {
        self.per_source.iter().map(|s| s.distortion).collect()
    }

    /// Index and value of the largest distortion; ties go to the lowest index.
    pub fn max_distortion(&self) -> (usize, f64) {
        let mut best = (0, f64::NEG_INFINITY);
        for (i, s) in self.per_source.iter().enumerate() {
            if s.distortion > best.1 {
                best = (i, s.distortion);
            }
        }
        best
    }

    /// `V_d = max_i d_i - min_j d_j`.
    pub fn fluctuation(&self) -> f64 {
        fluctuation(self.per_source.iter().map(|s| s.distortion))
    }
}

/// Max minus min of a distortion sequence (0 for an empty one).
pub fn fluctuation(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if lo > hi {
        0.0
    } else {
        hi - lo
    }
}

/// What an allocation must respect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Constraint {
    /// Total bits must not exceed `R_c`.
    RateBudget(u64),
    /// Frame quality must not fall below `Q_c`.
    QualityFloor(f64),
}

impl Constraint {
    pub fn rate(bits: u64) -> Result<Self> {
        if bits == 0 {
            return Err(Error::InvalidConfig("rate budget must be positive".into()));
        }
        Ok(Constraint::RateBudget(bits))
    }

    pub fn quality(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "quality floor {q} not in (0, 1)"
            )));
        }
        Ok(Constraint::QualityFloor(q))
    }
}

/// Which distortion a set reports. A set carries exactly one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistortionMetric {
    Mse,
    Ssim,
    /// Values read from a synthetic table; no pixel meaning.
    Tabulated,
}

/// A collection of sources whose rates and distortions are produced jointly
/// by one encode of the whole assignment.
///
/// Implementations must be pure: the same assignment always yields a
/// bit-identical outcome. Any inter-source dependency is internal.
pub trait DependentSourceSet: Sync {
    fn n_sources(&self) -> usize;

    fn qp_range(&self) -> QpRange;

    fn metric(&self) -> DistortionMetric;

    /// Encodes an assignment that is already known to be valid.
    fn encode(&self, x: &QpAssignment) -> EncodeOutcome;

    fn evaluate(&self, x: &QpAssignment) -> Result<EncodeOutcome> {
        x.validate(self.n_sources(), self.qp_range())?;
        Ok(self.encode(x))
    }

    /// Per-source `d_i,max`, taken as the distortion under the all-`qp_max`
    /// assignment.
    fn max_reachable_distortion(&self) -> Vec<f64> {
        let x = QpAssignment::uniform(self.n_sources(), self.qp_range().max);
        self.encode(&x).distortions()
    }
}

impl<T: DependentSourceSet + ?Sized> DependentSourceSet for &T {
    fn n_sources(&self) -> usize {
        (**self).n_sources()
    }
    fn qp_range(&self) -> QpRange {
        (**self).qp_range()
    }
    fn metric(&self) -> DistortionMetric {
        (**self).metric()
    }
    fn encode(&self, x: &QpAssignment) -> EncodeOutcome {
        (**self).encode(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_catches_length_and_range() {
        let range = QpRange::new(0, 3).unwrap();
        let x = QpAssignment::new(vec![0, 1, 2]);
        assert!(x.validate(3, range).is_ok());
        assert!(matches!(
            x.validate(2, range),
            Err(Error::DimensionMismatch {
                expected: 2,
                found: 3
            })
        ));
        let bad = QpAssignment::new(vec![0, 4]);
        assert!(matches!(
            bad.validate(2, range),
            Err(Error::QpOutOfRange {
                index: 1,
                qp: 4,
                ..
            })
        ));
    }

    #[test]
    fn outcome_total_is_sum() {
        let o = EncodeOutcome::new(
            vec![
                SourceOutcome {
                    rate_bits: 10,
                    distortion: 0.5,
                },
                SourceOutcome {
                    rate_bits: 7,
                    distortion: 0.5,
                },
                SourceOutcome {
                    rate_bits: 0,
                    distortion: 0.1,
                },
            ],
            None,
        );
        assert_eq!(o.total_bits, 17);
        // tie goes to the lowest index
        assert_eq!(o.max_distortion(), (0, 0.5));
        assert!((o.fluctuation() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn constraint_validation() {
        assert!(Constraint::rate(0).is_err());
        assert!(Constraint::quality(1.0).is_err());
        assert!(Constraint::quality(0.0).is_err());
        assert_eq!(
            Constraint::quality(0.9).unwrap(),
            Constraint::QualityFloor(0.9)
        );
    }

    #[test]
    fn step_down_floors() {
        let r = QpRange::new(2, 10).unwrap();
        assert_eq!(r.step_down(5, 2), 3);
        assert_eq!(r.step_down(3, 2), 2);
        assert_eq!(r.step_down(1, 5), 2);
    }
}

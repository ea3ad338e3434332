use std::fmt;

use crate::error::{Error, Result};
use crate::rdcore::{DependentSourceSet, QpAssignment, SyntheticChainSet};

/// Regime of one source in a target-distortion solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Distortion at or just below the target.
    Target,
    /// At `qp_max` with `d_i,max` strictly below the target.
    Clamped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetSolution {
    pub d_target: f64,
    pub assignment: QpAssignment,
    pub bits: u64,
    pub regimes: Vec<Regime>,
}

/// For each source in chain order, the largest QP whose distortion is at most
/// `d_target` given the predecessor already fixed; `qp_min` if none is.
pub fn target_distortion_solve(set: &SyntheticChainSet, d_target: f64) -> TargetSolution {
    let n = set.n_sources();
    let range = set.qp_range();
    let mut x = QpAssignment::uniform(n, range.max);
    let mut regimes = Vec::with_capacity(n);
    for i in 0..n {
        let pred = if i == 0 { None } else { Some(x[i - 1]) };
        let t = set.tables();
        x[i] = range
            .iter()
            .rev()
            .find(|&q| t.get(i, q, pred).distortion <= d_target)
            .unwrap_or(range.min);
        let d_max = t.get(i, range.max, pred).distortion;
        regimes.push(if x[i] == range.max && d_max < d_target {
            Regime::Clamped
        } else {
            Regime::Target
        });
    }
    let bits = set.encode(&x).total_bits;
    TargetSolution {
        d_target,
        assignment: x,
        bits,
        regimes,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// One solution per schedule entry, in schedule (strictly decreasing) order.
    pub entries: Vec<TargetSolution>,
    /// Consecutive index pairs `(k, k + 1)` where the rate fell as the target fell.
    pub violations: Vec<(usize, usize)>,
    /// For each consecutive pair, sources that are in the target regime at
    /// the lower target but clamped at the higher one.
    pub phi: Vec<Vec<usize>>,
}

impl SweepResult {
    pub fn is_monotone(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for SweepResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "d={:.6} bits={} x={:?}",
                e.d_target,
                e.bits,
                e.assignment.as_slice()
            )?;
        }
        for &(a, b) in &self.violations {
            writeln!(
                f,
                "violation: d {:.6} -> {:.6} bits {} -> {}",
                self.entries[a].d_target,
                self.entries[b].d_target,
                self.entries[a].bits,
                self.entries[b].bits
            )?;
        }
        Ok(())
    }
}

/// Solves every target of a strictly decreasing schedule and checks that the
/// rate never falls as the target distortion falls.
pub fn theorem2_sweep(set: &SyntheticChainSet, schedule: &[f64]) -> Result<SweepResult> {
    if schedule
        .windows(2)
        .any(|w| w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidConfig(
            "sweep schedule must be strictly decreasing".into(),
        ));
    }
    let entries: Vec<TargetSolution> = schedule
        .iter()
        .map(|&d| target_distortion_solve(set, d))
        .collect();
    let mut violations = Vec::new();
    let mut phi = Vec::new();
    for k in 1..entries.len() {
        if entries[k].bits < entries[k - 1].bits {
            violations.push((k - 1, k));
        }
        phi.push(
            (0..set.n_sources())
                .filter(|&i| {
                    entries[k - 1].regimes[i] == Regime::Clamped
                        && entries[k].regimes[i] == Regime::Target
                })
                .collect(),
        );
    }
    Ok(SweepResult {
        entries,
        violations,
        phi,
    })
}

/// `steps` evenly spaced targets from `max_i d_i,max` down to zero.
pub fn default_schedule(set: &SyntheticChainSet, steps: usize) -> Vec<f64> {
    let top = set
        .max_reachable_distortion()
        .into_iter()
        .fold(0.0, f64::max);
    if steps <= 1 || top <= 0.0 {
        return vec![top];
    }
    (0..steps)
        .map(|k| top * (steps - 1 - k) as f64 / (steps - 1) as f64)
        .collect()
}

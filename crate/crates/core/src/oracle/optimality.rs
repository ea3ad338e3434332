use std::fmt;

use super::exhaustive::{exhaustive_minmax, RateRule};
use super::target::{target_distortion_solve, TargetSolution};
use crate::error::Result;
use crate::rdcore::{DependentSourceSet, QpAssignment, SyntheticChainSet};

/// Split of the sources of an assignment around a scalar `d_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionReport {
    pub d_star: f64,
    /// Sources at exactly `d_star`.
    pub omega: Vec<usize>,
    /// Sources at their own `d_i,max`, which lies below `d_star`.
    pub psi: Vec<usize>,
    /// Everything else.
    pub residual: Vec<usize>,
}

impl PartitionReport {
    /// Every source is either at `d_star` or clamped at its maximum.
    pub fn has_target_structure(&self) -> bool {
        self.residual.is_empty()
    }
}

/// Partitions `x` against `d_star`, taking `d_i,max` as the distortion at
/// `qp_max` given the predecessor QP used in `x`.
pub fn partition(set: &SyntheticChainSet, x: &QpAssignment, d_star: f64) -> PartitionReport {
    let range = set.qp_range();
    let mut r = PartitionReport {
        d_star,
        omega: Vec::new(),
        psi: Vec::new(),
        residual: Vec::new(),
    };
    for i in 0..set.n_sources() {
        let pred = if i == 0 { None } else { Some(x[i - 1]) };
        let d = set.tables().get(i, x[i], pred).distortion;
        let d_max = set.tables().get(i, range.max, pred).distortion;
        if d == d_star {
            r.omega.push(i);
        } else if x[i] == range.max && d_max < d_star {
            r.psi.push(i);
        } else {
            r.residual.push(i);
        }
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// A target solution spends exactly the budget and no assignment at that
    /// rate has a smaller fluctuation.
    Optimal,
    /// No target distortion spends exactly the budget.
    PremiseUnmet,
    /// The premise holds but some assignment at that rate fluctuates less.
    Violated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    pub solution: TargetSolution,
    pub partition: PartitionReport,
    pub verdict: Verdict,
    /// Fluctuation of the target solution.
    pub vd: f64,
    /// Smallest fluctuation among assignments spending exactly the budget,
    /// when the premise holds.
    pub exhaustive_vd: Option<f64>,
}

impl fmt::Display for OptimalityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "verdict={:?} d*={:.6} bits={} vd={:.6} exhaustive_vd={} omega={:?} psi={:?} residual={:?}",
            self.verdict,
            self.partition.d_star,
            self.solution.bits,
            self.vd,
            self.exhaustive_vd.map_or("-".to_string(), |v| format!("{v:.6}")),
            self.partition.omega,
            self.partition.psi,
            self.partition.residual
        )
    }
}

/// Searches every distortion value appearing in the tables for the target
/// whose solution spends the most bits without exceeding `r_c`, then checks
/// the optimality claim against enumeration at that exact rate.
pub fn theorem1_check(set: &SyntheticChainSet, r_c: u64) -> Result<OptimalityReport> {
    let mut candidates: Vec<f64> = set.tables().distortions().collect();
    candidates.sort_by(|a, b| b.total_cmp(a));
    candidates.dedup();
    let mut best: Option<TargetSolution> = None;
    for &d in &candidates {
        let s = target_distortion_solve(set, d);
        if s.bits <= r_c && best.as_ref().is_none_or(|b| s.bits > b.bits) {
            best = Some(s);
        }
    }
    let solution = best.unwrap_or_else(|| target_distortion_solve(set, f64::INFINITY));
    let out = set.encode(&solution.assignment);
    let d_star = out.max_distortion().1;
    let partition = partition(set, &solution.assignment, d_star);
    let vd = out.fluctuation();
    if solution.bits != r_c {
        return Ok(OptimalityReport {
            solution,
            partition,
            verdict: Verdict::PremiseUnmet,
            vd,
            exhaustive_vd: None,
        });
    }
    let qps: Vec<u8> = set.qp_range().iter().collect();
    let ex = exhaustive_minmax(set, r_c, &qps, RateRule::Exactly)?;
    let verdict = if vd <= ex.best_vd {
        Verdict::Optimal
    } else {
        Verdict::Violated
    };
    Ok(OptimalityReport {
        solution,
        partition,
        verdict,
        vd,
        exhaustive_vd: Some(ex.best_vd),
    })
}

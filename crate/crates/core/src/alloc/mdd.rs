//! Maximum distortion descend: exact, simplified and quality-constrained.

use log::debug;

use super::{AllocTrace, MddConfig};
use crate::error::{Error, Result};
use crate::rdcore::{DependentSourceSet, EncodeOutcome, QpAssignment};

/// Sources above the QP floor ordered by descending distortion, lowest index
/// first among equals.
fn eligible_by_distortion(x: &QpAssignment, out: &EncodeOutcome, qp_min: u8) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).filter(|&i| x[i] > qp_min).collect();
    idx.sort_by(|&a, &b| {
        out.per_source[b]
            .distortion
            .total_cmp(&out.per_source[a].distortion)
    });
    idx
}

/// Hard iteration cap of the exact descend: every pass lowers one QP by one.
pub fn exact_iteration_cap(n_sources: usize, range: crate::rdcore::QpRange) -> usize {
    n_sources * (range.max - range.min) as usize
}

/// Starting from all `qp_max`, repeatedly lowers by one the QP of the source
/// with the largest distortion until the rate reaches `r_c`. A final step
/// that overshoots is undone, so the returned rate never exceeds `r_c`.
pub fn mdd_exact<S: DependentSourceSet + ?Sized>(
    set: &S,
    r_c: u64,
) -> Result<(QpAssignment, AllocTrace)> {
    let range = set.qp_range();
    let n = set.n_sources();
    let mut x = QpAssignment::uniform(n, range.max);
    let mut out = set.encode(&x);
    if out.total_bits > r_c {
        return Err(Error::InfeasibleBudget {
            budget: r_c,
            minimum: out.total_bits,
        });
    }
    let cap = exact_iteration_cap(n, range);
    let mut trace = AllocTrace::start(&x, out.clone());
    while out.total_bits < r_c {
        let Some(&j) = eligible_by_distortion(&x, &out, range.min).first() else {
            trace.saturated = true;
            break;
        };
        let d_target = out.per_source[j].distortion;
        x[j] -= 1;
        let next = set.encode(&x);
        trace.push(d_target, j, vec![j], &next);
        assert!(
            trace.n_iter <= cap,
            "exact descend exceeded {cap} iterations"
        );
        if next.total_bits > r_c {
            x[j] += 1;
            trace.rolled_back = true;
            break;
        }
        out = next;
    }
    debug!(
        "mdd_exact: {} iterations, {} of {} bits",
        trace.n_iter, out.total_bits, r_c
    );
    trace.assignment = x.clone();
    trace.outcome = out;
    Ok((x, trace))
}

fn initial_assignment<S: DependentSourceSet + ?Sized>(
    set: &S,
    qp0: u8,
    cfg: &MddConfig,
) -> Result<QpAssignment> {
    cfg.validate()?;
    let range = set.qp_range();
    let start = qp0 as u32 + cfg.theta as u32;
    if !range.contains(qp0) || start > range.max as u32 {
        return Err(Error::InvalidConfig(format!(
            "qp0 {qp0} + theta {} outside [{}, {}]",
            cfg.theta, range.min, range.max
        )));
    }
    Ok(QpAssignment::uniform(set.n_sources(), start as u8))
}

/// Simplified descend: starts from `qp0 + theta` everywhere and lowers the
/// `L` worst sources by `delta` per pass while the rate is below
/// `r_c - alpha_bits`. An overshooting batch is undone as a whole.
///
/// If the uniform start already exceeds `r_c`, the uniform QP is raised
/// until it fits (up to `qp_max`).
pub fn mdd_simplified<S: DependentSourceSet + ?Sized>(
    set: &S,
    r_c: u64,
    qp0: u8,
    cfg: &MddConfig,
) -> Result<(QpAssignment, AllocTrace)> {
    let mut x = initial_assignment(set, qp0, cfg)?;
    let range = set.qp_range();
    let mut out = set.encode(&x);
    while out.total_bits > r_c {
        if x[0] == range.max {
            return Err(Error::InfeasibleBudget {
                budget: r_c,
                minimum: out.total_bits,
            });
        }
        x = QpAssignment::uniform(x.len(), x[0] + 1);
        out = set.encode(&x);
    }
    let target = r_c.saturating_sub(cfg.alpha_bits);
    let l = cfg.batch_size(set.n_sources());
    let mut trace = AllocTrace::start(&x, out.clone());
    while out.total_bits < target {
        if trace.n_iter >= cfg.max_iters {
            trace.hit_cap = true;
            break;
        }
        let order = eligible_by_distortion(&x, &out, range.min);
        if order.is_empty() {
            trace.saturated = true;
            break;
        }
        let batch: Vec<usize> = order.into_iter().take(l).collect();
        let prev = x.clone();
        for &i in &batch {
            x[i] = range.step_down(x[i], cfg.delta);
        }
        let next = set.encode(&x);
        trace.push(out.per_source[batch[0]].distortion, batch[0], batch, &next);
        if next.total_bits > r_c {
            x = prev;
            trace.rolled_back = true;
            break;
        }
        out = next;
    }
    debug!(
        "mdd_simplified: {} iterations, {} of {} bits",
        trace.n_iter, out.total_bits, r_c
    );
    trace.assignment = x.clone();
    trace.outcome = out;
    Ok((x, trace))
}

/// Quality-constrained descend: as [`mdd_simplified`] but iterates while the
/// frame quality is at most `q_c + beta_q`. Nothing is rolled back.
pub fn mdd_quality<S: DependentSourceSet + ?Sized>(
    set: &S,
    q_c: f64,
    qp0: u8,
    cfg: &MddConfig,
) -> Result<(QpAssignment, AllocTrace)> {
    let mut x = initial_assignment(set, qp0, cfg)?;
    if !(q_c >= 0.0 && q_c + cfg.beta_q < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "quality floor {q_c} plus guard band must stay below 1"
        )));
    }
    let range = set.qp_range();
    let mut out = set.encode(&x);
    let quality = |o: &EncodeOutcome| o.frame_quality.ok_or(Error::QualityUnavailable);
    let l = cfg.batch_size(set.n_sources());
    let mut trace = AllocTrace::start(&x, out.clone());
    while quality(&out)? <= q_c + cfg.beta_q {
        if trace.n_iter >= cfg.max_iters {
            trace.hit_cap = true;
            break;
        }
        let order = eligible_by_distortion(&x, &out, range.min);
        if order.is_empty() {
            trace.saturated = true;
            break;
        }
        let batch: Vec<usize> = order.into_iter().take(l).collect();
        for &i in &batch {
            x[i] = range.step_down(x[i], cfg.delta);
        }
        let next = set.encode(&x);
        trace.push(out.per_source[batch[0]].distortion, batch[0], batch, &next);
        out = next;
    }
    debug!(
        "mdd_quality: {} iterations, q = {:?}",
        trace.n_iter, out.frame_quality
    );
    trace.assignment = x.clone();
    trace.outcome = out;
    Ok((x, trace))
}

use crate::alloc::IndependentTables;
use crate::error::{Error, Result};
use crate::rdcore::QpAssignment;

#[derive(Debug, Clone, PartialEq)]
pub struct DpSolution {
    pub choice: Vec<usize>,
    pub assignment: QpAssignment,
    pub total_bits: u64,
    pub total_distortion: f64,
}

impl DpSolution {
    pub fn average_distortion(&self) -> f64 {
        self.total_distortion / self.choice.len() as f64
    }
}

/// Minimum total distortion subject to total bits at most `r_c`, by a
/// Viterbi pass over (source, cumulative bucketed bits). Each rate is rounded
/// up to whole buckets of `bucket_width` bits, so the result always fits and
/// is exact when the width is 1.
pub fn dp_independent(
    tables: &IndependentTables,
    r_c: u64,
    bucket_width: u64,
) -> Result<DpSolution> {
    if bucket_width == 0 {
        return Err(Error::InvalidConfig("bucket width must be positive".into()));
    }
    let cap = (r_c / bucket_width) as usize;
    let bucket = |r: u64| r.div_ceil(bucket_width) as usize;
    const NONE: usize = usize::MAX;
    // cost[b]: best distortion reaching bucket sum b; back[s][b]: (point, previous b)
    let mut cost = vec![f64::INFINITY; cap + 1];
    cost[0] = 0.0;
    let mut back: Vec<Vec<(usize, usize)>> = Vec::with_capacity(tables.sources.len());
    for points in &tables.sources {
        let mut next = vec![f64::INFINITY; cap + 1];
        let mut ptr = vec![(NONE, NONE); cap + 1];
        for (b, &c) in cost.iter().enumerate() {
            if c.is_infinite() {
                continue;
            }
            for (k, p) in points.iter().enumerate() {
                let nb = b + bucket(p.rate_bits);
                if nb > cap {
                    continue;
                }
                let v = c + p.distortion;
                if v < next[nb] {
                    next[nb] = v;
                    ptr[nb] = (k, b);
                }
            }
        }
        cost = next;
        back.push(ptr);
    }
    let end = (0..=cap)
        .filter(|&b| cost[b].is_finite())
        .min_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(a.cmp(&b)))
        .ok_or(Error::InfeasibleBudget {
            budget: r_c,
            minimum: tables.min_total_bits(),
        })?;
    let mut choice = vec![0; tables.sources.len()];
    let mut b = end;
    for s in (0..tables.sources.len()).rev() {
        let (k, prev) = back[s][b];
        choice[s] = k;
        b = prev;
    }
    let (total_bits, total_distortion) = tables.totals(&choice);
    Ok(DpSolution {
        assignment: tables.assignment(&choice),
        choice,
        total_bits,
        total_distortion,
    })
}

//! MINAVE allocation for independent sources by Lagrangian relaxation.

use crate::error::{Error, Result};
use crate::rdcore::QpAssignment;

/// One operating point of an independent source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RdPoint {
    pub qp: u8,
    pub rate_bits: u64,
    pub distortion: f64,
}

/// Operating points per source; sources do not interact.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependentTables {
    pub sources: Vec<Vec<RdPoint>>,
}

impl IndependentTables {
    pub fn new(sources: Vec<Vec<RdPoint>>) -> Result<Self> {
        if sources.is_empty() || sources.iter().any(|s| s.is_empty()) {
            return Err(Error::InvalidTable(
                "every source needs at least one point".into(),
            ));
        }
        if sources
            .iter()
            .flatten()
            .any(|p| !(p.distortion >= 0.0 && p.distortion.is_finite()))
        {
            return Err(Error::InvalidTable(
                "distortions must be finite and non-negative".into(),
            ));
        }
        Ok(IndependentTables { sources })
    }

    pub fn min_total_bits(&self) -> u64 {
        self.sources
            .iter()
            .map(|s| s.iter().map(|p| p.rate_bits).min().unwrap())
            .sum()
    }

    /// Keeps only the points on each source's lower convex hull.
    pub fn convexified(&self) -> Self {
        let sources = self.sources.iter().map(|s| lower_hull(s)).collect();
        IndependentTables { sources }
    }

    pub fn assignment(&self, choice: &[usize]) -> QpAssignment {
        QpAssignment::new(
            choice
                .iter()
                .zip(&self.sources)
                .map(|(&c, s)| s[c].qp)
                .collect(),
        )
    }

    pub fn totals(&self, choice: &[usize]) -> (u64, f64) {
        choice
            .iter()
            .zip(&self.sources)
            .fold((0, 0.0), |(r, d), (&c, s)| {
                (r + s[c].rate_bits, d + s[c].distortion)
            })
    }
}

/// Lower convex hull of the (rate, distortion) points, ordered by rate.
fn lower_hull(points: &[RdPoint]) -> Vec<RdPoint> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| {
        a.rate_bits
            .cmp(&b.rate_bits)
            .then(a.distortion.total_cmp(&b.distortion))
    });
    pts.dedup_by_key(|p| p.rate_bits);
    // drop points not strictly better in distortion than a cheaper one
    let mut mono: Vec<RdPoint> = Vec::new();
    for p in pts {
        if mono.last().is_none_or(|m| p.distortion < m.distortion) {
            mono.push(p);
        }
    }
    let mut hull: Vec<RdPoint> = Vec::new();
    for p in mono {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.rate_bits as f64 - a.rate_bits as f64) * (p.distortion - a.distortion)
                - (b.distortion - a.distortion) * (p.rate_bits as f64 - a.rate_bits as f64);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianSolution {
    /// Chosen point index per source.
    pub choice: Vec<usize>,
    pub assignment: QpAssignment,
    pub lambda: f64,
    pub total_bits: u64,
    pub total_distortion: f64,
}

impl LagrangianSolution {
    pub fn average_distortion(&self) -> f64 {
        self.total_distortion / self.choice.len() as f64
    }
}

/// Per-source `argmin d + lambda * r`, preferring the cheaper point on ties.
fn choose(tables: &IndependentTables, lambda: f64) -> Vec<usize> {
    tables
        .sources
        .iter()
        .map(|s| {
            let cost = |p: &RdPoint| p.distortion + lambda * p.rate_bits as f64;
            (0..s.len())
                .min_by(|&a, &b| {
                    cost(&s[a])
                        .total_cmp(&cost(&s[b]))
                        .then(s[a].rate_bits.cmp(&s[b].rate_bits))
                        .then(a.cmp(&b))
                })
                .unwrap()
        })
        .collect()
}

/// Bisection on the multiplier. The only values of `lambda` at which any
/// source changes its choice are the pairwise slopes of its points, so the
/// search runs over that sorted set and the result is the smallest-lambda
/// (lowest distortion) Lagrangian solution fitting `r_c`.
pub fn lagrangian_independent(tables: &IndependentTables, r_c: u64) -> Result<LagrangianSolution> {
    let mut lambdas = vec![0.0];
    for s in &tables.sources {
        for a in s {
            for b in s {
                if b.rate_bits > a.rate_bits && a.distortion > b.distortion {
                    lambdas
                        .push((a.distortion - b.distortion) / (b.rate_bits - a.rate_bits) as f64);
                }
            }
        }
    }
    lambdas.sort_by(f64::total_cmp);
    lambdas.dedup();
    // rounding can break the tie at the largest slope the wrong way
    lambdas.push(2.0 * lambdas.last().unwrap() + 1.0);
    let fits = |lambda: f64| tables.totals(&choose(tables, lambda)).0 <= r_c;
    // beyond every slope each source sits at its cheapest point
    let top = *lambdas.last().unwrap();
    if !fits(top) {
        return Err(Error::InfeasibleBudget {
            budget: r_c,
            minimum: tables.totals(&choose(tables, top)).0,
        });
    }
    let (mut lo, mut hi) = (0usize, lambdas.len() - 1);
    if fits(lambdas[0]) {
        hi = 0;
    }
    // invariant: lambdas[hi] fits, lambdas[lo] does not (unless hi == 0)
    while hi > lo + 1 {
        let mid = (lo + hi) / 2;
        if fits(lambdas[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let lambda = lambdas[hi];
    let choice = choose(tables, lambda);
    let (total_bits, total_distortion) = tables.totals(&choice);
    Ok(LagrangianSolution {
        assignment: tables.assignment(&choice),
        choice,
        lambda,
        total_bits,
        total_distortion,
    })
}

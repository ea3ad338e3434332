use crate::error::{Error, Result};
use crate::rdcore::{DependentSourceSet, QpAssignment};

/// Enumeration guard.
pub const MAX_ENUMERATION: u128 = 10_000_000;

/// Which assignments count as feasible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateRule {
    AtMost,
    Exactly,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExhaustiveResult {
    pub feasible: usize,
    pub best_vd: f64,
    /// Every feasible assignment achieving `best_vd`, in enumeration order.
    pub vd_optimal: Vec<QpAssignment>,
    pub best_max_distortion: f64,
    pub max_optimal: Vec<QpAssignment>,
}

/// Visits every assignment over `qp_subset`, the first source varying slowest.
pub(crate) fn for_each_assignment(n: usize, qp_subset: &[u8], mut f: impl FnMut(&QpAssignment)) {
    let mut digits = vec![0usize; n];
    let mut x = QpAssignment::uniform(n, qp_subset[0]);
    loop {
        f(&x);
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < qp_subset.len() {
                x[i] = qp_subset[digits[i]];
                break;
            }
            digits[i] = 0;
            x[i] = qp_subset[0];
        }
    }
}

pub(crate) fn enumeration_size(n: usize, k: usize) -> u128 {
    (0..n)
        .try_fold(1u128, |acc, _| acc.checked_mul(k as u128))
        .unwrap_or(u128::MAX)
}

/// Ground-truth MINMAX search by enumeration.
pub fn exhaustive_minmax<S: DependentSourceSet + ?Sized>(
    set: &S,
    r_c: u64,
    qp_subset: &[u8],
    rule: RateRule,
) -> Result<ExhaustiveResult> {
    let n = set.n_sources();
    if qp_subset.is_empty() {
        return Err(Error::InvalidConfig("empty qp subset".into()));
    }
    if let Some(&q) = qp_subset.iter().find(|&&q| !set.qp_range().contains(q)) {
        let r = set.qp_range();
        return Err(Error::QpOutOfRange {
            index: 0,
            qp: q,
            min: r.min,
            max: r.max,
        });
    }
    let count = enumeration_size(n, qp_subset.len());
    if count > MAX_ENUMERATION {
        return Err(Error::InstanceTooLarge {
            count,
            limit: MAX_ENUMERATION,
        });
    }
    let mut res = ExhaustiveResult {
        feasible: 0,
        best_vd: f64::INFINITY,
        vd_optimal: Vec::new(),
        best_max_distortion: f64::INFINITY,
        max_optimal: Vec::new(),
    };
    for_each_assignment(n, qp_subset, |x| {
        let out = set.encode(x);
        let ok = match rule {
            RateRule::AtMost => out.total_bits <= r_c,
            RateRule::Exactly => out.total_bits == r_c,
        };
        if !ok {
            return;
        }
        res.feasible += 1;
        let vd = out.fluctuation();
        if vd < res.best_vd {
            res.best_vd = vd;
            res.vd_optimal.clear();
        }
        if vd == res.best_vd {
            res.vd_optimal.push(x.clone());
        }
        let md = out.max_distortion().1;
        if md < res.best_max_distortion {
            res.best_max_distortion = md;
            res.max_optimal.clear();
        }
        if md == res.best_max_distortion {
            res.max_optimal.push(x.clone());
        }
    });
    if res.feasible == 0 {
        return Err(Error::NoFeasibleAssignment);
    }
    Ok(res)
}

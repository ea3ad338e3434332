//! Table-backed source sets with a chain dependency: source `i` is coded
//! relative to source `i - 1`, so its rate and distortion are a function of
//! `(own QP, predecessor QP)`. Source 0 depends only on its own QP.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use super::{
    DependentSourceSet, DistortionMetric, EncodeOutcome, QpAssignment, QpRange, SourceOutcome,
};
use crate::error::{Error, Result};

/// Raw lookup tables. No invariant is enforced here; see [`SyntheticChainSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChainTables {
    range: QpRange,
    // source 0: indexed by own qp; others: own * |x| + pred
    entries: Vec<Vec<SourceOutcome>>,
}

/// A single m.r.d. failure: stepping from `qp` to `qp + 1` with the
/// predecessor fixed raised the rate or lowered the distortion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableViolation {
    pub source: usize,
    pub pred_qp: Option<u8>,
    pub qp: u8,
    pub kind: ViolationKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    RateIncrease,
    DistortionDecrease,
}

/// Conditions beyond m.r.d. under which the target-distortion structure is
/// well behaved on a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regularity {
    /// `d_i` does not depend on the predecessor QP.
    pub pred_independent_distortion: bool,
    /// Lowering any single QP never lowers the total rate.
    pub total_rate_monotone: bool,
    /// ... and always raises it.
    pub total_rate_strict: bool,
}

impl Regularity {
    pub fn is_regular(&self) -> bool {
        self.pred_independent_distortion && self.total_rate_monotone
    }
}

impl ChainTables {
    /// Builds tables by calling `f(source, own_qp, pred_qp)` for every cell;
    /// `pred_qp` is `None` for source 0.
    pub fn from_fn(
        n_sources: usize,
        range: QpRange,
        mut f: impl FnMut(usize, u8, Option<u8>) -> SourceOutcome,
    ) -> Self {
        let entries = (0..n_sources)
            .map(|s| {
                if s == 0 {
                    range.iter().map(|q| f(0, q, None)).collect()
                } else {
                    range
                        .iter()
                        .flat_map(|q| range.iter().map(move |p| (q, p)))
                        .map(|(q, p)| f(s, q, Some(p)))
                        .collect()
                }
            })
            .collect();
        ChainTables { range, entries }
    }

    pub fn n_sources(&self) -> usize {
        self.entries.len()
    }

    pub fn range(&self) -> QpRange {
        self.range
    }

    fn slot(&self, source: usize, own: u8, pred: Option<u8>) -> usize {
        let q = (own - self.range.min) as usize;
        if source == 0 {
            q
        } else {
            let p =
                (pred.expect("non-first source needs a predecessor qp") - self.range.min) as usize;
            q * self.range.len() + p
        }
    }

    /// Every distortion value stored in the tables.
    pub fn distortions(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().flatten().map(|e| e.distortion)
    }

    pub fn get(&self, source: usize, own: u8, pred: Option<u8>) -> SourceOutcome {
        self.entries[source][self.slot(source, own, pred)]
    }

    pub fn set(&mut self, source: usize, own: u8, pred: Option<u8>, value: SourceOutcome) {
        let slot = self.slot(source, own, pred);
        self.entries[source][slot] = value;
    }

    fn pred_choices(&self, source: usize) -> Vec<Option<u8>> {
        if source == 0 {
            vec![None]
        } else {
            self.range.iter().map(Some).collect()
        }
    }

    /// Exhaustive m.r.d. scan over every (source, predecessor) column.
    pub fn mrd_violations(&self) -> Vec<TableViolation> {
        let mut out = Vec::new();
        for source in 0..self.n_sources() {
            for pred in self.pred_choices(source) {
                for qp in self.range.min..self.range.max {
                    let lo = self.get(source, qp, pred);
                    let hi = self.get(source, qp + 1, pred);
                    if hi.rate_bits > lo.rate_bits {
                        out.push(TableViolation {
                            source,
                            pred_qp: pred,
                            qp,
                            kind: ViolationKind::RateIncrease,
                        });
                    }
                    if hi.distortion < lo.distortion {
                        out.push(TableViolation {
                            source,
                            pred_qp: pred,
                            qp,
                            kind: ViolationKind::DistortionDecrease,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn regularity(&self) -> Regularity {
        let n = self.n_sources();
        let mut pred_independent_distortion = true;
        for source in 1..n {
            for q in self.range.iter() {
                let d0 = self.get(source, q, Some(self.range.min)).distortion;
                if self
                    .range
                    .iter()
                    .any(|p| self.get(source, q, Some(p)).distortion != d0)
                {
                    pred_independent_distortion = false;
                }
            }
        }
        // Lowering x_i from q + 1 to q touches r_i (own) and r_{i+1} (as predecessor).
        let mut monotone = true;
        let mut strict = true;
        for i in 0..n {
            let own_preds = self.pred_choices(i);
            let succ_owns: Vec<Option<u8>> = if i + 1 < n {
                self.range.iter().map(Some).collect()
            } else {
                vec![None]
            };
            for q in self.range.min..self.range.max {
                for &p in &own_preds {
                    for &s in &succ_owns {
                        let mut lower = self.get(i, q, p).rate_bits as i128;
                        let mut upper = self.get(i, q + 1, p).rate_bits as i128;
                        if let Some(s) = s {
                            lower += self.get(i + 1, s, Some(q)).rate_bits as i128;
                            upper += self.get(i + 1, s, Some(q + 1)).rate_bits as i128;
                        }
                        if lower < upper {
                            monotone = false;
                        }
                        if lower <= upper {
                            strict = false;
                        }
                    }
                }
            }
        }
        Regularity {
            pred_independent_distortion,
            total_rate_monotone: monotone,
            total_rate_strict: strict,
        }
    }

    /// Parses the whitespace-separated table format:
    /// `source own_qp pred_qp rate_bits distortion`, with `-` as the
    /// predecessor of source 0 and `#` starting a comment.
    pub fn parse(text: &str) -> Result<Self> {
        struct Row {
            source: usize,
            own: u8,
            pred: Option<u8>,
            value: SourceOutcome,
        }
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidTable(format!("line {}: {what}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 5 {
                return Err(bad("expected 5 fields"));
            }
            let source: usize = fields[0].parse().map_err(|_| bad("bad source index"))?;
            let own: u8 = fields[1].parse().map_err(|_| bad("bad own qp"))?;
            let pred = match fields[2] {
                "-" => None,
                s => Some(s.parse::<u8>().map_err(|_| bad("bad predecessor qp"))?),
            };
            if (source == 0) != pred.is_none() {
                return Err(bad("source 0 takes '-' as predecessor, all others a qp"));
            }
            let rate_bits: u64 = fields[3].parse().map_err(|_| bad("bad rate"))?;
            let distortion: f64 = fields[4].parse().map_err(|_| bad("bad distortion"))?;
            if !distortion.is_finite() || distortion < 0.0 {
                return Err(bad("distortion must be finite and non-negative"));
            }
            rows.push(Row {
                source,
                own,
                pred,
                value: SourceOutcome {
                    rate_bits,
                    distortion,
                },
            });
        }
        if rows.is_empty() {
            return Err(Error::InvalidTable("no rows".into()));
        }
        let n = rows.iter().map(|r| r.source).max().unwrap() + 1;
        let min = rows.iter().map(|r| r.own).min().unwrap();
        let max = rows.iter().map(|r| r.own).max().unwrap();
        let range = QpRange::new(min, max)?;
        let mut seen: Vec<Vec<bool>> = (0..n)
            .map(|s| {
                vec![
                    false;
                    if s == 0 {
                        range.len()
                    } else {
                        range.len() * range.len()
                    }
                ]
            })
            .collect();
        let mut tables = ChainTables::from_fn(n, range, |_, _, _| SourceOutcome {
            rate_bits: 0,
            distortion: 0.0,
        });
        for r in rows {
            if r.pred.is_some_and(|p| !range.contains(p)) {
                return Err(Error::InvalidTable(format!(
                    "source {} predecessor qp outside [{min}, {max}]",
                    r.source
                )));
            }
            let slot = tables.slot(r.source, r.own, r.pred);
            if std::mem::replace(&mut seen[r.source][slot], true) {
                return Err(Error::InvalidTable(format!(
                    "duplicate row for source {} qp {} pred {:?}",
                    r.source, r.own, r.pred
                )));
            }
            tables.entries[r.source][slot] = r.value;
        }
        if let Some(s) = seen.iter().position(|v| v.iter().any(|b| !b)) {
            return Err(Error::InvalidTable(format!(
                "table for source {s} is incomplete"
            )));
        }
        Ok(tables)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# source own_qp pred_qp rate_bits distortion\n");
        for s in 0..self.n_sources() {
            for q in self.range.iter() {
                for p in self.pred_choices(s) {
                    let v = self.get(s, q, p);
                    let pred = p.map_or_else(|| "-".to_string(), |p| p.to_string());
                    writeln!(out, "{s} {q} {pred} {} {}", v.rate_bits, v.distortion).unwrap();
                }
            }
        }
        out
    }
}

/// Chain tables that satisfy m.r.d.: for each source and fixed predecessor
/// QP, lowering the own QP never lowers the rate and never raises the
/// distortion.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticChainSet {
    tables: ChainTables,
}

impl SyntheticChainSet {
    pub fn new(tables: ChainTables) -> Result<Self> {
        if tables.n_sources() == 0 {
            return Err(Error::InvalidTable("no sources".into()));
        }
        if let Some(v) = tables.mrd_violations().first() {
            return Err(Error::InvalidTable(format!(
                "m.r.d. violated: source {} pred {:?} between qp {} and {} ({:?})",
                v.source,
                v.pred_qp,
                v.qp,
                v.qp + 1,
                v.kind
            )));
        }
        Ok(SyntheticChainSet { tables })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(ChainTables::parse(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn tables(&self) -> &ChainTables {
        &self.tables
    }

    /// Outcome of source `i` given the full assignment.
    pub fn source_outcome(&self, i: usize, x: &QpAssignment) -> SourceOutcome {
        let pred = if i == 0 { None } else { Some(x[i - 1]) };
        self.tables.get(i, x[i], pred)
    }
}

impl DependentSourceSet for SyntheticChainSet {
    fn n_sources(&self) -> usize {
        self.tables.n_sources()
    }

    fn qp_range(&self) -> QpRange {
        self.tables.range
    }

    fn metric(&self) -> DistortionMetric {
        DistortionMetric::Tabulated
    }

    fn encode(&self, x: &QpAssignment) -> EncodeOutcome {
        let per_source = (0..self.n_sources())
            .map(|i| self.source_outcome(i, x))
            .collect();
        EncodeOutcome::new(per_source, None)
    }
}

// Distortions live on a 1/4096 grid so text round trips are exact.
const GRID: f64 = 4096.0;

fn grid(v: u32) -> f64 {
    v as f64 / GRID
}

/// Strictly decreasing per-source base rates, indexed by `qp - min`, plus the
/// per-step rate gaps (`gaps[k] = base[k] - base[k + 1]`).
fn random_rates(rng: &mut impl Rng, levels: usize) -> (Vec<u64>, Vec<u64>) {
    let mut base = vec![0u64; levels];
    base[levels - 1] = rng.gen_range(20..=60);
    let mut gaps = vec![0u64; levels.saturating_sub(1)];
    for k in (0..levels - 1).rev() {
        gaps[k] = rng.gen_range(8..=40);
        base[k] = base[k + 1] + gaps[k];
    }
    (base, gaps)
}

/// Non-decreasing reference penalty: a coarser predecessor costs the
/// successor extra bits, bounded so the predecessor's own savings dominate.
fn bounded_coupling(rng: &mut impl Rng, pred_gaps: &[u64]) -> Vec<u64> {
    let mut c = vec![0u64; pred_gaps.len() + 1];
    for k in 0..pred_gaps.len() {
        c[k + 1] = c[k] + rng.gen_range(0..pred_gaps[k]);
    }
    c
}

fn increasing_distortions(rng: &mut impl Rng, levels: usize) -> Vec<f64> {
    let mut acc = rng.gen_range(0..=64u32);
    (0..levels)
        .map(|k| {
            if k > 0 {
                acc += rng.gen_range(16..=400);
            }
            grid(acc)
        })
        .collect()
}

fn assemble(
    range: QpRange,
    dist: Vec<Vec<f64>>,
    rates: Vec<Vec<u64>>,
    coupling: Vec<Vec<u64>>,
) -> ChainTables {
    ChainTables::from_fn(dist.len(), range, |s, q, p| {
        let k = (q - range.min) as usize;
        let extra = p.map_or(0, |p| coupling[s][(p - range.min) as usize]);
        SourceOutcome {
            rate_bits: rates[s][k] + extra,
            distortion: dist[s][k],
        }
    })
}

/// Random chain set satisfying m.r.d. and strict regularity: distortion
/// depends only on the own QP and lowering any QP strictly raises the total
/// rate.
pub fn random_regular_chain(rng: &mut impl Rng, n: usize, range: QpRange) -> SyntheticChainSet {
    let levels = range.len();
    let mut rates = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n);
    for _ in 0..n {
        let (b, g) = random_rates(rng, levels);
        rates.push(b);
        gaps.push(g);
    }
    let coupling = (0..n)
        .map(|s| {
            if s == 0 {
                vec![0; levels]
            } else {
                bounded_coupling(rng, &gaps[s - 1])
            }
        })
        .collect();
    let dist = (0..n)
        .map(|_| increasing_distortions(rng, levels))
        .collect();
    SyntheticChainSet::new(assemble(range, dist, rates, coupling))
        .expect("generator yields m.r.d. tables")
}

/// Random chain set satisfying m.r.d. only. A coarser predecessor raises the
/// successor's rate and distortion without any bound, so regularity is not
/// guaranteed.
pub fn random_mrd_chain(rng: &mut impl Rng, n: usize, range: QpRange) -> SyntheticChainSet {
    let levels = range.len();
    let rates: Vec<Vec<u64>> = (0..n).map(|_| random_rates(rng, levels).0).collect();
    let dist: Vec<Vec<f64>> = (0..n)
        .map(|_| increasing_distortions(rng, levels))
        .collect();
    let rate_pen: Vec<Vec<u64>> = (0..n)
        .map(|_| {
            let mut acc = 0;
            (0..levels)
                .map(|k| {
                    if k > 0 {
                        acc += rng.gen_range(0..=60);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let dist_pen: Vec<Vec<u32>> = (0..n)
        .map(|_| {
            let mut acc = 0;
            (0..levels)
                .map(|k| {
                    if k > 0 {
                        acc += rng.gen_range(0..=300);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let tables = ChainTables::from_fn(n, range, |s, q, p| {
        let k = (q - range.min) as usize;
        let (rp, dp) = match p {
            Some(p) if s > 0 => {
                let j = (p - range.min) as usize;
                (rate_pen[s][j], grid(dist_pen[s][j]))
            }
            _ => (0, 0.0),
        };
        SourceOutcome {
            rate_bits: rates[s][k] + rp,
            distortion: dist[s][k] + dp,
        }
    });
    SyntheticChainSet::new(tables).expect("generator yields m.r.d. tables")
}

/// A regular chain set with a target distortion `d_star` planted: in
/// `x_star` every source sits either exactly at `d_star` or at `qp_max` with
/// a smaller distortion, and `budget` is exactly its rate.
#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub set: SyntheticChainSet,
    pub d_star: f64,
    pub x_star: QpAssignment,
    pub budget: u64,
}

pub fn planted_chain(rng: &mut impl Rng, n: usize, range: QpRange) -> PlantedInstance {
    let levels = range.len();
    let d_star_units: u32 = rng.gen_range(2048..=3072);
    let forced = rng.gen_range(0..n);
    let mut dist = Vec::with_capacity(n);
    let mut star = Vec::with_capacity(n);
    for s in 0..n {
        let clamped = s != forced && rng.gen_bool(0.3);
        let mut d = vec![0u32; levels];
        let anchor;
        if clamped {
            // d_max strictly below d*
            anchor = levels - 1;
            d[anchor] = d_star_units - rng.gen_range(16..=1000);
        } else {
            anchor = rng.gen_range(0..levels);
            d[anchor] = d_star_units;
        }
        for k in anchor + 1..levels {
            d[k] = d[k - 1] + rng.gen_range(16..=200);
        }
        for k in (0..anchor).rev() {
            d[k] = d[k + 1] - rng.gen_range(16..=200);
        }
        star.push(range.min + anchor as u8);
        dist.push(d.into_iter().map(grid).collect());
    }
    let mut rates = Vec::with_capacity(n);
    let mut gaps = Vec::with_capacity(n);
    for _ in 0..n {
        let (b, g) = random_rates(rng, levels);
        rates.push(b);
        gaps.push(g);
    }
    let coupling = (0..n)
        .map(|s| {
            if s == 0 {
                vec![0; levels]
            } else {
                bounded_coupling(rng, &gaps[s - 1])
            }
        })
        .collect();
    let set = SyntheticChainSet::new(assemble(range, dist, rates, coupling))
        .expect("generator yields m.r.d. tables");
    let x_star = QpAssignment::new(star);
    let budget = set.encode(&x_star).total_bits;
    PlantedInstance {
        set,
        d_star: grid(d_star_units),
        x_star,
        budget,
    }
}

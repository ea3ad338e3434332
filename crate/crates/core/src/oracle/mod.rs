//! Brute-force and analytic verifiers.
//!
//! These are deliberately simple: enumeration, per-source table inversion
//! and a bit-exact dynamic program. They exist to check the allocators on
//! instances small enough to solve outright.

mod audit;
mod dp;
mod exhaustive;
mod optimality;
mod target;

pub use audit::{mrd_audit, mrd_audit_tables, MrdReport};
pub use dp::{dp_independent, DpSolution};
pub use exhaustive::{exhaustive_minmax, ExhaustiveResult, RateRule, MAX_ENUMERATION};
pub use optimality::{partition, theorem1_check, OptimalityReport, PartitionReport, Verdict};
pub use target::{
    default_schedule, target_distortion_solve, theorem2_sweep, Regime, SweepResult, TargetSolution,
};

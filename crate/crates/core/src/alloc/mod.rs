//! Bit allocation: the maximum distortion descend family and its baselines.

mod config;
mod gop;
mod lagrangian;
mod mdd;
mod trace;

pub use config::MddConfig;
pub use gop::{
    estimate_qp0, fixed_qp_encode, frame_budget_split, mb_mdd, FrameEncode, GopFrameAllocation,
    GopOptions, Qp0Estimate,
};
pub use lagrangian::{lagrangian_independent, IndependentTables, LagrangianSolution, RdPoint};
pub use mdd::{exact_iteration_cap, mdd_exact, mdd_quality, mdd_simplified};
pub use trace::{AllocTrace, IterRecord};

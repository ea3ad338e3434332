//! Macroblock-level bit allocation under the MINMAX criterion.
//!
//! The crate is organised around a single abstraction, [`DependentSourceSet`]:
//! something that maps a per-source QP assignment to per-source rates and
//! distortions. Two implementations exist: [`SyntheticChainSet`] (lookup
//! tables with a chain dependency, used by the brute-force oracles) and
//! [`CodecFrameSet`] (a real encode of one frame by the toy block codec in
//! [`codec`], with SSIM-based per-macroblock distortion).
//!
//! The allocators in [`alloc`] (maximum distortion descend and its
//! simplified, quality-constrained and GOP-level variants) only talk to that
//! trait. [`oracle`] holds exhaustive and analytic verifiers, and
//! [`experiment`] wires everything into the fixed-QP comparison protocol.

pub mod alloc;
pub mod codec;
pub mod error;
pub mod experiment;
pub mod metrics;
pub mod oracle;
pub mod rdcore;
pub mod video;

pub use alloc::{AllocTrace, MddConfig};
pub use codec::{CodecConfig, CodecFrameSet, Frame, MbGrid};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentReport, ExperimentSpec};
pub use metrics::{DistortionMap, SsimParams};
pub use rdcore::{
    Constraint, DependentSourceSet, DistortionMetric, EncodeOutcome, QpAssignment, QpRange,
    SourceOutcome, SyntheticChainSet,
};

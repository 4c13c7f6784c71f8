//! Random annex codes: random linear network coding over generations that
//! share randomly chosen packets.
//!
//! - [`gfield`]: GF(2^m) arithmetic and dense elimination.
//! - [`layout`]: random annex, head-to-toe and disjoint generation structures.
//! - [`codec`]: encoder and the cascading per-generation decoder.
//! - [`analysis`]: overlap statistics and the expected-throughput predictor,
//!   generic over the float type.
//! - [`simulate`]: Monte Carlo trials, packet-count summaries and failure curves.

pub mod analysis;
pub mod codec;
pub mod error;
pub mod gfield;
pub mod layout;
pub mod num;
pub mod simulate;

pub use codec::{CodedPacket, DecodeReport, Decoder, Encoder, Packet};
pub use error::{Error, Result};
pub use gfield::{FieldElement, FieldSpec, GaloisField, Matrix};
pub use layout::{layout_statistics, CodeParams, GenerationLayout, LayoutStats, Scheme};
pub use num::Real;
pub use simulate::{empirical_overlap, run_trial, Experiment, FailureCurve, Summary, TrialResult};

pub type OverlapProfile64 = analysis::OverlapProfile<f64>;
pub type OverlapProfile32 = analysis::OverlapProfile<f32>;
pub type Prediction64 = analysis::Prediction<f64>;
pub type Prediction32 = analysis::Prediction<f32>;
pub type LayoutStats64 = LayoutStats<f64>;
pub type CollectionIntegrand64 = analysis::CollectionIntegrand<f64>;

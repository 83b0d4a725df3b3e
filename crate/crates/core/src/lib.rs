//! Cross-lingual representation alignment analysis for parallel English,
//! Hindi and code-mixed sentence embeddings.
//!
//! The crate reads per-layer sentence embeddings exported from multilingual
//! encoders and measures how well the three languages line up: retrieval
//! accuracy under length-matched negatives, linear CKA and SVCCA, Gaussian
//! uncertainty reduction, rank-inverse saliency, and the CLAS and Consistency
//! composite scores. It also carries the trilingual cosine alignment
//! objective with its gradient and a small free-embedding optimizer.

pub mod embedio;
pub mod error;
pub(crate) mod linalg;
pub mod repsim;
pub mod retrieval;
pub mod infotheory;
pub mod saliency;
pub mod scores;
pub mod alignloss;
pub mod synthgen;
pub mod report;
pub mod rng;

pub use error::{Error, Result};

//! Noise-tolerant multichannel sEMG classification.
//!
//! Per-channel one-class detectors estimate how clean each channel of a
//! segment is. Those estimates become fuzzy memberships that scale the
//! similarities of a per-channel KNN ensemble, so contaminated channels
//! contribute little to the final class supports.
//!
//! The crate also carries the experimental harness around the classifier:
//! SNR-controlled contamination, db6 wavelet features, attribute-weighting
//! baselines, metrics, repeated cross-validation and pairwise statistics.
//!
//! ```text
//! recording -> segment -> db6 MAV/SSC features -> standardise
//!     -> per-channel one-class SVM score -> membership r_l
//!     -> r_l · sim(x_l, x_{l,n}) -> per-channel top-K -> class supports
//! ```
//!
//! See the `examples/` directory for one runnable program per capability.

// Validation uses `!(x > 0.0)` style checks on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod contam;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod features;
pub mod fuzzy;
pub mod model;
pub mod occ;
pub mod seed;

pub use error::{Error, Result};

//! Concurrent codes: superimposed prefix-hash encoding over an asymmetric
//! (OR) channel.
//!
//! Messages are absorbed bit by bit into a small LFSR hash; every absorbed
//! prefix places a mark in a shared codeword, and many messages are
//! superimposed by OR. Decoding walks the binary prefix tree and keeps a
//! branch only while its marks are present (or fall inside a declared
//! erasure), so encoded messages can never be lost, only accompanied by
//! false decodings ("hallucinations").
//!
//! The crate is split into:
//!
//! * [`prbs`]: the progressive LFSR hash.
//! * [`codeword`]: the codeword bit array and its `CCW v1` text format.
//! * [`codec`]: encoding, gap detection and tree decoding.
//! * [`channel`]: random marks, burst erasures and an analog amplitude layer.
//! * [`model`]: closed-form predictions (marks, branches, thresholds).
//! * [`hamming`]: the interleaved Hamming(8,4) comparison baseline.
//! * [`experiment`]: Monte-Carlo sweeps that emit CSV tables.
//!
//! Numeric code in [`model`], [`special`] and the analog half of [`channel`]
//! is generic over [`Real`] (`f32` or `f64`); the aliases below pin the
//! common `f64` instantiations.

pub mod channel;
pub mod codec;
pub mod codeword;
mod error;
pub mod experiment;
pub mod hamming;
pub mod messages;
pub mod model;
pub mod prbs;
pub mod scalar;
pub mod special;

pub use channel::{NoiseSpec, RngStream};
pub use codec::{CodecParams, DecodeReport, GapMask, Interval, MessageWord};
pub use codeword::Codeword;
pub use error::{Error, Result};
pub use model::ExponentMode;
pub use prbs::{HashConfig, HashState};
pub use scalar::Real;

/// Model parameters in double precision.
pub type ModelParams = model::ModelParams<f64>;
/// Model parameters in single precision.
pub type ModelParamsF32 = model::ModelParams<f32>;
/// Analog codeword with `f64` amplitudes.
pub type AnalogCodeword = channel::AnalogCodeword<f64>;
/// Analog codeword with `f32` amplitudes.
pub type AnalogCodewordF32 = channel::AnalogCodeword<f32>;

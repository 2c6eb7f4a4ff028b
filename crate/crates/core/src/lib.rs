//! Polar-code construction, decoding and simulation toolkit.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the common double-precision choices.

pub mod analysis;
pub mod channel;
pub mod code;
pub mod construct;
pub mod decoder;
mod error;
pub mod genalg;
pub mod rng;
pub mod scalar;
pub mod sim;

pub use channel::{ChannelConfig, ChannelKind, LlrFrame};
pub use code::{AVector, BitRole, BitWord, CodeSpec, CrcConfig, PolarCode};
pub use construct::ReliabilityVector;
pub use decoder::{BpConfig, CheckRule, DecodeResult, DecoderConfig};
pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision LLR.
pub type Llr = f64;
/// Double-precision channel frame.
pub type Frame = LlrFrame<f64>;
/// Single-precision channel frame.
pub type Frame32 = LlrFrame<f32>;
/// Double-precision reliability vector.
pub type Reliability = ReliabilityVector<f64>;

//! Decoders: SC, SCL, CRC-aided SCL, flooding BP, and an exhaustive ML oracle.
//!
//! All decoders work on the natural-order transform `v = u · F^{⊗n}`; the
//! channel LLRs are bit-reversed on entry because `x = bitrev(v)`.

mod bp;
mod ml;
mod sc;
mod scl;

pub use bp::{decode_bp, BpConfig, BpOutput, CheckRule};
pub use ml::{decode_ml_oracle, ML_MAX_INFO_BITS};
pub use sc::decode_sc;
pub use scl::{decode_scl, decode_scl_crc, decode_scl_traced, SclCandidate, SclOutput};

use serde::{Deserialize, Serialize};

use crate::channel::LlrFrame;
use crate::code::{polar_transform_bits, BitRole, BitWord, PolarCode};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Output of a single decode.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub u_hat: BitWord,
    /// Always `polar_transform(u_hat)`.
    pub x_hat: BitWord,
    /// Payload bits (CRC stripped).
    pub message_hat: BitWord,
    /// Path metric (SCL), correlation discrepancy (ML), zero otherwise.
    pub metric: f64,
    /// BP iterations actually run; zero for the other decoders.
    pub iterations_used: usize,
    pub crc_pass: Option<bool>,
}

impl DecodeResult {
    pub(crate) fn from_u(
        code: &PolarCode,
        u: Vec<u8>,
        metric: f64,
        iterations_used: usize,
        crc_pass: Option<bool>,
    ) -> Self {
        debug_assert!(
            code.avector().frozen_positions().iter().all(|&i| u[i] == 0),
            "decoder set a frozen bit"
        );
        let x = polar_transform_bits(&u);
        let payload = code.gather_payload(&u);
        Self {
            u_hat: BitWord::from_bits(&u, BitRole::UDomain),
            x_hat: BitWord::from_bits(&x, BitRole::Codeword),
            message_hat: BitWord::from_bits(&payload, BitRole::Message),
            metric,
            iterations_used,
            crc_pass,
        }
    }
}

/// Decoder selection with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DecoderConfig {
    Sc,
    Scl { list_size: usize },
    SclCrc { list_size: usize },
    Bp(BpConfig),
    Ml,
}

impl DecoderConfig {
    pub fn descriptor(&self) -> String {
        match self {
            DecoderConfig::Sc => "sc".into(),
            DecoderConfig::Scl { list_size } => format!("scl(L={list_size})"),
            DecoderConfig::SclCrc { list_size } => format!("scl-crc(L={list_size})"),
            DecoderConfig::Bp(cfg) => format!("bp(it={},{})", cfg.max_iters, cfg.rule.name()),
            DecoderConfig::Ml => "ml".into(),
        }
    }

    /// Checks parameters against `code` before any frame is decoded.
    pub fn validate(&self, code: &PolarCode) -> Result<()> {
        match *self {
            DecoderConfig::Scl { list_size } if list_size < 1 => invalid("list size must be >= 1"),
            DecoderConfig::SclCrc { list_size } if list_size < 1 => invalid("list size must be >= 1"),
            DecoderConfig::SclCrc { .. } if code.spec().crc().is_none() => Err(crate::Error::InvalidState(
                "scl-crc decoding needs a CRC-configured code".into(),
            )),
            DecoderConfig::Bp(cfg) => cfg.validate(),
            DecoderConfig::Ml if code.spec().ones() > ML_MAX_INFO_BITS => Err(crate::Error::Capacity {
                what: "ML oracle information bits",
                limit: ML_MAX_INFO_BITS,
                got: code.spec().ones(),
            }),
            _ => Ok(()),
        }
    }

    pub fn decode<T: Scalar>(&self, frame: &LlrFrame<T>, code: &PolarCode) -> Result<DecodeResult> {
        match *self {
            DecoderConfig::Sc => decode_sc(frame, code),
            DecoderConfig::Scl { list_size } => Ok(decode_scl(frame, code, list_size)?.best),
            DecoderConfig::SclCrc { list_size } => decode_scl_crc(frame, code, list_size),
            DecoderConfig::Bp(cfg) => Ok(decode_bp(frame, code, &cfg)?.result),
            DecoderConfig::Ml => decode_ml_oracle(frame, code),
        }
    }

    /// Same decoder with a different list size (list decoders only).
    pub fn with_list_size(self, l: usize) -> Result<Self> {
        match self {
            DecoderConfig::Scl { .. } => Ok(DecoderConfig::Scl { list_size: l }),
            DecoderConfig::SclCrc { .. } => Ok(DecoderConfig::SclCrc { list_size: l }),
            other => invalid(format!("{} has no list size", other.descriptor())),
        }
    }

    /// Same decoder with a different iteration cap (BP only).
    pub fn with_bp_iters(self, iters: usize) -> Result<Self> {
        match self {
            DecoderConfig::Bp(cfg) => Ok(DecoderConfig::Bp(BpConfig {
                max_iters: iters,
                ..cfg
            })),
            other => invalid(format!("{} has no iteration cap", other.descriptor())),
        }
    }
}

pub(crate) fn check_frame<T>(frame: &LlrFrame<T>, code: &PolarCode) -> Result<()> {
    if frame.llr.len() != code.block_len() {
        return invalid(format!(
            "frame has {} LLRs, code length is {}",
            frame.llr.len(),
            code.block_len()
        ));
    }
    Ok(())
}

/// Channel LLRs in natural `v` order.
pub(crate) fn natural_order<T: Scalar>(llr: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); llr.len()];
    crate::code::bit_reverse_permute(llr, &mut out);
    out
}

//! BPSK channel models producing per-bit LLRs (positive favours bit 0).

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::code::BitWord;
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Awgn,
    Rayleigh,
    Bec,
}

impl ChannelKind {
    pub fn name(self) -> &'static str {
        match self {
            ChannelKind::Awgn => "awgn",
            ChannelKind::Rayleigh => "rayleigh",
            ChannelKind::Bec => "bec",
        }
    }
}

impl std::str::FromStr for ChannelKind {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "awgn" => Ok(Self::Awgn),
            "rayleigh" => Ok(Self::Rayleigh),
            "bec" => Ok(Self::Bec),
            other => invalid(format!("unknown channel {other:?}")),
        }
    }
}

/// Channel observation of one codeword.
#[derive(Clone, Debug, PartialEq)]
pub struct LlrFrame<T> {
    pub llr: Vec<T>,
    pub channel: ChannelKind,
    /// Noise variance per real dimension; zero for the BEC.
    pub sigma2: T,
    /// Fading amplitudes, Rayleigh only.
    pub fading: Option<Vec<T>>,
}

impl<T: Scalar> LlrFrame<T> {
    pub fn len(&self) -> usize {
        self.llr.len()
    }

    pub fn is_empty(&self) -> bool {
        self.llr.is_empty()
    }

    /// Frame carrying caller-supplied LLRs, tagged as AWGN.
    pub fn from_llrs(llr: Vec<T>) -> Self {
        Self {
            llr,
            channel: ChannelKind::Awgn,
            sigma2: T::one(),
            fading: None,
        }
    }
}

/// Noise variance for BPSK at `Eb/N0` and code rate `rate`.
pub fn noise_variance(ebn0_db: f64, rate: f64) -> f64 {
    1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))
}

/// Channel configuration: model, its parameter, and test hooks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    /// `Eb/N0` in dB for AWGN/Rayleigh, erasure probability for the BEC.
    pub param: f64,
    /// Keep the nominal σ² for LLR scaling but add no noise.
    #[serde(default)]
    pub suppress_noise: bool,
    /// Rayleigh only: fix every α to 1 and skip the fading draws.
    #[serde(default)]
    pub unit_fading: bool,
}

impl ChannelConfig {
    pub fn awgn(ebn0_db: f64) -> Self {
        Self::plain(ChannelKind::Awgn, ebn0_db)
    }

    pub fn rayleigh(ebn0_db: f64) -> Self {
        Self::plain(ChannelKind::Rayleigh, ebn0_db)
    }

    pub fn bec(epsilon: f64) -> Self {
        Self::plain(ChannelKind::Bec, epsilon)
    }

    fn plain(kind: ChannelKind, param: f64) -> Self {
        Self {
            kind,
            param,
            suppress_noise: false,
            unit_fading: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            ChannelKind::Bec if !(0.0..=1.0).contains(&self.param) => {
                invalid(format!("erasure probability {} outside [0, 1]", self.param))
            }
            _ if !self.param.is_finite() => invalid("channel parameter must be finite"),
            _ => Ok(()),
        }
    }

    /// Returns a copy with a different channel parameter.
    pub fn with_param(mut self, param: f64) -> Self {
        self.param = param;
        self
    }

    /// Transmits a 0/1 codeword, drawing per bit in index order.
    pub fn transmit<T: Scalar, R: Rng + ?Sized>(&self, x: &[u8], rate: f64, rng: &mut R) -> LlrFrame<T> {
        match self.kind {
            ChannelKind::Awgn => self.transmit_awgn(x, rate, rng),
            ChannelKind::Rayleigh => self.transmit_rayleigh(x, rate, rng),
            ChannelKind::Bec => self.erasure(x, rng),
        }
    }

    fn transmit_awgn<T: Scalar, R: Rng + ?Sized>(&self, x: &[u8], rate: f64, rng: &mut R) -> LlrFrame<T> {
        let sigma2 = noise_variance(self.param, rate);
        let sigma = sigma2.sqrt();
        let scale = 2.0 / sigma2;
        let llr = x
            .iter()
            .map(|&b| {
                let s = 1.0 - 2.0 * b as f64;
                let noise = if self.suppress_noise {
                    0.0
                } else {
                    sigma * rng.sample::<f64, _>(StandardNormal)
                };
                T::lit(scale * (s + noise))
            })
            .collect();
        LlrFrame {
            llr,
            channel: ChannelKind::Awgn,
            sigma2: T::lit(sigma2),
            fading: None,
        }
    }

    fn transmit_rayleigh<T: Scalar, R: Rng + ?Sized>(&self, x: &[u8], rate: f64, rng: &mut R) -> LlrFrame<T> {
        let sigma2 = noise_variance(self.param, rate);
        let sigma = sigma2.sqrt();
        let scale = 2.0 / sigma2;
        let mut fading = Vec::with_capacity(x.len());
        let llr = x
            .iter()
            .map(|&b| {
                let alpha = if self.unit_fading {
                    1.0
                } else {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    ((re * re + im * im) / 2.0).sqrt()
                };
                let s = 1.0 - 2.0 * b as f64;
                let noise = if self.suppress_noise {
                    0.0
                } else {
                    sigma * rng.sample::<f64, _>(StandardNormal)
                };
                fading.push(T::lit(alpha));
                T::lit(scale * alpha * (alpha * s + noise))
            })
            .collect();
        LlrFrame {
            llr,
            channel: ChannelKind::Rayleigh,
            sigma2: T::lit(sigma2),
            fading: Some(fading),
        }
    }

    fn erasure<T: Scalar, R: Rng + ?Sized>(&self, x: &[u8], rng: &mut R) -> LlrFrame<T> {
        let m = T::saturation();
        let llr = x
            .iter()
            .map(|&b| {
                let erased = rng.random::<f64>() < self.param;
                if erased {
                    T::zero()
                } else if b == 0 {
                    m
                } else {
                    -m
                }
            })
            .collect();
        LlrFrame {
            llr,
            channel: ChannelKind::Bec,
            sigma2: T::zero(),
            fading: None,
        }
    }
}

/// BPSK over AWGN: `y = (1 − 2b) + n`, `n ~ N(0, σ²)`, `σ² = 1 / (2 R 10^{Eb/N0/10})`,
/// `llr = 2y/σ²`.
pub fn awgn_llr<T: Scalar, R: Rng + ?Sized>(x: &BitWord, ebn0_db: f64, rate: f64, rng: &mut R) -> LlrFrame<T> {
    ChannelConfig::awgn(ebn0_db).transmit(&x.to_bits(), rate, rng)
}

/// BPSK over Rayleigh fading with perfect CSI: `y = α s + n`, `llr = 2αy/σ²`,
/// `E[α²] = 1`.
pub fn rayleigh_llr<T: Scalar, R: Rng + ?Sized>(x: &BitWord, ebn0_db: f64, rate: f64, rng: &mut R) -> LlrFrame<T> {
    ChannelConfig::rayleigh(ebn0_db).transmit(&x.to_bits(), rate, rng)
}

/// BEC: erased bits get LLR 0, others `±M`.
pub fn bec_llr<T: Scalar, R: Rng + ?Sized>(x: &BitWord, epsilon: f64, rng: &mut R) -> Result<LlrFrame<T>> {
    let cfg = ChannelConfig::bec(epsilon);
    cfg.validate()?;
    Ok(cfg.transmit(&x.to_bits(), 1.0, rng))
}

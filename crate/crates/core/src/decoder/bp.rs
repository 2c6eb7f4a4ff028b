use serde::{Deserialize, Serialize};

use super::{check_frame, natural_order, DecodeResult};
use crate::channel::LlrFrame;
use crate::code::{kronecker_butterfly, PolarCode};
use crate::error::{invalid, Result};
use crate::scalar::{boxplus, min_sum, Scalar};

/// Check-node rule used by BP.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum CheckRule {
    /// Exact `2·atanh(tanh(a/2)·tanh(b/2))`.
    Exact,
    /// `scale · sign(a)sign(b)min(|a|,|b|)`.
    ScaledMinSum { scale: f64 },
}

impl CheckRule {
    pub fn name(&self) -> &'static str {
        match self {
            CheckRule::Exact => "exact",
            CheckRule::ScaledMinSum { .. } => "scaled-min-sum",
        }
    }

    #[inline]
    fn apply<T: Scalar>(&self, a: T, b: T) -> T {
        match *self {
            CheckRule::Exact => boxplus(a, b),
            CheckRule::ScaledMinSum { scale } => min_sum(a, b) * T::lit(scale),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BpConfig {
    pub max_iters: usize,
    pub rule: CheckRule,
    /// Stop as soon as the hard decision on `u` re-encodes to the hard
    /// decision on the channel side.
    pub early_stop: bool,
}

impl BpConfig {
    pub fn new(max_iters: usize) -> Self {
        Self {
            max_iters,
            rule: CheckRule::Exact,
            early_stop: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return invalid("BP needs at least one iteration");
        }
        if let CheckRule::ScaledMinSum { scale } = self.rule {
            if !(scale > 0.0 && scale <= 1.0) {
                return invalid(format!("min-sum scale must be in (0, 1], got {scale}"));
            }
        }
        Ok(())
    }
}

impl Default for BpConfig {
    fn default() -> Self {
        Self::new(200)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BpOutput {
    pub result: DecodeResult,
    /// Posterior LLRs of `u` (left plus right messages at the input column).
    pub u_llr: Vec<f64>,
    /// Posterior LLRs of the natural-order `v` column.
    pub v_llr: Vec<f64>,
    pub converged: bool,
}

/// Flooding belief propagation over the `n`-stage factor graph.
///
/// Column 0 holds `u`, column `n` the natural-order channel LLRs. Each
/// iteration sweeps left messages from column `n` to 0, then right messages
/// from 0 to `n`.
pub fn decode_bp<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode, cfg: &BpConfig) -> Result<BpOutput> {
    check_frame(frame, code)?;
    cfg.validate()?;
    let n_len = code.block_len();
    let n = n_len.trailing_zeros() as usize;
    let sat = T::saturation();
    let rule = cfg.rule;
    let cols = n + 1;
    let mut left = vec![T::zero(); cols * n_len];
    let mut right = vec![T::zero(); cols * n_len];
    left[n * n_len..].copy_from_slice(&natural_order(&frame.llr));
    let info = code.avector().as_bools();
    for (i, &is_info) in info.iter().enumerate() {
        if !is_info {
            right[i] = sat;
        }
    }

    let mut u = vec![0u8; n_len];
    let mut v_check = vec![0u8; n_len];
    let mut iters = 0;
    let mut converged = false;
    while iters < cfg.max_iters {
        iters += 1;
        for s in (0..n).rev() {
            let h = 1usize << s;
            let (cur, next) = (s * n_len, (s + 1) * n_len);
            for base in (0..n_len).step_by(2 * h) {
                for i in base..base + h {
                    let j = i + h;
                    let (li, lj) = (left[next + i], left[next + j]);
                    let (ri, rj) = (right[cur + i], right[cur + j]);
                    left[cur + i] = rule.apply(li, (lj + rj).saturate());
                    left[cur + j] = (lj + rule.apply(li, ri)).saturate();
                }
            }
        }
        for s in 0..n {
            let h = 1usize << s;
            let (cur, next) = (s * n_len, (s + 1) * n_len);
            for base in (0..n_len).step_by(2 * h) {
                for i in base..base + h {
                    let j = i + h;
                    let (li, lj) = (left[next + i], left[next + j]);
                    let (ri, rj) = (right[cur + i], right[cur + j]);
                    right[next + i] = rule.apply(ri, (lj + rj).saturate());
                    right[next + j] = (rj + rule.apply(ri, li)).saturate();
                }
            }
        }
        if cfg.early_stop {
            hard_u(&left, &right, info, &mut u);
            v_check.copy_from_slice(&u);
            kronecker_butterfly(&mut v_check);
            let vs = n * n_len;
            let agrees = (0..n_len).all(|i| (left[vs + i] + right[vs + i]).hard_bit() == v_check[i]);
            if agrees {
                converged = true;
                break;
            }
        }
    }
    hard_u(&left, &right, info, &mut u);
    let u_llr = (0..n_len).map(|i| (left[i] + right[i]).as_f64()).collect();
    let vs = n * n_len;
    let v_llr = (0..n_len).map(|i| (left[vs + i] + right[vs + i]).as_f64()).collect();
    let crc = code.crc_passes(&u);
    Ok(BpOutput {
        result: DecodeResult::from_u(code, u, 0.0, iters, crc),
        u_llr,
        v_llr,
        converged,
    })
}

fn hard_u<T: Scalar>(left: &[T], right: &[T], info: &[bool], u: &mut [u8]) {
    for i in 0..u.len() {
        u[i] = if info[i] { (left[i] + right[i]).hard_bit() } else { 0 };
    }
}

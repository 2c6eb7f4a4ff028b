use super::{check_frame, natural_order, DecodeResult};
use crate::channel::LlrFrame;
use crate::code::PolarCode;
use crate::error::Result;
use crate::scalar::{g_update, min_sum, Scalar};

/// Successive cancellation with min-sum `f`, exact `g`, frozen bits forced
/// to zero and zero-LLR decisions resolved to 0.
pub fn decode_sc<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode) -> Result<DecodeResult> {
    check_frame(frame, code)?;
    let n_len = code.block_len();
    let alpha = natural_order(&frame.llr);
    let mut u = vec![0u8; n_len];
    let mut beta = vec![0u8; n_len];
    let mut scratch = vec![T::zero(); n_len];
    sc_node(&alpha, code.avector().as_bools(), &mut u, &mut beta, &mut scratch);
    let crc = code.crc_passes(&u);
    Ok(DecodeResult::from_u(code, u, 0.0, 0, crc))
}

fn sc_node<T: Scalar>(alpha: &[T], info: &[bool], u: &mut [u8], beta: &mut [u8], scratch: &mut [T]) {
    let s = alpha.len();
    if s == 1 {
        let bit = if info[0] { alpha[0].hard_bit() } else { 0 };
        u[0] = bit;
        beta[0] = bit;
        return;
    }
    let h = s / 2;
    let (child, rest) = scratch.split_at_mut(h);
    for j in 0..h {
        child[j] = min_sum(alpha[j], alpha[j + h]);
    }
    sc_node(child, &info[..h], &mut u[..h], &mut beta[..h], rest);
    for j in 0..h {
        child[j] = g_update(alpha[j], alpha[j + h], beta[j]);
    }
    sc_node(child, &info[h..], &mut u[h..], &mut beta[h..], rest);
    for j in 0..h {
        beta[j] ^= beta[j + h];
    }
}

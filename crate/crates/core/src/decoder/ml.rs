use super::{check_frame, DecodeResult};
use crate::channel::LlrFrame;
use crate::code::{generator_row, BitWord, PolarCode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest number of information bits the exhaustive oracle will enumerate.
pub const ML_MAX_INFO_BITS: usize = 28;

/// Exhaustive maximum-likelihood decoding for small codes.
///
/// Walks all `2^K` messages in Gray-code order and keeps the codeword with
/// the lowest correlation discrepancy `Σ |λ_j| [x_j ≠ hd(λ_j)]`. Ties go to
/// the lexicographically smaller message (first information bit most
/// significant).
pub fn decode_ml_oracle<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode) -> Result<DecodeResult> {
    check_frame(frame, code)?;
    let info = code.info_positions();
    let k = info.len();
    if k > ML_MAX_INFO_BITS {
        return Err(Error::Capacity {
            what: "ML oracle information bits",
            limit: ML_MAX_INFO_BITS,
            got: k,
        });
    }
    let n_len = code.block_len();
    let rows: Vec<Vec<usize>> = info
        .iter()
        .map(|&i| {
            let row = generator_row(n_len, i);
            row.iter().enumerate().filter(|(_, b)| *b).map(|(j, _)| j).collect()
        })
        .collect();
    let mag: Vec<f64> = frame.llr.iter().map(|l| l.as_f64().abs()).collect();
    let hd: Vec<u8> = frame.llr.iter().map(|l| l.hard_bit()).collect();
    let hd_word = BitWord::from_bits(&hd, crate::code::BitRole::Codeword);

    // Discrepancy of the current codeword, maintained incrementally.
    let mut word = BitWord::zeros(n_len, crate::code::BitRole::Codeword);
    let discrepancy = |w: &BitWord| -> f64 {
        let diff = w.xor(&hd_word);
        diff.iter().enumerate().filter(|(_, b)| *b).map(|(j, _)| mag[j]).sum()
    };
    let mut current = discrepancy(&word);
    let mut msg: u64 = 0;
    let mut best = (current, 0u64);
    for step in 1u64..(1u64 << k) {
        // Gray code flips bit `t` of the message integer.
        let t = step.trailing_zeros() as usize;
        let row = &rows[k - 1 - t];
        for &j in row {
            let was_wrong = word.get(j) != (hd[j] == 1);
            word.flip(j);
            if was_wrong {
                current -= mag[j];
            } else {
                current += mag[j];
            }
        }
        msg ^= 1 << t;
        if current < best.0 || (current == best.0 && msg < best.1) {
            best = (current, msg);
        }
    }
    // Incremental sums drift; recompute the winner exactly.
    let mut u = vec![0u8; n_len];
    for (t, &pos) in info.iter().enumerate() {
        u[pos] = ((best.1 >> (k - 1 - t)) & 1) as u8;
    }
    let x = crate::code::polar_transform_bits(&u);
    let metric: f64 = x
        .iter()
        .zip(&hd)
        .zip(&mag)
        .filter(|((a, b), _)| a != b)
        .map(|(_, m)| *m)
        .sum();
    let crc = code.crc_passes(&u);
    Ok(DecodeResult::from_u(code, u, metric, 0, crc))
}

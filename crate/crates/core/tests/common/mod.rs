//! Independent reference implementations used as test oracles. Nothing here
//! calls into the library's transform or decoders.
#![allow(dead_code)]

use polarforge::channel::LlrFrame;
use polarforge::code::{AVector, CodeSpec, PolarCode};

/// Bit reversal by reversing the binary string.
pub fn bitrev(i: usize, n: u32) -> usize {
    if n == 0 {
        return 0;
    }
    let s: String = format!("{:0width$b}", i, width = n as usize).chars().rev().collect();
    usize::from_str_radix(&s, 2).unwrap()
}

/// `F^{⊗n}` as a dense 0/1 matrix built from explicit Kronecker products.
pub fn kron_power(n: u32) -> Vec<Vec<u8>> {
    let f = [[1u8, 0], [1, 1]];
    let mut m = vec![vec![1u8]];
    for _ in 0..n {
        let s = m.len();
        let mut next = vec![vec![0u8; 2 * s]; 2 * s];
        for (bi, frow) in f.iter().enumerate() {
            for (bj, &fv) in frow.iter().enumerate() {
                for i in 0..s {
                    for j in 0..s {
                        next[bi * s + i][bj * s + j] = fv & m[i][j];
                    }
                }
            }
        }
        m = next;
    }
    m
}

/// `x = u · B_N F^{⊗n}` by dense matrix product.
pub fn encode_dense(u: &[u8]) -> Vec<u8> {
    let len = u.len();
    let n = len.trailing_zeros();
    let f = kron_power(n);
    let v: Vec<u8> = (0..len)
        .map(|j| (0..len).fold(0u8, |acc, i| acc ^ (u[i] & f[i][j])))
        .collect();
    (0..len).map(|j| v[bitrev(j, n)]).collect()
}

/// Codeword of a message placed on the information positions of `a`.
pub fn codeword(a: &AVector, msg: &[u8]) -> Vec<u8> {
    let mut u = vec![0u8; a.len()];
    for (&p, &b) in a.info_positions().iter().zip(msg) {
        u[p] = b;
    }
    encode_dense(&u)
}

/// Message bits of integer `m`, first information bit most significant.
pub fn message_of(m: u64, k: usize) -> Vec<u8> {
    (0..k).map(|t| ((m >> (k - 1 - t)) & 1) as u8).collect()
}

/// ML by plain enumeration in lexicographic message order, maximizing the
/// correlation Σ (1 − 2x_j) λ_j; the first maximum wins ties.
pub fn ml_bruteforce(a: &AVector, llr: &[f64]) -> Vec<u8> {
    let k = a.ones();
    let mut best = (f64::NEG_INFINITY, vec![]);
    for m in 0..1u64 << k {
        let msg = message_of(m, k);
        let x = codeword(a, &msg);
        let corr: f64 = x.iter().zip(llr).map(|(&b, &l)| if b == 0 { l } else { -l }).sum();
        if corr > best.0 {
            best = (corr, msg);
        }
    }
    best.1
}

/// Posterior LLR of every u position by summing likelihoods over all
/// messages: P(u) ∝ exp(Σ_j (1 − 2x_j) λ_j / 2).
pub fn map_marginals(a: &AVector, llr: &[f64]) -> Vec<f64> {
    let k = a.ones();
    let len = a.len();
    let mut p0 = vec![0.0f64; len];
    let mut p1 = vec![0.0f64; len];
    for m in 0..1u64 << k {
        let msg = message_of(m, k);
        let x = codeword(a, &msg);
        let w: f64 = x
            .iter()
            .zip(llr)
            .map(|(&b, &l)| if b == 0 { l / 2.0 } else { -l / 2.0 })
            .sum::<f64>()
            .exp();
        let mut u = vec![0u8; len];
        for (&p, &b) in a.info_positions().iter().zip(&msg) {
            u[p] = b;
        }
        for i in 0..len {
            if u[i] == 0 {
                p0[i] += w;
            } else {
                p1[i] += w;
            }
        }
    }
    (0..len).map(|i| (p0[i] / p1[i]).ln()).collect()
}

pub fn code(len: usize, one_based: &[usize]) -> PolarCode {
    let spec = CodeSpec::new(len, one_based.len()).unwrap();
    PolarCode::new(spec, AVector::from_one_based(len, one_based).unwrap()).unwrap()
}

pub fn frame(llr: Vec<f64>) -> LlrFrame<f64> {
    LlrFrame::from_llrs(llr)
}

/// `Q(x)` tail of the standard normal.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2)
}

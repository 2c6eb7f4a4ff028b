//! Classical constructions: BEC Bhattacharyya recursion and the Reed–Muller rule.

use std::cmp::Ordering;

use crate::code::{AVector, CodeSpec};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Above this depth the recursion runs on `ln Z` to avoid underflow.
const LOG_DOMAIN_FROM: u32 = 21;

/// Bhattacharyya parameters `Z(W_i)` of all `N` bit-channels, natural `u` order.
#[derive(Clone, Debug, PartialEq)]
pub struct ReliabilityVector<T> {
    z: Vec<T>,
    log_z: Vec<T>,
}

impl<T: Scalar> ReliabilityVector<T> {
    pub fn z(&self) -> &[T] {
        &self.z
    }

    /// `ln Z`, exact even where `Z` itself underflows.
    pub fn log_z(&self) -> &[T] {
        &self.log_z
    }

    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn mean(&self) -> T {
        self.z.iter().copied().sum::<T>() / T::lit(self.z.len() as f64)
    }

    /// Indices sorted from most reliable (smallest Z) to least; among equal Z
    /// the higher index comes first.
    pub fn most_reliable_first(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| cmp_scalar(self.log_z[a], self.log_z[b]).then(b.cmp(&a)));
        idx
    }
}

fn cmp_scalar<T: Scalar>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Exact bit-channel erasure probabilities of a BEC(ε) after `n` levels of
/// polarization: `Z⁻ = 2Z − Z²` on even children, `Z⁺ = Z²` on odd children.
pub fn bhattacharyya_bec<T: Scalar>(n: u32, epsilon: f64) -> Result<ReliabilityVector<T>> {
    if !(0.0..=1.0).contains(&epsilon) {
        return invalid(format!("erasure probability {epsilon} outside [0, 1]"));
    }
    if n >= usize::BITS - 1 {
        return invalid(format!("n = {n} too large"));
    }
    let two = T::lit(2.0);
    if n < LOG_DOMAIN_FROM {
        let mut z = vec![T::lit(epsilon)];
        for _ in 0..n {
            z = z.iter().flat_map(|&v| [two * v - v * v, v * v]).collect();
        }
        let log_z = z.iter().map(|v| v.ln()).collect();
        Ok(ReliabilityVector { z, log_z })
    } else {
        let mut log_z = vec![T::lit(epsilon.ln())];
        for _ in 0..n {
            log_z = log_z
                .iter()
                .flat_map(|&l| [l + (two - l.exp()).ln(), two * l])
                .collect();
        }
        let z = log_z.iter().map(|l| l.exp()).collect();
        Ok(ReliabilityVector { z, log_z })
    }
}

/// Surrogate BEC for an AWGN design point: `ε = exp(−R · 10^{SNR/10})`.
pub fn design_snr_to_epsilon(ebn0_db: f64, rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate <= 1.0) {
        return invalid(format!("code rate {rate} outside (0, 1]"));
    }
    Ok((-rate * 10f64.powf(ebn0_db / 10.0)).exp())
}

/// Bhattacharyya construction at an AWGN design SNR (via the BEC surrogate).
pub fn construct_bhattacharyya(spec: &CodeSpec, design_snr_db: f64) -> Result<AVector> {
    let eps = design_snr_to_epsilon(design_snr_db, spec.rate())?;
    construct_bhattacharyya_bec(spec, eps)
}

/// Keeps the `spec.ones()` positions with the smallest Z; among equal Z the
/// lower index is frozen first.
pub fn construct_bhattacharyya_bec(spec: &CodeSpec, epsilon: f64) -> Result<AVector> {
    let z = bhattacharyya_bec::<f64>(spec.log2_len(), epsilon)?;
    let order = z.most_reliable_first();
    AVector::from_positions(spec.block_len(), order.into_iter().take(spec.ones()))
}

/// Reed–Muller rule: largest row weight `2^popcount(i)` first, ties broken by
/// smaller Z at ε = 0.5, then by higher index.
pub fn construct_rm(spec: &CodeSpec) -> Result<AVector> {
    let z = bhattacharyya_bec::<f64>(spec.log2_len(), 0.5)?;
    let lz = z.log_z();
    let mut idx: Vec<usize> = (0..spec.block_len()).collect();
    idx.sort_by(|&a, &b| {
        b.count_ones()
            .cmp(&a.count_ones())
            .then(cmp_scalar(lz[a], lz[b]))
            .then(b.cmp(&a))
    });
    AVector::from_positions(spec.block_len(), idx.into_iter().take(spec.ones()))
}

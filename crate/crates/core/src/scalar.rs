//! Floating-point abstraction used by the channel models and decoders.
//!
//! Everything that touches LLRs is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. Counters and rates reported by the
//! simulator are always `f64`.

use num_traits::{Float, FloatConst, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Magnitude used for erasure-free BEC observations and frozen-bit priors.
pub const SATURATION: f64 = 1e6;

pub trait Scalar: Float + FloatConst + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static {
    fn lit(v: f64) -> Self;
    fn as_f64(self) -> f64;

    #[inline]
    fn saturation() -> Self {
        Self::lit(SATURATION)
    }

    /// Clamp into `[-M, M]`.
    #[inline]
    fn saturate(self) -> Self {
        let m = Self::saturation();
        if self > m {
            m
        } else if self < -m {
            -m
        } else {
            self
        }
    }

    /// Hard decision; a zero LLR decides 0.
    #[inline]
    fn hard_bit(self) -> u8 {
        (self < Self::zero()) as u8
    }
}

impl Scalar for f32 {
    #[inline]
    fn lit(v: f64) -> Self {
        v as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    #[inline]
    fn lit(v: f64) -> Self {
        v
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

/// Min-sum check-node update.
#[inline]
pub fn min_sum<T: Scalar>(a: T, b: T) -> T {
    let m = a.abs().min(b.abs());
    if (a < T::zero()) ^ (b < T::zero()) {
        -m
    } else {
        m
    }
}

/// Exact check-node update `2 atanh(tanh(a/2) tanh(b/2))`, evaluated in the
/// numerically stable Jacobian-logarithm form and saturated at `±M`.
#[inline]
pub fn boxplus<T: Scalar>(a: T, b: T) -> T {
    let corr = (-(a + b).abs()).exp().ln_1p() - (-(a - b).abs()).exp().ln_1p();
    (min_sum(a, b) + corr).saturate()
}

/// Variable-node combine used by successive cancellation.
#[inline]
pub fn g_update<T: Scalar>(a: T, b: T, bit: u8) -> T {
    if bit == 0 {
        b + a
    } else {
        b - a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn boxplus_reference(a: f64, b: f64) -> f64 {
        2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
    }

    #[test]
    fn boxplus_matches_tanh_rule() {
        for &(a, b) in &[(0.3, -1.2), (2.0, 2.0), (-4.5, -0.1), (7.0, 3.0), (0.0, 5.0)] {
            assert!((boxplus(a, b) - boxplus_reference(a, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn boxplus_with_saturated_input_is_identity() {
        let m = f64::saturation();
        assert_eq!(boxplus(m, 2.5), 2.5);
        assert_eq!(boxplus(-m, 2.5), -2.5);
        // Exact value is M - ln 2.
        assert!((boxplus(m, m) - (m - std::f64::consts::LN_2)).abs() < 1e-6);
    }

    #[test]
    fn hard_decision_ties_to_zero() {
        assert_eq!(0.0f64.hard_bit(), 0);
        assert_eq!((-0.0f64).hard_bit(), 0);
        assert_eq!((-1e-9f32).hard_bit(), 1);
    }

    #[test]
    fn min_sum_sign_and_magnitude() {
        assert_eq!(min_sum(3.0, -1.0), -1.0);
        assert_eq!(min_sum(-3.0, -1.0), 1.0);
        assert_eq!(min_sum(0.0f32, -1.0), 0.0);
    }
}

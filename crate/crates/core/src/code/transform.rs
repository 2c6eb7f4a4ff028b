//! The polarization transform `x = u · B_N · F^{⊗n}`.
//!
//! `F^{⊗n}` is applied as an in-place XOR butterfly; `B_N` is the
//! bit-reversal permutation. The two commute, so `x = bitrev(u · F^{⊗n})`.

use super::bits::{BitRole, BitWord};
use crate::error::{invalid, Result};

/// Masks selecting in-word positions whose bit `s` is clear, for strides `2^s < 64`.
const LOW_HALF: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0F0F_0F0F_0F0F_0F0F,
    0x00FF_00FF_00FF_00FF,
    0x0000_FFFF_0000_FFFF,
    0x0000_0000_FFFF_FFFF,
];

/// `log2(len)` if `len` is a power of two.
pub fn log2_exact(len: usize) -> Option<u32> {
    (len.is_power_of_two()).then(|| len.trailing_zeros())
}

/// Reverses the low `n` bits of `i`.
#[inline]
pub fn bit_reverse(i: usize, n: u32) -> usize {
    if n == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - n)
    }
}

/// `out[i] = input[bitrev(i)]` on an unpacked slice.
pub fn bit_reverse_permute<V: Copy>(input: &[V], out: &mut [V]) {
    let n = log2_exact(input.len()).expect("length must be a power of two");
    for (i, o) in out.iter_mut().enumerate() {
        *o = input[bit_reverse(i, n)];
    }
}

/// In-place `v <- v · F^{⊗n}` over packed words holding `len` bits.
pub(crate) fn kronecker_butterfly_packed(words: &mut [u64], len: usize) {
    let n = len.trailing_zeros();
    for s in 0..n {
        let h = 1usize << s;
        if h < 64 {
            let mask = LOW_HALF[s as usize];
            for w in words.iter_mut() {
                *w ^= (*w >> h) & mask;
            }
        } else {
            let hw = h / 64;
            let mut base = 0;
            while base < words.len() {
                for j in base..base + hw {
                    words[j] ^= words[j + hw];
                }
                base += 2 * hw;
            }
        }
    }
}

/// In-place `v <- v · F^{⊗n}` over an unpacked 0/1 slice.
pub fn kronecker_butterfly(bits: &mut [u8]) {
    let len = bits.len();
    let mut h = 1;
    while h < len {
        let mut base = 0;
        while base < len {
            for i in base..base + h {
                bits[i] ^= bits[i + h];
            }
            base += 2 * h;
        }
        h *= 2;
    }
}

/// Computes `x = u · G_N` with `G_N = B_N · F^{⊗n}` in `O(N log N)`.
pub fn polar_transform(u: &BitWord) -> Result<BitWord> {
    let len = u.len();
    let Some(n) = log2_exact(len) else {
        return invalid(format!("transform length {len} is not a power of two"));
    };
    let mut v = u.clone();
    kronecker_butterfly_packed(v.words_mut(), len);
    let mut x = BitWord::zeros(len, BitRole::Codeword);
    for i in 0..len {
        if v.get(bit_reverse(i, n)) {
            x.set(i, true);
        }
    }
    Ok(x)
}

/// Unpacked variant of [`polar_transform`] used on decoder hot paths.
pub fn polar_transform_bits(u: &[u8]) -> Vec<u8> {
    let mut v = u.to_vec();
    kronecker_butterfly(&mut v);
    let mut x = vec![0u8; u.len()];
    bit_reverse_permute(&v, &mut x);
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(bits: &[u8]) -> BitWord {
        BitWord::from_bits(bits, BitRole::UDomain)
    }

    #[test]
    fn zero_input_gives_zero_codeword() {
        let x = polar_transform(&word(&[0; 8])).unwrap();
        assert_eq!(x.count_ones(), 0);
    }

    #[test]
    fn second_row_of_g4_is_1010() {
        let x = polar_transform(&word(&[0, 1, 0, 0])).unwrap();
        assert_eq!(x.to_bits(), vec![1, 0, 1, 0]);
    }

    #[test]
    fn first_row_of_g2() {
        let x = polar_transform(&word(&[1, 0])).unwrap();
        assert_eq!(x.to_bits(), vec![1, 0]);
    }

    #[test]
    fn rejects_non_power_of_two() {
        assert!(polar_transform(&word(&[0; 6])).is_err());
    }

    #[test]
    fn packed_and_unpacked_agree_above_word_size() {
        let bits: Vec<u8> = (0..256).map(|i| ((i * 37 + 11) % 5 == 0) as u8).collect();
        let packed = polar_transform(&word(&bits)).unwrap().to_bits();
        assert_eq!(packed, polar_transform_bits(&bits));
    }

    #[test]
    fn bit_reverse_is_involution() {
        for n in 0..11 {
            for i in 0..(1usize << n) {
                assert_eq!(bit_reverse(bit_reverse(i, n), n), i);
            }
        }
    }

    #[test]
    fn kronecker_part_is_self_inverse() {
        let bits: Vec<u8> = (0..64).map(|i| (i % 3 == 1) as u8).collect();
        let mut v = bits.clone();
        kronecker_butterfly(&mut v);
        kronecker_butterfly(&mut v);
        assert_eq!(v, bits);
    }
}

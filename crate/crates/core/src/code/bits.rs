use std::fmt;

/// Which domain a [`BitWord`] lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BitRole {
    /// Payload bits (`k`, or `k + r` once a CRC is attached).
    Message,
    /// Transform input `u`, length `N`.
    UDomain,
    /// Transmitted word `x = u G_N`, length `N`.
    Codeword,
}

/// Bit vector packed into 64-bit words, bit `i` at `words[i / 64] >> (i % 64)`.
///
/// Bits past `len` in the last word are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitWord {
    len: usize,
    words: Vec<u64>,
    role: BitRole,
}

impl BitWord {
    pub fn zeros(len: usize, role: BitRole) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
            role,
        }
    }

    /// Builds from a slice of 0/1 values; any nonzero byte is a one.
    pub fn from_bits(bits: &[u8], role: BitRole) -> Self {
        let mut w = Self::zeros(bits.len(), role);
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                w.words[i / 64] |= 1 << (i % 64);
            }
        }
        w
    }

    pub fn from_bools(bits: &[bool], role: BitRole) -> Self {
        let mut w = Self::zeros(bits.len(), role);
        for (i, &b) in bits.iter().enumerate() {
            if b {
                w.words[i / 64] |= 1 << (i % 64);
            }
        }
        w
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn role(&self) -> BitRole {
        self.role
    }

    pub fn with_role(mut self, role: BitRole) -> Self {
        self.role = role;
        self
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub(crate) fn words_mut(&mut self) -> &mut [u64] {
        &mut self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bitwise XOR; panics on length mismatch.
    pub fn xor(&self, other: &BitWord) -> BitWord {
        assert_eq!(self.len, other.len, "xor of words with different lengths");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        BitWord {
            len: self.len,
            words,
            role: self.role,
        }
    }

    pub fn hamming_distance(&self, other: &BitWord) -> usize {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| (self.words[i / 64] >> (i % 64)) & 1 == 1)
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Concatenation, keeping the role of `self`.
    pub fn concat(&self, tail: &BitWord) -> BitWord {
        let mut bits = self.to_bits();
        bits.extend(tail.iter().map(u8::from));
        BitWord::from_bits(&bits, self.role)
    }

    /// Copy of bits `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitWord {
        assert!(start <= end && end <= self.len);
        let bits: Vec<u8> = (start..end).map(|i| self.get(i) as u8).collect();
        BitWord::from_bits(&bits, self.role)
    }
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitWord({:?}, ", self.role)?;
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_get_across_word_boundary() {
        let mut w = BitWord::zeros(130, BitRole::Codeword);
        for i in [0, 63, 64, 127, 129] {
            w.set(i, true);
        }
        assert_eq!(w.count_ones(), 5);
        assert!(w.get(64) && w.get(129) && !w.get(128));
        w.flip(64);
        assert!(!w.get(64));
    }

    #[test]
    fn concat_and_slice() {
        let a = BitWord::from_bits(&[1, 0, 1], BitRole::Message);
        let b = BitWord::from_bits(&[0, 1], BitRole::Message);
        let c = a.concat(&b);
        assert_eq!(c.to_bits(), vec![1, 0, 1, 0, 1]);
        assert_eq!(c.slice(1, 4).to_bits(), vec![0, 1, 0]);
    }
}

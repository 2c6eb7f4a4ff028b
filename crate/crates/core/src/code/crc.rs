use serde::{Deserialize, Serialize};

use super::bits::BitWord;
use crate::error::{invalid, Result};

/// Non-reflected bit-serial CRC over a bit stream, MSB of the register first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrcConfig {
    pub width: u32,
    /// Generator polynomial without the leading `x^width` term.
    pub poly: u64,
    pub init: u64,
}

impl CrcConfig {
    pub fn new(width: u32, poly: u64, init: u64) -> Result<Self> {
        if width == 0 || width > 63 {
            return invalid(format!("CRC width {width} outside 1..=63"));
        }
        let mask = (1u64 << width) - 1;
        if poly & !mask != 0 || init & !mask != 0 {
            return invalid("CRC polynomial or init wider than the register");
        }
        Ok(Self { width, poly, init })
    }

    /// CRC-16/CCITT-FALSE: polynomial 0x1021, init 0xFFFF.
    pub const fn crc16() -> Self {
        Self {
            width: 16,
            poly: 0x1021,
            init: 0xFFFF,
        }
    }

    /// 3GPP CRC-24A: polynomial 0x864CFB, init 0.
    pub const fn crc24() -> Self {
        Self {
            width: 24,
            poly: 0x86_4CFB,
            init: 0,
        }
    }

    /// Preset lookup by width (16 or 24).
    pub fn preset(width: u32) -> Result<Self> {
        match width {
            16 => Ok(Self::crc16()),
            24 => Ok(Self::crc24()),
            other => invalid(format!("no CRC preset for width {other} (use 16 or 24)")),
        }
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    /// Register value after shifting in `bits`.
    pub fn checksum_bits<I: IntoIterator<Item = bool>>(&self, bits: I) -> u64 {
        let top = self.width - 1;
        let mut reg = self.init;
        for b in bits {
            let feedback = ((reg >> top) & 1 == 1) ^ b;
            reg = (reg << 1) & self.mask();
            if feedback {
                reg ^= self.poly;
            }
        }
        reg
    }

    /// Appends `width` parity bits, most significant first.
    pub fn attach(&self, payload: &BitWord) -> BitWord {
        let crc = self.checksum_bits(payload.iter());
        let parity: Vec<u8> = (0..self.width).rev().map(|i| ((crc >> i) & 1) as u8).collect();
        payload.concat(&BitWord::from_bits(&parity, payload.role()))
    }

    /// True iff the trailing `width` bits match the CRC of the preceding ones.
    pub fn check(&self, word: &BitWord) -> bool {
        let w = self.width as usize;
        if word.len() < w {
            return false;
        }
        self.check_bits(&word.to_bits())
    }

    pub(crate) fn check_bits(&self, word: &[u8]) -> bool {
        let w = self.width as usize;
        if word.len() < w {
            return false;
        }
        let split = word.len() - w;
        let crc = self.checksum_bits(word[..split].iter().map(|&b| b != 0));
        word[split..]
            .iter()
            .enumerate()
            .all(|(i, &b)| ((crc >> (w - 1 - i)) & 1) as u8 == b)
    }
}

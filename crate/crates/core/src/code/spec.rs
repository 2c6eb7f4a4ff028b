use serde::{Deserialize, Serialize};

use super::bits::BitWord;
use super::crc::CrcConfig;
use crate::error::{invalid, Error, Result};

/// Block length, payload length and optional outer CRC of a polar code.
///
/// With a CRC of width `r` the A-vector carries `k + r` information
/// positions while the payload stays `k` bits, so `P(2048, 1024)` with
/// CRC-16 occupies 1040 positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeSpec {
    n: u32,
    k: usize,
    crc: Option<CrcConfig>,
}

impl CodeSpec {
    pub fn new(block_len: usize, k: usize) -> Result<Self> {
        if block_len == 0 || !block_len.is_power_of_two() {
            return invalid(format!("N must be a power of two (got {block_len})"));
        }
        if k == 0 || k > block_len {
            return invalid(format!("k must satisfy 1 <= k <= N (got k={k}, N={block_len})"));
        }
        Ok(Self {
            n: block_len.trailing_zeros(),
            k,
            crc: None,
        })
    }

    pub fn with_crc(mut self, crc: CrcConfig) -> Result<Self> {
        if self.k + crc.width as usize > self.block_len() {
            return invalid(format!(
                "k + r = {} exceeds N = {}",
                self.k + crc.width as usize,
                self.block_len()
            ));
        }
        self.crc = Some(crc);
        Ok(self)
    }

    /// `n = log2 N`.
    #[inline]
    pub fn log2_len(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    /// Payload bits per block.
    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn crc(&self) -> Option<&CrcConfig> {
        self.crc.as_ref()
    }

    pub fn crc_width(&self) -> usize {
        self.crc.map_or(0, |c| c.width as usize)
    }

    /// Required number of ones in the A-vector.
    pub fn ones(&self) -> usize {
        self.k + self.crc_width()
    }

    /// `k / N`; the CRC does not enter the rate.
    pub fn rate(&self) -> f64 {
        self.k as f64 / self.block_len() as f64
    }

    pub fn crc_attach(&self, payload: &BitWord) -> Result<BitWord> {
        let crc = self.configured_crc()?;
        Ok(crc.attach(payload))
    }

    pub fn crc_check(&self, word: &BitWord) -> Result<bool> {
        let crc = self.configured_crc()?;
        Ok(crc.check(word))
    }

    fn configured_crc(&self) -> Result<&CrcConfig> {
        self.crc
            .as_ref()
            .ok_or_else(|| Error::InvalidState("no CRC configured for this code".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::bits::BitRole;

    #[test]
    fn validation() {
        assert!(CodeSpec::new(6, 3)
            .unwrap_err()
            .to_string()
            .contains("N must be a power of two"));
        assert!(CodeSpec::new(8, 0).is_err());
        assert!(CodeSpec::new(8, 9).is_err());
        assert!(CodeSpec::new(16, 8).unwrap().with_crc(CrcConfig::crc16()).is_err());
    }

    #[test]
    fn ones_include_crc() {
        let s = CodeSpec::new(2048, 1024).unwrap().with_crc(CrcConfig::crc16()).unwrap();
        assert_eq!(s.ones(), 1040);
        assert_eq!(s.rate(), 0.5);
        assert_eq!(s.log2_len(), 11);
    }

    #[test]
    fn crc_requires_configuration() {
        let s = CodeSpec::new(8, 4).unwrap();
        let p = BitWord::from_bits(&[1, 0, 1, 1], BitRole::Message);
        assert!(matches!(s.crc_attach(&p), Err(Error::InvalidState(_))));
        assert!(matches!(s.crc_check(&p), Err(Error::InvalidState(_))));
    }
}

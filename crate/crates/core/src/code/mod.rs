//! Code definition: A-vectors, the polar transform, encoding and CRC handling.

mod avector;
mod bits;
mod crc;
mod spec;
mod transform;

pub use avector::AVector;
pub use bits::{BitRole, BitWord};
pub use crc::CrcConfig;
pub use spec::CodeSpec;
pub use transform::{
    bit_reverse, bit_reverse_permute, kronecker_butterfly, log2_exact, polar_transform, polar_transform_bits,
};

use crate::error::{invalid, Error, Result};

/// A [`CodeSpec`] bound to a compatible [`AVector`].
#[derive(Clone, Debug, PartialEq)]
pub struct PolarCode {
    spec: CodeSpec,
    a: AVector,
    info: Vec<usize>,
}

impl PolarCode {
    pub fn new(spec: CodeSpec, a: AVector) -> Result<Self> {
        if a.len() != spec.block_len() {
            return invalid(format!(
                "A-vector length {} does not match N = {}",
                a.len(),
                spec.block_len()
            ));
        }
        if a.ones() != spec.ones() {
            return invalid(format!(
                "A-vector has {} ones, code needs {} (k = {}, crc = {})",
                a.ones(),
                spec.ones(),
                spec.k(),
                spec.crc_width()
            ));
        }
        let info = a.info_positions();
        Ok(Self { spec, a, info })
    }

    #[inline]
    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    #[inline]
    pub fn avector(&self) -> &AVector {
        &self.a
    }

    #[inline]
    pub fn block_len(&self) -> usize {
        self.spec.block_len()
    }

    /// Information positions in ascending order (payload first, then CRC).
    #[inline]
    pub fn info_positions(&self) -> &[usize] {
        &self.info
    }

    #[inline]
    pub fn is_frozen(&self, i: usize) -> bool {
        !self.a.is_info(i)
    }

    pub fn frozen_mask(&self) -> Vec<bool> {
        self.a.as_bools().iter().map(|&b| !b).collect()
    }

    /// Appends the CRC (if any) and scatters into `u`. Returns `u`.
    pub fn scatter_payload(&self, payload: &[u8]) -> Vec<u8> {
        debug_assert_eq!(payload.len(), self.spec.k());
        let mut u = vec![0u8; self.block_len()];
        match self.spec.crc() {
            Some(crc) => {
                let parity = crc.checksum_bits(payload.iter().map(|&b| b != 0));
                let r = crc.width as usize;
                let info_bits = payload
                    .iter()
                    .copied()
                    .chain((0..r).map(|i| ((parity >> (r - 1 - i)) & 1) as u8));
                for (&pos, bit) in self.info.iter().zip(info_bits) {
                    u[pos] = bit;
                }
            }
            None => {
                for (&pos, &bit) in self.info.iter().zip(payload) {
                    u[pos] = bit;
                }
            }
        }
        u
    }

    /// Information bits (payload followed by CRC) read from `u`.
    pub fn gather_info(&self, u: &[u8]) -> Vec<u8> {
        self.info.iter().map(|&i| u[i]).collect()
    }

    /// Payload bits read from `u`, CRC stripped.
    pub fn gather_payload(&self, u: &[u8]) -> Vec<u8> {
        self.info[..self.spec.k()].iter().map(|&i| u[i]).collect()
    }

    /// CRC check on the information bits of `u`; `None` without a CRC.
    pub fn crc_passes(&self, u: &[u8]) -> Option<bool> {
        self.spec.crc().map(|crc| crc.check_bits(&self.gather_info(u)))
    }

    pub fn encode(&self, message: &BitWord) -> Result<BitWord> {
        if message.len() != self.spec.k() {
            return invalid(format!(
                "message has {} bits, code expects {}",
                message.len(),
                self.spec.k()
            ));
        }
        let u = self.scatter_payload(&message.to_bits());
        polar_transform(&BitWord::from_bits(&u, BitRole::UDomain))
    }

    /// Rows of `G_N` selected by the information positions, packed.
    pub fn generator_rows(&self) -> Vec<BitWord> {
        self.info.iter().map(|&i| generator_row(self.block_len(), i)).collect()
    }
}

/// Row `i` (0-based) of `G_N`.
pub fn generator_row(block_len: usize, i: usize) -> BitWord {
    let mut u = BitWord::zeros(block_len, BitRole::UDomain);
    u.set(i, true);
    polar_transform(&u).expect("power-of-two length")
}

/// Scatters `message` into the information positions of `a` and transforms.
///
/// With a CRC configured on `spec`, the parity bits are appended to the
/// message before scattering.
pub fn encode(message: &BitWord, a: &AVector, spec: &CodeSpec) -> Result<BitWord> {
    PolarCode::new(*spec, a.clone())?.encode(message)
}

/// Minimum distance as the smallest weight `2^popcount(i)` among the
/// selected rows of `G_N`.
pub fn min_distance(a: &AVector) -> Result<usize> {
    (0..a.len())
        .filter(|&i| a.is_info(i))
        .map(|i| 1usize << i.count_ones())
        .min()
        .ok_or_else(|| Error::InvalidArgument("all positions frozen".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_distance_examples() {
        let a = AVector::from_one_based(8, &[4, 6, 7, 8]).unwrap();
        assert_eq!(min_distance(&a).unwrap(), 4);
        let last = AVector::from_one_based(16, &[16]).unwrap();
        assert_eq!(min_distance(&last).unwrap(), 16);
        let full = AVector::from_bools(vec![true; 32]).unwrap();
        assert_eq!(min_distance(&full).unwrap(), 1);
        let none = AVector::from_bools(vec![false; 4]).unwrap();
        assert!(min_distance(&none).is_err());
    }

    #[test]
    fn encode_rejects_length_mismatch() {
        let spec = CodeSpec::new(8, 4).unwrap();
        let a = AVector::from_one_based(8, &[4, 6, 7, 8]).unwrap();
        let short = BitWord::from_bits(&[1, 0, 1], BitRole::Message);
        assert!(encode(&short, &a, &spec).is_err());
        let wrong_a = AVector::from_one_based(8, &[6, 7, 8]).unwrap();
        let msg = BitWord::from_bits(&[1, 0, 1, 1], BitRole::Message);
        assert!(encode(&msg, &wrong_a, &spec).is_err());
    }

    #[test]
    fn crc_bits_fill_the_last_info_positions() {
        let spec = CodeSpec::new(32, 4).unwrap().with_crc(CrcConfig::crc16()).unwrap();
        let a = AVector::from_positions(32, 12..32).unwrap();
        let code = PolarCode::new(spec, a).unwrap();
        let payload = [1u8, 0, 1, 1];
        let u = code.scatter_payload(&payload);
        assert_eq!(&u[12..16], &payload);
        assert_eq!(code.crc_passes(&u), Some(true));
        let mut bad = u.clone();
        bad[30] ^= 1;
        assert_eq!(code.crc_passes(&bad), Some(false));
        assert_eq!(code.gather_payload(&u), payload.to_vec());
    }
}

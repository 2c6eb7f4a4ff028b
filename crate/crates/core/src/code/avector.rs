use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Frozen/information mask over the `N` synthesized bit-channels.
///
/// Index `i` (0-based) corresponds to row `i` of `G_N`; `true` marks an
/// information position. Frozen positions always carry zero.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "HexForm", into = "HexForm")]
pub struct AVector {
    bits: Vec<bool>,
    ones: usize,
}

/// Serialized shape: block length plus hex mask.
#[derive(Serialize, Deserialize)]
struct HexForm {
    len: usize,
    hex: String,
}

impl From<AVector> for HexForm {
    fn from(a: AVector) -> Self {
        Self {
            len: a.len(),
            hex: a.to_hex(),
        }
    }
}

impl TryFrom<HexForm> for AVector {
    type Error = Error;
    fn try_from(h: HexForm) -> Result<Self> {
        AVector::from_hex(h.len, &h.hex)
    }
}

const FILE_MAGIC: &str = "polar-avector v1";

impl AVector {
    pub fn from_bools(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() || !bits.len().is_power_of_two() {
            return invalid(format!("A-vector length {} is not a power of two", bits.len()));
        }
        let ones = bits.iter().filter(|&&b| b).count();
        Ok(Self { bits, ones })
    }

    /// Builds from 0-based information positions.
    pub fn from_positions(block_len: usize, positions: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut bits = vec![false; block_len];
        for p in positions {
            if p >= block_len {
                return invalid(format!("position {p} outside block of {block_len}"));
            }
            bits[p] = true;
        }
        Self::from_bools(bits)
    }

    /// Builds from 1-based information positions, e.g. `{4, 6, 7, 8}`.
    pub fn from_one_based(block_len: usize, positions: &[usize]) -> Result<Self> {
        if positions.contains(&0) {
            return invalid("1-based positions start at 1");
        }
        Self::from_positions(block_len, positions.iter().map(|p| p - 1))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn is_info(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.bits
    }

    pub fn info_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i]).collect()
    }

    pub fn frozen_positions(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.bits[i]).collect()
    }

    pub fn one_based_info_set(&self) -> Vec<usize> {
        self.info_positions().into_iter().map(|i| i + 1).collect()
    }

    pub fn hamming_distance(&self, other: &AVector) -> usize {
        self.bits.iter().zip(&other.bits).filter(|(a, b)| a != b).count()
    }

    pub(crate) fn toggle(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
        if self.bits[i] {
            self.ones += 1;
        } else {
            self.ones -= 1;
        }
    }

    /// Hex string, MSB of the first nibble is position 1, zero-padded at the end.
    pub fn to_hex(&self) -> String {
        self.bits
            .chunks(4)
            .map(|c| {
                let v = (0..4).fold(0u32, |acc, j| (acc << 1) | c.get(j).copied().unwrap_or(false) as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(block_len: usize, hex: &str) -> Result<Self> {
        let hex = hex.trim();
        if hex.len() != block_len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "expected {} hex digits for N={block_len}, got {}",
                block_len.div_ceil(4),
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for ch in hex.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {ch:?}")))?;
            bits.extend((0..4).rev().map(|j| (v >> j) & 1 == 1));
        }
        if bits[block_len..].iter().any(|&b| b) {
            return Err(Error::Parse("nonzero padding bits after position N".into()));
        }
        bits.truncate(block_len);
        Self::from_bools(bits)
    }

    /// Three-line text file: magic, `N=.. ones=..`, hex mask.
    pub fn to_file_string(&self) -> String {
        format!("{FILE_MAGIC}\nN={} ones={}\n{}\n", self.len(), self.ones, self.to_hex())
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let magic = lines.next().unwrap_or_default().trim_end();
        if magic != FILE_MAGIC {
            return Err(Error::Parse(format!("bad header {magic:?}, expected {FILE_MAGIC:?}")));
        }
        let header = lines.next().ok_or_else(|| Error::Parse("missing size line".into()))?;
        let mut block_len = None;
        let mut ones = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("malformed field {field:?}")))?;
            let value: usize = value
                .parse()
                .map_err(|_| Error::Parse(format!("non-integer value in {field:?}")))?;
            match key {
                "N" => block_len = Some(value),
                "ones" => ones = Some(value),
                _ => return Err(Error::Parse(format!("unknown field {key:?}"))),
            }
        }
        let (Some(block_len), Some(ones)) = (block_len, ones) else {
            return Err(Error::Parse("size line needs N= and ones=".into()));
        };
        let hex = lines.next().ok_or_else(|| Error::Parse("missing hex line".into()))?;
        let a = Self::from_hex(block_len, hex)?;
        if a.ones() != ones {
            return Err(Error::Parse(format!(
                "header says ones={ones} but mask has {}",
                a.ones()
            )));
        }
        Ok(a)
    }
}

impl fmt::Debug for AVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AVector(")?;
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_p8_4() {
        let a = AVector::from_one_based(8, &[4, 6, 7, 8]).unwrap();
        assert_eq!(format!("{a:?}"), "AVector(00010111)");
        assert_eq!(a.to_hex(), "17");
        assert_eq!(a.to_file_string(), "polar-avector v1\nN=8 ones=4\n17\n");
    }

    #[test]
    fn short_blocks_pad_the_last_nibble() {
        let a = AVector::from_one_based(2, &[1]).unwrap();
        assert_eq!(a.to_hex(), "8");
        assert_eq!(AVector::from_hex(2, "8").unwrap(), a);
        assert!(AVector::from_hex(2, "9").is_err());
    }

    #[test]
    fn parse_rejects_inconsistent_files() {
        assert!(AVector::parse_file("polar-avector v2\nN=8 ones=4\n17\n").is_err());
        assert!(AVector::parse_file("polar-avector v1\nN=8 ones=3\n17\n").is_err());
        assert!(AVector::parse_file("polar-avector v1\nN=8 ones=4\n1\n").is_err());
        assert!(AVector::parse_file("polar-avector v1\nN=8\n17\n").is_err());
        assert!(AVector::parse_file("polar-avector v1\nN=8 ones=4\n1g\n").is_err());
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(AVector::from_bools(vec![true; 6]).is_err());
        assert!(AVector::from_positions(8, [8]).is_err());
        assert!(AVector::from_one_based(8, &[0]).is_err());
    }
}

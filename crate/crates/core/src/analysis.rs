//! Code diagnostics: weight spectra, frozen-channel charts and SNR
//! mismatch tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelConfig;
use crate::code::{generator_row, AVector, CodeSpec, PolarCode};
use crate::construct::ReliabilityVector;
use crate::decoder::DecoderConfig;
use crate::error::{invalid, Error, Result};
use crate::genalg::{Fitness, FitnessMetric};
use crate::scalar::Scalar;
use crate::sim::{run_point, Engine, StoppingRule};

/// Largest information-set size the exhaustive enumerator accepts.
pub const ENUM_MAX_INFO_BITS: usize = 28;

/// Number of codewords of each weight.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightSpectrum {
    pub counts: BTreeMap<usize, u64>,
}

impl WeightSpectrum {
    pub fn get(&self, d: usize) -> u64 {
        self.counts.get(&d).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// Smallest nonzero weight, if any.
    pub fn min_nonzero_weight(&self) -> Option<usize> {
        self.counts.keys().copied().find(|&d| d > 0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("weight,count\n");
        for (d, c) in &self.counts {
            let _ = writeln!(out, "{d},{c}");
        }
        out
    }

    fn merge(mut self, other: Self) -> Self {
        for (d, c) in other.counts {
            *self.counts.entry(d).or_insert(0) += c;
        }
        self
    }
}

/// Exact weight spectrum by enumerating all `2^K` messages.
///
/// The message space is split into chunks on the high bits; each chunk walks
/// its low bits in Gray-code order so every step is one row XOR.
pub fn weight_enumerator_bruteforce(a: &AVector) -> Result<WeightSpectrum> {
    let info = a.info_positions();
    let k = info.len();
    if k > ENUM_MAX_INFO_BITS {
        return Err(Error::Capacity {
            what: "weight enumeration information bits",
            limit: ENUM_MAX_INFO_BITS,
            got: k,
        });
    }
    if crate::code::log2_exact(a.len()).is_none() {
        return invalid("A-vector length must be a power of two");
    }
    let rows: Vec<Vec<u64>> = info
        .iter()
        .map(|&i| generator_row(a.len(), i).words().to_vec())
        .collect();
    let words = a.len().div_ceil(64);
    let high = k.min(8);
    let low = k - high;

    let spectrum = (0u64..1 << high)
        .into_par_iter()
        .map(|chunk| {
            let mut cw = vec![0u64; words];
            for t in 0..high {
                if chunk >> t & 1 == 1 {
                    xor_into(&mut cw, &rows[low + t]);
                }
            }
            let mut local = vec![0u64; a.len() + 1];
            local[weight(&cw)] += 1;
            for step in 1u64..1 << low {
                xor_into(&mut cw, &rows[step.trailing_zeros() as usize]);
                local[weight(&cw)] += 1;
            }
            WeightSpectrum {
                counts: local.into_iter().enumerate().filter(|(_, c)| *c > 0).collect(),
            }
        })
        .reduce(WeightSpectrum::default, WeightSpectrum::merge);
    Ok(spectrum)
}

fn xor_into(dst: &mut [u64], row: &[u64]) {
    for (d, r) in dst.iter_mut().zip(row) {
        *d ^= r;
    }
}

fn weight(w: &[u64]) -> usize {
    w.iter().map(|x| x.count_ones() as usize).sum()
}

/// Positions sorted by decreasing Z, laid out row-major; `true` is frozen.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrozenChart {
    pub width: usize,
    pub height: usize,
    /// Bit-channel index shown in each cell.
    pub order: Vec<usize>,
    pub frozen: Vec<bool>,
}

impl FrozenChart {
    pub fn cell(&self, row: usize, col: usize) -> bool {
        self.frozen[row * self.width + col]
    }

    pub fn frozen_count(&self) -> usize {
        self.frozen.iter().filter(|&&f| f).count()
    }

    /// Information cells among the `frozen_count()` least reliable cells,
    /// i.e. departures from a pure reliability-threshold split.
    pub fn reliability_inversions(&self) -> usize {
        let f = self.frozen_count();
        self.frozen[..f].iter().filter(|&&fr| !fr).count()
    }

    /// One line per row, `1` for frozen cells.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.frozen.chunks(self.width) {
            let line: Vec<&str> = row.iter().map(|&f| if f { "1" } else { "0" }).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// Binary PGM (P5): frozen cells black, information cells white.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend(self.frozen.iter().map(|&f| if f { 0u8 } else { 255u8 }));
        out
    }
}

pub const DEFAULT_CHART_WIDTH: usize = 128;

pub fn frozen_channel_chart<T: Scalar>(a: &AVector, z: &ReliabilityVector<T>, width: usize) -> Result<FrozenChart> {
    let n_len = a.len();
    if z.len() != n_len {
        return invalid(format!("reliability length {} != A-vector length {n_len}", z.len()));
    }
    if width == 0 || !n_len.is_multiple_of(width) {
        return invalid(format!("chart width {width} does not divide N = {n_len}"));
    }
    let lz = z.log_z();
    let mut order: Vec<usize> = (0..n_len).collect();
    order.sort_by(|&i, &j| {
        lz[j]
            .partial_cmp(&lz[i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let frozen = order.iter().map(|&i| !a.is_info(i)).collect();
    Ok(FrozenChart {
        width,
        height: n_len / width,
        order,
        frozen,
    })
}

/// Operating conditions shared by every cell of a mismatch table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MismatchSetup {
    pub spec: CodeSpec,
    pub channel: ChannelConfig,
    pub metric: FitnessMetric,
    pub target: f64,
    /// SNR points (dB); sorted ascending before use.
    pub snr_grid: Vec<f64>,
    pub stop: StoppingRule,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum MismatchCell {
    /// Lowest grid SNR meeting the target.
    At(f64),
    /// Target not met anywhere on the grid.
    Unreached { max: f64 },
}

impl std::fmt::Display for MismatchCell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MismatchCell::At(db) => write!(f, "{db}"),
            MismatchCell::Unreached { max } => write!(f, "> {max}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MismatchTable {
    pub codes: Vec<String>,
    pub decoders: Vec<String>,
    /// `cells[code][decoder]`.
    pub cells: Vec<Vec<MismatchCell>>,
}

impl MismatchTable {
    pub fn is_empty(&self) -> bool {
        self.cells.iter().all(|r| r.is_empty())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("code");
        for d in &self.decoders {
            out.push(',');
            out.push_str(d);
        }
        out.push('\n');
        for (name, row) in self.codes.iter().zip(&self.cells) {
            out.push_str(name);
            for c in row {
                let _ = write!(out, ",{c}");
            }
            out.push('\n');
        }
        out
    }
}

/// For every (code, decoder) pair, the lowest grid SNR whose simulated error
/// rate is at most `setup.target`, found by bisection assuming the rate falls
/// with SNR. All cells share `setup.seed`.
pub fn mismatch_table(
    codes: &[(String, AVector)],
    decoders: &[DecoderConfig],
    setup: &MismatchSetup,
    engine: &Engine,
) -> Result<MismatchTable> {
    let mut grid = setup.snr_grid.clone();
    if grid.is_empty() && !decoders.is_empty() {
        return invalid("SNR grid is empty");
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut cells = Vec::with_capacity(codes.len());
    for (_, a) in codes {
        let code = PolarCode::new(setup.spec, a.clone())?;
        let mut row = Vec::with_capacity(decoders.len());
        for dec in decoders {
            let meets = |db: f64| -> Result<bool> {
                let p = run_point(
                    &code,
                    dec,
                    &setup.channel.with_param(db),
                    &setup.stop,
                    setup.seed,
                    engine,
                )?;
                let f = Fitness::from_counters(&p.counters, setup.spec.k(), setup.metric, false);
                Ok(f.rate <= setup.target)
            };
            let last = grid.len() - 1;
            if !meets(grid[last])? {
                row.push(MismatchCell::Unreached { max: grid[last] });
                continue;
            }
            let (mut lo, mut hi) = (0usize, last);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if meets(grid[mid])? {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            row.push(MismatchCell::At(grid[lo]));
        }
        cells.push(row);
    }
    Ok(MismatchTable {
        codes: codes.iter().map(|(n, _)| n.clone()).collect(),
        decoders: decoders.iter().map(|d| d.descriptor()).collect(),
        cells,
    })
}

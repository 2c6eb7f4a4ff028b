//! Seeded Monte-Carlo BER/BLER engine.
//!
//! Frame `i` always draws its payload and noise from stream `i` of the master
//! seed. Frames are decoded in parallel batches but counted strictly in index
//! order, so the stopping point and every counter are identical for any
//! worker count.

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelConfig, ChannelKind};
use crate::code::{polar_transform_bits, PolarCode};
use crate::decoder::DecoderConfig;
use crate::error::{invalid, Error, Result};
use crate::rng::frame_rng;
use crate::scalar::Scalar;

/// Column schema of [`points_to_csv`].
pub const CSV_HEADER: &str = "snr_db,frames,bit_errs,blk_errs,ber,bler,avg_iters,seed";

/// Run ends at `min_block_errors` block errors or `max_frames` frames,
/// whichever comes first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoppingRule {
    pub min_block_errors: u64,
    pub max_frames: u64,
}

impl StoppingRule {
    pub fn new(min_block_errors: u64, max_frames: u64) -> Result<Self> {
        let rule = Self {
            min_block_errors,
            max_frames,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_block_errors < 1 || self.max_frames < 1 {
            return invalid("stopping rule needs at least one error event and one frame");
        }
        Ok(())
    }
}

impl Default for StoppingRule {
    fn default() -> Self {
        Self {
            min_block_errors: 100,
            max_frames: 1_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    F32,
    #[default]
    F64,
}

impl std::str::FromStr for Precision {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" => Ok(Self::F32),
            "f64" => Ok(Self::F64),
            other => invalid(format!("unknown precision {other:?}")),
        }
    }
}

/// Result of one simulated frame.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FrameOutcome {
    pub bit_errs: u32,
    pub block_err: bool,
    pub iters: u32,
}

/// Running totals over the frames counted so far.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub frames: u64,
    pub bit_errs: u64,
    /// Σ (bit errors per frame)², for the frame-level spread of the BER.
    pub bit_err_sq: u64,
    pub blk_errs: u64,
    pub iters: u64,
}

impl Counters {
    fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        self.bit_errs += o.bit_errs as u64;
        self.bit_err_sq += (o.bit_errs as u64).pow(2);
        self.blk_errs += o.block_err as u64;
        self.iters += o.iters as u64;
    }
}

/// One operating point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimPoint {
    /// `Eb/N0` in dB, or the erasure probability on the BEC.
    pub param: f64,
    pub channel: ChannelKind,
    pub counters: Counters,
    pub payload_bits: usize,
    pub seed: u64,
    pub decoder: String,
    /// Swept BP iteration cap or list size, when part of such a sweep.
    pub sweep_value: Option<usize>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl SimPoint {
    pub fn frames(&self) -> u64 {
        self.counters.frames
    }

    pub fn bit_errs(&self) -> u64 {
        self.counters.bit_errs
    }

    pub fn blk_errs(&self) -> u64 {
        self.counters.blk_errs
    }

    pub fn ber(&self) -> f64 {
        let bits = self.counters.frames as f64 * self.payload_bits as f64;
        if bits == 0.0 {
            0.0
        } else {
            self.counters.bit_errs as f64 / bits
        }
    }

    pub fn bler(&self) -> f64 {
        if self.counters.frames == 0 {
            0.0
        } else {
            self.counters.blk_errs as f64 / self.counters.frames as f64
        }
    }

    pub fn avg_iters(&self) -> f64 {
        if self.counters.frames == 0 {
            0.0
        } else {
            self.counters.iters as f64 / self.counters.frames as f64
        }
    }

    /// Standard error of the BER, treating frames (not bits) as the
    /// independent samples.
    pub fn ber_std_err(&self) -> f64 {
        let f = self.counters.frames as f64;
        let k = self.payload_bits as f64;
        if f < 2.0 || k == 0.0 {
            return 0.0;
        }
        let mean = self.counters.bit_errs as f64 / (f * k);
        let second = self.counters.bit_err_sq as f64 / (f * k * k);
        ((second - mean * mean).max(0.0) / (f - 1.0)).sqrt()
    }

    pub fn bler_std_err(&self) -> f64 {
        let f = self.counters.frames as f64;
        if f == 0.0 {
            return 0.0;
        }
        let p = self.bler();
        (p * (1.0 - p) / f).sqrt()
    }

    /// `(low, high)` of the BER ± 2σ interval.
    pub fn ber_interval(&self) -> (f64, f64) {
        let s = 2.0 * self.ber_std_err();
        ((self.ber() - s).max(0.0), self.ber() + s)
    }
}

/// Worker pool plus per-run options. Cheap to clone.
#[derive(Clone)]
pub struct Engine {
    pool: Option<Arc<rayon::ThreadPool>>,
    workers: usize,
    pub precision: Precision,
    /// Send the all-zero codeword instead of random payloads.
    pub all_zero: bool,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("workers", &self.workers)
            .field("precision", &self.precision)
            .field("all_zero", &self.all_zero)
            .finish()
    }
}

const FIRST_BATCH: u64 = 64;
const MAX_BATCH: u64 = 8192;

impl Engine {
    /// `workers = 0` uses the available parallelism; `1` runs inline.
    pub fn new(workers: usize) -> Result<Self> {
        let workers = if workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            workers
        };
        let pool = if workers > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|e| Error::InvalidState(format!("worker pool: {e}")))?;
            Some(Arc::new(pool))
        } else {
            None
        };
        Ok(Self {
            pool,
            workers,
            precision: Precision::F64,
            all_zero: false,
        })
    }

    pub fn serial() -> Self {
        Self {
            pool: None,
            workers: 1,
            precision: Precision::F64,
            all_zero: false,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn with_all_zero(mut self, all_zero: bool) -> Self {
        self.all_zero = all_zero;
        self
    }

    /// Runs `trial(frame_index)` until the stopping rule (or `abort`) fires.
    ///
    /// `abort` sees the counters after every frame; returning true ends the
    /// run there.
    pub fn run_trials<F>(
        &self,
        stop: &StoppingRule,
        abort: Option<&(dyn Fn(&Counters) -> bool + Sync)>,
        trial: F,
    ) -> Result<Counters>
    where
        F: Fn(u64) -> Result<FrameOutcome> + Sync,
    {
        stop.validate()?;
        let mut c = Counters::default();
        let mut start = 0u64;
        let mut batch = FIRST_BATCH;
        loop {
            let end = (start + batch).min(stop.max_frames);
            let outcomes: Vec<FrameOutcome> = match &self.pool {
                Some(pool) => pool.install(|| (start..end).into_par_iter().map(&trial).collect::<Result<_>>())?,
                None => (start..end).map(&trial).collect::<Result<_>>()?,
            };
            for o in &outcomes {
                c.add(o);
                if c.blk_errs >= stop.min_block_errors || c.frames >= stop.max_frames {
                    return Ok(c);
                }
                if abort.is_some_and(|f| f(&c)) {
                    return Ok(c);
                }
            }
            start = end;
            batch = (batch * 2).min(MAX_BATCH);
        }
    }
}

fn validate(code: &PolarCode, decoder: &DecoderConfig, channel: &ChannelConfig) -> Result<()> {
    decoder.validate(code)?;
    channel.validate()
}

fn polar_frame<T: Scalar>(
    code: &PolarCode,
    decoder: &DecoderConfig,
    channel: &ChannelConfig,
    seed: u64,
    all_zero: bool,
    frame: u64,
) -> Result<FrameOutcome> {
    let mut rng = frame_rng(seed, frame);
    let k = code.spec().k();
    let payload: Vec<u8> = if all_zero {
        vec![0; k]
    } else {
        (0..k).map(|_| rng.random::<bool>() as u8).collect()
    };
    let u = code.scatter_payload(&payload);
    let x = polar_transform_bits(&u);
    let llr = channel.transmit::<T, _>(&x, code.spec().rate(), &mut rng);
    let res = decoder.decode(&llr, code)?;
    let bit_errs = res
        .message_hat
        .iter()
        .zip(&payload)
        .filter(|(a, &b)| *a != (b == 1))
        .count() as u32;
    Ok(FrameOutcome {
        bit_errs,
        block_err: bit_errs > 0,
        iters: res.iterations_used as u32,
    })
}

/// Simulates one operating point.
pub fn run_point(
    code: &PolarCode,
    decoder: &DecoderConfig,
    channel: &ChannelConfig,
    stop: &StoppingRule,
    seed: u64,
    engine: &Engine,
) -> Result<SimPoint> {
    run_point_with_abort(code, decoder, channel, stop, seed, engine, None)
}

/// [`run_point`] with an early-abort predicate over the running counters.
pub fn run_point_with_abort(
    code: &PolarCode,
    decoder: &DecoderConfig,
    channel: &ChannelConfig,
    stop: &StoppingRule,
    seed: u64,
    engine: &Engine,
    abort: Option<&(dyn Fn(&Counters) -> bool + Sync)>,
) -> Result<SimPoint> {
    validate(code, decoder, channel)?;
    stop.validate()?;
    let t0 = Instant::now();
    let all_zero = engine.all_zero;
    let counters = match engine.precision {
        Precision::F64 => engine.run_trials(stop, abort, |i| {
            polar_frame::<f64>(code, decoder, channel, seed, all_zero, i)
        })?,
        Precision::F32 => engine.run_trials(stop, abort, |i| {
            polar_frame::<f32>(code, decoder, channel, seed, all_zero, i)
        })?,
    };
    Ok(SimPoint {
        param: channel.param,
        channel: channel.kind,
        counters,
        payload_bits: code.spec().k(),
        seed,
        decoder: decoder.descriptor(),
        sweep_value: None,
        wall_clock: t0.elapsed(),
    })
}

/// Axis of a sweep. Every grid entry reuses the same seed, so points share
/// their noise realizations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", content = "values", rename_all = "kebab-case")]
pub enum SweepGrid {
    /// Channel parameter values (dB, or ε on the BEC).
    Snr(Vec<f64>),
    BpIters(Vec<usize>),
    ListSize(Vec<usize>),
}

impl SweepGrid {
    pub fn len(&self) -> usize {
        match self {
            SweepGrid::Snr(v) => v.len(),
            SweepGrid::BpIters(v) | SweepGrid::ListSize(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Extra leading CSV column for non-SNR sweeps.
    pub fn column(&self) -> Option<&'static str> {
        match self {
            SweepGrid::Snr(_) => None,
            SweepGrid::BpIters(_) => Some("bp_iters"),
            SweepGrid::ListSize(_) => Some("list_size"),
        }
    }
}

pub fn run_sweep(
    code: &PolarCode,
    decoder: &DecoderConfig,
    channel: &ChannelConfig,
    grid: &SweepGrid,
    stop: &StoppingRule,
    seed: u64,
    engine: &Engine,
) -> Result<Vec<SimPoint>> {
    if grid.is_empty() {
        return invalid("sweep grid is empty");
    }
    match grid {
        SweepGrid::Snr(values) => values
            .iter()
            .map(|&v| run_point(code, decoder, &channel.with_param(v), stop, seed, engine))
            .collect(),
        SweepGrid::BpIters(values) => values
            .iter()
            .map(|&it| {
                let dec = decoder.with_bp_iters(it)?;
                let mut p = run_point(code, &dec, channel, stop, seed, engine)?;
                p.sweep_value = Some(it);
                Ok(p)
            })
            .collect(),
        SweepGrid::ListSize(values) => values
            .iter()
            .map(|&l| {
                let dec = decoder.with_list_size(l)?;
                let mut p = run_point(code, &dec, channel, stop, seed, engine)?;
                p.sweep_value = Some(l);
                Ok(p)
            })
            .collect(),
    }
}

/// CSV with [`CSV_HEADER`], optionally preceded by a swept-parameter column.
pub fn points_to_csv(points: &[SimPoint], sweep_column: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(col) = sweep_column {
        out.push_str(col);
        out.push(',');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for p in points {
        if sweep_column.is_some() {
            let _ = write!(out, "{},", p.sweep_value.unwrap_or(0));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{:.6e},{:.6e},{:.4},{}",
            p.param,
            p.frames(),
            p.bit_errs(),
            p.blk_errs(),
            p.ber(),
            p.bler(),
            p.avg_iters(),
            p.seed
        );
    }
    out
}

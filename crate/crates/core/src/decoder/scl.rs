use super::{check_frame, natural_order, DecodeResult};
use crate::channel::LlrFrame;
use crate::code::{BitRole, BitWord, PolarCode};
use crate::error::{invalid, Error, Result};
use crate::scalar::{g_update, min_sum, Scalar};

/// One surviving path at the end of list decoding.
#[derive(Clone, Debug, PartialEq)]
pub struct SclCandidate {
    pub u_hat: BitWord,
    pub metric: f64,
    pub crc_pass: Option<bool>,
    /// Metric after each decided position, present only for traced decodes.
    pub metric_trace: Option<Vec<f64>>,
}

/// Best path plus the full final list, sorted by ascending metric
/// (ties keep lexicographic path order).
#[derive(Clone, Debug, PartialEq)]
pub struct SclOutput {
    pub best: DecodeResult,
    pub list: Vec<SclCandidate>,
}

/// List decoding with `list_size` paths. Path metric grows by `|λ|` whenever
/// a bit disagrees with the sign of its LLR; with min-sum `f` the final metric
/// of a path equals the correlation discrepancy of its codeword, so a list
/// large enough to hold every message decodes exactly as ML.
pub fn decode_scl<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode, list_size: usize) -> Result<SclOutput> {
    run(frame, code, list_size, false)
}

/// As [`decode_scl`], recording every path's metric after each position.
pub fn decode_scl_traced<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode, list_size: usize) -> Result<SclOutput> {
    run(frame, code, list_size, true)
}

/// Returns the lowest-metric list member that passes the CRC, or the best
/// path flagged `crc_pass = Some(false)` when none does.
pub fn decode_scl_crc<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode, list_size: usize) -> Result<DecodeResult> {
    if code.spec().crc().is_none() {
        return Err(Error::InvalidState(
            "scl-crc decoding needs a CRC-configured code".into(),
        ));
    }
    let out = decode_scl(frame, code, list_size)?;
    match out.list.iter().find(|c| c.crc_pass == Some(true)) {
        Some(c) => Ok(DecodeResult::from_u(code, c.u_hat.to_bits(), c.metric, 0, Some(true))),
        None => {
            let mut best = out.best;
            best.crc_pass = Some(false);
            Ok(best)
        }
    }
}

fn run<T: Scalar>(frame: &LlrFrame<T>, code: &PolarCode, list_size: usize, traced: bool) -> Result<SclOutput> {
    check_frame(frame, code)?;
    if list_size < 1 {
        return invalid("list size must be >= 1");
    }
    let mut dec = ListDecoder::new(natural_order(&frame.llr), code.avector().as_bools(), list_size, traced);
    dec.node(0, 0);

    let mut order: Vec<usize> = (0..dec.paths.len()).collect();
    // Stable: equal metrics keep lexicographic order.
    order.sort_by(|&a, &b| {
        dec.paths[a]
            .metric
            .partial_cmp(&dec.paths[b].metric)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let list: Vec<SclCandidate> = order
        .iter()
        .map(|&p| {
            let path = &dec.paths[p];
            SclCandidate {
                u_hat: BitWord::from_bits(&path.u, BitRole::UDomain),
                metric: path.metric.as_f64(),
                crc_pass: code.crc_passes(&path.u),
                metric_trace: traced.then(|| path.trace.iter().map(|m| m.as_f64()).collect()),
            }
        })
        .collect();
    let best_path = &dec.paths[order[0]];
    let best = DecodeResult::from_u(
        code,
        best_path.u.clone(),
        best_path.metric.as_f64(),
        0,
        code.crc_passes(&best_path.u),
    );
    Ok(SclOutput { best, list })
}

#[derive(Clone)]
struct Path<T> {
    /// LLRs for depths 1..=n; depth d lives at `N - (N >> (d-1))` with
    /// length `N >> d`.
    alpha: Vec<T>,
    beta: Vec<u8>,
    u: Vec<u8>,
    metric: T,
    trace: Vec<T>,
}

impl<T: Scalar> Path<T> {
    fn overwrite_from(&mut self, other: &Self) {
        self.alpha.copy_from_slice(&other.alpha);
        self.beta.copy_from_slice(&other.beta);
        self.u.copy_from_slice(&other.u);
        self.metric = other.metric;
        self.trace.clone_from(&other.trace);
    }
}

struct ListDecoder<'a, T> {
    root: Vec<T>,
    info: &'a [bool],
    n_len: usize,
    log_n: u32,
    list_size: usize,
    traced: bool,
    paths: Vec<Path<T>>,
    spare: Vec<Path<T>>,
    cand: Vec<(T, usize)>,
    keep: Vec<bool>,
}

impl<'a, T: Scalar> ListDecoder<'a, T> {
    fn new(root: Vec<T>, info: &'a [bool], list_size: usize, traced: bool) -> Self {
        let n_len = root.len();
        let first = Path {
            alpha: vec![T::zero(); n_len.saturating_sub(1)],
            beta: vec![0; n_len],
            u: vec![0; n_len],
            metric: T::zero(),
            trace: Vec::new(),
        };
        Self {
            root,
            info,
            n_len,
            log_n: n_len.trailing_zeros(),
            list_size,
            traced,
            paths: vec![first],
            spare: Vec::new(),
            cand: Vec::new(),
            keep: Vec::new(),
        }
    }

    fn start(&self, depth: u32) -> usize {
        self.n_len - (self.n_len >> (depth - 1))
    }

    fn node(&mut self, depth: u32, offset: usize) {
        if depth == self.log_n {
            self.leaf(offset);
            return;
        }
        let h = (self.n_len >> depth) / 2;
        let child_start = self.start(depth + 1);
        let parent_start = if depth == 0 { 0 } else { self.start(depth) };

        for p in &mut self.paths {
            let (lo, hi) = p.alpha.split_at_mut(child_start);
            let parent: &[T] = if depth == 0 { &self.root } else { &lo[parent_start..] };
            for j in 0..h {
                hi[j] = min_sum(parent[j], parent[j + h]);
            }
        }
        self.node(depth + 1, offset);

        for p in &mut self.paths {
            let (lo, hi) = p.alpha.split_at_mut(child_start);
            let parent: &[T] = if depth == 0 { &self.root } else { &lo[parent_start..] };
            for j in 0..h {
                hi[j] = g_update(parent[j], parent[j + h], p.beta[offset + j]);
            }
        }
        self.node(depth + 1, offset + h);

        for p in &mut self.paths {
            for j in 0..h {
                p.beta[offset + j] ^= p.beta[offset + h + j];
            }
        }
    }

    fn leaf_llr(&self, p: &Path<T>) -> T {
        if self.log_n == 0 {
            self.root[0]
        } else {
            p.alpha[self.n_len - 2]
        }
    }

    fn leaf(&mut self, i: usize) {
        if !self.info[i] {
            for idx in 0..self.paths.len() {
                let lam = self.leaf_llr(&self.paths[idx]);
                let p = &mut self.paths[idx];
                if lam < T::zero() {
                    p.metric += -lam;
                }
                p.u[i] = 0;
                p.beta[i] = 0;
                if self.traced {
                    p.trace.push(p.metric);
                }
            }
            return;
        }

        let count = self.paths.len();
        self.cand.clear();
        for (idx, p) in self.paths.iter().enumerate() {
            let lam = self.leaf_llr(p);
            let (pen0, pen1) = if lam < T::zero() {
                (-lam, T::zero())
            } else {
                (T::zero(), lam)
            };
            self.cand.push((p.metric + pen0, 2 * idx));
            self.cand.push((p.metric + pen1, 2 * idx + 1));
        }
        self.keep.clear();
        self.keep.resize(2 * count, false);
        if 2 * count <= self.list_size {
            self.keep.iter_mut().for_each(|k| *k = true);
        } else {
            self.cand.sort_unstable_by(|a, b| {
                a.0.partial_cmp(&b.0)
                    .unwrap_or(std::cmp::Ordering::Equal)
                    .then(a.1.cmp(&b.1))
            });
            for &(_, idx) in &self.cand[..self.list_size] {
                self.keep[idx] = true;
            }
        }
        // Candidate metrics by index, before `cand` order is lost.
        let mut metric_of = vec![T::zero(); 2 * count];
        for &(m, idx) in &self.cand {
            metric_of[idx] = m;
        }

        let old = std::mem::take(&mut self.paths);
        for (idx, mut path) in old.into_iter().enumerate() {
            let (k0, k1) = (self.keep[2 * idx], self.keep[2 * idx + 1]);
            match (k0, k1) {
                (true, true) => {
                    let mut twin = match self.spare.pop() {
                        Some(mut s) => {
                            s.overwrite_from(&path);
                            s
                        }
                        None => path.clone(),
                    };
                    set_bit(&mut path, i, 0, metric_of[2 * idx], self.traced);
                    set_bit(&mut twin, i, 1, metric_of[2 * idx + 1], self.traced);
                    self.paths.push(path);
                    self.paths.push(twin);
                }
                (true, false) => {
                    set_bit(&mut path, i, 0, metric_of[2 * idx], self.traced);
                    self.paths.push(path);
                }
                (false, true) => {
                    set_bit(&mut path, i, 1, metric_of[2 * idx + 1], self.traced);
                    self.paths.push(path);
                }
                (false, false) => self.spare.push(path),
            }
        }
    }
}

fn set_bit<T: Scalar>(p: &mut Path<T>, i: usize, bit: u8, metric: T, traced: bool) {
    p.u[i] = bit;
    p.beta[i] = bit;
    p.metric = metric;
    if traced {
        p.trace.push(metric);
    }
}

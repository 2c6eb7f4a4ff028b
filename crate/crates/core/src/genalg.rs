//! Genetic search over information sets.
//!
//! A generation keeps the `T` fittest A-vectors, adds one mutant per elite
//! and one midpoint crossover per unordered elite pair, for a population of
//! `(T² + 3T) / 2`. Fitness is a Monte-Carlo error rate (lower is better).

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelConfig;
use crate::code::{bit_reverse, AVector, CodeSpec, PolarCode};
use crate::construct::{construct_bhattacharyya, construct_rm};
use crate::decoder::DecoderConfig;
use crate::error::{invalid, Error, Result};
use crate::rng::{derive_seed, StreamRng};
use crate::sim::{run_point_with_abort, Counters, Engine, StoppingRule};

/// Population size produced by an update with truncation count `t`.
pub fn population_size(t: usize) -> usize {
    (t * t + 3 * t) / 2
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitnessMetric {
    #[default]
    Ber,
    Bler,
}

impl std::str::FromStr for FitnessMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ber" => Ok(Self::Ber),
            "bler" => Ok(Self::Bler),
            other => invalid(format!("unknown fitness metric {other:?}")),
        }
    }
}

/// Which noise realizations each generation is evaluated on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseSchedule {
    /// The same noise for every generation, so cached elite scores stay
    /// comparable with their offspring.
    #[default]
    Fixed,
    /// Fresh common noise per generation; all members of one generation
    /// share it. Pair with re-evaluation, or lucky elites never lose.
    PerGeneration,
}

/// Measured error rate with the counts behind it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Fitness {
    pub rate: f64,
    /// Raw error events of the selected metric (bit or block errors).
    pub errors: u64,
    pub frames: u64,
    pub bit_errs: u64,
    pub blk_errs: u64,
    /// Evaluation was cut short by early abort.
    pub aborted: bool,
}

impl Fitness {
    pub fn from_counters(c: &Counters, payload_bits: usize, metric: FitnessMetric, aborted: bool) -> Self {
        let (rate, errors) = match metric {
            FitnessMetric::Ber => {
                let bits = (c.frames as f64 * payload_bits as f64).max(1.0);
                (c.bit_errs as f64 / bits, c.bit_errs)
            }
            FitnessMetric::Bler => (c.blk_errs as f64 / (c.frames as f64).max(1.0), c.blk_errs),
        };
        Self {
            rate,
            errors,
            frames: c.frames,
            bit_errs: c.bit_errs,
            blk_errs: c.blk_errs,
            aborted,
        }
    }

    /// Fitness from an exact or externally computed rate.
    pub fn exact(rate: f64) -> Self {
        Self {
            rate,
            errors: 0,
            frames: 0,
            bit_errs: 0,
            blk_errs: 0,
            aborted: false,
        }
    }

    fn rank_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.rate
            .partial_cmp(&other.rate)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(self.errors.cmp(&other.errors))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Individual {
    pub a: AVector,
    pub fitness: Option<Fitness>,
    pub born: usize,
}

impl Individual {
    pub fn new(a: AVector, born: usize) -> Self {
        Self { a, fitness: None, born }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Population {
    pub members: Vec<Individual>,
    pub t: usize,
    pub generation: usize,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members sorted by rate, then raw errors, then insertion order.
    /// Unevaluated members sort last.
    pub fn ranked(&self) -> Vec<&Individual> {
        let mut v: Vec<&Individual> = self.members.iter().collect();
        v.sort_by(|x, y| match (&x.fitness, &y.fitness) {
            (Some(a), Some(b)) => a.rank_cmp(b),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
        v
    }

    pub fn best(&self) -> Option<&Individual> {
        self.ranked().into_iter().next().filter(|i| i.fitness.is_some())
    }
}

/// Scores an A-vector. `seed` selects the noise realization; `cutoff`, when
/// given, is the fitness an individual must beat to stay in the elite set.
pub trait Evaluator: Sync {
    fn evaluate(&self, a: &AVector, seed: u64, cutoff: Option<&Fitness>) -> Result<Fitness>;
}

/// Monte-Carlo fitness through the simulation engine.
#[derive(Clone, Debug)]
pub struct SimEvaluator {
    pub spec: CodeSpec,
    pub decoder: DecoderConfig,
    pub channel: ChannelConfig,
    pub stop: StoppingRule,
    pub metric: FitnessMetric,
    pub engine: Engine,
    /// Stop an evaluation once it is provably worse than the cutoff on the
    /// frames seen so far.
    pub early_abort: bool,
}

impl Evaluator for SimEvaluator {
    fn evaluate(&self, a: &AVector, seed: u64, cutoff: Option<&Fitness>) -> Result<Fitness> {
        let code = PolarCode::new(self.spec, a.clone())?;
        let metric = self.metric;
        let limit = cutoff.filter(|_| self.early_abort).copied();
        let abort = move |c: &Counters| match limit {
            Some(f) => {
                let errs = match metric {
                    FitnessMetric::Ber => c.bit_errs,
                    FitnessMetric::Bler => c.blk_errs,
                };
                c.frames <= f.frames && errs > f.errors
            }
            None => false,
        };
        let abort_ref: &(dyn Fn(&Counters) -> bool + Sync) = &abort;
        let p = run_point_with_abort(
            &code,
            &self.decoder,
            &self.channel,
            &self.stop,
            seed,
            &self.engine,
            limit.map(|_| abort_ref),
        )?;
        let aborted = limit.is_some_and(|_| abort(&p.counters));
        Ok(Fitness::from_counters(&p.counters, self.spec.k(), metric, aborted))
    }
}

/// Exact SC block-error probability on the BEC, estimated over sampled
/// erasure patterns: a block fails when any information bit sees an erased
/// bit-channel with all earlier decisions correct.
#[derive(Clone, Debug)]
pub struct BecScEvaluator {
    pub epsilon: f64,
    pub patterns: usize,
    /// Patterns are drawn from this seed, not the generation seed, so every
    /// evaluation is exact against the same sample.
    pub pattern_seed: u64,
}

impl Evaluator for BecScEvaluator {
    fn evaluate(&self, a: &AVector, _seed: u64, _cutoff: Option<&Fitness>) -> Result<Fitness> {
        Ok(Fitness::exact(bec_sc_block_error_rate(
            a,
            self.epsilon,
            self.patterns,
            self.pattern_seed,
        )?))
    }
}

/// Fraction of `patterns` sampled erasure patterns on which SC decoding of
/// `a` leaves some information bit erased.
pub fn bec_sc_block_error_rate(a: &AVector, epsilon: f64, patterns: usize, seed: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return invalid(format!("erasure probability {epsilon} outside [0, 1]"));
    }
    let mut rng = StreamRng::seed_from_u64(seed);
    let mut failures = 0usize;
    for _ in 0..patterns {
        let erased: Vec<bool> = (0..a.len()).map(|_| rng.random_bool(epsilon)).collect();
        if bec_sc_fails(a, &erased)? {
            failures += 1;
        }
    }
    Ok(if patterns == 0 {
        0.0
    } else {
        failures as f64 / patterns as f64
    })
}

/// Whether SC on the BEC, with every earlier decision correct, meets an
/// erased information bit. `erased` is indexed like the codeword.
pub fn bec_sc_fails(a: &AVector, erased: &[bool]) -> Result<bool> {
    let n_len = a.len();
    if erased.len() != n_len {
        return invalid("erasure pattern length differs from N");
    }
    let n = crate::code::log2_exact(n_len).ok_or_else(|| Error::InvalidArgument("length not a power of two".into()))?;
    let natural: Vec<bool> = (0..n_len).map(|i| erased[bit_reverse(i, n)]).collect();
    let mut leaf = vec![false; n_len];
    erasure_leaves(&natural, &mut leaf);
    Ok((0..n_len).any(|i| a.is_info(i) && leaf[i]))
}

/// Genie-aided erasure status of every leaf: `f` erases if either input is
/// erased, `g` only if both are.
fn erasure_leaves(e: &[bool], out: &mut [bool]) {
    if e.len() == 1 {
        out[0] = e[0];
        return;
    }
    let h = e.len() / 2;
    let upper: Vec<bool> = (0..h).map(|j| e[j] || e[j + h]).collect();
    let lower: Vec<bool> = (0..h).map(|j| e[j] && e[j + h]).collect();
    let (lo, hi) = out.split_at_mut(h);
    erasure_leaves(&upper, lo);
    erasure_leaves(&lower, hi);
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenAlgConfig {
    pub spec: CodeSpec,
    /// Channel parameter the fitness is measured at.
    pub snr_genalg: f64,
    pub generations: usize,
    pub t: usize,
    pub decoder: DecoderConfig,
    pub channel: ChannelConfig,
    pub metric: FitnessMetric,
    pub stop: StoppingRule,
    pub seed: u64,
    /// Design SNRs (dB) of the Bhattacharyya seeds.
    pub init_snrs: Vec<f64>,
    pub inject_rm: bool,
    /// Re-simulate carried-over elites every generation.
    pub reeval: bool,
    pub noise: NoiseSchedule,
    pub early_abort: bool,
}

impl GenAlgConfig {
    pub fn new(spec: CodeSpec, channel: ChannelConfig, decoder: DecoderConfig) -> Self {
        Self {
            spec,
            snr_genalg: channel.param,
            generations: 40,
            t: 5,
            decoder,
            channel,
            metric: FitnessMetric::Ber,
            stop: StoppingRule::default(),
            seed: 0,
            init_snrs: default_init_snrs(),
            inject_rm: false,
            reeval: false,
            noise: NoiseSchedule::Fixed,
            early_abort: false,
        }
    }

    pub fn population_size(&self) -> usize {
        population_size(self.t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t < 1 {
            return invalid("truncation count T must be >= 1");
        }
        let ones = self.spec.ones();
        if ones == 0 || ones == self.spec.block_len() {
            return invalid("genetic search needs 0 < information bits < N");
        }
        self.stop.validate()?;
        self.channel.with_param(self.snr_genalg).validate()
    }

    /// Simulation-backed evaluator for this configuration.
    pub fn sim_evaluator(&self, engine: Engine) -> SimEvaluator {
        SimEvaluator {
            spec: self.spec,
            decoder: self.decoder,
            channel: self.channel.with_param(self.snr_genalg),
            stop: self.stop,
            metric: self.metric,
            engine,
            early_abort: self.early_abort,
        }
    }

    fn generation_seed(&self, generation: usize) -> u64 {
        match self.noise {
            NoiseSchedule::PerGeneration => derive_seed(self.seed, generation as u64 + 1),
            NoiseSchedule::Fixed => derive_seed(self.seed, 1),
        }
    }
}

/// 0.0, 0.25, …, 5.0 dB.
pub fn default_init_snrs() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.25).collect()
}

/// Swaps one uniformly chosen information position with one uniformly
/// chosen frozen position.
pub fn mutation<R: Rng + ?Sized>(a: &AVector, rng: &mut R) -> Result<AVector> {
    let ones = a.info_positions();
    let zeros = a.frozen_positions();
    if ones.is_empty() || zeros.is_empty() {
        return invalid("mutation needs both information and frozen positions");
    }
    let i = *ones.choose(rng).expect("non-empty");
    let j = *zeros.choose(rng).expect("non-empty");
    let mut child = a.clone();
    child.toggle(i);
    child.toggle(j);
    Ok(child)
}

/// First half of `a1` followed by the second half of `a2`, then random
/// surplus-type flips until the popcount matches the parents.
pub fn crossover<R: Rng + ?Sized>(a1: &AVector, a2: &AVector, rng: &mut R) -> Result<AVector> {
    if a1.len() != a2.len() || a1.ones() != a2.ones() {
        return invalid("crossover parents differ in length or popcount");
    }
    let n_len = a1.len();
    let half = n_len / 2;
    let bits: Vec<bool> = (0..n_len)
        .map(|i| if i < half { a1.is_info(i) } else { a2.is_info(i) })
        .collect();
    let mut child = AVector::from_bools(bits)?;
    let k = a1.ones();
    while child.ones() > k {
        let i = *child.info_positions().choose(rng).expect("surplus ones");
        child.toggle(i);
    }
    while child.ones() < k {
        let i = *child.frozen_positions().choose(rng).expect("surplus zeros");
        child.toggle(i);
    }
    Ok(child)
}

/// Elites, one mutant per elite, one crossover per elite pair `i < j`.
/// Elites keep their fitness; offspring are unevaluated.
pub fn update_population<R: Rng + ?Sized>(pop: &Population, rng: &mut R) -> Result<Population> {
    let t = pop.t;
    let ranked = pop.ranked();
    let evaluated = ranked.iter().filter(|m| m.fitness.is_some()).count();
    if t < 1 || evaluated < t {
        return Err(Error::InvalidState(format!(
            "update needs {t} evaluated members, have {evaluated}"
        )));
    }
    let born = pop.generation + 1;
    let elites: Vec<&Individual> = ranked[..t].to_vec();
    let mut members: Vec<Individual> = elites.iter().map(|&e| e.clone()).collect();
    for e in &elites {
        members.push(Individual::new(mutation(&e.a, rng)?, born));
    }
    for i in 0..t {
        for j in i + 1..t {
            members.push(Individual::new(crossover(&elites[i].a, &elites[j].a, rng)?, born));
        }
    }
    debug_assert_eq!(members.len(), population_size(t));
    Ok(Population {
        members,
        t,
        generation: born,
    })
}

/// Evaluates every member without a fitness on the generation's common
/// noise. Identical A-vectors share one evaluation.
pub fn compute_fitness<E: Evaluator + ?Sized>(
    pop: &mut Population,
    config: &GenAlgConfig,
    evaluator: &E,
) -> Result<()> {
    let seed = config.generation_seed(pop.generation);
    let mut seen: HashMap<AVector, Fitness> = HashMap::new();
    for m in &pop.members {
        if let Some(f) = m.fitness {
            seen.entry(m.a.clone()).or_insert(f);
        }
    }
    for idx in 0..pop.members.len() {
        if pop.members[idx].fitness.is_some() {
            continue;
        }
        let a = pop.members[idx].a.clone();
        let f = match seen.get(&a) {
            Some(f) => *f,
            None => {
                let cutoff = tth_best(pop, config.t);
                let f = evaluator.evaluate(&a, seed, cutoff.as_ref())?;
                seen.insert(a, f);
                f
            }
        };
        pop.members[idx].fitness = Some(f);
    }
    Ok(())
}

fn tth_best(pop: &Population, t: usize) -> Option<Fitness> {
    let mut f: Vec<Fitness> = pop
        .members
        .iter()
        .filter_map(|m| m.fitness)
        .filter(|f| !f.aborted)
        .collect();
    if f.len() < t {
        return None;
    }
    f.sort_by(|a, b| a.rank_cmp(b));
    Some(f[t - 1])
}

/// Bhattacharyya seeds over `config.init_snrs` (deduplicated, optionally
/// with the RM code), evaluated; keeps the fittest `S` and tops up with
/// distinct mutations of the best.
pub fn initialize_population<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    config: &GenAlgConfig,
    evaluator: &E,
    rng: &mut R,
) -> Result<Population> {
    config.validate()?;
    let s = config.population_size();
    let mut candidates: Vec<AVector> = Vec::new();
    let push = |a: AVector, list: &mut Vec<AVector>| {
        if !list.contains(&a) {
            list.push(a);
        }
    };
    for &db in &config.init_snrs {
        push(construct_bhattacharyya(&config.spec, db)?, &mut candidates);
    }
    if config.inject_rm {
        push(construct_rm(&config.spec)?, &mut candidates);
    }
    let mut pop = Population {
        members: candidates.into_iter().map(|a| Individual::new(a, 0)).collect(),
        t: config.t,
        generation: 0,
    };
    compute_fitness(&mut pop, config, evaluator)?;
    let mut kept: Vec<Individual> = pop.ranked().into_iter().take(s).cloned().collect();

    if kept.len() < s {
        let best = kept[0].a.clone();
        let mut attempts = 0;
        while kept.len() < s {
            let m = mutation(&best, rng)?;
            attempts += 1;
            // Tiny codes may not have enough distinct neighbours.
            if attempts < 64 * s && kept.iter().any(|i| i.a == m) {
                continue;
            }
            kept.push(Individual::new(m, 0));
        }
    }
    pop.members = kept;
    compute_fitness(&mut pop, config, evaluator)?;
    Ok(pop)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_rate: f64,
    pub best_errors: u64,
    pub best_frames: u64,
    pub best: AVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenAlgResult {
    pub best: Individual,
    /// One record per generation, starting with the initial population.
    pub history: Vec<GenerationRecord>,
    pub population: Population,
}

fn record(pop: &Population) -> GenerationRecord {
    let best = pop.best().expect("evaluated population");
    let f = best.fitness.expect("evaluated");
    GenerationRecord {
        generation: pop.generation,
        best_rate: f.rate,
        best_errors: f.errors,
        best_frames: f.frames,
        best: best.a.clone(),
    }
}

pub fn run_genalg<E: Evaluator + ?Sized>(config: &GenAlgConfig, evaluator: &E) -> Result<GenAlgResult> {
    run_genalg_with(config, evaluator, |_| {})
}

/// [`run_genalg`] calling `on_generation` after each generation is scored.
pub fn run_genalg_with<E: Evaluator + ?Sized, F: FnMut(&GenerationRecord)>(
    config: &GenAlgConfig,
    evaluator: &E,
    mut on_generation: F,
) -> Result<GenAlgResult> {
    let mut rng = StreamRng::seed_from_u64(derive_seed(config.seed, 0x6761));
    let mut pop = initialize_population(config, evaluator, &mut rng)?;
    let mut history = vec![record(&pop)];
    on_generation(&history[0]);
    for _ in 0..config.generations {
        pop = update_population(&pop, &mut rng)?;
        if config.reeval {
            for m in &mut pop.members {
                m.fitness = None;
            }
        }
        compute_fitness(&mut pop, config, evaluator)?;
        let rec = record(&pop);
        on_generation(&rec);
        history.push(rec);
    }
    let best = pop.best().expect("evaluated population").clone();
    Ok(GenAlgResult {
        best,
        history,
        population: pop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamRng;

    fn av(bits: &[u8]) -> AVector {
        AVector::from_bools(bits.iter().map(|&b| b == 1).collect()).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(population_size(1), 2);
        assert_eq!(population_size(3), 9);
        assert_eq!(population_size(5), 20);
    }

    #[test]
    fn forced_mutation() {
        let mut rng = StreamRng::seed_from_u64(1);
        assert_eq!(mutation(&av(&[1, 0]), &mut rng).unwrap(), av(&[0, 1]));
        assert!(mutation(&av(&[1, 1]), &mut rng).is_err());
        assert!(mutation(&av(&[0, 0]), &mut rng).is_err());
    }

    #[test]
    fn crossover_of_twins_is_identity() {
        let mut rng = StreamRng::seed_from_u64(2);
        let a = av(&[1, 0, 1, 1, 0, 0, 1, 0]);
        assert_eq!(crossover(&a, &a, &mut rng).unwrap(), a);
    }

    #[test]
    fn crossover_rejects_mismatch() {
        let mut rng = StreamRng::seed_from_u64(2);
        assert!(crossover(&av(&[1, 0, 0, 0]), &av(&[1, 1, 0, 0]), &mut rng).is_err());
    }

    #[test]
    fn erasure_leaves_match_bhattacharyya_at_extremes() {
        let mut out = vec![false; 4];
        erasure_leaves(&[true, false, false, false], &mut out);
        assert_eq!(out, vec![true, false, false, false]);
    }
}

mod common;

use std::collections::{BTreeMap, HashSet};

use polarforge::channel::ChannelConfig;
use polarforge::code::{AVector, CodeSpec};
use polarforge::construct::construct_bhattacharyya_bec;
use polarforge::decoder::DecoderConfig;
use polarforge::genalg::{
    bec_sc_fails, crossover, initialize_population, mutation, population_size, run_genalg, update_population,
    Evaluator, Fitness, FitnessMetric, GenAlgConfig, Individual, NoiseSchedule, Population,
};
use polarforge::rng::StreamRng;
use polarforge::sim::{Engine, StoppingRule};
use polarforge::{Error, Result};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// Fitness = Hamming distance to a fixed target, scaled to a rate.
struct DistanceToTarget(AVector);

impl Evaluator for DistanceToTarget {
    fn evaluate(&self, a: &AVector, _seed: u64, _cutoff: Option<&Fitness>) -> Result<Fitness> {
        Ok(Fitness::exact(a.hamming_distance(&self.0) as f64 / a.len() as f64))
    }
}

/// Seed-dependent noisy fitness: identical (A, seed) pairs give identical
/// scores, mimicking common random numbers.
struct NoisyToy;

impl Evaluator for NoisyToy {
    fn evaluate(&self, a: &AVector, seed: u64, _cutoff: Option<&Fitness>) -> Result<Fitness> {
        let key = a.to_hex().bytes().fold(seed, |h, b| h.rotate_left(7) ^ b as u64);
        let mut rng = StreamRng::seed_from_u64(key);
        let base: f64 = a
            .info_positions()
            .iter()
            .map(|&i| 1.0 / (1 + i.count_ones()) as f64)
            .sum();
        Ok(Fitness::exact(base + rng.random::<f64>() * 0.5))
    }
}

fn random_avector(rng: &mut StreamRng, len: usize, k: usize) -> AVector {
    let mut pos: Vec<usize> = (0..len).collect();
    for i in 0..k {
        let j = rng.random_range(i..len);
        pos.swap(i, j);
    }
    AVector::from_positions(len, pos[..k].to_vec()).unwrap()
}

fn evaluated_population(t: usize, members: usize, seed: u64) -> Population {
    let mut rng = StreamRng::seed_from_u64(seed);
    Population {
        members: (0..members)
            .map(|i| Individual {
                a: random_avector(&mut rng, 32, 12),
                fitness: Some(Fitness::exact(i as f64)),
                born: 0,
            })
            .collect(),
        t,
        generation: 0,
    }
}

#[test]
fn update_produces_eq2_population_size() {
    let mut rng = StreamRng::seed_from_u64(1);
    for t in 1..=8 {
        let pop = evaluated_population(t, population_size(t), t as u64);
        let next = update_population(&pop, &mut rng).unwrap();
        assert_eq!(next.len(), (t * t + 3 * t) / 2);
        assert_eq!(next.generation, 1);
        // Elites first, with their fitness carried over.
        for (i, e) in next.members[..t].iter().enumerate() {
            assert_eq!(e.fitness, Some(Fitness::exact(i as f64)));
        }
        assert!(next.members[t..].iter().all(|m| m.fitness.is_none() && m.born == 1));
        assert!(next.members.iter().all(|m| m.a.ones() == 12));
    }
    assert_eq!(population_size(5), 20);
    assert_eq!(population_size(1), 2);
    assert_eq!(population_size(3), 9);
}

#[test]
fn update_needs_t_evaluated_members() {
    let mut pop = evaluated_population(5, 6, 3);
    for m in &mut pop.members[..2] {
        m.fitness = None;
    }
    let mut rng = StreamRng::seed_from_u64(1);
    assert!(matches!(update_population(&pop, &mut rng), Err(Error::InvalidState(_))));
}

#[test]
fn mutation_contract_over_many_trials() {
    let mut rng = StreamRng::seed_from_u64(2);
    for _ in 0..10_000 {
        let a = random_avector(&mut rng, 64, 20);
        let m = mutation(&a, &mut rng).unwrap();
        assert_eq!(m.ones(), a.ones());
        assert_eq!(m.hamming_distance(&a), 2);
    }
}

#[test]
fn mutation_pairs_are_uniform() {
    let a = AVector::from_one_based(8, &[4, 6, 7, 8]).unwrap();
    let mut rng = StreamRng::seed_from_u64(3);
    let trials = 100_000u64;
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for _ in 0..trials {
        let m = mutation(&a, &mut rng).unwrap();
        let one = (0..8).find(|&i| a.is_info(i) && !m.is_info(i)).unwrap();
        let zero = (0..8).find(|&i| !a.is_info(i) && m.is_info(i)).unwrap();
        *counts.entry((one, zero)).or_insert(0) += 1;
    }
    assert_eq!(counts.len(), 16);
    let p = 1.0 / 16.0;
    let mean = trials as f64 * p;
    let sd = (trials as f64 * p * (1.0 - p)).sqrt();
    for (pair, &c) in &counts {
        assert!((c as f64 - mean).abs() <= 3.0 * sd, "{pair:?}: {c}");
    }
}

#[test]
fn mutation_support_is_within_k_times_n_minus_k() {
    let a = AVector::from_one_based(16, &[4, 8, 12, 13, 14, 15, 16]).unwrap();
    let mut rng = StreamRng::seed_from_u64(4);
    let seen: HashSet<AVector> = (0..20_000).map(|_| mutation(&a, &mut rng).unwrap()).collect();
    assert_eq!(seen.len(), 7 * 9);
}

#[test]
fn crossover_with_full_repair_reaches_all_six_children() {
    let a1 = AVector::from_bools(vec![true, true, false, false]).unwrap();
    let a2 = AVector::from_bools(vec![false, false, true, true]).unwrap();
    let mut rng = StreamRng::seed_from_u64(5);
    let seen: HashSet<AVector> = (0..2_000).map(|_| crossover(&a1, &a2, &mut rng).unwrap()).collect();
    assert_eq!(seen.len(), 6);
    assert!(seen.iter().all(|c| c.ones() == 2));
}

proptest! {
    #[test]
    fn crossover_keeps_rate_and_only_repairs_surplus(seed in any::<u64>(), n in 1u32..8, frac in 0.05f64..0.95) {
        let len = 1usize << n;
        let k = ((len as f64 * frac) as usize).clamp(1, len);
        let mut rng = StreamRng::seed_from_u64(seed);
        let a1 = random_avector(&mut rng, len, k);
        let a2 = random_avector(&mut rng, len, k);
        let child = crossover(&a1, &a2, &mut rng).unwrap();
        prop_assert_eq!(child.ones(), k);
        let raw: Vec<bool> = (0..len).map(|i| if i < len / 2 { a1.is_info(i) } else { a2.is_info(i) }).collect();
        let raw_ones = raw.iter().filter(|&&b| b).count();
        for (i, &r) in raw.iter().enumerate() {
            if raw_ones >= k {
                prop_assert!(!child.is_info(i) || r);
            } else {
                prop_assert!(child.is_info(i) || !r);
            }
        }
    }

    #[test]
    fn mutation_keeps_rate(seed in any::<u64>(), n in 1u32..8) {
        let len = 1usize << n;
        let mut rng = StreamRng::seed_from_u64(seed);
        let k = rng.random_range(1..len);
        let a = random_avector(&mut rng, len, k);
        let m = mutation(&a, &mut rng).unwrap();
        prop_assert_eq!(m.ones(), k);
        prop_assert_eq!(m.hamming_distance(&a), 2);
    }
}

fn toy_config(len: usize, k: usize, generations: usize, t: usize) -> GenAlgConfig {
    let spec = CodeSpec::new(len, k).unwrap();
    let mut cfg = GenAlgConfig::new(spec, ChannelConfig::awgn(2.0), DecoderConfig::Sc);
    cfg.generations = generations;
    cfg.t = t;
    cfg.seed = 77;
    cfg
}

#[test]
fn elitism_gives_monotone_history() {
    for noise in [NoiseSchedule::Fixed, NoiseSchedule::PerGeneration] {
        let mut cfg = toy_config(64, 24, 20, 5);
        cfg.noise = noise;
        let res = run_genalg(&cfg, &NoisyToy).unwrap();
        assert_eq!(res.history.len(), 21);
        for w in res.history.windows(2) {
            assert!(w[1].best_rate <= w[0].best_rate);
        }
        assert_eq!(res.population.len(), 20);
        assert!(res.population.members.iter().all(|m| m.a.ones() == 24));
    }
}

#[test]
fn search_approaches_target() {
    let target = AVector::from_positions(32, [1, 2, 5, 9, 17, 18, 20, 24, 30, 31]).unwrap();
    let cfg = toy_config(32, 10, 60, 5);
    let res = run_genalg(&cfg, &DistanceToTarget(target.clone())).unwrap();
    let first = res.history[0].best_rate;
    assert!(res.best.fitness.unwrap().rate < first);
}

#[test]
fn zero_generations_returns_best_initial_member() {
    let cfg = toy_config(32, 16, 0, 5);
    let res = run_genalg(&cfg, &NoisyToy).unwrap();
    assert_eq!(res.history.len(), 1);
    assert_eq!(res.population.generation, 0);
    let best = res.population.best().unwrap();
    assert_eq!(&res.best, best);
    assert_eq!(res.history[0].best, best.a);
    let min = res
        .population
        .members
        .iter()
        .map(|m| m.fitness.unwrap().rate)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(res.best.fitness.unwrap().rate, min);
}

#[test]
fn initial_population_is_distinct_and_rate_correct() {
    let cfg = toy_config(64, 32, 0, 5);
    let mut rng = StreamRng::seed_from_u64(0);
    let pop = initialize_population(&cfg, &NoisyToy, &mut rng).unwrap();
    assert_eq!(pop.len(), 20);
    let distinct: HashSet<&AVector> = pop.members.iter().map(|m| &m.a).collect();
    assert_eq!(distinct.len(), 20);
    assert!(pop.members.iter().all(|m| m.a.ones() == 32 && m.fitness.is_some()));
}

#[test]
fn identical_vectors_share_fitness_and_runs_repeat() {
    let mut cfg = toy_config(16, 8, 5, 3);
    cfg.channel = ChannelConfig::awgn(1.0);
    cfg.snr_genalg = 1.0;
    cfg.stop = StoppingRule::new(20, 2_000).unwrap();
    let ev = cfg.sim_evaluator(Engine::new(2).unwrap());
    let a = run_genalg(&cfg, &ev).unwrap();
    let b = run_genalg(&cfg, &cfg.sim_evaluator(Engine::serial())).unwrap();
    assert_eq!(a, b);
    for x in &a.population.members {
        for y in &a.population.members {
            if x.a == y.a {
                assert_eq!(x.fitness, y.fitness);
            }
        }
    }
}

#[test]
fn perfect_channel_gives_zero_error_everywhere() {
    let spec = CodeSpec::new(16, 8).unwrap();
    let mut cfg = GenAlgConfig::new(spec, ChannelConfig::bec(0.0), DecoderConfig::Sc);
    cfg.snr_genalg = 0.0;
    cfg.generations = 3;
    cfg.t = 3;
    cfg.stop = StoppingRule::new(1, 500).unwrap();
    let res = run_genalg(&cfg, &cfg.sim_evaluator(Engine::serial())).unwrap();
    assert!(res.population.members.iter().all(|m| m.fitness.unwrap().rate == 0.0));
}

/// Erasure oracle by GF(2) rank: with earlier bits known, u_i is lost iff
/// row i restricted to the unerased positions lies in the span of the later
/// rows restricted the same way.
fn gf2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        if let Some(p) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) {
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r] >> bit & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

fn oracle_sc_fails(a: &AVector, erased: &[bool]) -> bool {
    let len = a.len();
    let rows: Vec<u64> = (0..len)
        .map(|i| {
            let mut u = vec![0u8; len];
            u[i] = 1;
            common::encode_dense(&u)
                .iter()
                .enumerate()
                .filter(|(j, &b)| b == 1 && !erased[*j])
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect();
    a.info_positions()
        .into_iter()
        .any(|i| gf2_rank(rows[i..].to_vec()) == gf2_rank(rows[i + 1..].to_vec()))
}

fn oracle_bler(a: &AVector, eps: f64, patterns: usize, seed: u64) -> f64 {
    let mut rng = StreamRng::seed_from_u64(seed);
    let fails = (0..patterns)
        .filter(|_| {
            let e: Vec<bool> = (0..a.len()).map(|_| rng.random_bool(eps)).collect();
            oracle_sc_fails(a, &e)
        })
        .count();
    fails as f64 / patterns as f64
}

#[test]
fn erasure_recursion_matches_rank_oracle() {
    let mut rng = StreamRng::seed_from_u64(9);
    for _ in 0..3_000 {
        let len = 1usize << rng.random_range(1..=5);
        let k = rng.random_range(1..=len);
        let a = random_avector(&mut rng, len, k);
        let e: Vec<bool> = (0..len).map(|_| rng.random_bool(0.4)).collect();
        assert_eq!(bec_sc_fails(&a, &e).unwrap(), oracle_sc_fails(&a, &e), "{a:?} {e:?}");
    }
}

#[test]
fn bec_toy_search_does_not_lose_to_its_seed() {
    let spec = CodeSpec::new(16, 8).unwrap();
    let mut cfg = GenAlgConfig::new(spec, ChannelConfig::bec(0.4), DecoderConfig::Sc);
    cfg.snr_genalg = 0.4;
    cfg.generations = 40;
    cfg.t = 5;
    cfg.metric = FitnessMetric::Bler;
    cfg.stop = StoppingRule::new(400, 100_000).unwrap();
    cfg.seed = 2024;
    let res = run_genalg(&cfg, &cfg.sim_evaluator(Engine::new(0).unwrap())).unwrap();
    let seed_code = construct_bhattacharyya_bec(&spec, 0.4).unwrap();
    let final_bler = oracle_bler(&res.best.a, 0.4, 10_000, 31);
    let seed_bler = oracle_bler(&seed_code, 0.4, 10_000, 31);
    assert!(final_bler <= seed_bler, "final {final_bler} vs seed {seed_bler}");
}

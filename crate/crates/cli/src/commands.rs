use std::path::Path;

use anyhow::{Context, Result};
use polarforge::analysis::{frozen_channel_chart, mismatch_table, weight_enumerator_bruteforce, MismatchSetup};
use polarforge::construct::{
    bhattacharyya_bec, construct_bhattacharyya, construct_bhattacharyya_bec, construct_rm, design_snr_to_epsilon,
};
use polarforge::genalg::{run_genalg_with, BecScEvaluator, Evaluator, FitnessMetric, GenAlgConfig, NoiseSchedule};
use polarforge::rng::derive_seed;
use polarforge::sim::{points_to_csv, run_sweep, Engine, Precision, StoppingRule, SweepGrid};
use polarforge::{
    AVector, BpConfig, ChannelConfig, ChannelKind, CheckRule, CodeSpec, CrcConfig, DecoderConfig, PolarCode,
};
use serde_json::json;

use crate::args::*;
use crate::manifest::Inputs;
use crate::UsageError;

const MIN_SUM_SCALE: f64 = 0.9375;

/// Runs one recorded command and returns its manifest summary.
pub fn execute(cmd: &Command, inputs: &mut Inputs) -> Result<serde_json::Value> {
    match cmd {
        Command::Construct(a) => construct(a),
        Command::Evolve(a) => evolve(a),
        Command::Simulate(a) => simulate(a, inputs),
        Command::Analyze(a) => analyze(a, inputs),
        Command::Chart(a) => chart(a, inputs),
        Command::Mismatch(a) => mismatch(a, inputs),
        Command::Replay(_) => Err(UsageError("a manifest cannot record a replay".into()).into()),
    }
}

/// Core errors raised while binding arguments are usage errors.
fn usage<T>(r: polarforge::Result<T>) -> Result<T, UsageError> {
    r.map_err(|e| UsageError(e.to_string()))
}

fn write(path: &Path, data: impl AsRef<[u8]>) -> Result<()> {
    std::fs::write(path, data).with_context(|| format!("writing {}", path.display()))
}

fn with_crc(spec: CodeSpec, crc: Option<u32>) -> Result<CodeSpec, UsageError> {
    match crc {
        Some(w) => usage(spec.with_crc(usage(CrcConfig::preset(w))?)),
        None => Ok(spec),
    }
}

fn spec_from_flags(code: &CodeArgs) -> Result<CodeSpec, UsageError> {
    let (Some(n), Some(k)) = (code.n, code.k) else {
        return Err(UsageError("both -N and -k are required".into()));
    };
    with_crc(usage(CodeSpec::new(n, k))?, code.crc)
}

fn build_avector(spec: &CodeSpec, c: &ConstructionArgs) -> Result<AVector, UsageError> {
    match c.method.unwrap_or(Method::Bhattacharyya) {
        Method::Rm => usage(construct_rm(spec)),
        Method::Bhattacharyya => match (c.design_snr, c.design_epsilon) {
            (_, Some(eps)) => usage(construct_bhattacharyya_bec(spec, eps)),
            (Some(db), None) => usage(construct_bhattacharyya(spec, db)),
            (None, None) => Err(UsageError(
                "the bhattacharyya construction needs --design-snr or --design-epsilon".into(),
            )),
        },
    }
}

/// Code from `--avector` if given, else from the construction flags.
fn load_code(code: &CodeArgs, avector: Option<&Path>, c: &ConstructionArgs, inputs: &mut Inputs) -> Result<PolarCode> {
    let Some(path) = avector else {
        let spec = spec_from_flags(code)?;
        let a = build_avector(&spec, c)?;
        return Ok(PolarCode::new(spec, a)?);
    };
    let a = AVector::parse_file(&inputs.read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let crc_width = code.crc.map_or(0, |w| w as usize);
    if a.ones() <= crc_width {
        return Err(UsageError(format!(
            "{} has too few information positions for the CRC",
            path.display()
        ))
        .into());
    }
    let file_k = a.ones() - crc_width;
    if code.n.is_some_and(|n| n != a.len()) || code.k.is_some_and(|k| k != file_k) {
        return Err(UsageError(format!(
            "{} holds N={} k={file_k}, which disagrees with -N/-k",
            path.display(),
            a.len()
        ))
        .into());
    }
    let spec = with_crc(usage(CodeSpec::new(a.len(), file_k))?, code.crc)?;
    Ok(PolarCode::new(spec, a)?)
}

/// Channel kind and the list of parameter values given for it.
fn channel_points(c: &ChannelArgs) -> Result<(ChannelKind, Vec<f64>), UsageError> {
    let (kind, values, wrong) = match c.channel {
        ChannelChoice::Awgn => (ChannelKind::Awgn, &c.snr_db, &c.epsilon),
        ChannelChoice::Rayleigh => (ChannelKind::Rayleigh, &c.snr_db, &c.epsilon),
        ChannelChoice::Bec => (ChannelKind::Bec, &c.epsilon, &c.snr_db),
    };
    let (need, other) = match kind {
        ChannelKind::Bec => ("--epsilon", "--snr-db"),
        _ => ("--snr-db", "--epsilon"),
    };
    if values.is_empty() {
        return Err(UsageError(format!(
            "{need} is required for the {} channel",
            kind.name()
        )));
    }
    if !wrong.is_empty() {
        return Err(UsageError(format!(
            "{other} does not apply to the {} channel",
            kind.name()
        )));
    }
    for &v in values {
        usage(channel_config(kind, v).validate())?;
    }
    Ok((kind, values.clone()))
}

fn channel_config(kind: ChannelKind, param: f64) -> ChannelConfig {
    match kind {
        ChannelKind::Awgn => ChannelConfig::awgn(param),
        ChannelKind::Rayleigh => ChannelConfig::rayleigh(param),
        ChannelKind::Bec => ChannelConfig::bec(param),
    }
}

fn single_point(c: &ChannelArgs, what: &str) -> Result<ChannelConfig, UsageError> {
    let (kind, values) = channel_points(c)?;
    if values.len() != 1 {
        return Err(UsageError(format!(
            "{what} takes a single channel parameter, got {}",
            values.len()
        )));
    }
    Ok(channel_config(kind, values[0]))
}

fn decoder_config(d: &DecoderArgs) -> Result<DecoderConfig, UsageError> {
    let cfg = match d.decoder {
        DecoderChoice::Sc => DecoderConfig::Sc,
        DecoderChoice::Ml => DecoderConfig::Ml,
        DecoderChoice::Scl => DecoderConfig::Scl { list_size: d.list_size },
        DecoderChoice::SclCrc => DecoderConfig::SclCrc { list_size: d.list_size },
        DecoderChoice::Bp => DecoderConfig::Bp(BpConfig {
            max_iters: d.bp_iters,
            rule: match d.bp_rule {
                BpRule::Exact => CheckRule::Exact,
                BpRule::MinSum => CheckRule::ScaledMinSum { scale: MIN_SUM_SCALE },
            },
            early_stop: !d.no_early_stop,
        }),
    };
    match cfg {
        DecoderConfig::Scl { list_size: 0 } | DecoderConfig::SclCrc { list_size: 0 } => {
            Err(UsageError("--list-size must be >= 1".into()))
        }
        DecoderConfig::Bp(bp) => usage(bp.validate()).map(|_| cfg),
        _ => Ok(cfg),
    }
}

/// `sc`, `scl:L`, `scl-crc:L`, `bp:ITERS` or `ml`.
fn parse_decoder(s: &str) -> Result<DecoderConfig, UsageError> {
    let (name, param) = match s.split_once(':') {
        Some((n, p)) => (n, Some(p)),
        None => (s, None),
    };
    let num = |p: Option<&str>| -> Result<usize, UsageError> {
        p.ok_or_else(|| UsageError(format!("decoder {s:?} needs a parameter, e.g. {name}:4")))?
            .parse()
            .map_err(|_| UsageError(format!("bad decoder parameter in {s:?}")))
    };
    let cfg = match name {
        "sc" if param.is_none() => DecoderConfig::Sc,
        "ml" if param.is_none() => DecoderConfig::Ml,
        "scl" => DecoderConfig::Scl { list_size: num(param)? },
        "scl-crc" => DecoderConfig::SclCrc { list_size: num(param)? },
        "bp" => DecoderConfig::Bp(BpConfig::new(num(param)?)),
        _ => return Err(UsageError(format!("unknown decoder {s:?}"))),
    };
    Ok(cfg)
}

fn stopping_rule(r: &RunArgs) -> Result<StoppingRule, UsageError> {
    usage(StoppingRule::new(r.min_errors, r.max_frames))
}

fn engine(r: &RunArgs) -> Result<Engine> {
    let precision = match r.precision {
        PrecisionChoice::F32 => Precision::F32,
        PrecisionChoice::F64 => Precision::F64,
    };
    Ok(Engine::new(r.workers)?
        .with_precision(precision)
        .with_all_zero(r.all_zero))
}

fn metric(m: MetricChoice) -> FitnessMetric {
    match m {
        MetricChoice::Ber => FitnessMetric::Ber,
        MetricChoice::Bler => FitnessMetric::Bler,
    }
}

fn construct(a: &ConstructArgs) -> Result<serde_json::Value> {
    let spec = spec_from_flags(&a.code)?;
    let av = build_avector(&spec, &a.construction)?;
    write(&a.output, av.to_file_string())?;
    let info = av.one_based_info_set();
    println!("A = {info:?}");
    Ok(json!({ "avector": av.to_hex(), "info_set": info }))
}

fn evolve(a: &EvolveArgs) -> Result<serde_json::Value> {
    let spec = spec_from_flags(&a.code)?;
    let channel = single_point(&a.channel, "evolve")?;
    let decoder = decoder_config(&a.decoder)?;
    let mut cfg = GenAlgConfig::new(spec, channel, decoder);
    cfg.generations = a.generations;
    cfg.t = a.t;
    cfg.metric = metric(a.metric);
    cfg.stop = stopping_rule(&a.run)?;
    cfg.seed = a.run.seed;
    cfg.inject_rm = a.inject_rm;
    cfg.reeval = a.reeval;
    cfg.early_abort = a.early_abort;
    cfg.noise = match a.noise {
        NoiseChoice::Fixed => NoiseSchedule::Fixed,
        NoiseChoice::PerGeneration => NoiseSchedule::PerGeneration,
    };
    usage(cfg.validate())?;

    let evaluator: Box<dyn Evaluator> = match a.fitness {
        FitnessChoice::Sim => Box::new(cfg.sim_evaluator(engine(&a.run)?)),
        FitnessChoice::BecPatterns => {
            if channel.kind != ChannelKind::Bec || decoder != DecoderConfig::Sc {
                return Err(UsageError("--fitness bec-patterns needs --channel bec and --decoder sc".into()).into());
            }
            if a.patterns == 0 {
                return Err(UsageError("--patterns must be >= 1".into()).into());
            }
            Box::new(BecScEvaluator {
                epsilon: channel.param,
                patterns: a.patterns,
                pattern_seed: derive_seed(a.run.seed, 0x6265),
            })
        }
    };

    let res = run_genalg_with(&cfg, evaluator.as_ref(), |r| {
        eprintln!(
            "generation {:>3}: best {:.6e} ({} errors / {} frames)",
            r.generation, r.best_rate, r.best_errors, r.best_frames
        );
    })?;

    let mut csv = String::from("generation,best_rate,best_errors,best_frames,best_avector\n");
    for r in &res.history {
        csv.push_str(&format!(
            "{},{:e},{},{},{}\n",
            r.generation,
            r.best_rate,
            r.best_errors,
            r.best_frames,
            r.best.to_hex()
        ));
    }
    write(&a.output, res.best.a.to_file_string())?;
    write(&a.history, csv)?;
    let fitness = res.best.fitness.context("best individual was never scored")?;
    println!("best A = {:?}", res.best.a.one_based_info_set());
    let metric_name = match a.metric {
        MetricChoice::Ber => "BER",
        MetricChoice::Bler => "BLER",
    };
    println!("best {metric_name} = {:e}", fitness.rate);
    Ok(json!({
        "best": res.best.a.to_hex(),
        "best_fitness": fitness,
        "history": res.history,
    }))
}

fn simulate(a: &SimulateArgs, inputs: &mut Inputs) -> Result<serde_json::Value> {
    let code = load_code(&a.code, a.avector.as_deref(), &a.construction, inputs)?;
    let decoder = decoder_config(&a.decoder)?;
    let stop = stopping_rule(&a.run)?;
    let (kind, values) = channel_points(&a.channel)?;
    let sweep_axis = |what: &str| -> Result<(), UsageError> {
        if values.len() != 1 {
            return Err(UsageError(format!("{what} needs a single channel parameter")));
        }
        Ok(())
    };
    let grid = if !a.sweep_bp_iters.is_empty() {
        sweep_axis("--sweep-bp-iters")?;
        if !matches!(decoder, DecoderConfig::Bp(_)) {
            return Err(UsageError("--sweep-bp-iters needs --decoder bp".into()).into());
        }
        if a.sweep_bp_iters.contains(&0) {
            return Err(UsageError("BP needs at least one iteration".into()).into());
        }
        SweepGrid::BpIters(a.sweep_bp_iters.clone())
    } else if !a.sweep_list_size.is_empty() {
        sweep_axis("--sweep-list-size")?;
        if !matches!(decoder, DecoderConfig::Scl { .. } | DecoderConfig::SclCrc { .. }) {
            return Err(UsageError("--sweep-list-size needs --decoder scl or scl-crc".into()).into());
        }
        if a.sweep_list_size.contains(&0) {
            return Err(UsageError("list sizes must be >= 1".into()).into());
        }
        SweepGrid::ListSize(a.sweep_list_size.clone())
    } else {
        SweepGrid::Snr(values.clone())
    };
    let channel = channel_config(kind, values[0]);
    let points = run_sweep(&code, &decoder, &channel, &grid, &stop, a.run.seed, &engine(&a.run)?)?;
    let csv = points_to_csv(&points, grid.column());
    write(&a.output, &csv)?;
    print!("{csv}");
    Ok(json!({ "decoder": decoder.descriptor(), "points": points }))
}

fn analyze(a: &AnalyzeArgs, inputs: &mut Inputs) -> Result<serde_json::Value> {
    let code = load_code(&a.code, a.avector.as_deref(), &a.construction, inputs)?;
    let spectrum = weight_enumerator_bruteforce(code.avector())?;
    write(&a.output, spectrum.to_csv())?;
    let d = spectrum.min_nonzero_weight();
    match d {
        Some(d) => println!("d_min = {d}, A_dmin = {}", spectrum.get(d)),
        None => println!("only the zero codeword"),
    }
    Ok(json!({ "min_distance": d, "spectrum": spectrum.counts }))
}

fn chart(a: &ChartArgs, inputs: &mut Inputs) -> Result<serde_json::Value> {
    if a.pgm.is_none() && a.csv.is_none() {
        return Err(UsageError("chart needs --pgm and/or --csv".into()).into());
    }
    let code = load_code(&a.code, a.avector.as_deref(), &a.construction, inputs)?;
    let c = &a.construction;
    let eps = match (c.design_epsilon, c.design_snr) {
        (Some(e), _) => e,
        (None, Some(db)) => usage(design_snr_to_epsilon(db, code.spec().rate()))?,
        (None, None) => {
            return Err(
                UsageError("chart needs --design-snr or --design-epsilon for the reliability order".into()).into(),
            )
        }
    };
    let z = usage(bhattacharyya_bec::<f64>(code.spec().log2_len(), eps))?;
    let chart = usage(frozen_channel_chart(code.avector(), &z, a.width))?;
    if let Some(p) = &a.pgm {
        write(p, chart.to_pgm())?;
    }
    if let Some(p) = &a.csv {
        write(p, chart.to_csv())?;
    }
    let inversions = chart.reliability_inversions();
    println!(
        "{}x{} chart, {} reliability inversions",
        chart.height, chart.width, inversions
    );
    Ok(json!({
        "height": chart.height,
        "width": chart.width,
        "design_epsilon": eps,
        "reliability_inversions": inversions,
    }))
}

fn mismatch(a: &MismatchArgs, inputs: &mut Inputs) -> Result<serde_json::Value> {
    let mut codes = Vec::new();
    let mut spec = None;
    for path in &a.avectors {
        let code = load_code(&a.code, Some(path), &ConstructionArgs::default(), inputs)?;
        if spec.is_some_and(|s| s != *code.spec()) {
            return Err(UsageError("all A-vectors of a mismatch table need the same N and k".into()).into());
        }
        spec = Some(*code.spec());
        let name = path
            .file_stem()
            .map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned());
        codes.push((name, code.avector().clone()));
    }
    let spec = spec.context("no A-vectors given")?;
    let decoders = a
        .decoders
        .iter()
        .map(|s| parse_decoder(s))
        .collect::<Result<Vec<_>, _>>()?;
    let (kind, grid) = channel_points(&a.channel)?;
    let setup = MismatchSetup {
        spec,
        channel: channel_config(kind, grid[0]),
        metric: metric(a.metric),
        target: a.target,
        snr_grid: grid,
        stop: stopping_rule(&a.run)?,
        seed: a.run.seed,
    };
    let table = mismatch_table(&codes, &decoders, &setup, &engine(&a.run)?)?;
    let csv = table.to_csv();
    write(&a.output, &csv)?;
    print!("{csv}");
    Ok(json!({ "table": table }))
}

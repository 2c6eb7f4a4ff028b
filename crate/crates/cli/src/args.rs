use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "polarforge",
    version,
    about = "Polar code construction, genetic code search and Monte-Carlo simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Every subcommand except `replay` is recorded verbatim in its run manifest.
#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "args", rename_all = "kebab-case")]
pub enum Command {
    /// Build an A-vector from a Bhattacharyya or Reed-Muller construction
    #[command(args_override_self = true)]
    Construct(ConstructArgs),
    /// Search for a better A-vector with the genetic algorithm
    #[command(args_override_self = true)]
    Evolve(EvolveArgs),
    /// Simulate error rates over an SNR, BP-iteration or list-size grid
    #[command(args_override_self = true)]
    Simulate(SimulateArgs),
    /// Exhaustive weight spectrum of a code
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Frozen channel chart of a code against a reliability order
    #[command(args_override_self = true)]
    Chart(ChartArgs),
    /// Minimum SNR reaching a target error rate, per code and decoder
    #[command(args_override_self = true)]
    Mismatch(MismatchArgs),
    /// Re-run the command recorded in a manifest
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct CodeArgs {
    /// Block length N (power of two)
    #[arg(short = 'N', long = "block-len")]
    pub n: Option<usize>,
    /// Payload bits per block
    #[arg(short = 'k', long = "payload")]
    pub k: Option<usize>,
    /// Outer CRC width (16 or 24)
    #[arg(long)]
    pub crc: Option<u32>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Bhattacharyya,
    Rm,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ConstructionArgs {
    /// Construction used when no A-vector file is given
    #[arg(long, value_enum)]
    pub method: Option<Method>,
    /// Design Eb/N0 in dB for the Bhattacharyya construction
    #[arg(long, allow_negative_numbers = true, conflicts_with = "design_epsilon")]
    pub design_snr: Option<f64>,
    /// Design erasure probability for the Bhattacharyya construction
    #[arg(long)]
    pub design_epsilon: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelChoice {
    #[default]
    Awgn,
    Rayleigh,
    Bec,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct ChannelArgs {
    #[arg(long, value_enum, default_value_t = ChannelChoice::Awgn)]
    pub channel: ChannelChoice,
    /// Eb/N0 in dB; a comma-separated list sweeps it where supported
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub snr_db: Vec<f64>,
    /// Erasure probability for the BEC; a list sweeps it where supported
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderChoice {
    #[default]
    Sc,
    Scl,
    SclCrc,
    Bp,
    Ml,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BpRule {
    #[default]
    Exact,
    MinSum,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct DecoderArgs {
    #[arg(long, value_enum, default_value_t = DecoderChoice::Sc)]
    pub decoder: DecoderChoice,
    #[arg(long, default_value_t = 8)]
    pub list_size: usize,
    /// BP iteration cap
    #[arg(long, default_value_t = 200)]
    pub bp_iters: usize,
    /// BP check-node rule; min-sum is scaled by 0.9375
    #[arg(long, value_enum, default_value_t = BpRule::Exact)]
    pub bp_rule: BpRule,
    /// Run BP for the full iteration cap
    #[arg(long)]
    pub no_early_stop: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrecisionChoice {
    F32,
    #[default]
    F64,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct RunArgs {
    /// Stop a point after this many block errors
    #[arg(long, default_value_t = 100)]
    pub min_errors: u64,
    /// Stop a point after this many frames
    #[arg(long, default_value_t = 1_000_000)]
    pub max_frames: u64,
    /// Worker threads; 0 uses all available cores
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    /// Master seed
    #[arg(long, env = "POLARFORGE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Transmit the all-zero codeword instead of random payloads
    #[arg(long)]
    pub all_zero: bool,
    #[arg(long, value_enum, default_value_t = PrecisionChoice::F64)]
    pub precision: PrecisionChoice,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
pub struct CommonArgs {
    /// key=value file supplying defaults for any flag; flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Manifest path; defaults to the first output with `.manifest.json` appended
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ConstructArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// A-vector output file
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricChoice {
    #[default]
    Ber,
    Bler,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseChoice {
    /// Same noise in every generation
    #[default]
    Fixed,
    /// Fresh noise each generation
    PerGeneration,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitnessChoice {
    /// Monte-Carlo simulation with the chosen decoder
    #[default]
    Sim,
    /// SC block-error rate over sampled erasure patterns (BEC + SC only)
    BecPatterns,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct EvolveArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, default_value_t = 40)]
    pub generations: usize,
    /// Truncation count: survivors per generation
    #[arg(short = 'T', long = "truncation", default_value_t = 5)]
    pub t: usize,
    #[arg(long, value_enum, default_value_t = MetricChoice::Ber)]
    pub metric: MetricChoice,
    /// Re-simulate carried-over elites every generation
    #[arg(long)]
    pub reeval: bool,
    #[arg(long, value_enum, default_value_t = NoiseChoice::Fixed)]
    pub noise: NoiseChoice,
    /// Stop scoring an individual once it cannot enter the elite set
    #[arg(long)]
    pub early_abort: bool,
    /// Add the Reed-Muller code to the initial population
    #[arg(long)]
    pub inject_rm: bool,
    #[arg(long, value_enum, default_value_t = FitnessChoice::Sim)]
    pub fitness: FitnessChoice,
    /// Erasure patterns for `--fitness bec-patterns`
    #[arg(long, default_value_t = 10_000)]
    pub patterns: usize,
    /// Best A-vector output file
    #[arg(short, long)]
    pub output: PathBuf,
    /// Per-generation history CSV
    #[arg(long)]
    pub history: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// A-vector file; otherwise the code is built from the construction flags
    #[arg(long)]
    pub avector: Option<PathBuf>,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[command(flatten)]
    pub decoder: DecoderArgs,
    #[command(flatten)]
    pub run: RunArgs,
    /// Sweep the BP iteration cap at a single channel point
    #[arg(long, value_delimiter = ',', conflicts_with = "sweep_list_size")]
    pub sweep_bp_iters: Vec<usize>,
    /// Sweep the list size at a single channel point
    #[arg(long, value_delimiter = ',')]
    pub sweep_list_size: Vec<usize>,
    /// Results CSV
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub avector: Option<PathBuf>,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Spectrum CSV (`weight,count`)
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ChartArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    #[arg(long)]
    pub avector: Option<PathBuf>,
    /// Construction flags; the design point also fixes the reliability order
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Cells per chart row
    #[arg(long, default_value_t = 128)]
    pub width: usize,
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct MismatchArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// A-vector files, one table row each (repeatable)
    #[arg(long = "avector", required = true)]
    pub avectors: Vec<PathBuf>,
    /// Decoders, one table column each: sc, scl:L, scl-crc:L, bp:ITERS, ml
    #[arg(long = "decoders", value_delimiter = ',', required = true)]
    pub decoders: Vec<String>,
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Target error rate
    #[arg(long)]
    pub target: f64,
    #[arg(long, value_enum, default_value_t = MetricChoice::Ber)]
    pub metric: MetricChoice,
    #[command(flatten)]
    pub run: RunArgs,
    /// Table CSV
    #[arg(short, long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone, Serialize, Deserialize)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run
    pub manifest: PathBuf,
    /// Write outputs (and the new manifest) into this directory instead
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Override the recorded worker count
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Construct(_) => "construct",
            Command::Evolve(_) => "evolve",
            Command::Simulate(_) => "simulate",
            Command::Analyze(_) => "analyze",
            Command::Chart(_) => "chart",
            Command::Mismatch(_) => "mismatch",
            Command::Replay(_) => "replay",
        }
    }

    /// Output files, manifest excluded.
    pub fn outputs_mut(&mut self) -> Vec<&mut PathBuf> {
        match self {
            Command::Construct(a) => vec![&mut a.output],
            Command::Evolve(a) => vec![&mut a.output, &mut a.history],
            Command::Simulate(a) => vec![&mut a.output],
            Command::Analyze(a) => vec![&mut a.output],
            Command::Chart(a) => a.pgm.iter_mut().chain(a.csv.iter_mut()).collect(),
            Command::Mismatch(a) => vec![&mut a.output],
            Command::Replay(_) => vec![],
        }
    }

    pub fn outputs(&self) -> Vec<PathBuf> {
        self.clone().outputs_mut().into_iter().map(|p| p.clone()).collect()
    }

    pub fn common_mut(&mut self) -> Option<&mut CommonArgs> {
        match self {
            Command::Construct(a) => Some(&mut a.common),
            Command::Evolve(a) => Some(&mut a.common),
            Command::Simulate(a) => Some(&mut a.common),
            Command::Analyze(a) => Some(&mut a.common),
            Command::Chart(a) => Some(&mut a.common),
            Command::Mismatch(a) => Some(&mut a.common),
            Command::Replay(_) => None,
        }
    }

    pub fn run_args_mut(&mut self) -> Option<&mut RunArgs> {
        match self {
            Command::Evolve(a) => Some(&mut a.run),
            Command::Simulate(a) => Some(&mut a.run),
            Command::Mismatch(a) => Some(&mut a.run),
            _ => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        self.clone().run_args_mut().map(|r| r.seed)
    }
}

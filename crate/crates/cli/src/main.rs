//! `ftenum`: enumerate functional topologies, report degeneracy and
//! redundancy, and simulate failures.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "ftenum",
    version,
    about = "Functional topology enumeration and resilience analysis"
)]
struct Cli {
    /// Record wall-clock duration inside report files (breaks byte-identical output).
    #[arg(long, global = true)]
    record_timing: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List every delay-bounded functional topology for a query.
    Enumerate(EnumerateArgs),
    /// Per-delay topology counts next to the Bell number of the input count.
    Degeneracy(QueryArgs),
    /// Pairwise and average redundancy over a family of input sets.
    Redundancy(RedundancyArgs),
    /// Monte Carlo resilience of the selection strategies.
    Simulate(SimulateArgs),
    /// Cross-check enumeration and simulation against brute-force references.
    Verify(VerifyArgs),
    /// Bell numbers B_0 ..= B_n.
    Bell(BellArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Dot => "dot",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct NetArgs {
    /// Network file: JSON `{"nodes": [..], "edges": [[a, b], ..]}` or an edge list.
    #[arg(long)]
    net: PathBuf,
    /// Sink label.
    #[arg(long)]
    sink: String,
    /// Hop budget; defaults to the eccentricity of the sink.
    #[arg(long)]
    dmax: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Report path; the report goes to standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads; 1 is the reference mode.
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args, Debug, Clone)]
pub struct QueryArgs {
    #[command(flatten)]
    net: NetArgs,
    /// Comma-separated input labels.
    #[arg(long, value_delimiter = ',', required = true)]
    inputs: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug, Clone)]
pub struct EnumerateArgs {
    #[command(flatten)]
    query: QueryArgs,
    /// Also write one DOT file per topology into this directory.
    #[arg(long)]
    dot_dir: Option<PathBuf>,
    /// Report enumeration progress on standard error.
    #[arg(long)]
    progress: bool,
}

#[derive(Args, Debug, Clone)]
pub struct RedundancyArgs {
    #[command(flatten)]
    net: NetArgs,
    /// A single input set, used when neither --family nor --k is given.
    #[arg(long, value_delimiter = ',')]
    inputs: Vec<String>,
    /// File with one input set per line (labels separated by commas or
    /// spaces), or a JSON list of lists.
    #[arg(long, conflicts_with = "k")]
    family: Option<PathBuf>,
    /// Use every k-subset of the non-sink nodes as the family.
    #[arg(long)]
    k: Option<usize>,
    /// Largest number of k-subsets taken.
    #[arg(long, default_value_t = 1000)]
    family_cap: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Static,
    Fallback,
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Delay,
    Energy,
}

#[derive(Args, Debug, Clone)]
pub struct FailureArgs {
    /// Failure probability of each relay node.
    #[arg(long, default_value_t = 0.1)]
    node_fail: f64,
    /// Failure probability of each link.
    #[arg(long, default_value_t = 0.0)]
    edge_fail: f64,
    #[arg(long, default_value_t = 100_000)]
    rounds: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    #[command(flatten)]
    query: QueryArgs,
    #[command(flatten)]
    failure: FailureArgs,
    /// Strategy to evaluate; repeat for several. Defaults to all three.
    #[arg(long = "strategy", value_enum)]
    strategies: Vec<StrategyArg>,
    /// Only topologies with at most this delay are usable.
    #[arg(long)]
    max_delay: Option<usize>,
    /// Only topologies with at most this many edges are usable.
    #[arg(long)]
    max_energy: Option<usize>,
    /// Ranking for the static strategy.
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Delay)]
    objective: ObjectiveArg,
    /// Largest pool for which the exact success probability is computed.
    #[arg(long, default_value_t = 20)]
    exact_cap: usize,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    net: NetArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    inputs: Vec<String>,
    /// Check this catalog file instead of a fresh enumeration.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long, default_value_t = 0.3)]
    node_fail: f64,
    #[arg(long, default_value_t = 0.1)]
    edge_fail: f64,
    #[arg(long, default_value_t = 20_000)]
    rounds: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Oracle node cap; larger networks skip the oracle check.
    #[arg(long, default_value_t = 10)]
    max_nodes: usize,
    #[arg(long, default_value_t = 20)]
    exact_cap: usize,
    /// Report path for the JSON check list.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BellArgs {
    /// Largest index.
    n: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = report::Context::new(cli.record_timing);
    let result = match &cli.command {
        Command::Enumerate(a) => commands::enumerate(&ctx, a),
        Command::Degeneracy(a) => commands::degeneracy(&ctx, a),
        Command::Redundancy(a) => commands::redundancy(&ctx, a),
        Command::Simulate(a) => commands::simulate(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
        Command::Bell(a) => commands::bell(&ctx, a),
    };
    eprintln!("elapsed {:.3}s", ctx.elapsed().as_secs_f64());
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Cooperative regenerating code toolkit.
#[derive(Debug, Parser)]
#[command(name = "mbcr", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode a file into n share files.
    Encode(EncodeArgs),
    /// Rebuild a file from any k share files.
    Decode(DecodeArgs),
    /// Regenerate r failed nodes from the n - r survivors.
    Repair(RepairArgs),
    /// Repair-bandwidth lower bound and optimal (beta1, beta2).
    Bound(BoundArgs),
    /// Information flow graph for a repair history.
    Flowgraph(FlowgraphArgs),
    /// Repeated fail-and-repair rounds with bandwidth accounting.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorArg {
    /// Vandermonde generator over GF(2^m).
    Vandermonde,
    /// The 3x4 binary generator (n = 5, k = 3, r = 2, GF(2) only).
    Builtin,
}

#[derive(Debug, Clone, Args)]
pub struct CodeArgs {
    #[arg(short = 'k', long)]
    pub k: usize,
    #[arg(short = 'r', long)]
    pub r: usize,
    /// Defaults to k + r.
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    /// Defaults to k.
    #[arg(short = 'd', long)]
    pub d: Option<usize>,
    /// Field degree m (GF(2^m)); 8 unless the builtin generator is chosen.
    #[arg(short = 'm', long = "field-degree")]
    pub field_degree: Option<u32>,
    /// Reduction polynomial, hex (0x11d) or decimal. Overrides MBCR_FIELD_POLY.
    #[arg(long)]
    pub poly: Option<String>,
    #[arg(long, value_enum, default_value = "vandermonde")]
    pub generator: GeneratorArg,
    /// Vandermonde evaluation points (n - 1 distinct field elements).
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<u16>>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(short, long)]
    pub input: PathBuf,
    #[arg(short, long = "out-dir")]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub code: CodeArgs,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(short, long)]
    pub output: PathBuf,
    /// Share files; the first k distinct nodes are used.
    #[arg(required = true)]
    pub shares: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RepairArgs {
    /// Failed node ids.
    #[arg(short, long, value_delimiter = ',', required = true)]
    pub failed: Vec<usize>,
    #[arg(short, long = "out-dir")]
    pub out_dir: PathBuf,
    /// Also write the transcript as JSON.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    /// Share files of all surviving nodes.
    #[arg(required = true)]
    pub survivors: Vec<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// File size B in packets.
    #[arg(short = 'B', long = "file-size")]
    pub file_size: Option<u64>,
    #[arg(short = 'k', long)]
    pub k: Option<usize>,
    #[arg(short = 'd', long)]
    pub d: Option<usize>,
    #[arg(short = 'r', long)]
    pub r: Option<usize>,
    /// Also print the bound for one failure at a time.
    #[arg(long)]
    pub compare_single_loss: bool,
    /// Solve the cut-constraint LP exactly and compare with the closed form.
    #[arg(long)]
    pub lp_verify: bool,
    /// Verify every 1 <= k <= K, k <= d <= D, 1 <= r <= R with B = k(2d+r-k).
    #[arg(long, value_name = "K,D,R", value_delimiter = ',')]
    pub grid: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct FlowgraphArgs {
    /// History spec file.
    pub spec: PathBuf,
    /// Collector nodes; overrides the spec. Without either, every k-subset is tried.
    #[arg(long, value_delimiter = ',')]
    pub dc: Option<Vec<usize>>,
    /// Measure the staged cut of this type, e.g. 2,1,2.
    #[arg(long, value_delimiter = ',')]
    pub cut_type: Option<Vec<usize>>,
    /// Write the edge list here instead of printing it.
    #[arg(long)]
    pub edges: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub code: CodeArgs,
    /// Defaults to the schedule length, or 10.
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One failed set per line, e.g. "4 5".
    #[arg(long)]
    pub schedule: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub stripes: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

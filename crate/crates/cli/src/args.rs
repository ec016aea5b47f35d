use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "ppid",
    version,
    about = "Pointwise partial information decomposition"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a distribution into pointwise and averaged atoms.
    Decompose(DecomposeArgs),
    /// Print the redundancy lattice for N predictors.
    Lattice(LatticeArgs),
    /// Check the target chain rule for two groups of target components.
    Chainrule(ChainRuleArgs),
    /// Emit a canonical example distribution.
    Corpus(CorpusArgs),
    /// Kelly betting on the target with predictors as side information.
    Kelly(KellyArgs),
    /// Run the invariant suite and report pass/fail per property.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistFormat {
    Tsv,
    Json,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Built-in example: xor, pwunq, rdnerr, tbc, tbep, unq, and.
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    pub corpus: Option<String>,

    /// Distribution file (TSV, or JSON by extension); `-` reads standard input.
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Force the input format instead of inferring it from the extension.
    #[arg(long, value_enum)]
    pub input_format: Option<DistFormat>,

    /// RdnErr error probability, e.g. `1/4`.
    #[arg(long)]
    pub epsilon: Option<String>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: Source,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,

    /// Logarithm base.
    #[arg(long, default_value_t = 2.0)]
    pub base: f64,

    /// Per-realisation atoms.
    #[arg(long)]
    pub pointwise: bool,

    /// Averaged atoms.
    #[arg(long)]
    pub average: bool,

    /// Target components to decompose, e.g. `t1,t3` or `t3|t1` to condition on t1.
    #[arg(long)]
    pub targets: Option<String>,

    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    /// Largest number of predictors accepted.
    #[arg(long, default_value_t = ppid_core::lattice::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    pub n: usize,

    #[arg(long, value_enum, default_value = "pretty")]
    pub format: OutputFormat,

    #[arg(long, default_value_t = ppid_core::lattice::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct ChainRuleArgs {
    #[command(flatten)]
    pub source: Source,

    /// Two component groups, e.g. `t1,t3`; join components inside a group with `+`.
    #[arg(long)]
    pub targets: String,

    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,

    #[arg(long, default_value_t = 2.0)]
    pub base: f64,

    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    #[arg(long, default_value_t = ppid_core::lattice::DEFAULT_CAP)]
    pub cap: usize,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    pub name: String,

    #[arg(long)]
    pub epsilon: Option<String>,

    #[arg(long, value_enum, default_value = "tsv")]
    pub format: DistFormat,
}

#[derive(Debug, Args)]
pub struct KellyArgs {
    #[command(flatten)]
    pub source: Source,

    /// Predictors on the wire, by name or 1-based position, e.g. `s1,s2`.
    #[arg(long)]
    pub wire: Option<String>,

    #[arg(long, default_value_t = 100_000)]
    pub races: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: Source,

    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,

    #[arg(long, value_enum, default_value = "pretty")]
    pub format: OutputFormat,

    #[arg(long, default_value_t = 1)]
    pub jobs: usize,

    #[arg(long, default_value_t = ppid_core::lattice::DEFAULT_CAP)]
    pub cap: usize,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "fibstat",
    version,
    about = "Fibonacci statistical convergence of sequences in intuitionistic fuzzy normed spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one sequence in the chosen mode.
    Analyze(AnalyzeArgs),
    /// Apply or invert F̂ and write the result as a sequence file.
    Transform(TransformArgs),
    /// Density profile of a named index set or of a real exceedance set.
    Density(DensityArgs),
    /// Run the t-norm, t-conorm and IFN axiom suites.
    Axioms(AxiomArgs),
    /// Run the theorem harness over a family of generated sequences.
    Theorems(TheoremArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct InputArgs {
    /// Generator spec, `name:key=value,…:length`.
    #[arg(long = "gen", value_name = "SPEC")]
    pub generator: Option<String>,
    /// JSON sequence file.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpaceArgs {
    #[arg(long, value_enum, default_value_t = IfnChoice::Standard)]
    pub ifn: IfnChoice,
    /// Defaults to `abs` in one dimension and `l2` otherwise.
    #[arg(long, value_enum)]
    pub norm: Option<NormChoice>,
    /// Must match the sequence dimension when given.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long, default_value = "product")]
    pub tnorm: String,
    #[arg(long, default_value = "lukasiewicz")]
    pub tconorm: String,
}

#[derive(Debug, Args)]
pub struct DensityFlags {
    /// Truncate the prefix to this many terms.
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long = "tail-window", default_value_t = 0.5)]
    pub tail_window: f64,
    #[arg(long = "zero-threshold", default_value_t = 0.02)]
    pub zero_threshold: f64,
    #[arg(long = "value-band", default_value_t = 0.02)]
    pub value_band: f64,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
    /// Write the `n,ratio` profile CSV here.
    #[arg(long, value_name = "PATH")]
    pub profile: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = ModeChoice::FscIfn)]
    pub mode: ModeChoice,
    #[command(flatten)]
    pub space: SpaceArgs,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Candidate limit `v[,v…]`; estimated from the tail when omitted.
    #[arg(long = "L", value_name = "V[,V…]", allow_hyphen_values = true)]
    pub limit: Option<String>,
    #[command(flatten)]
    pub density: DensityFlags,
    #[arg(long, value_enum, default_value_t = AnchorChoice::FirstTailInlier)]
    pub anchor: AnchorChoice,
    #[arg(long = "anchor-candidates", default_value_t = 64)]
    pub anchor_candidates: usize,
    /// Recorded in the report; overridden by FIBSTAT_SEED.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Test x itself instead of F̂x.
    #[arg(long = "no-fhat")]
    pub no_fhat: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = Direction::Apply)]
    pub direction: Direction,
    #[arg(long, value_enum, default_value_t = ArithmeticChoice::Float)]
    pub arithmetic: ArithmeticChoice,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Destination sequence file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    /// Named index set; otherwise the exceedance set of --gen/--input.
    #[arg(long, value_enum, conflicts_with_all = ["generator", "input"])]
    pub set: Option<NamedSet>,
    #[arg(long = "gen", value_name = "SPEC")]
    pub generator: Option<String>,
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
    #[arg(long = "L", value_name = "V[,V…]", allow_hyphen_values = true)]
    pub limit: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, value_enum)]
    pub norm: Option<NormChoice>,
    #[arg(long = "no-fhat")]
    pub no_fhat: bool,
    #[command(flatten)]
    pub density: DensityFlags,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct AxiomArgs {
    /// T-norms to check (repeatable); all built-ins by default.
    #[arg(long)]
    pub tnorm: Vec<String>,
    /// T-conorms to check (repeatable); all built-ins by default.
    #[arg(long)]
    pub tconorm: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = IfnChoice::Standard)]
    pub ifn: IfnChoice,
    #[arg(long, value_enum)]
    pub norm: Option<NormChoice>,
    #[arg(long, default_value_t = 1)]
    pub dim: usize,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoremArgs {
    /// Family member spec (repeatable); replaces the seeded default family.
    #[arg(long = "family", value_name = "SPEC")]
    pub family: Vec<String>,
    /// Size of the seeded default family.
    #[arg(long, default_value_t = 60)]
    pub members: usize,
    /// Prefix length of default family members.
    #[arg(long, default_value_t = 10_000)]
    pub length: usize,
    #[arg(long, value_enum, default_value_t = IfnChoice::Standard)]
    pub ifn: IfnChoice,
    #[arg(long, value_enum)]
    pub norm: Option<NormChoice>,
    /// Scales as repeated `--eps`/`--t` pairs; the harness defaults otherwise.
    #[arg(long)]
    pub eps: Vec<f64>,
    #[arg(long)]
    pub t: Vec<f64>,
    #[arg(long = "tail-window", default_value_t = 0.5)]
    pub tail_window: f64,
    #[arg(long = "zero-threshold", default_value_t = 0.02)]
    pub zero_threshold: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_name = "PATH")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    FscIfn,
    FscaIfn,
    Ordinary,
    StatReal,
    StatCauchyReal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IfnChoice {
    Standard,
    /// Mutant with `U = 1 − T/2`, for exercising the checks.
    Broken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NormChoice {
    Abs,
    L2,
    Max,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnchorChoice {
    FirstTailInlier,
    Exhaustive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Apply,
    Invert,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ArithmeticChoice {
    Float,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NamedSet {
    Squares,
    Evens,
    Odds,
    Full,
    Empty,
}

/// The spelling a value has on the command line, for echoing into reports.
pub trait ValueName {
    fn value_name(&self) -> String;
}

impl<T: ValueEnum> ValueName for T {
    fn value_name(&self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

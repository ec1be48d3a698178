use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "kenclose", version, about = "Smallest k-enclosing rectangles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance and print a report line.
    Solve(SolveArgs),
    /// Approximate the minimum-area rectangle within a factor 1+eps.
    Approx(ApproxArgs),
    /// Print a generated instance.
    Gen(GenArgs),
    /// Solve an instance and check the answer against an exhaustive oracle.
    Verify(SolveArgs),
    /// Time a solver on generated inputs of increasing size.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Perimeter,
    Area,
    #[value(name = "3sided")]
    ThreeSided,
    Weighted,
    RedBlue,
    SubsetSum,
    Colored,
    Arbitrary,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Perimeter => "perimeter",
            Variant::Area => "area",
            Variant::ThreeSided => "3sided",
            Variant::Weighted => "weighted",
            Variant::RedBlue => "red-blue",
            Variant::SubsetSum => "subset-sum",
            Variant::Colored => "colored",
            Variant::Arbitrary => "arbitrary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Score {
    Perimeter,
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Objective {
    MinRed,
    MaxRed,
    ExactRed,
}

#[derive(Debug, Clone, Args)]
pub struct Io {
    /// Input file; standard input when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Seed for every randomized step.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write a replayable run manifest (JSON) to this path.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long, value_enum)]
    pub variant: Variant,
    /// Number of points to enclose.
    #[arg(short = 'k')]
    pub k: Option<usize>,
    /// Use the (1+eps)-approximation (area only).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Target weight for subset-sum.
    #[arg(long)]
    pub target: Option<f64>,
    /// Enclose all but at most this many points (perimeter, area).
    #[arg(long)]
    pub outliers: Option<usize>,
    /// Run the base solver on a shallow-cutting cover.
    #[arg(long)]
    pub k_sensitive: bool,
    /// Required count per color, comma separated (colored).
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    /// Slab size override (3sided, subset-sum).
    #[arg(long)]
    pub q: Option<usize>,
    /// Score for 3sided and arbitrary.
    #[arg(long, value_enum, default_value_t = Score::Area)]
    pub score: Score,
    /// Red-blue objective.
    #[arg(long, value_enum, default_value_t = Objective::MinRed)]
    pub objective: Objective,
    /// Red count for `--objective exact-red`.
    #[arg(long)]
    pub red: Option<usize>,
    #[command(flatten)]
    pub io: Io,
}

#[derive(Debug, Clone, Args)]
pub struct ApproxArgs {
    #[arg(short = 'k')]
    pub k: usize,
    #[arg(long)]
    pub eps: f64,
    /// Columns and rows per level.
    #[arg(long)]
    pub b: Option<usize>,
    /// Resolution of the inner decision procedure.
    #[arg(long)]
    pub decision_eps: Option<f64>,
    #[command(flatten)]
    pub io: Io,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Uniform,
    Grid,
    Clustered,
    Convolution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionKind {
    Perimeter,
    Area,
    Weight,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Number of points; sequence length for `convolution`.
    #[arg(short = 'n')]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coordinates are drawn from 0..range.
    #[arg(long, default_value_t = 1000)]
    pub range: i64,
    /// Cluster count for `clustered`.
    #[arg(long, default_value_t = 5)]
    pub clusters: usize,
    /// Append integer weights in -W..=W.
    #[arg(long)]
    pub weights: Option<i64>,
    /// Append colors in 0..D.
    #[arg(long)]
    pub colors: Option<usize>,
    /// Construction used by `convolution`.
    #[arg(long, value_enum, default_value_t = ReductionKind::Perimeter)]
    pub reduction: ReductionKind,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub variant: Variant,
    /// Input sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,
    /// Points to enclose; defaults to n/10.
    #[arg(short = 'k')]
    pub k: Option<usize>,
    /// Repetitions per size; the median is reported.
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Score::Area)]
    pub score: Score,
}

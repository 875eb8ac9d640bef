use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use signlab_core::ensemble::DEFAULT_ENUMERATION_CAP;

#[derive(Debug, Parser, Serialize)]
#[command(name = "signlab", version, about = "Exact checks of moment and tail bounds for balanced sign sums")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Largest half-length n enumerated exactly.
    #[arg(long, env = "SIGNLAB_ENUM_CAP", default_value_t = DEFAULT_ENUMERATION_CAP, global = true)]
    pub enum_cap: usize,

    /// Seed for random weights and Monte Carlo sampling.
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Exact or Monte Carlo moments E f^p of f = |Σ aᵢεᵢ|.
    Moments(MomentsArgs),
    /// Spectral gap of a graph, transposition, or lumped walk.
    Spectral(SpectralArgs),
    /// Exact, surrogate and 4‖a‖²/n values of the triple norm on the lumped walk.
    Tripnorm(WeightArgs),
    /// Orlicz norm and equivalence constants of a finite distribution.
    Orlicz(OrliczArgs),
    /// Spectral-gap and ensemble tail bounds.
    Tail(TailArgs),
    /// Moment bound (E f^p)^{1/p} ≤ E f + 24 p ‖a‖₂ over a p grid.
    Theorem1(Theorem1Args),
    /// Moment/tail-integral identity E X₊^p = p ∫ t^{p-1} P(X ≥ t) dt.
    Integral(IntegralArgs),
    /// Γ(x) ≤ x^{x-1} over an x grid.
    Gamma(GammaArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments(_) => "moments",
            Command::Spectral(_) => "spectral",
            Command::Tripnorm(_) => "tripnorm",
            Command::Orlicz(_) => "orlicz",
            Command::Tail(_) => "tail",
            Command::Theorem1(_) => "theorem1",
            Command::Integral(_) => "integral",
            Command::Gamma(_) => "gamma",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct WeightArgs {
    /// Half-length n; the weight vector has 2n entries.
    #[arg(long)]
    pub n: usize,

    /// Comma-separated weights, or a file with one weight per line.
    /// Without it a random unit vector is drawn from the seed.
    #[arg(long)]
    pub weights: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodChoice {
    /// Exact when n is within the enumeration cap, Monte Carlo otherwise.
    Auto,
    Exact,
    Mc,
}

#[derive(Debug, Args, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub weights: WeightArgs,

    /// Moment orders: a value, a comma list, or start:stop:step.
    #[arg(long, default_value = "2")]
    pub p: String,

    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,

    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkKind {
    Graph,
    Cycle,
    Transposition,
    Lumped,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long, value_enum, default_value_t = WalkKind::Lumped)]
    pub walk: WalkKind,

    /// Half-length n for the transposition and lumped walks.
    #[arg(long)]
    pub n: Option<usize>,

    /// Graph file ("V E" header, then one "u v" edge per line).
    #[arg(long)]
    pub graph: Option<String>,

    /// Number of vertices of the cycle walk.
    #[arg(long)]
    pub size: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct SpectralArgs {
    #[command(flatten)]
    pub walk: WalkArgs,

    /// Residual tolerance of the eigensolver.
    #[arg(long, default_value_t = signlab_core::walk::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DistributionArgs {
    /// Distribution file of "value probability" lines.
    #[arg(long, conflicts_with = "builtin")]
    pub dist: Option<String>,

    /// A built-in distribution.
    #[arg(long, value_enum)]
    pub builtin: Option<Builtin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    /// ±1 with probability 1/2 each.
    Rademacher,
    /// 0 or 2 with probability 1/2 each.
    TwoPoint,
    /// Uniform on {-2, -1, 0, 1, 2}.
    Uniform,
    /// P(k) ∝ 2^{-k} on {0, …, 20}.
    Geometric,
}

#[derive(Debug, Args, Serialize)]
pub struct OrliczArgs {
    #[command(flatten)]
    pub source: DistributionArgs,

    /// Exponent α of ψ_α(x) = exp(x^α) − 1.
    #[arg(long, default_value_t = 2.0)]
    pub alpha: f64,

    /// Largest moment order used for the moment-growth constant.
    #[arg(long, default_value_t = 20.0)]
    pub p_max: f64,

    /// Thresholds for the tail constant.
    #[arg(long, default_value = "0.05:12:0.05")]
    pub t_grid: String,

    /// Absolute bisection tolerance.
    #[arg(long, default_value_t = signlab_core::orlicz::DEFAULT_TOLERANCE)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct TailArgs {
    #[command(flatten)]
    pub walk: WalkArgs,

    /// Weights for the lumped walk (f = |Σ aᵢεᵢ|).
    #[arg(long)]
    pub weights: Option<String>,

    /// Vertex whose indicator is tested on graph and cycle walks.
    #[arg(long, default_value_t = 0)]
    pub vertex: usize,

    #[arg(long, default_value = "0.05:3:0.05")]
    pub t_grid: String,
}

#[derive(Debug, Args, Serialize)]
pub struct Theorem1Args {
    #[command(flatten)]
    pub weights: WeightArgs,

    #[arg(long, default_value = "2:20:1")]
    pub p_grid: String,

    #[arg(long, value_enum, default_value_t = MethodChoice::Auto)]
    pub method: MethodChoice,

    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct IntegralArgs {
    #[command(flatten)]
    pub source: DistributionArgs,

    /// Use the centred law f − E f of the ensemble with these weights.
    #[arg(long, conflicts_with_all = ["dist", "builtin"])]
    pub n: Option<usize>,

    #[arg(long, requires = "n")]
    pub weights: Option<String>,

    #[arg(long, default_value = "1,2,3,4,7.5")]
    pub p: String,
}

#[derive(Debug, Args, Serialize)]
pub struct GammaArgs {
    #[arg(long, default_value = "1:50:0.1")]
    pub x_grid: String,
}

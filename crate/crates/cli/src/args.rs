use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use dqkit_core::grid::GridSpec;

#[derive(Debug, Parser)]
#[command(
    name = "dqkit",
    version,
    about = "Height growth, algebraic entropy, growth lemmas and Nevanlinna functionals"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Iterate an equation exactly and report heights.
    Orbit(OrbitArgs),
    /// Degree sequence of symbolic iterates and its algebraic entropy.
    Entropy(EntropyArgs),
    /// Classify an orbit by height growth against the degree in y.
    Malmquist(MalmquistArgs),
    /// Exceptional sets of a sampled growth profile.
    Growth(GrowthArgs),
    /// Proximity, counting and characteristic functions of a model.
    Nevanlinna(NevanlinnaArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct Common {
    /// Directory for artifacts and metadata.json; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Recorded in the metadata; every command is deterministic.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct EquationArgs {
    /// Built-in equation name or path to a JSON equation file.
    #[arg(long)]
    pub eq: String,
    /// Starting index; defaults to the equation's own.
    #[arg(long)]
    pub n0: Option<i64>,
}

#[derive(Debug, Args, Serialize)]
pub struct OrbitArgs {
    #[command(flatten)]
    pub equation: EquationArgs,
    /// Initial value `p/q`; defaults to the built-in's.
    #[arg(long)]
    pub y0: Option<String>,
    #[arg(long, default_value_t = 32)]
    pub steps: usize,
    /// Stop once a value needs more bits than this.
    #[arg(long, default_value_t = dqkit_core::orbit::DEFAULT_BIT_BUDGET)]
    pub bit_budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub equation: EquationArgs,
    /// Number of iterates.
    #[arg(long = "J", default_value_t = 8)]
    pub j_max: usize,
    #[arg(long, default_value_t = dqkit_core::entropy::DEFAULT_MAX_DEGREE)]
    pub max_degree: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args, Serialize)]
pub struct MalmquistArgs {
    #[command(flatten)]
    pub equation: EquationArgs,
    #[arg(long)]
    pub y0: Option<String>,
    #[arg(long, default_value_t = 64)]
    pub steps: usize,
    #[arg(long, default_value_t = dqkit_core::orbit::DEFAULT_NU)]
    pub nu: f64,
    #[arg(long, default_value_t = dqkit_core::orbit::DEFAULT_TAU)]
    pub tau: f64,
    #[arg(long, default_value_t = dqkit_core::orbit::DEFAULT_BIT_BUDGET)]
    pub bit_budget: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthOp {
    /// Large relative increments `(T(r+s) − T(r)) h(r) / T(r) ≥ η`.
    FEta,
    /// Growth assumption and relation check against `ζ`.
    Relation,
    /// Borel-type set for a `ξ` preset.
    Borel,
    /// `T(r + |c|) ≥ C T(r)` with its linear measure by radius.
    E0,
}

#[derive(Debug, Args, Serialize)]
pub struct GrowthArgs {
    #[arg(value_enum)]
    pub op: GrowthOp,
    /// CSV profile with columns `r,T` (or `n,T` with --discrete).
    #[arg(long, conflicts_with = "formula")]
    pub profile: Option<PathBuf>,
    /// Built-in profile sampled on --r-grid.
    #[arg(long, required_unless_present = "profile")]
    pub formula: Option<String>,
    #[arg(long = "r-grid")]
    pub r_grid: Option<GridSpec>,
    /// Treat the profile as a sequence `T_n`.
    #[arg(long)]
    pub discrete: bool,
    #[arg(long, default_value_t = 1.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.0)]
    pub zeta: f64,
    #[arg(long = "C", default_value_t = 2.0)]
    pub c_const: f64,
    /// Shift length `|c|`.
    #[arg(long = "c", default_value_t = 1.0)]
    pub c_abs: f64,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Exponent of the `ξ` preset.
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    pub window: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub abs_tol: f64,
    /// Exponent in the weight `h(r) = (log r)^(1 + eps)`.
    #[arg(long, default_value_t = 0.1)]
    pub h_eps: f64,
    /// CSV weight table with columns `r,h`, replacing the preset.
    #[arg(long)]
    pub weight: Option<PathBuf>,
    /// `power`, `log-loglog` or `log-power`.
    #[arg(long, default_value = "log-loglog")]
    pub xi: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NevanlinnaOp {
    /// `m`, `N` and `T` on the grid.
    Sweep,
    /// Proximity of `f(z + c)/f(z)` on the grid.
    Dq,
    /// Order, lower order and hyper-order estimates.
    Order,
    /// Deficiency of the value zero.
    Deficiency,
    /// Normalized difference-quotient proximity with its growth hypothesis.
    Lemma31,
    /// Jensen's formula against the circle mean of `log |f|`.
    Jensen,
}

#[derive(Debug, Args, Serialize)]
pub struct NevanlinnaArgs {
    #[arg(value_enum, default_value = "sweep")]
    pub op: NevanlinnaOp,
    /// Built-in model name or path to a JSON model file.
    #[arg(long)]
    pub model: String,
    /// Model parameters as JSON.
    #[arg(long, default_value = "{}")]
    pub params: String,
    #[arg(long = "r-grid")]
    pub r_grid: GridSpec,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Shift `c` as `re` or `re,im`.
    #[arg(long = "c", default_value = "1")]
    pub c: String,
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[arg(long, default_value_t = dqkit_core::nevanlinna::DEFAULT_WINDOW)]
    pub window: f64,
    #[command(flatten)]
    pub common: Common,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Orbit(_) => "orbit",
            Command::Entropy(_) => "entropy",
            Command::Malmquist(_) => "malmquist",
            Command::Growth(_) => "growth",
            Command::Nevanlinna(_) => "nevanlinna",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Orbit(a) => &a.common,
            Command::Entropy(a) => &a.common,
            Command::Malmquist(a) => &a.common,
            Command::Growth(a) => &a.common,
            Command::Nevanlinna(a) => &a.common,
        }
    }
}

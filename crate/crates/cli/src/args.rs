use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "ldeconf",
    version,
    about = "Conformal transformation and oscillation of complex linear ODEs"
)]
pub struct Cli {
    /// JSON file with values for any flag (keys use underscores); flags win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Validate the configuration and print the resolved plan without computing.
    #[arg(long, global = true)]
    pub dry_run: bool,

    /// Taylor order of the ODE solver (8..=200).
    #[arg(long, global = true)]
    pub solver_order: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the partial Bell polynomial B_{i,n}.
    Bell(BellArgs),
    /// Coefficients of the equation transformed to the disc.
    Transform(TransformArgs),
    /// Recover the coefficients of an equation from a solved basis.
    Recover(RecoverArgs),
    /// The order-k equation solved by the powers of a second-order basis.
    Basis(BasisArgs),
    /// Coefficient growth against zero counts of a pushed-forward basis.
    Oscillate(OscillateArgs),
    /// Named presets: petal51, expsum52, schwarz2, kim-roundtrip.
    Example(ExampleArgs),
}

#[derive(Debug, Args)]
pub struct BellArgs {
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated arguments z_1, ..., z_{i-n+1}; integers are evaluated exactly.
    #[arg(long, allow_hyphen_values = true)]
    pub args: Option<String>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Map as inline JSON, a JSON file, or `cayley` / `identity`.
    #[arg(long)]
    pub map: Option<String>,
    /// Equation as inline JSON or a JSON file.
    #[arg(long)]
    pub ode: Option<String>,
    /// Comma-separated disc points such as `0.1+0.2i,-0.5`.
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub ode: Option<String>,
    /// k rows of k initial values at the base point (JSON), or `canonical`.
    #[arg(long)]
    pub ics: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub points: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BasisArgs {
    /// Coefficient `a` of `f'' + a f = 0` as a JSON expression.
    #[arg(long)]
    pub a: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OscillateArgs {
    #[arg(long)]
    pub map: Option<String>,
    #[arg(long)]
    pub ode: Option<String>,
    #[arg(long)]
    pub ics: Option<String>,
    /// `geometric:RMIN:RMAX:COUNT` or comma-separated radii.
    #[arg(long)]
    pub rgrid: Option<String>,
    /// The `b` of `s(r) = 1 - b(1-r)`, in (0, 1).
    #[arg(long)]
    pub shrink_b: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Bell(_) => "bell",
            Self::Transform(_) => "transform",
            Self::Recover(_) => "recover",
            Self::Basis(_) => "basis",
            Self::Oscillate(_) => "oscillate",
            Self::Example(_) => "example",
        }
    }
}

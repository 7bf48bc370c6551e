use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "wbl", version, about = "Weighted Bloch and Lipschitz semi-norms")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "WBL_FORMAT", default_value_t = Format::Human)]
    pub format: Format,

    /// Shorthand for --format json.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,

    /// Shorthand for --format csv.
    #[arg(long, global = true)]
    pub csv: bool,

    /// Significant digits of printed reals.
    #[arg(long, global = true, env = "WBL_PRECISION", default_value_t = 9,
          value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,

    /// Seed for every randomized schedule.
    #[arg(long, global = true, env = "WBL_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Cap on worker threads (0 uses all cores).
    #[arg(long, global = true, env = "WBL_THREADS", default_value_t = 0)]
    pub threads: usize,
}

impl Common {
    pub fn output(&self) -> Format {
        if self.json {
            Format::Json
        } else if self.csv {
            Format::Csv
        } else {
            self.format
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Weighted distance between two points.
    Distance(DistanceArgs),
    /// Sampled Bloch, Lipschitz or d_w-quotient semi-norm of a map.
    Seminorm(SeminormArgs),
    /// Sampled test of the admissibility conditions for a kernel.
    CheckAdmissible(AdmissibleArgs),
    /// Compare the Bloch and kernel-Lipschitz semi-norms of a map.
    Verify(VerifyArgs),
    /// List the built-in test maps.
    Catalog,
}

#[derive(Debug, Args)]
pub struct WeightArgs {
    /// hyperbolic, power:ALPHA, constant:C or expr:TEXT.
    #[arg(long, env = "WBL_WEIGHT", default_value = "hyperbolic")]
    pub weight: String,

    /// ball (unit ball) or box:L1,...,Lm:U1,...,Um.
    #[arg(long, env = "WBL_DOMAIN", default_value = "ball")]
    pub domain: String,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Grid resolution (intervals per axis).
    #[arg(long, conflicts_with = "points")]
    pub grid: Option<usize>,

    /// Number of low-discrepancy points instead of a grid.
    #[arg(long)]
    pub points: Option<usize>,

    /// Random pairs for the pair estimators.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,

    /// Distance from the boundary kept free of samples.
    #[arg(long, default_value_t = 0.02)]
    pub margin: f64,
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub weight: WeightArgs,

    #[arg(long, allow_hyphen_values = true)]
    pub from: String,

    #[arg(long, allow_hyphen_values = true)]
    pub to: String,

    /// Closed-form hyperbolic distance (hyperbolic weight on the ball only).
    #[arg(long)]
    pub exact: bool,

    #[arg(long, default_value_t = 33)]
    pub control_points: usize,

    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SeminormKind {
    Bloch,
    Lipschitz,
    DwQuotient,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceChoice {
    /// Closed form on the ball with the hyperbolic weight, geodesic otherwise.
    Auto,
    ClosedForm,
    Geodesic,
}

#[derive(Debug, Args)]
pub struct SeminormArgs {
    /// identity[:m], poly:c0,c1,..., mobius:a1,...,am, atanh or colonna.
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,

    #[command(flatten)]
    pub weight: WeightArgs,

    #[arg(long, value_enum, default_value_t = SeminormKind::Bloch)]
    pub kind: SeminormKind,

    /// canonical, geometric-mean or min.
    #[arg(long, default_value = "geometric-mean")]
    pub kernel: String,

    #[arg(long, value_enum, default_value_t = DistanceChoice::Auto)]
    pub distance: DistanceChoice,

    /// Dimension for maps that do not fix one.
    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    #[command(flatten)]
    pub sampling: SamplingArgs,
}

#[derive(Debug, Args)]
pub struct AdmissibleArgs {
    /// canonical, geometric-mean or min.
    #[arg(long)]
    pub kernel: String,

    /// Multiply the kernel by this factor before checking.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    #[command(flatten)]
    pub weight: WeightArgs,

    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,

    #[arg(long, default_value_t = 64)]
    pub centers: usize,

    /// Radii for the diagonal limit, comma separated.
    #[arg(long, default_value = "1e-2,1e-3,1e-4")]
    pub radii: String,

    #[arg(long, default_value_t = 1e-6)]
    pub exact_tolerance: f64,

    #[arg(long, default_value_t = 1e-3)]
    pub limit_tolerance: f64,

    #[arg(long, value_enum, default_value_t = DistanceChoice::Auto)]
    pub distance: DistanceChoice,

    #[arg(long, default_value_t = 2)]
    pub dim: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub map: String,

    #[command(flatten)]
    pub weight: WeightArgs,

    #[arg(long, default_value = "geometric-mean")]
    pub kernel: String,

    /// Multiply the kernel by this factor.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,

    #[arg(long, value_enum, default_value_t = DistanceChoice::Auto)]
    pub distance: DistanceChoice,

    #[arg(long, default_value_t = 2)]
    pub dim: usize,

    #[command(flatten)]
    pub sampling: SamplingArgs,
}

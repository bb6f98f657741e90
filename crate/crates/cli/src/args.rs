use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "aplab",
    version,
    about = "A_p characteristics, BMO, d_* and maximal-operator norm studies on 1-D grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print [w]_{A_p} and its witness interval.
    ApChar {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
    },
    /// Print the BMO seminorm of a grid function and its witness interval.
    Bmo {
        /// Grid-function CSV; defaults to the values of the weight flags.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        weight: WeightArgs,
    },
    /// Print d_*(u, v) for two weights stored as grid-function CSVs.
    Dstar {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
    },
    /// Write the maximal function to <out>/maxop.csv.
    Maxop {
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Estimate ‖M‖ on L^p(w) from below; writes <out>/norm_witness.csv.
    NormEst {
        #[command(flatten)]
        weight: WeightArgs,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Continuity sweep along w_t = w0·exp(t·phi); writes <out>/sweep.csv.
    Sweep {
        /// The base weight w0 (defaults to the constant 1).
        #[command(flatten)]
        weight: WeightArgs,
        /// Perturbation direction as a grid-function CSV.
        #[arg(long)]
        phi: Option<PathBuf>,
        /// Height of the default step direction (0 on the left half, h on the right).
        #[arg(long, default_value_t = 2.0)]
        step_height: f64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.2, 0.1, 0.05, 0.025])]
        t_list: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        estimator: EstimatorArgs,
        /// Record wall-clock milliseconds per row instead of 0.
        #[arg(long)]
        timings: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Two-factor Hölder bound over weight pairs; writes <out>/holder.csv.
    HolderScan {
        #[command(flatten)]
        grid: GridArgs,
        /// Explicit pair: w (with --w0); otherwise random pairs are drawn.
        #[arg(long, requires = "w0")]
        weight: Option<PathBuf>,
        #[arg(long, requires = "weight")]
        w0: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        /// Random log-values are uniform in [-spread, spread].
        #[arg(long, default_value_t = 1.0)]
        log_spread: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2.0])]
        p_list: Vec<f64>,
        #[arg(long = "R-list", value_delimiter = ',', default_values_t = vec![2.0, 4.0, 8.0])]
        r_list: Vec<f64>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Buckley scaling over power weights |x|^alpha; writes <out>/buckley.csv.
    Buckley {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.7, 0.8, 0.9])]
        alpha_list: Vec<f64>,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Audit the metric axioms of d_* on random weights; writes <out>/metric_audit.csv.
    MetricAudit {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Size of the random weight population triples are drawn from.
        #[arg(long, default_value_t = 24)]
        weights: usize,
        #[arg(long, default_value_t = 2.0)]
        log_spread: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    #[arg(long, default_value_t = 1.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1024)]
    pub n_cells: usize,
}

/// Where a weight comes from: a CSV file, a constant, or `|x|^alpha`.
#[derive(Debug, Clone, Args)]
pub struct WeightArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, conflicts_with_all = ["constant", "power_alpha"])]
    pub weight: Option<PathBuf>,
    #[arg(long = "const", conflicts_with = "power_alpha")]
    pub constant: Option<f64>,
    #[arg(long)]
    pub power_alpha: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coordinate-ascent evaluation budget.
    #[arg(long, default_value_t = 1000)]
    pub budget: usize,
    #[arg(long)]
    pub no_indicators: bool,
    #[arg(long)]
    pub no_profiles: bool,
    #[arg(long)]
    pub no_dual: bool,
    /// Number of random log-uniform candidates.
    #[arg(long, default_value_t = 8)]
    pub random: usize,
}

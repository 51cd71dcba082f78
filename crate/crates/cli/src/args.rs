use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "arithdeg", version, about = "Exact checks and searches for integral points on blow-ups of projective space")]
pub struct Cli {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// Emit CSV.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Worker threads for parallel kernels.
    #[arg(long, global = true, env = "ARITHDEG_WORKERS")]
    pub workers: Option<usize>,
    /// File of `key = value` lines supplying flags not given on the command line.
    #[arg(long, global = true)]
    pub config_file: Option<PathBuf>,
    /// Write the report to this file instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Scan the exact identities and bounds over parameter grids.
    Verify(VerifyArgs),
    /// Intersection numbers and nef tests on a configuration.
    Chow(ChowArgs),
    /// Beta constants, exact and truncated.
    Beta(BetaArgs),
    /// Local Weil heights of a form at a point.
    Heights(HeightsArgs),
    /// Exhaustive divisibility searches over a box.
    #[command(subcommand)]
    Search(SearchCommand),
    /// Sampled audits of height inequalities.
    #[command(subcommand)]
    Audit(AuditCommand),
    /// Re-run the command recorded in a file header and compare bytes.
    Replay(ReplayArgs),
}

fn default_ns() -> Vec<u32> {
    (2..=6).collect()
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyArgs {
    /// Cyclic dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = default_ns())]
    pub n: Vec<u32>,
    /// A single q instead of the range.
    #[arg(long)]
    pub q: Option<u64>,
    /// q ranges over q_lo*n ..= q_hi*n.
    #[arg(long, default_value_t = 3)]
    pub q_lo: u64,
    #[arg(long, default_value_t = 4)]
    pub q_hi: u64,
    /// Marked-configuration dimensions.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3, 4])]
    pub marked_n: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![10, 100, 1000])]
    pub ell: Vec<u64>,
    /// Replace a kernel with a known-wrong one (`f-poly`, `top`) to exercise failure paths.
    #[arg(long, hide = true)]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inject_fault: Option<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigArg {
    Cyclic,
    Marked,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChowArgs {
    #[arg(long, value_enum)]
    pub config: ConfigArg,
    #[arg(long)]
    pub n: u32,
    /// Number of hyperplanes of the cyclic configuration.
    #[arg(long)]
    pub q: Option<usize>,
    /// Weight of the marked class A.
    #[arg(long)]
    pub ell: Option<u64>,
    /// Factor `CLASS,EXP` of the product; repeat to multiply. `EXP` may be `n`.
    /// Classes are sums like `D - 2*Ht1 + E3`, with `Ht<i>` the strict transform
    /// of the i-th hyperplane and `E<i>` the i-th exceptional divisor.
    #[arg(long, allow_hyphen_values = true)]
    pub power: Vec<String>,
    /// Class to test for nefness; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub nef: Vec<String>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaArgs {
    /// Cyclic configuration `N Q`.
    #[arg(long, num_args = 2, value_names = ["N", "Q"], conflicts_with = "marked")]
    pub cyclic: Option<Vec<u64>>,
    /// Marked configuration `N ELL`.
    #[arg(long, num_args = 2, value_names = ["N", "ELL"])]
    pub marked: Option<Vec<u64>>,
    /// Hyperplane index from 1 for the marked bound; all when absent.
    #[arg(long)]
    pub index: Option<usize>,
    /// Cutoff of the truncated sum.
    #[arg(long = "numeric-N", default_value_t = 100)]
    pub numeric_n: u64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightsArgs {
    /// Homogeneous form; with `--condition` the first form is `D_0`.
    #[arg(long, required = true)]
    pub form: Vec<String>,
    /// Projective coordinates, comma separated rationals.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
    /// Places of S, e.g. `inf,2,3`.
    #[arg(long, default_value = "inf")]
    pub s: String,
    /// Check the local domination condition in mode `i` or `ii`.
    #[arg(long)]
    pub condition: Option<String>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormsInput {
    /// Form; repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub form: Vec<String>,
    /// File with one form per line.
    #[arg(long)]
    pub forms_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxArgs {
    /// Coordinate bound B.
    #[arg(long)]
    pub bound: u64,
    /// Finite primes of S, comma separated.
    #[arg(long, default_value = "")]
    pub s: String,
    /// Largest exponent of an S-prime in affine denominators.
    #[arg(long, default_value_t = 0)]
    pub denom_cap: u32,
    /// Resume from and record progress in this file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Write the solution set here as JSON lines.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fit vanishing forms up to this degree and look for lines.
    #[arg(long)]
    pub degeneracy: Option<u32>,
    /// Recount at these bounds.
    #[arg(long, value_delimiter = ',')]
    pub growth: Vec<u64>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchCommand {
    /// Points where forms F_i divide G in the S-integers.
    Thm11 {
        #[command(flatten)]
        forms: FormsInput,
        #[arg(long)]
        g: String,
        /// `i`: each F_i divides G. `ii`: the product divides G.
        #[arg(long, default_value = "i")]
        mode: String,
        /// Accept nonlinear forms as being in general position.
        #[arg(long)]
        assume_general_position: bool,
        #[command(flatten)]
        bx: BoxArgs,
    },
    /// Affine S-integer points with (1 - sum x_i) prod x_i dividing g.
    Cor12 {
        /// Affine dimension; variables are x1..xn.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "1")]
        g: String,
        #[command(flatten)]
        bx: BoxArgs,
    },
    /// Points satisfying the cyclic ideal equality.
    Thm16 {
        #[command(flatten)]
        forms: FormsInput,
        #[command(flatten)]
        bx: BoxArgs,
    },
    /// Load and re-verify a solution file.
    Check { file: PathBuf },
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub forms: FormsInput,
    #[arg(long, default_value = "inf")]
    pub s: String,
    #[arg(long, default_value = "1/10")]
    pub eps: String,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Coordinate bound of the sampled points.
    #[arg(long, default_value_t = 1000)]
    pub height: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Rows to list; all when absent.
    #[arg(long)]
    pub limit: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditCommand {
    /// Hyperplane inequality with the per-place defect.
    Subspace(SampleArgs),
    /// Lower bound for the sum of proximity functions.
    Levin {
        #[command(flatten)]
        sample: SampleArgs,
        #[arg(long)]
        assume_general_position: bool,
    },
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub file: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Everything that determines an output; embedded in every file header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub workers: Option<usize>,
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use intcpx::defect::DefectBound;
use intcpx::represent::ExceptionMode;
use intcpx::structure::SeriesMode;
use intcpx::Policy;

/// Integer complexity, defects, stability and low-defect polynomials.
///
/// Global options fall back to INTCPX_* environment variables, then to
/// built-in defaults.
#[derive(Parser, Debug)]
#[command(name = "intcpx", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Complexity table cache: loaded when present and large enough,
    /// otherwise built and written here.
    #[arg(long, global = true, env = "INTCPX_TABLE")]
    pub table: Option<PathBuf>,

    /// Table limit N [default: 1000000].
    #[arg(long, global = true, env = "INTCPX_LIMIT")]
    pub limit: Option<u64>,

    /// Stability scan horizon.
    #[arg(long, global = true, env = "INTCPX_HORIZON", default_value_t = 12)]
    pub horizon: u32,

    /// What to do with verdicts unresolved at the horizon.
    #[arg(long, global = true, env = "INTCPX_POLICY", default_value = "strict", value_parser = parse_policy)]
    pub policy: Policy,

    #[arg(long, global = true, env = "INTCPX_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Worker threads; 0 lets the pool decide.
    #[arg(long, global = true, env = "INTCPX_THREADS", default_value_t = 0)]
    pub threads: usize,
}

pub const DEFAULT_LIMIT: u64 = 1_000_000;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

fn parse_policy(s: &str) -> Result<Policy, String> {
    s.parse::<Policy>().map_err(|e| e.to_string())
}

fn parse_bound(s: &str) -> Result<DefectBound, String> {
    s.parse::<DefectBound>().map_err(|e| e.to_string())
}

fn parse_exception_mode(s: &str) -> Result<ExceptionMode, String> {
    s.parse::<ExceptionMode>().map_err(|e| e.to_string())
}

fn parse_series_mode(s: &str) -> Result<SeriesMode, String> {
    s.parse::<SeriesMode>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or inspect the complexity table.
    #[command(subcommand)]
    Table(TableCmd),
    /// ‖n‖ for each n.
    Cpx {
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// A minimal expression in 1, + and · for n.
    Expr { n: u64 },
    /// δ(n) = ‖n‖ − 3·log₃ n, exactly.
    Defect {
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// Stability verdict for each n.
    Stable {
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// K(n), the least k with n·3^k stable.
    KOf {
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// Stable complexity ‖n‖_st.
    StableCpx {
        #[arg(required = true)]
        n: Vec<u64>,
    },
    /// Low-defect expressions and pairs.
    #[command(subcommand)]
    Ldp(LdpCmd),
    /// Exceptional set of a pair over a box of exponents.
    Exceptions {
        #[command(flatten)]
        pair: PairArgs,
        /// Upper bound per variable, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        bounds: Vec<u32>,
        #[arg(long, default_value = "stable", value_parser = parse_exception_mode)]
        mode: ExceptionMode,
    },
    /// Least K past which a degree-1 pair shows no exceptions, up to k_max.
    MinK {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 12)]
        k_max: u32,
        #[arg(long, default_value = "stable", value_parser = parse_exception_mode)]
        mode: ExceptionMode,
    },
    /// Leaders up to a bound.
    Leaders {
        #[arg(long)]
        up_to: u64,
    },
    /// Checks a candidate good covering at a truncation.
    VerifyCovering {
        /// JSON list of {"expression": ..., "C": ...}.
        #[arg(long)]
        file: PathBuf,
        /// Defect bound s: p/q, a decimal, or C:n for C − 3·log₃ n.
        #[arg(long, value_parser = parse_bound)]
        s: DefectBound,
        /// Truncation N.
        #[arg(long)]
        n: u64,
    },
    /// Distinct defects up to a bound among n ≤ N.
    Enumerate {
        #[arg(long, value_parser = parse_bound)]
        s: DefectBound,
        #[arg(long)]
        n: u64,
        /// Attach limit degrees from stability verdicts.
        #[arg(long)]
        annotate: bool,
    },
    /// Searches for m = b(a·3^k + 1)·3^ℓ over all ab = q, or one (a, b).
    Counterexample {
        #[arg(long, conflicts_with_all = ["a", "b"], required_unless_present_all = ["a", "b"])]
        q: Option<u64>,
        #[arg(long, requires = "b")]
        a: Option<u64>,
        #[arg(long, requires = "a")]
        b: Option<u64>,
        #[arg(long)]
        m: u64,
    },
    /// Defects of b(a·3^k + 1) against their limit δ_st(ab) + 1.
    Converge {
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        b: u64,
        #[arg(long, default_value_t = 8)]
        k_max: u32,
        #[arg(long, default_value = "plain", value_parser = parse_series_mode)]
        mode: SeriesMode,
    },
    /// Checks ‖b(a·3^k + 1)·3^ℓ‖ = ‖a‖ + ‖b‖ + 3k + 3ℓ + 1 for large k.
    #[command(alias = "dragons")]
    Stabilization {
        #[arg(long, required_unless_present = "instances")]
        a: Option<u64>,
        #[arg(long, required_unless_present = "instances")]
        b: Option<u64>,
        #[arg(long, default_value_t = 12)]
        k_max: u32,
        #[arg(long, default_value_t = 3)]
        l_max: u32,
        /// List every (a, b) with ab up to this bound meeting the hypotheses.
        #[arg(long, conflicts_with_all = ["a", "b"])]
        instances: Option<u64>,
    },
}

#[derive(Subcommand, Debug)]
pub enum TableCmd {
    /// Builds a table of --limit entries and writes it to --out (or --table).
    Build {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary of the table in use.
    Info,
}

/// A low-defect expression with an optional base complexity.
#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    /// Expression such as "2(1094x1+1)" or "(2x1+1)x2+1".
    pub expression: String,
    /// Base complexity C; defaults to the tree complexity of the expression.
    #[arg(long = "c")]
    pub c: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum LdpCmd {
    /// Polynomial, tree, degree and complexity of an expression.
    Parse { expression: String },
    /// f(3^n₁, …, 3^n_d).
    Eval {
        expression: String,
        /// Exponents, comma separated.
        #[arg(long, value_delimiter = ',')]
        at: Vec<u32>,
    },
    /// δ(f,C), or δ_{f,C}(n⃗) with --at.
    Delta {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, value_delimiter = ',')]
        at: Option<Vec<u32>>,
    },
    /// Whether C = ‖a‖_st + deg f.
    Substantial {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// (k, k − deg f) where δ(f,C) = δ_st(a) + k.
    Gap {
        #[command(flatten)]
        pair: PairArgs,
    },
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

#[derive(Parser, Debug)]
#[command(name = "qmzv", version, about = "Multiple harmonic q-sums modulo powers of [p]: sums, identity checks, relation mining, dimension tables and analytic limits")]
pub struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Vectorization cache directory (overrides $QMZV_CACHE_DIR).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Disable the vectorization cache even if $QMZV_CACHE_DIR is set.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IdentityId {
    Reversal,
    Duality,
    Cyclic,
    Wt1,
    Q2,
    Bradley,
    Theta,
    Grid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Expect {
    Member,
    Nonmember,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// H_{p-1}(k; q) reduced modulo [p]^n.
    Hsum {
        #[arg(long, default_value = "plain")]
        variant: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Comma-separated index, e.g. 2,1.
        #[arg(long, allow_hyphen_values = true)]
        index: String,
        /// Exponent vector for the generalized variant, e.g. 1,0.
        #[arg(long)]
        s: Option<String>,
    },
    /// Check an identity exactly; exits 1 if any instance fails.
    Verify {
        #[arg(long)]
        id: IdentityId,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long)]
        index: Option<String>,
        /// Starred form (cyclic) or star variant (reversal).
        #[arg(long)]
        star: bool,
        /// Upper limit m (bradley, theta).
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        l: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        /// Grid primes, comma-separated.
        #[arg(long, default_value = "3,5,7,11,13")]
        primes: String,
        /// Grid powers of [p], comma-separated.
        #[arg(long, default_value = "1,2,3")]
        ns: String,
        #[arg(long, default_value_t = 5)]
        max_weight: u32,
    },
    /// Dimensions of the quotient spaces for a family.
    Dims {
        #[arg(long)]
        family: String,
        /// `a..b` or a single weight.
        #[arg(long)]
        weights: String,
        /// `auto` or a comma-separated list.
        #[arg(long, default_value = "auto")]
        primes: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Relations among the generators of one weight.
    Mine {
        #[arg(long)]
        family: String,
        #[arg(long)]
        weight: u32,
        #[arg(long, default_value = "auto")]
        primes: String,
        /// Write the relations as JSON here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Span membership with a certificate either way.
    Member {
        /// JSON `{"basis": [...], "coeffs": [...]}`.
        #[arg(long)]
        target: PathBuf,
        /// JSON `{"family": "Q", "shifted_weight": 4}` or `{"basis": [...], "n": 1}`.
        #[arg(long)]
        span: PathBuf,
        #[arg(long, default_value = "auto")]
        primes: String,
        /// Turn the answer into a check.
        #[arg(long, value_enum)]
        expect: Option<Expect>,
    },
    /// Coefficients of H_{m-1}(k; q_m(t)) and their distance to the known limits.
    Limits {
        #[arg(long)]
        index: String,
        #[arg(long, default_value = "250,500,1000,2000")]
        m: String,
        #[arg(long, default_value_t = 1)]
        order: usize,
        #[arg(long, default_value_t = 50)]
        digits: u32,
    },
    /// Regenerate every dimension table as CSV next to the reference rows.
    Tables {
        #[arg(long, default_value = "tables")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 7)]
        o_max: u32,
        #[arg(long, default_value_t = 9)]
        word_max: u32,
        #[arg(long, default_value_t = 5)]
        q_max: u32,
        #[arg(long, default_value_t = 6)]
        o2_max: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

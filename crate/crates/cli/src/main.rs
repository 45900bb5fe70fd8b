//! `fqcharpoly`: command-line access to the characteristic polynomial library.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fqcharpoly::groups::{Family, GroupSpec, DEFAULT_ENUM_CAP};

use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "fqcharpoly",
    version,
    about = "Characteristic polynomials of random elements of finite classical groups"
)]
struct Cli {
    /// Output format (each subcommand has its own default).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Largest group order that may be enumerated.
    #[arg(long, global = true, env = "FQCHARPOLY_ENUM_CAP", default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: u64,

    /// Largest dimension handled by the exact series computations.
    #[arg(long, global = true, env = "FQCHARPOLY_SERIES_CAP", default_value_t = 64)]
    series_cap: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GroupArgs {
    /// Mat, GL, GU, Sp, Oplus or Ominus.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Matrix size; the rank (half the dimension) for Sp.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    q: u64,
}

impl GroupArgs {
    fn spec(&self) -> fqcharpoly::Result<GroupSpec> {
        GroupSpec::new(self.family, self.n, self.q)
    }
}

fn parse_family(s: &str) -> Result<Family, String> {
    Family::parse(s).map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Irreducible polynomial counts N0, N, Ñ, M̃, N*, M* by degree (CSV by default).
    Count {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 10)]
        max_degree: usize,
    },
    /// Exact group order.
    Order {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// Uniformly random group elements as rows of field elements.
    Sample {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact distribution of the characteristic polynomial.
    Dist {
        #[command(flatten)]
        group: GroupArgs,
        /// Also enumerate the group and report observed frequencies.
        #[arg(long)]
        oracle: bool,
    },
    /// Explicit bounds against exact maxima over a grid (CSV by default).
    Bounds {
        #[arg(long, value_delimiter = ',', value_parser = parse_family, default_value = "GL,GU,Sp,Oplus,Ominus")]
        family: Vec<Family>,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        q: Vec<u64>,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 8)]
        n_max: usize,
    },
    /// Generating-function series with exact coefficients.
    Series {
        #[arg(long, value_enum)]
        kind: commands::SeriesKind,
        #[arg(long, default_value_t = 2)]
        q: u64,
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// gl, u, sp, sp-even or uhelp (for `upper`).
        #[arg(long, default_value = "gl")]
        flavor: String,
        #[arg(long, default_value_t = 64)]
        truncation: usize,
        /// Number of distinct polynomials among t ± 1 (for `gf-star`); defaults from q.
        #[arg(long)]
        e: Option<usize>,
    },
    /// Probability that the characteristic polynomial meets an extension-field condition.
    Derange {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        b: Option<usize>,
        /// ext-gl, ext-gu, ext-sp, ext-sp2, unitary-in-sp, unitary-in-o or trivial;
        /// defaults to the natural condition for the family and b.
        #[arg(long)]
        cond: Option<String>,
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
    },
    /// Invariable generation estimates for S_n, or the GL(n, q) surrogate with --q.
    Invariable {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long)]
        q: Option<u64>,
        /// Also report the probabilities of no invariant e-subset / e-subspace.
        #[arg(long)]
        e: Option<usize>,
        #[arg(long, default_value_t = 0)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compute the exact value (small n only).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 0.99)]
        confidence: f64,
    },
    /// Runs the acceptance suite and reports each check.
    Verify {
        /// Largest group order to enumerate; defaults to the enumeration cap.
        #[arg(long)]
        max_order: Option<u64>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Run only these checks.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Exact counting and verification for Diophantine approximation over
/// Laurent series with finite-field coefficients.
#[derive(Parser, Debug)]
#[command(name = "ffkg", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check mu(B_q) = psi(|q|)^n for every nonzero q of height <= k^Q.
    #[command(name = "verify-prop1")]
    VerifyProp1(Common),
    /// Check the product rule on every pair of vectors of height <= k^Q.
    #[command(name = "verify-prop2")]
    VerifyProp2(Common),
    /// Exact and closed-form shell sizes for r = 0..=Q.
    Counts(Common),
    /// Main term Phi(0..=Q), exact and closed-form variants.
    Phi(Common),
    /// Mean of N(Q, A) over all cylinders, compared with Phi(Q).
    #[command(name = "expected-n")]
    ExpectedN(Common),
    /// T(Q) / Phi(Q) for Q = 0..=Q.
    #[command(name = "t-ratio")]
    TRatio(Common),
    /// Monte Carlo samples of N(Q, A); writes runs.csv and summary.json.
    Run(Common),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Field characteristic.
    #[arg(long, default_value_t = 2)]
    pub p: u32,
    /// Extension degree; the field has p^l elements.
    #[arg(long, default_value_t = 1)]
    pub l: u32,
    /// Monic irreducible modulus for l > 1, residues low-to-high, comma separated.
    #[arg(long)]
    pub modulus: Option<String>,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Error function: "linear:a,b" for s(r) = a r + b, or "table:s0,s1,...".
    #[arg(long, default_value = "linear:1,1")]
    pub psi: String,
    /// Admit s(r) = 0, i.e. psi = 1.
    #[arg(long)]
    pub allow_unit_psi: bool,
    /// Largest height exponent Q.
    #[arg(long = "Q", default_value_t = 1)]
    pub q: u32,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: u64,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Cap on enumerated vectors or cylinder cells.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Report file, or the output directory for `run`. Stdout when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Count one vector per scalar orbit.
    #[arg(long)]
    pub orbit: bool,
    /// Enumerate the full matrix space instead of one column.
    #[arg(long)]
    pub full_enumeration: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::dispatch(cli.command) {
        Ok(commands::Outcome::Pass) => ExitCode::SUCCESS,
        Ok(commands::Outcome::Fail) => ExitCode::from(1),
        Err(err) => {
            eprintln!("ffkg: error: {err:#}");
            ExitCode::from(2)
        }
    }
}

mod commands;
mod latex;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Exact pseudo-Kaehler structures on nilpotent Lie algebras.
///
/// The catalog is compiled in; set NILKAEHLER_CATALOG to a directory of
/// JSON files to use other data.
#[derive(Debug, Parser)]
#[command(name = "nilkaehler", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Catalog entries with their algebra types.
    List,
    /// Brackets, forms and structures of one entry.
    Show { name: String },
    /// Recompute and check an entry, or the whole catalog.
    Verify {
        name: Option<String>,
        #[arg(long)]
        form: Option<String>,
    },
    /// Curvature of a stored structure, optionally at rational parameter values.
    Curvature {
        name: String,
        #[arg(long)]
        form: String,
        /// Structure id; defaults to the first one on the form.
        #[arg(long)]
        structure: Option<String>,
        /// Rational values such as psi12=-2/3.
        #[arg(long, num_args = 1.., value_name = "K=V")]
        bind: Vec<String>,
        #[arg(long)]
        json: bool,
    },
    /// Basis of the endomorphisms satisfying the compatibility equations.
    SolveLinear { form_file: PathBuf },
    /// Seeded Newton search for a compatible integrable J.
    Search {
        algebra_file: PathBuf,
        form_file: PathBuf,
        #[arg(long, default_value_t = 200)]
        starts: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Rational values for parameters appearing in the form.
        #[arg(long, num_args = 1.., value_name = "K=V")]
        bind: Vec<String>,
    },
    /// Entry data with metrics and curvature.
    Export {
        name: String,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        form: Option<String>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut out = std::io::stdout().lock();
    ExitCode::from(commands::run(cli.command, &mut out))
}

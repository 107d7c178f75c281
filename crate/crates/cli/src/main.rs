//! `rnaenum`: exact counts, series, asymptotics, limit laws, melting curves
//! and consistency checks for homopolymer RNA secondary structures.

mod commands;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use rnaenum::models::{Dangles, Grammar};
use rnaenum::structures::StructureFamily;
use rnaenum::thermo::MeltLevel;

#[derive(Debug, Parser)]
#[command(name = "rnaenum", version, about = "Enumerate and analyse homopolymer RNA secondary structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Csv,
    Json,
}

/// Structure class and model parameters.
#[derive(Debug, Clone, Args)]
struct ClassArgs {
    /// general, saturated or g-saturated
    #[arg(long, default_value = "general")]
    family: StructureFamily,
    /// none or external
    #[arg(long, default_value = "none")]
    dangles: Dangles,
    /// Minimum hairpin size
    #[arg(long, default_value_t = 1)]
    theta: u32,
    /// Minimum stem length
    #[arg(long, default_value_t = 0)]
    tau: u32,
    /// Weight per link, as `a/b` or a decimal
    #[arg(long, default_value = "1")]
    p: String,
    /// Weight per dangle (needs `--dangles external`)
    #[arg(long)]
    q: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact weighted counts for n = 1..=n-max
    Count {
        #[command(flatten)]
        class: ClassArgs,
        /// Largest length
        #[arg(long, default_value_t = 20, conflicts_with = "n")]
        n_max: usize,
        /// A single length
        #[arg(long)]
        n: Option<usize>,
        /// Split counts by number of links (rows n,k,count)
        #[arg(long)]
        by_links: bool,
        #[arg(long, value_enum, default_value = "csv")]
        output: Output,
    },
    /// Coefficients of the generating function with p (and q) symbolic
    Series {
        #[command(flatten)]
        class: ClassArgs,
        #[arg(long, default_value_t = 10)]
        order: usize,
        #[arg(long, value_enum, default_value = "csv")]
        output: Output,
    },
    /// Functional equations and the singularity forms of a class
    System {
        #[command(flatten)]
        class: ClassArgs,
    },
    /// Growth rate and amplitude (JSON)
    Asym {
        #[command(flatten)]
        class: ClassArgs,
        /// Analyse a dangle grammar (g4 or g5) instead of a class
        #[arg(long)]
        grammar: Option<Grammar>,
        /// Coefficient index whose ratio seeds the solver
        #[arg(long, default_value_t = 200)]
        seed_n: usize,
        /// Coefficient index used for the exact comparison
        #[arg(long, default_value_t = 400)]
        diagnostic_n: usize,
        /// Significant digits printed (at most 15)
        #[arg(long)]
        precision_digits: Option<u32>,
    },
    /// Mean and variance constants of the link count (JSON)
    Limitlaw {
        #[command(flatten)]
        class: ClassArgs,
        /// Finite-difference step in the link marker
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Significant digits printed (at most 15)
        #[arg(long)]
        precision_digits: Option<u32>,
    },
    /// Melting curves under both energy models
    Melt {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        theta: u32,
        /// First temperature, Celsius
        #[arg(long, default_value_t = -200.0, allow_hyphen_values = true)]
        from: f64,
        /// Last temperature, Celsius
        #[arg(long, default_value_t = 200.0, allow_hyphen_values = true)]
        to: f64,
        #[arg(long, default_value_t = 1.0)]
        step: f64,
        /// Energy per counted unit, kcal/mol
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        /// Use R = 1.959 cal/(mol K) instead of 1.9872
        #[arg(long = "paper-R")]
        paper_r: bool,
        /// midpoint or half-ground-state
        #[arg(long, default_value = "midpoint")]
        level: MeltLevel,
        #[arg(long, value_enum, default_value = "csv")]
        output: Output,
    },
    /// Brute force versus series versus grammars
    Check {
        #[arg(long, default_value_t = 12)]
        n_max: usize,
        #[arg(long, value_delimiter = ',', default_value = "0,1,3")]
        thetas: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0,1")]
        taus: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        qs: Vec<String>,
        /// Print every row as JSON
        #[arg(long)]
        json: bool,
    },
    /// Validate and classify one structure (dot-bracket or JSON)
    Structure {
        structure: String,
        #[arg(long, default_value_t = 1)]
        theta: u32,
        #[arg(long, default_value_t = 0)]
        tau: u32,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(text) => {
            // a closed pipe (e.g. `| head`) is not an error
            let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), text.as_bytes());
            ExitCode::SUCCESS
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

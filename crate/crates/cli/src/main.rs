//! `confine`: eigenvalues, quasi-exact catalogs, bounds and reference tables
//! for the radial problem with `V(r) = a/r + b²r²`, optionally inside a
//! hard wall at `r = R`.

mod commands;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use output::{Format, Table};

#[derive(Parser, Debug)]
#[command(name = "confine", version, about = "Spectra of a/r + b²r², free or inside a hard wall")]
struct Cli {
    /// Output format: text, csv or json.
    #[arg(long, global = true, default_value = "text")]
    format: Format,

    /// Write the result here instead of standard output.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Worker threads for independent computations (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

/// System parameters; any of them may come from `--config` instead.
#[derive(Args, Debug, Clone, Default)]
pub struct SystemArgs {
    /// `key = value` file with a, b, d, l, R, precision, digits.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub d: Option<u32>,
    #[arg(long)]
    pub l: Option<u32>,
    /// Wall radius; omit or `inf` for the half-line.
    #[arg(long = "R", alias = "radius", allow_hyphen_values = true)]
    pub radius: Option<String>,
    /// Working precision in decimal digits.
    #[arg(long)]
    pub precision: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues by the asymptotic iteration method.
    Solve {
        #[command(flatten)]
        system: SystemArgs,
        /// Node counts: `3`, `0..6` (inclusive) or `0,2,5`.
        #[arg(long, default_value = "0")]
        n: String,
        /// Digits after the decimal point.
        #[arg(long)]
        digits: Option<u32>,
        /// AIM evaluation point (default 2/sqrt(b), capped at R/2 inside a wall).
        #[arg(long)]
        r0: Option<String>,
        /// Iteration cap.
        #[arg(long = "n-max")]
        n_max: Option<usize>,
    },
    /// Quasi-exact (polynomial) solutions.
    Exact {
        #[command(subcommand)]
        kind: ExactKind,
    },
    /// Regenerate a reference table and diff it against the stored values.
    Table {
        /// I, II, III, IV or V.
        name: String,
        /// Digits after the decimal point for eigenvalue tables.
        #[arg(long, default_value_t = 18)]
        digits: u32,
        /// Skip rows implied by degeneracy equivalences.
        #[arg(long)]
        no_equivalences: bool,
    },
    /// Analytic upper and lower bounds (half-line only).
    Bounds {
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long, default_value_t = 0)]
        n: u32,
    },
    /// Compare AIM against the independent shooting solver.
    OracleCheck {
        /// Only the fast subset of cases.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 16)]
        digits: u32,
    },
}

#[derive(Subcommand, Debug)]
enum ExactKind {
    /// Polynomial solutions on the half-line.
    Soft {
        #[arg(long)]
        nprime: u32,
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value = "1")]
        b: String,
        #[arg(long, default_value_t = 60)]
        precision: u32,
    },
    /// Polynomial solutions vanishing at a wall; `n` is the degree of the
    /// factor left after removing `(R − r)`.
    Hard {
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 3)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        l: u32,
        #[arg(long, default_value = "1")]
        b: String,
        #[arg(long, default_value_t = 60)]
        precision: u32,
        /// Skip the AIM cross-check of each solution.
        #[arg(long)]
        no_validate: bool,
    },
}

/// Result of a command: what to print, and the exit status.
pub struct Outcome {
    pub table: Table,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Partial convergence or a table diff.
    Partial,
}

fn run(cli: Cli) -> Result<Outcome, String> {
    if let Some(j) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global()
            .map_err(|e| format!("cannot size the worker pool: {e}"))?;
    }
    match cli.command {
        Command::Solve { system, n, digits, r0, n_max } => {
            commands::solve(&system, &n, digits, r0.as_deref(), n_max)
        }
        Command::Exact { kind } => match kind {
            ExactKind::Soft { nprime, d, l, b, precision } => {
                commands::exact_soft(nprime, d, l, &b, precision)
            }
            ExactKind::Hard { n, d, l, b, precision, no_validate } => {
                commands::exact_hard(n, d, l, &b, precision, !no_validate)
            }
        },
        Command::Table { name, digits, no_equivalences } => {
            commands::table(&name, digits, !no_equivalences)
        }
        Command::Bounds { system, n } => commands::bounds(&system, n),
        Command::OracleCheck { quick, digits } => commands::oracle_check(quick, digits),
    }
}

fn main() -> ExitCode {
    // usage errors share exit status 1 with invalid configurations; 2 is
    // reserved for partial results
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => e.exit(),
    };
    let format = cli.format;
    let path = cli.output.clone();
    let outcome = match run(cli) {
        Ok(o) => o,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    let written = match &path {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            outcome.table.render(format, &mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            outcome.table.render(format, &mut lock)
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    match outcome.status {
        Status::Ok => ExitCode::SUCCESS,
        Status::Partial => ExitCode::from(2),
    }
}

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use annex::Scheme;
use clap::{Args, CommandFactory, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod table;
mod values;

use table::{write_atomic, Format};
use values::IntList;

/// Sweeps, predictions and simulations for random annex codes.
#[derive(Parser, Debug)]
#[command(name = "annex", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Simulate,
    Analyze,
    Compare,
    Overlap,
    Selftest,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monte Carlo mean packets to completion, or failure curves with --grid
    Simulate(RunArgs),
    /// Predicted expected packets to completion
    Analyze(RunArgs),
    /// Prediction and simulation side by side with relative error
    Compare(RunArgs),
    /// Overlap profile Ω(s) and remaining unknowns g - Ω(s)
    Overlap(RunArgs),
    /// Quick end-to-end consistency checks
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunArgs {
    /// Number of information packets
    #[arg(long = "N", default_value_t = 1000)]
    #[serde(rename = "N")]
    pub total: usize,
    /// Base generation size
    #[arg(long, default_value_t = 25)]
    pub h: usize,
    /// Annex sizes: a value, a comma list or an inclusive range a:b[:step]
    #[arg(long = "l", default_value = "0")]
    #[serde(rename = "l")]
    pub annex: IntList,
    /// Hold the generation size h + l at this value while sweeping l (overrides --h)
    #[arg(long = "g-fixed")]
    pub g_fixed: Option<usize>,
    /// Field size, a power of two up to 65536
    #[arg(long, default_value_t = 256)]
    pub q: u32,
    /// Schemes, comma separated
    #[arg(long, value_delimiter = ',', default_value = "random-annex")]
    pub scheme: Vec<Scheme>,
    /// Monte Carlo trials per point
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Master seed; all randomness derives from it
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Received-packet counts for failure curves (same syntax as --l)
    #[arg(long)]
    pub grid: Option<IntList>,
    /// Output file, written atomically; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Serialize)]
struct Echo<'a> {
    command: Kind,
    #[serde(flatten)]
    args: &'a RunArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match cli.command {
        Command::Simulate(a) => (Kind::Simulate, a),
        Command::Analyze(a) => (Kind::Analyze, a),
        Command::Compare(a) => (Kind::Compare, a),
        Command::Overlap(a) => (Kind::Overlap, a),
        Command::Selftest { seed } => return commands::selftest(seed),
    };
    let points = match commands::points(&args) {
        Ok(p) => p,
        Err(msg) => Cli::command().error(clap::error::ErrorKind::ValueValidation, msg).exit(),
    };
    let result = match kind {
        Kind::Analyze => commands::analyze(&args, &points),
        Kind::Simulate => commands::simulate(&args, &points),
        Kind::Compare => commands::compare(&args, &points),
        Kind::Overlap => commands::overlap(&args, &points),
        Kind::Selftest => unreachable!(),
    };
    let written = result.and_then(|t| {
        let bytes = t.render(args.format, &Echo { command: kind, args: &args })?;
        match &args.out {
            Some(path) => write_atomic(path, &bytes),
            None => Ok(std::io::stdout().lock().write_all(&bytes)?),
        }
    });
    match written {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

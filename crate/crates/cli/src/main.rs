//! `graphheat`: distances, bound verification, exponent fits and propagator
//! sweeps for weighted graphs, as CSV.
//!
//! Exit status is 0 on success, 1 when a verified inequality or identity
//! fails, 2 on usage, input or precondition errors.

mod commands;
mod pairs;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use graphheat::graph::format::parse_graph;
use graphheat::{generators, Group, Method, TimeGrid, WeightedGraph};

use commands::{Context, Report};
use pairs::{PairSelection, PAIR_CAP};

#[derive(Parser)]
#[command(name = "graphheat", version, about = "Short-time heat and wave asymptotics on weighted graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Combinatorial distance and first non-vanishing moment order per pair
    Distance(Options),
    /// Leading-order and short-time bounds per pair and time
    Verify(Options),
    /// Fitted short-time exponent per pair
    Exponent(Options),
    /// Heat kernel sweep over the time grid
    Heat(Options),
    /// Unitary group sweep over the time grid
    Wave(Options),
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("graph").required(true).args(["input", "gen"])))]
struct Options {
    /// Graph file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Built-in generator, e.g. path:6 or random:10:0.4:7
    #[arg(long = "gen")]
    gen: Option<String>,
    /// all | x,y;x,y;... | sample:k
    #[arg(long, default_value = "all")]
    pairs: PairSelection,
    #[arg(long, default_value_t = 1e-3)]
    t0: f64,
    #[arg(long, default_value_t = 0.1)]
    ratio: f64,
    #[arg(long, default_value_t = 4)]
    count: usize,
    #[arg(long, default_value = "auto")]
    method: Method,
    #[arg(long, default_value = "heat")]
    group: Group,
    /// Allowed |slope - d_E| for `exponent`
    #[arg(long, default_value_t = 0.05)]
    tol: f64,
    /// Seed for pair sampling
    #[arg(long)]
    seed: Option<u64>,
    /// Output file, `-` for stdout
    #[arg(long, default_value = "-")]
    out: String,
    /// Search radius for distances and moment orders
    #[arg(long)]
    cutoff: Option<usize>,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Parse {
        path: String,
        source: graphheat::graph::format::ParseError,
    },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Selection(#[from] pairs::SelectionError),
    #[error("{0}")]
    Core(#[from] graphheat::Error),
    #[error("{0}")]
    Usage(String),
}

fn load(opts: &Options) -> Result<WeightedGraph, CliError> {
    match (&opts.input, &opts.gen) {
        (Some(path), _) => {
            let name = path.display().to_string();
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: name.clone(), source })?;
            parse_graph(&text).map_err(|source| CliError::Parse { path: name, source })
        }
        (None, Some(spec)) => Ok(generators::from_spec(spec)?),
        (None, None) => Err(CliError::Usage("one of --input or --gen is required".into())),
    }
}

fn context(opts: &Options) -> Result<Context, CliError> {
    let grid = TimeGrid { t0: opts.t0, ratio: opts.ratio, count: opts.count };
    grid.validate()?;
    if !(opts.tol >= 0.0) {
        return Err(CliError::Usage(format!("--tol {} must be non-negative", opts.tol)));
    }
    let graph = load(opts)?;
    let (pairs, capped) = pairs::resolve(&opts.pairs, graph.len(), opts.seed, PAIR_CAP)?;
    if capped {
        eprintln!(
            "note: {} pairs exceed the cap; using a seeded sample of {PAIR_CAP} (seed {})",
            graph.len() * (graph.len() - 1) / 2,
            opts.seed.unwrap_or(0)
        );
    }
    Ok(Context { graph, pairs, grid, method: opts.method, group: opts.group, tol: opts.tol, cutoff: opts.cutoff })
}

fn emit(report: &Report, out: &str) -> Result<(), CliError> {
    let csv = report.csv();
    if out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(csv.as_bytes())
            .and_then(|_| stdout.flush())
            .map_err(|source| CliError::Io { path: "stdout".into(), source })
    } else {
        fs::write(out, csv).map_err(|source| CliError::Io { path: out.into(), source })
    }
}

fn run(cli: Cli) -> Result<Report, CliError> {
    let (run, opts): (fn(&Context) -> graphheat::Result<Report>, &Options) = match &cli.command {
        Command::Distance(o) => (commands::distance, o),
        Command::Verify(o) => (commands::verify, o),
        Command::Exponent(o) => (commands::exponent, o),
        Command::Heat(o) => (commands::heat, o),
        Command::Wave(o) => (commands::wave, o),
    };
    let ctx = context(opts)?;
    let report = run(&ctx)?;
    emit(&report, &opts.out)?;
    Ok(report)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(report) => {
            for note in &report.notes {
                eprintln!("{note}");
            }
            if report.failures > 0 {
                eprintln!("error: {} check(s) failed", report.failures);
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! `indlim`: checks for the index topology of a finite or symbolic poset and
//! for inductive systems of finite-dimensional algebras over it.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on invalid
//! input.

mod commands;
mod report;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use indlim::central::DEFAULT_DEPTH;

use commands::{FamilyArgs, Options, Output};
use report::EXIT_INVALID;

#[derive(Debug, Parser)]
#[command(
    name = "indlim",
    version,
    about = "Index topologies and inductive systems over posets"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    /// Write a Graphviz rendering of the structure to FILE.
    #[arg(long, global = true, value_name = "FILE")]
    dot: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Compare the decomposition against exhaustive enumeration.
    #[arg(long, global = true)]
    brute_check: bool,
    /// Number of stage rows in each norm profile.
    #[arg(long, global = true, value_name = "N")]
    stages: Option<usize>,
    /// Length of the nested chain for `thm3`.
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decompose a poset document and check its index topology.
    Analyze { file: PathBuf },
    /// Neighborhoods, isolation and separation for a built-in family.
    Family {
        /// ex1, ex2 or ex3.
        kind: String,
        /// Slope of the ex2 cone, e.g. `1`, `3/2` (default 1).
        #[arg(long)]
        param: Option<String>,
        /// xmin,xmax,ymin,ymax of the finite window.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<String>,
        /// Grid step of the ex2 window.
        #[arg(long)]
        step: Option<String>,
        /// Extra carrier point `x,y`; may be repeated.
        #[arg(long = "point", allow_hyphen_values = true)]
        points: Vec<String>,
        /// Number of seeded random sample points.
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Base table, isolated points and separation for a poset or family window.
    Topology { file: PathBuf },
    /// Coherence, colimits and product-system checks for a system document.
    Indsys { file: PathBuf },
    /// Complementary central projections along a nested chain.
    Thm3 {
        kind: String,
        #[arg(long, default_value = "+inf", allow_hyphen_values = true)]
        index: String,
        #[arg(long)]
        param: Option<String>,
    },
}

fn dispatch(cli: &Cli, opts: &Options) -> Result<Output> {
    match &cli.command {
        Command::Analyze { file } => commands::analyze(file, opts),
        Command::Family {
            kind,
            param,
            window,
            step,
            points,
            samples,
        } => {
            let args = FamilyArgs {
                kind: kind.clone(),
                param: param.clone(),
                window: window.clone(),
                step: step.clone(),
                points: points.clone(),
                samples: *samples,
            };
            commands::family(&args, opts)
        }
        Command::Topology { file } => commands::topology(file, opts),
        Command::Indsys { file } => commands::indsys(file, opts),
        Command::Thm3 { kind, index, param } => commands::thm3(kind, index, param.as_deref(), opts),
    }
}

fn run(cli: &Cli) -> Result<u8> {
    let opts = Options {
        seed: cli.seed,
        brute_check: cli.brute_check,
        stages: cli.stages,
        depth: cli.depth,
    };
    let start = Instant::now();
    let Output { mut report, dot } = dispatch(cli, &opts)?;
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    if let (Some(path), Some(dot)) = (&cli.dot, dot) {
        fs::write(path, dot).with_context(|| format!("cannot write {}", path.display()))?;
    }
    if cli.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.to_text());
    }
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("indlim: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stochsource::config::{ExperimentConfig, Overrides};
use stochsource::pipeline::{self, Scale};
use stochsource::{Error, Result};
use stochsource_core::evaluation::DEFAULT_GRID_POINTS;

#[derive(Parser)]
#[command(name = "stochsource", version, about = "Recover random source statistics from far-field data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo campaign and write the measurement file.
    Forward {
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Recover coefficients from a measurement file and sample them on a grid.
    Invert {
        measurements: PathBuf,
        #[arg(long, short = 'o', default_value = "out")]
        output: PathBuf,
        /// Truncation order (default: the order in the file).
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Relative L² and H¹ errors of a grid dump against a registry source.
    Evaluate {
        grid: PathBuf,
        #[arg(long)]
        source: Option<String>,
        #[arg(long, short = 'o', default_value = "errors.csv")]
        output: PathBuf,
    },
    /// Regenerate an error table across the four published noise levels.
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        table: u8,
        #[arg(long, value_enum, default_value = "desk")]
        scale: Scale,
        #[arg(long, short)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

fn load(config: Option<&PathBuf>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply(overrides);
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Forward { config, overrides } => {
            let cfg = load(config.as_ref(), &overrides)?;
            let path = pipeline::forward(&cfg)?;
            println!("{}", path.display());
        }
        Command::Invert { measurements, output, order, grid_points } => {
            let out = pipeline::invert(&measurements, &output, order, grid_points)?;
            for p in out.coefficients.iter().chain(&out.grids) {
                println!("{}", p.display());
            }
        }
        Command::Evaluate { grid, source, output } => {
            let row = pipeline::evaluate(&grid, source.as_deref(), &output)?;
            println!("{} {}: rel_l2 = {:.6e}, rel_h1 = {:.6e}", row.source, row.target, row.rel_l2, row.rel_h1);
        }
        Command::Reproduce { table, scale, config, overrides } => {
            let cfg = load(config.as_ref(), &overrides)?;
            let (path, t) = pipeline::reproduce(table, scale, &cfg, overrides.realizations)?;
            print!("{}", t.render());
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn report(err: &Error) {
    let json = serde_json::json!({ "error": { "kind": err.kind(), "message": err.to_string() } });
    eprintln!("{json}");
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            report(&e);
            ExitCode::FAILURE
        }
    }
}

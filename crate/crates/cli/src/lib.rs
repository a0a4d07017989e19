//! Command-line front end: JSON configs in, CSV/JSON/SVG out.
//!
//! Exit codes: `0` success, `1` an invariant check failed, `2` the config is
//! invalid, `3` a billiard step or an output write failed.

pub mod config;
pub mod error;
pub mod output;
pub mod render;
pub mod simulate;
pub mod sweep;
pub mod verify;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{load, Scenario};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "billiard", version, about = "Kepler and Hooke billiards at conic mirrors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Iterate the billiard map and write the per-bounce table and summary.
    Simulate {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Draw the scene as SVG.
    Render {
        #[arg(short, long)]
        config: PathBuf,
        /// Output file; defaults to `outputs.svg` of the config, else stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Check every applicable invariant and print a JSON report.
    Verify {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Simulate a list of configs, possibly in parallel.
    Sweep {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(short, long, default_value_t = 1)]
        jobs: usize,
    },
}

/// Result of a command: text for stdout and the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finished {
    pub stdout: String,
    pub code: u8,
}

/// Simulate and write the configured outputs; the summary is returned even
/// when a step fails, alongside the error.
pub fn simulate_scenario(sc: &Scenario) -> (String, Result<(), CliError>) {
    let outcome = simulate::run(sc, sc.bounces);
    let summary = simulate::summary_json(&simulate::summary(sc, &outcome));
    let mut written = Ok(());
    if let Some(p) = &sc.outputs.csv {
        written = output::write_atomic(p, &simulate::csv(sc, &outcome.run));
    }
    if let (Ok(()), Some(p)) = (&written, &sc.outputs.json) {
        written = output::write_atomic(p, &summary);
    }
    let result = written.and_then(|()| outcome.into_result().map(|_| ()));
    (summary, result)
}

pub fn cmd_simulate(config: &Path) -> Result<Finished, CliError> {
    let sc = load(config)?;
    let (summary, result) = simulate_scenario(&sc);
    match result {
        Ok(()) => Ok(Finished { stdout: summary, code: 0 }),
        Err(e) => {
            eprintln!("{summary}");
            Err(e)
        }
    }
}

pub fn cmd_render(config: &Path, out: Option<&Path>) -> Result<Finished, CliError> {
    let sc = load(config)?;
    let svg = render::render(&sc)?;
    match out.map(Path::to_path_buf).or_else(|| sc.outputs.svg.clone()) {
        Some(p) => {
            output::write_atomic(&p, &svg)?;
            Ok(Finished { stdout: String::new(), code: 0 })
        }
        None => Ok(Finished { stdout: svg, code: 0 }),
    }
}

pub fn cmd_verify(config: &Path) -> Result<Finished, CliError> {
    let sc = load(config)?;
    let report = verify::verify(&sc)?;
    for c in report.failing() {
        eprintln!("failed: {} = {:e} > {:e}", c.name, c.value, c.threshold);
    }
    Ok(Finished {
        code: if report.passed { 0 } else { 1 },
        stdout: report.to_json(),
    })
}

pub fn cmd_sweep(list: &Path, jobs: usize) -> Result<Finished, CliError> {
    let report = sweep::sweep(list, jobs)?;
    Ok(Finished {
        code: report.code(),
        stdout: report.to_json(),
    })
}

/// Run a parsed command line; errors are printed to stderr.
pub fn run(cli: Cli) -> u8 {
    let res = match &cli.command {
        Command::Simulate { config } => cmd_simulate(config),
        Command::Render { config, output } => cmd_render(config, output.as_deref()),
        Command::Verify { config } => cmd_verify(config),
        Command::Sweep { config, jobs } => cmd_sweep(config, *jobs),
    };
    match res {
        Ok(f) => {
            print!("{}", f.stdout);
            f.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! `spdc`: command line front end for the photon-pair toolkit.
//!
//! Subcommands mirror the library modules: `index` queries dispersion,
//! `pm` covers phase matching (solve, sweep, design), `jsi` simulates and
//! reduces joint spectra, `fit` runs the effective-length fit and `counts`
//! handles time tags. Every run prints a final `summary key=value ...`
//! line on stdout; files land under `--out` and are written atomically.
//! Reruns with the same configuration, arguments and seed produce byte
//! identical outputs; wall-clock timestamps only ever go to the sidecar
//! `run.log`.

mod cmd;
mod context;

use clap::{Parser, Subcommand};

use crate::context::{Context, GlobalArgs};

#[derive(Parser)]
#[command(
    name = "spdc",
    version,
    about = "Design and analysis tools for quasi-phase-matched photon-pair sources"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the refractive index models at a wavelength and temperature
    Index(cmd::index::IndexArgs),
    /// Phase matching: root finding, temperature sweeps, period design
    #[command(subcommand)]
    Pm(cmd::pm::PmCommand),
    /// Joint spectral intensity grids and their marginals
    #[command(subcommand)]
    Jsi(cmd::jsi::JsiCommand),
    /// Model fits against measured spectra
    #[command(subcommand)]
    Fit(cmd::fit::FitCommand),
    /// Time-tag simulation and coincidence analysis
    #[command(subcommand)]
    Counts(cmd::counts::CountsCommand),
}

fn main() {
    let cli = Cli::parse();
    let ctx = match Context::prepare(&cli.global) {
        Ok(ctx) => ctx,
        Err(err) => {
            eprintln!("{err}");
            std::process::exit(1);
        }
    };
    let result = match &cli.command {
        Command::Index(args) => cmd::index::run(&ctx, args),
        Command::Pm(sub) => cmd::pm::run(&ctx, sub),
        Command::Jsi(sub) => cmd::jsi::run(&ctx, sub),
        Command::Fit(sub) => cmd::fit::run(&ctx, sub),
        Command::Counts(sub) => cmd::counts::run(&ctx, sub),
    };
    match result {
        Ok(()) => {
            ctx.log_outcome("ok");
        }
        Err(err) => {
            ctx.log_outcome("error");
            eprintln!("{err}");
            std::process::exit(1);
        }
    }
}

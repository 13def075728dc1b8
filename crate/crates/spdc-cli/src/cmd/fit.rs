//! `spdc fit`: model fits against measured data.

use std::path::PathBuf;

use clap::{Args, Subcommand};

use spdc_core::fit::{fit_effective_length_with, LengthFitOptions};
use spdc_core::io;
use spdc_core::Result;

use crate::cmd::parse_pair;
use crate::context::{fmt_e, fmt_f64, print_summary, Context};

#[derive(Subcommand)]
pub enum FitCommand {
    /// Fit the effective interaction length to a measured joint spectrum
    Length(LengthArgs),
}

#[derive(Args)]
pub struct LengthArgs {
    /// Measured grid file, CSV or binary
    #[arg(long, value_name = "PATH")]
    pub measured: PathBuf,

    /// Length search bounds LO,HI [m], e.g. 1e-3,24.4e-3
    #[arg(long, value_name = "LO,HI", value_parser = parse_pair)]
    pub bounds: (f64, f64),

    /// Candidate lengths on the search grid
    #[arg(long, default_value_t = 200)]
    pub grid_points: usize,

    /// Temperature the spectrum was taken at [K]; config value otherwise
    #[arg(long, value_name = "K")]
    pub temperature_k: Option<f64>,

    /// Gaussian spectrometer response FWHM [nm] applied to the model
    #[arg(long, value_name = "NM")]
    pub response_fwhm_nm: Option<f64>,

    /// Also fit a constant background offset
    #[arg(long)]
    pub fit_offset: bool,

    /// Skip the parabolic refinement between grid points
    #[arg(long)]
    pub no_refine: bool,
}

pub fn run(ctx: &Context, cmd: &FitCommand) -> Result<()> {
    match cmd {
        FitCommand::Length(args) => length(ctx, args),
    }
}

fn length(ctx: &Context, args: &LengthArgs) -> Result<()> {
    let crystal = ctx.crystal()?;
    let pump = ctx.pump()?;
    let temperature_k = args.temperature_k.unwrap_or(ctx.run.jsi.temperature_k);
    let (measured, _) = io::load_grid(&args.measured)?;
    let options = LengthFitOptions {
        response_fwhm_m: args.response_fwhm_nm.map(|v| v * 1e-9),
        fit_offset: args.fit_offset,
        refine: !args.no_refine,
    };
    let result = fit_effective_length_with(
        &measured,
        &crystal,
        &pump,
        temperature_k,
        args.bounds,
        args.grid_points,
        &options,
    )?;

    let mut body = String::new();
    body.push_str("# spdc length fit v1\n");
    body.push_str(&format!("# toolkit_version: {}\n", ctx.meta().toolkit_version));
    body.push_str(&format!("# config_hash: {}\n", ctx.config_hash));
    body.push_str(&format!(
        "# effective_length_mm: {}\n",
        fmt_f64(result.effective_length_m * 1e3)
    ));
    body.push_str(&format!(
        "# objective_at_minimum: {}\n",
        fmt_e(result.objective_at_minimum)
    ));
    body.push_str("length_mm,objective\n");
    for (l, o) in result
        .length_grid_m
        .iter()
        .zip(result.objective_values.iter())
    {
        body.push_str(&format!("{},{:e}\n", l * 1e3, o));
    }
    let path = ctx.write_output("length_fit.csv", body.as_bytes())?;

    print_summary(&[
        (
            "effective_length_mm",
            fmt_f64(result.effective_length_m * 1e3),
        ),
        ("objective", fmt_e(result.objective_at_minimum)),
        ("at_bound", result.at_bound.to_string()),
        ("refined", result.refined.to_string()),
        ("grid_points", result.length_grid_m.len().to_string()),
        ("temperature_K", fmt_f64(temperature_k)),
        ("file", path),
        ("config_hash", ctx.config_hash.clone()),
    ]);
    Ok(())
}

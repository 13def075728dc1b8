//! `spdc pm`: phase-matching roots, tuning curves and period design.

use clap::{Args, Subcommand};

use spdc_core::phasematch::{
    design_poling_period, idler_for, solve_phasematch, temperature_sweep,
};
use spdc_core::Result;

use crate::context::{fmt_e, fmt_f64, print_summary, Context};

#[derive(Subcommand)]
pub enum PmCommand {
    /// Find the phase-matched signal/idler pair at one temperature
    Solve(SolveArgs),
    /// Tuning curve over a temperature range, written as CSV
    Sweep(SweepArgs),
    /// Poling period that phase-matches a target signal wavelength
    Design(DesignArgs),
}

#[derive(Args)]
pub struct SolveArgs {
    /// Crystal temperature [K]
    #[arg(long, value_name = "K")]
    pub temperature_k: f64,

    /// Poling period at the reference temperature [m]; config value
    /// otherwise
    #[arg(long, value_name = "M")]
    pub period: Option<f64>,
}

#[derive(Args)]
pub struct SweepArgs {
    /// Sweep start [K]
    #[arg(long = "tmin", value_name = "K", default_value_t = 4.0)]
    pub tmin_k: f64,

    /// Sweep end [K]
    #[arg(long = "tmax", value_name = "K", default_value_t = 300.0)]
    pub tmax_k: f64,

    /// Number of temperature points
    #[arg(long, default_value_t = 149)]
    pub steps: usize,

    /// Poling period at the reference temperature [m]; config value
    /// otherwise
    #[arg(long, value_name = "M")]
    pub period: Option<f64>,
}

#[derive(Args)]
pub struct DesignArgs {
    /// Target signal wavelength [nm]
    #[arg(long, value_name = "NM")]
    pub signal_nm: f64,

    /// Operating temperature [K]
    #[arg(long, value_name = "K", default_value_t = 295.0)]
    pub temperature_k: f64,
}

pub fn run(ctx: &Context, cmd: &PmCommand) -> Result<()> {
    match cmd {
        PmCommand::Solve(args) => solve(ctx, args),
        PmCommand::Sweep(args) => sweep(ctx, args),
        PmCommand::Design(args) => design(ctx, args),
    }
}

fn solve(ctx: &Context, args: &SolveArgs) -> Result<()> {
    let mut crystal = ctx.crystal()?;
    if let Some(period) = args.period {
        crystal.poling_period_ref_m = period;
    }
    let pump = ctx.pump()?;
    let opts = ctx.solver_options()?;
    let sol = solve_phasematch(
        &crystal,
        pump.central_wavelength_m,
        args.temperature_k,
        &opts,
    )?;
    print_summary(&[
        ("temperature_K", fmt_f64(args.temperature_k)),
        ("lambda_s_nm", fmt_f64(sol.signal_wavelength_m * 1e9)),
        ("lambda_i_nm", fmt_f64(sol.idler_wavelength_m * 1e9)),
        (
            "residual_rad_per_m",
            fmt_e(sol.residual_mismatch_rad_per_m),
        ),
        ("multiple_roots", sol.multiple_roots.to_string()),
        (
            "grating_period_um",
            fmt_f64(crystal.grating_period_m(args.temperature_k)? * 1e6),
        ),
        ("config_hash", ctx.config_hash.clone()),
    ]);
    Ok(())
}

fn sweep(ctx: &Context, args: &SweepArgs) -> Result<()> {
    let mut crystal = ctx.crystal()?;
    if let Some(period) = args.period {
        crystal.poling_period_ref_m = period;
    }
    let pump = ctx.pump()?;
    let opts = ctx.solver_options()?;
    let points = temperature_sweep(
        &crystal,
        pump.central_wavelength_m,
        args.tmin_k,
        args.tmax_k,
        args.steps,
        &opts,
    )?;

    let mut body = String::new();
    body.push_str("# spdc tuning curve v1\n");
    body.push_str(&format!("# toolkit_version: {}\n", ctx.meta().toolkit_version));
    body.push_str(&format!("# config_hash: {}\n", ctx.config_hash));
    body.push_str(&format!(
        "# poling_period_um: {}\n",
        fmt_f64(crystal.poling_period_ref_m * 1e6)
    ));
    body.push_str("temperature_K,lambda_s_nm,lambda_i_nm,residual\n");
    let mut gaps = 0usize;
    for p in &points {
        match &p.solution {
            Some(s) => body.push_str(&format!(
                "{},{},{},{}\n",
                p.temperature_k,
                s.signal_wavelength_m * 1e9,
                s.idler_wavelength_m * 1e9,
                fmt_e(s.residual_mismatch_rad_per_m)
            )),
            None => {
                gaps += 1;
                body.push_str(&format!("{},,,\n", p.temperature_k));
            }
        }
    }
    let path = ctx.write_output("tuning_curve.csv", body.as_bytes())?;
    print_summary(&[
        ("file", path),
        ("points", points.len().to_string()),
        ("gaps", gaps.to_string()),
        ("tmin_K", fmt_f64(args.tmin_k)),
        ("tmax_K", fmt_f64(args.tmax_k)),
        ("config_hash", ctx.config_hash.clone()),
    ]);
    Ok(())
}

fn design(ctx: &Context, args: &DesignArgs) -> Result<()> {
    let crystal = ctx.crystal()?;
    let pump = ctx.pump()?;
    let signal_m = args.signal_nm * 1e-9;
    let period_ref_m = design_poling_period(
        &crystal,
        pump.central_wavelength_m,
        signal_m,
        args.temperature_k,
    )?;
    let period_at_t_m = crystal
        .expansion
        .scaled_length(period_ref_m, args.temperature_k)?;
    let idler_m = idler_for(pump.central_wavelength_m, signal_m)?;
    print_summary(&[
        ("signal_nm", fmt_f64(args.signal_nm)),
        ("idler_nm", fmt_f64(idler_m * 1e9)),
        ("temperature_K", fmt_f64(args.temperature_k)),
        ("poling_period_um", fmt_f64(period_ref_m * 1e6)),
        ("period_at_temperature_um", fmt_f64(period_at_t_m * 1e6)),
        ("config_hash", ctx.config_hash.clone()),
    ]);
    Ok(())
}

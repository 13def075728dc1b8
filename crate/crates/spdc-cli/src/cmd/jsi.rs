//! `spdc jsi`: simulate joint spectra and reduce them to marginals.

use std::path::PathBuf;

use clap::{Args, Subcommand, ValueEnum};

use spdc_core::fit::convolve_instrument_response;
use spdc_core::io;
use spdc_core::jsa::{
    marginal_spectrum, sampled_fwhm, simulate_jsi, MarginalAxis, Normalization,
};
use spdc_core::phasematch::solve_phasematch;
use spdc_core::Result;

use crate::cmd::linspace;
use crate::context::{fmt_f64, print_summary, Context, OutputFormat};

#[derive(Subcommand)]
pub enum JsiCommand {
    /// Simulate the joint spectral intensity on a wavelength grid
    Simulate(SimulateArgs),
    /// Project a stored grid onto its marginal spectra
    Marginal(MarginalArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Crystal temperature [K]; config value otherwise
    #[arg(long, value_name = "K")]
    pub temperature_k: Option<f64>,

    /// Effective interaction length [mm]; config value otherwise
    #[arg(long, value_name = "MM")]
    pub length_mm: Option<f64>,

    /// Signal axis span [nm]; config value otherwise
    #[arg(long, value_name = "NM")]
    pub signal_span_nm: Option<f64>,

    /// Idler axis span [nm]; the energy-conservation image of the signal
    /// span otherwise
    #[arg(long, value_name = "NM")]
    pub idler_span_nm: Option<f64>,

    /// Grid step on both axes [nm]; config value otherwise
    #[arg(long, value_name = "NM")]
    pub resolution_nm: Option<f64>,

    /// peak_one, sum_one or raw_counts; config value otherwise
    #[arg(long)]
    pub normalization: Option<String>,

    /// Signal axis center [nm]; the phase-matched wavelength otherwise
    #[arg(long, value_name = "NM")]
    pub center_signal_nm: Option<f64>,

    /// Idler axis center [nm]; the phase-matched wavelength otherwise
    #[arg(long, value_name = "NM")]
    pub center_idler_nm: Option<f64>,
}

#[derive(Args)]
pub struct MarginalArgs {
    /// Grid file to reduce, CSV or binary
    #[arg(long, value_name = "PATH")]
    pub grid: PathBuf,

    /// Which marginal to take
    #[arg(long, value_enum, default_value_t = AxisChoice::Both)]
    pub axis: AxisChoice,

    /// Gaussian instrument response FWHM to convolve in [nm]
    #[arg(long, value_name = "NM")]
    pub response_fwhm_nm: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisChoice {
    Signal,
    Idler,
    Both,
}

pub fn run(ctx: &Context, cmd: &JsiCommand) -> Result<()> {
    match cmd {
        JsiCommand::Simulate(args) => simulate(ctx, args),
        JsiCommand::Marginal(args) => marginal(ctx, args),
    }
}

fn axis_points(span_nm: f64, resolution_nm: f64) -> Result<usize> {
    if !(span_nm > 0.0 && resolution_nm > 0.0) {
        return Err(spdc_core::Error::invalid(
            "axis span and resolution must be positive",
        ));
    }
    Ok(((span_nm / resolution_nm).round() as usize).max(1) + 1)
}

fn simulate(ctx: &Context, args: &SimulateArgs) -> Result<()> {
    let crystal = ctx.crystal()?;
    let pump = ctx.pump()?;
    let jsi_cfg = &ctx.run.jsi;

    let temperature_k = args.temperature_k.unwrap_or(jsi_cfg.temperature_k);
    let length_m = args.length_mm.unwrap_or(jsi_cfg.effective_length_mm) * 1e-3;
    let signal_span_nm = args.signal_span_nm.unwrap_or(jsi_cfg.signal_span_nm);
    let resolution_nm = args.resolution_nm.unwrap_or(jsi_cfg.resolution_nm);
    let normalization = match &args.normalization {
        Some(s) => Normalization::parse(s)?,
        None => ctx.run.jsi_normalization()?,
    };

    // Centers default to the phase-matched pair so the ridge crosses the
    // middle of the grid.
    let (center_s_nm, center_i_nm) = match (args.center_signal_nm, args.center_idler_nm) {
        (Some(s), Some(i)) => (s, i),
        (s, i) => {
            let opts = ctx.solver_options()?;
            let sol = solve_phasematch(&crystal, pump.central_wavelength_m, temperature_k, &opts)?;
            (
                s.unwrap_or(sol.signal_wavelength_m * 1e9),
                i.unwrap_or(sol.idler_wavelength_m * 1e9),
            )
        }
    };
    let idler_span_nm = args.idler_span_nm.or(jsi_cfg.idler_span_nm).unwrap_or_else(|| {
        // d lam_i / d lam_s along energy conservation
        let ratio = center_i_nm / center_s_nm;
        signal_span_nm * ratio * ratio
    });

    let n_s = axis_points(signal_span_nm, resolution_nm)?;
    let n_i = axis_points(idler_span_nm, resolution_nm)?;
    let signal_axis: Vec<f64> = linspace(
        (center_s_nm - signal_span_nm / 2.0) * 1e-9,
        (center_s_nm + signal_span_nm / 2.0) * 1e-9,
        n_s,
    );
    let idler_axis: Vec<f64> = linspace(
        (center_i_nm - idler_span_nm / 2.0) * 1e-9,
        (center_i_nm + idler_span_nm / 2.0) * 1e-9,
        n_i,
    );

    let grid = simulate_jsi(
        &crystal,
        &pump,
        length_m,
        temperature_k,
        &signal_axis,
        &idler_axis,
        normalization,
    )?;

    let mut bytes = Vec::new();
    let name = ctx.flavored("jsi_grid");
    match ctx.format {
        OutputFormat::Csv => io::write_grid_csv(&mut bytes, &grid, &ctx.meta())?,
        OutputFormat::Bin => io::write_grid_binary(&mut bytes, &grid, &ctx.meta())?,
    }
    let path = ctx.write_output(&name, &bytes)?;

    let (pi, pj) = grid.peak_index();
    print_summary(&[
        ("file", path),
        ("n_signal", grid.n_signal().to_string()),
        ("n_idler", grid.n_idler().to_string()),
        ("temperature_K", fmt_f64(temperature_k)),
        ("effective_length_mm", fmt_f64(length_m * 1e3)),
        ("normalization", grid.normalization().as_str().to_string()),
        (
            "peak_signal_nm",
            fmt_f64(grid.signal_axis_m()[pi] * 1e9),
        ),
        ("peak_idler_nm", fmt_f64(grid.idler_axis_m()[pj] * 1e9)),
        ("config_hash", ctx.config_hash.clone()),
    ]);
    Ok(())
}

fn one_marginal(
    ctx: &Context,
    grid: &spdc_core::jsa::JsiGrid<f64>,
    axis: MarginalAxis,
    response_fwhm_m: Option<f64>,
) -> Result<(String, f64)> {
    let raw = marginal_spectrum(grid, axis);
    let spectrum = match response_fwhm_m {
        Some(fwhm) => convolve_instrument_response(&raw, fwhm)?,
        None => raw,
    };
    let label = match axis {
        MarginalAxis::Signal => "signal",
        MarginalAxis::Idler => "idler",
    };
    let mut body = String::new();
    body.push_str("# spdc marginal v1\n");
    body.push_str(&format!("# toolkit_version: {}\n", ctx.meta().toolkit_version));
    body.push_str(&format!("# config_hash: {}\n", ctx.config_hash));
    body.push_str(&format!("# axis: {label}\n"));
    body.push_str("wavelength_nm,intensity\n");
    for (x, y) in &spectrum {
        body.push_str(&format!("{},{:e}\n", x * 1e9, y));
    }
    let path = ctx.write_output(&format!("marginal_{label}.csv"), body.as_bytes())?;
    let fwhm_m = sampled_fwhm(&spectrum)?;
    Ok((path, fwhm_m))
}

fn marginal(ctx: &Context, args: &MarginalArgs) -> Result<()> {
    let (grid, _) = io::load_grid(&args.grid)?;
    let response_fwhm_m = args.response_fwhm_nm.map(|v| v * 1e-9);
    let mut pairs: Vec<(&str, String)> = Vec::new();
    let mut files = Vec::new();
    if matches!(args.axis, AxisChoice::Signal | AxisChoice::Both) {
        let (path, fwhm) = one_marginal(ctx, &grid, MarginalAxis::Signal, response_fwhm_m)?;
        files.push(path);
        pairs.push(("fwhm_signal_nm", fmt_f64(fwhm * 1e9)));
    }
    if matches!(args.axis, AxisChoice::Idler | AxisChoice::Both) {
        let (path, fwhm) = one_marginal(ctx, &grid, MarginalAxis::Idler, response_fwhm_m)?;
        files.push(path);
        pairs.push(("fwhm_idler_nm", fmt_f64(fwhm * 1e9)));
    }
    if let Some(fwhm) = args.response_fwhm_nm {
        pairs.push(("response_fwhm_nm", fmt_f64(fwhm)));
    }
    pairs.push(("files", files.join(",")));
    pairs.push(("config_hash", ctx.config_hash.clone()));
    print_summary(&pairs);
    Ok(())
}

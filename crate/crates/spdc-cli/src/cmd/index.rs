//! `spdc index`: query the refractive index models.

use clap::Args;

use spdc_core::Result;

use crate::cmd::{linspace, parse_pair};
use crate::context::{fmt_f64, print_summary, Context};

#[derive(Args)]
pub struct IndexArgs {
    /// Vacuum wavelength [nm]
    #[arg(long, value_name = "NM")]
    pub wavelength_nm: f64,

    /// Temperature [K]
    #[arg(long, value_name = "K", default_value_t = 295.0)]
    pub temperature_k: f64,

    /// Tabulate this many points across --window-nm into index.csv
    #[arg(long, value_name = "N", requires = "window_nm")]
    pub points: Option<usize>,

    /// Wavelength window LO,HI [nm] for the table
    #[arg(long, value_name = "LO,HI", value_parser = parse_pair)]
    pub window_nm: Option<(f64, f64)>,
}

pub fn run(ctx: &Context, args: &IndexArgs) -> Result<()> {
    let crystal = ctx.crystal()?;
    let t = args.temperature_k;

    if let (Some(points), Some((lo_nm, hi_nm))) = (args.points, args.window_nm) {
        if points < 2 {
            return Err(spdc_core::Error::invalid("--points must be at least 2"));
        }
        let mut body = String::new();
        body.push_str("# spdc index table v1\n");
        body.push_str(&format!("# toolkit_version: {}\n", ctx.meta().toolkit_version));
        body.push_str(&format!("# config_hash: {}\n", ctx.config_hash));
        body.push_str(&format!("# temperature_K: {t}\n"));
        body.push_str("wavelength_nm,n_te,n_tm\n");
        for lam_nm in linspace(lo_nm, hi_nm, points) {
            let lam_m = lam_nm * 1e-9;
            let n_te = crystal.te.refractive_index(lam_m, t)?;
            let n_tm = crystal.tm.refractive_index(lam_m, t)?;
            body.push_str(&format!("{lam_nm},{n_te},{n_tm}\n"));
        }
        let path = ctx.write_output("index.csv", body.as_bytes())?;
        print_summary(&[
            ("file", path),
            ("points", points.to_string()),
            ("temperature_K", fmt_f64(t)),
            ("config_hash", ctx.config_hash.clone()),
        ]);
        return Ok(());
    }

    let lam_m = args.wavelength_nm * 1e-9;
    let n_te = crystal.te.refractive_index(lam_m, t)?;
    let n_tm = crystal.tm.refractive_index(lam_m, t)?;
    let grating_m = crystal.grating_period_m(t)?;
    print_summary(&[
        ("wavelength_nm", fmt_f64(args.wavelength_nm)),
        ("temperature_K", fmt_f64(t)),
        ("n_te", fmt_f64(n_te)),
        ("n_tm", fmt_f64(n_tm)),
        ("birefringence", fmt_f64(n_te - n_tm)),
        ("grating_period_um", fmt_f64(grating_m * 1e6)),
        ("config_hash", ctx.config_hash.clone()),
    ]);
    Ok(())
}

#![allow(dead_code)]

use spdc_core::config::{MaterialFile, MaterialModels, RunConfigFile};
use spdc_core::jsa::PumpSpec;
use spdc_core::phasematch::{CrystalSpec, SolverOptions};

pub const MATERIAL_TOML: &str =
    include_str!("../../../../data/materials/lithium_niobate.toml");
pub const RUN_TOML: &str = include_str!("../../../../data/run/default.toml");

pub fn material() -> MaterialModels {
    MaterialFile::parse(MATERIAL_TOML)
        .expect("shipped material file parses")
        .build()
        .expect("shipped material file builds")
}

pub fn run_config() -> RunConfigFile {
    RunConfigFile::parse(RUN_TOML).expect("shipped run file parses")
}

/// Crystal from the shipped configuration: 8.98 um poling period,
/// 24.4 mm chip.
pub fn crystal() -> CrystalSpec<f64> {
    run_config()
        .crystal_spec(&material())
        .expect("shipped crystal builds")
}

/// Pump from the shipped configuration: 778.0 nm center, 3.2 nm FWHM,
/// 80 MHz, 1 mW.
pub fn pump() -> PumpSpec<f64> {
    run_config().pump_spec().expect("shipped pump builds")
}

pub fn solver() -> SolverOptions<f64> {
    run_config().solver_options().expect("shipped solver builds")
}

/// Evenly spaced grid including both endpoints, step (b - a) / (n - 1).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    let step = (b - a) / (n - 1) as f64;
    let mut out: Vec<f64> = (0..n).map(|i| a + step * i as f64).collect();
    out[n - 1] = b;
    out
}

pub fn assert_rel(actual: f64, expected: f64, tol: f64, what: &str) {
    let scale = expected.abs().max(1e-300);
    let rel = (actual - expected).abs() / scale;
    assert!(
        rel <= tol,
        "{what}: got {actual:e}, expected {expected:e} (rel err {rel:e} > {tol:e})"
    );
}

pub fn assert_abs(actual: f64, expected: f64, tol: f64, what: &str) {
    let err = (actual - expected).abs();
    assert!(
        err <= tol,
        "{what}: got {actual:e}, expected {expected:e} (abs err {err:e} > {tol:e})"
    );
}

/// Energy-balance defect |1/ls + 1/li - 1/lp| * lp, the dimensionless
/// residual of the frequency sum rule.
pub fn energy_defect(pump_m: f64, signal_m: f64, idler_m: f64) -> f64 {
    ((1.0 / signal_m + 1.0 / idler_m - 1.0 / pump_m) * pump_m).abs()
}

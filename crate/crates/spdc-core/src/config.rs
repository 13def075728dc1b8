//! Configuration file schemas and builders.
//!
//! Two TOML documents drive the toolkit: a material file holding the
//! published dispersion coefficient sets (with provenance comments) plus
//! the thermal expansion model, and a run file holding crystal geometry,
//! pump parameters and per-tool defaults. Keys carry explicit unit
//! suffixes. Everything numeric here is f64; the configuration layer
//! does not need the core's generic scalars.

use serde::Deserialize;

use crate::dispersion::{
    DispersionModel, ExpansionModel, ExtrapolationPolicy, Polarization, SellmeierSeries,
    WaveguideCorrection,
};
use crate::jsa::{Normalization, PumpSpec};
use crate::phasematch::{BranchRule, CrystalSpec, SolverOptions};
use crate::{Error, Result};

fn toml_error(what: &str, err: toml::de::Error) -> Error {
    Error::Config(format!("{what}: {err}"))
}

// ---------------------------------------------------------------- material

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialFile {
    pub material: MaterialSection,
    pub expansion: ExpansionSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialSection {
    pub name: String,
    pub models: Vec<ModelSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub label: String,
    /// "TE" or "TM".
    pub polarization: String,
    /// Named functional form understood by
    /// [`SellmeierSeries::from_named`].
    pub form: String,
    pub coefficients: Vec<f64>,
    pub validity_window_um: [f64; 2],
    #[serde(default)]
    pub correction: Option<CorrectionSection>,
    /// Evaluate the bulk series no lower than this temperature; the
    /// correction still sees the requested one. Absent means analytic
    /// evaluation everywhere.
    #[serde(default)]
    pub clamp_bulk_below_k: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionSection {
    #[serde(default)]
    pub wavelength_anchor_um: f64,
    #[serde(default)]
    pub temperature_anchor_k: f64,
    #[serde(default)]
    pub wavelength_poly: Vec<f64>,
    #[serde(default)]
    pub temperature_poly: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpansionSection {
    pub reference_temperature_k: f64,
    pub freeze_below_k: f64,
    pub pivot_k: f64,
    pub polynomial: Vec<f64>,
}

/// Built dispersion models for one material.
#[derive(Debug, Clone)]
pub struct MaterialModels {
    pub name: String,
    pub te: DispersionModel<f64>,
    pub tm: DispersionModel<f64>,
    pub expansion: ExpansionModel<f64>,
}

impl MaterialFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| toml_error("material config", e))
    }

    pub fn build(&self) -> Result<MaterialModels> {
        let mut te = None;
        let mut tm = None;
        for model in &self.material.models {
            let polarization = match model.polarization.as_str() {
                "TE" => Polarization::Te,
                "TM" => Polarization::Tm,
                other => {
                    return Err(Error::Config(format!(
                        "model '{}': polarization must be TE or TM, got '{other}'",
                        model.label
                    )))
                }
            };
            let series = SellmeierSeries::from_named(&model.form, &model.coefficients)?;
            let correction = match &model.correction {
                Some(c) => WaveguideCorrection {
                    wavelength_anchor_um: c.wavelength_anchor_um,
                    temperature_anchor_k: c.temperature_anchor_k,
                    wavelength_poly: c.wavelength_poly.clone(),
                    temperature_poly: c.temperature_poly.clone(),
                },
                None => WaveguideCorrection::zero(),
            };
            let extrapolation = match model.clamp_bulk_below_k {
                Some(t) => ExtrapolationPolicy::ClampBelow { t_min_k: t },
                None => ExtrapolationPolicy::Analytic,
            };
            let [lo_um, hi_um] = model.validity_window_um;
            let built = DispersionModel::new(
                model.label.clone(),
                polarization,
                series,
                correction,
                extrapolation,
                (lo_um * 1e-6, hi_um * 1e-6),
            )?;
            let slot = match polarization {
                Polarization::Te => &mut te,
                Polarization::Tm => &mut tm,
            };
            if slot.replace(built).is_some() {
                return Err(Error::Config(format!(
                    "more than one {} model in the material file",
                    model.polarization
                )));
            }
        }
        let (Some(te), Some(tm)) = (te, tm) else {
            return Err(Error::Config(
                "material file needs exactly one TE and one TM model".into(),
            ));
        };
        let e = &self.expansion;
        Ok(MaterialModels {
            name: self.material.name.clone(),
            te,
            tm,
            expansion: ExpansionModel::new(
                e.reference_temperature_k,
                e.freeze_below_k,
                e.pivot_k,
                e.polynomial.clone(),
            )?,
        })
    }
}

// --------------------------------------------------------------------- run

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    /// Material file path, resolved relative to this file when relative.
    /// Absent means the embedded default material.
    #[serde(default)]
    pub material_path: Option<String>,
    pub crystal: CrystalSection,
    pub pump: PumpSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub jsi: JsiSection,
    #[serde(default)]
    pub counts: CountsSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSection {
    /// Poling period at the expansion reference temperature.
    pub poling_period_um: f64,
    /// Physical chip length at the reference temperature; also the hard
    /// upper bound for effective-length fits.
    pub chip_length_mm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PumpSection {
    #[serde(default = "default_pump_central_nm")]
    pub central_wavelength_nm: f64,
    #[serde(default = "default_pump_fwhm_nm")]
    pub fwhm_bandwidth_nm: f64,
    #[serde(default = "default_rep_rate_mhz")]
    pub repetition_rate_mhz: f64,
    #[serde(default = "default_power_mw")]
    pub transmitted_power_mw: f64,
}

fn default_pump_central_nm() -> f64 {
    778.0
}
fn default_pump_fwhm_nm() -> f64 {
    3.2
}
fn default_rep_rate_mhz() -> f64 {
    80.0
}
fn default_power_mw() -> f64 {
    1.0
}

impl Default for PumpSection {
    fn default() -> Self {
        PumpSection {
            central_wavelength_nm: default_pump_central_nm(),
            fwhm_bandwidth_nm: default_pump_fwhm_nm(),
            repetition_rate_mhz: default_rep_rate_mhz(),
            transmitted_power_mw: default_power_mw(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_window_nm")]
    pub signal_window_nm: [f64; 2],
    #[serde(default = "default_step_nm")]
    pub coarse_step_nm: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance_rad_per_m: f64,
}

fn default_window_nm() -> [f64; 2] {
    [1200.0, 1900.0]
}
fn default_step_nm() -> f64 {
    0.5
}
fn default_tolerance() -> f64 {
    1e-4
}

impl Default for SolverSection {
    fn default() -> Self {
        SolverSection {
            signal_window_nm: default_window_nm(),
            coarse_step_nm: default_step_nm(),
            tolerance_rad_per_m: default_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JsiSection {
    #[serde(default = "default_jsi_temperature_k")]
    pub temperature_k: f64,
    #[serde(default = "default_jsi_length_mm")]
    pub effective_length_mm: f64,
    /// Signal axis span. The idler span defaults to the span the energy
    /// conservation curve maps it onto.
    #[serde(default = "default_signal_span_nm")]
    pub signal_span_nm: f64,
    #[serde(default)]
    pub idler_span_nm: Option<f64>,
    #[serde(default = "default_resolution_nm")]
    pub resolution_nm: f64,
    #[serde(default = "default_normalization")]
    pub normalization: String,
}

fn default_jsi_temperature_k() -> f64 {
    295.0
}
fn default_jsi_length_mm() -> f64 {
    7.3
}
fn default_signal_span_nm() -> f64 {
    30.0
}
fn default_resolution_nm() -> f64 {
    1.0
}
fn default_normalization() -> String {
    "peak_one".into()
}

impl Default for JsiSection {
    fn default() -> Self {
        JsiSection {
            temperature_k: default_jsi_temperature_k(),
            effective_length_mm: default_jsi_length_mm(),
            signal_span_nm: default_signal_span_nm(),
            idler_span_nm: None,
            resolution_nm: default_resolution_nm(),
            normalization: default_normalization(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CountsSection {
    /// Default coincidence window: a quarter of the 80 MHz laser period.
    #[serde(default = "default_window_ns")]
    pub window_ns: f64,
    #[serde(default = "default_resolution_ps")]
    pub tick_resolution_ps: f64,
}

fn default_window_ns() -> f64 {
    3.125
}
fn default_resolution_ps() -> f64 {
    1.0
}

impl Default for CountsSection {
    fn default() -> Self {
        CountsSection {
            window_ns: default_window_ns(),
            tick_resolution_ps: default_resolution_ps(),
        }
    }
}

impl RunConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| toml_error("run config", e))
    }

    pub fn crystal_spec(&self, material: &MaterialModels) -> Result<CrystalSpec<f64>> {
        CrystalSpec::new(
            self.crystal.poling_period_um * 1e-6,
            self.crystal.chip_length_mm * 1e-3,
            material.expansion.clone(),
            material.te.clone(),
            material.tm.clone(),
        )
    }

    pub fn pump_spec(&self) -> Result<PumpSpec<f64>> {
        PumpSpec::new(
            self.pump.central_wavelength_nm * 1e-9,
            self.pump.fwhm_bandwidth_nm * 1e-9,
            self.pump.repetition_rate_mhz * 1e6,
            self.pump.transmitted_power_mw * 1e-3,
        )
    }

    pub fn solver_options(&self) -> Result<SolverOptions<f64>> {
        let [lo, hi] = self.solver.signal_window_nm;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::Config(
                "solver signal window must satisfy 0 < min < max".into(),
            ));
        }
        Ok(SolverOptions {
            window_m: (lo * 1e-9, hi * 1e-9),
            coarse_step_m: self.solver.coarse_step_nm * 1e-9,
            tolerance_rad_per_m: self.solver.tolerance_rad_per_m,
            branch: BranchRule::SignalLong,
        })
    }

    pub fn jsi_normalization(&self) -> Result<Normalization> {
        Normalization::parse(&self.jsi.normalization)
    }
}

//! Temperature-dependent effective refractive indices and thermal expansion.
//!
//! A [`DispersionModel`] combines a bulk Sellmeier series (loaded from
//! configuration, see [`crate::config`]), an additive waveguide correction
//! and a low-temperature extrapolation policy. All evaluation is pure and
//! deterministic.

mod correction;
mod expansion;
mod sellmeier;

pub use correction::WaveguideCorrection;
pub use expansion::ExpansionModel;
pub use sellmeier::{Pole, SellmeierSeries, ThermalPoleSeries};

use crate::constants::kelvin_to_celsius;
use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

impl core::fmt::Display for Polarization {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Polarization::Te => write!(f, "TE"),
            Polarization::Tm => write!(f, "TM"),
        }
    }
}

/// What to do with the bulk series below the temperature range its
/// coefficients were measured in.
#[derive(Debug, Clone, PartialEq)]
pub enum ExtrapolationPolicy<F> {
    /// Evaluate the published series at the requested temperature.
    Analytic,
    /// Evaluate the bulk series at `max(T, t_min_k)` instead. The waveguide
    /// correction always sees the actual temperature.
    ClampBelow { t_min_k: F },
}

/// Effective refractive index for one polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionModel<F> {
    label: String,
    polarization: Polarization,
    series: SellmeierSeries<F>,
    correction: WaveguideCorrection<F>,
    extrapolation: ExtrapolationPolicy<F>,
    validity_window_m: (F, F),
}

impl<F: Scalar> DispersionModel<F> {
    pub fn new(
        label: impl Into<String>,
        polarization: Polarization,
        series: SellmeierSeries<F>,
        correction: WaveguideCorrection<F>,
        extrapolation: ExtrapolationPolicy<F>,
        validity_window_m: (F, F),
    ) -> Result<Self> {
        let (lo, hi) = validity_window_m;
        if !(lo.is_finite() && hi.is_finite() && F::zero() < lo && lo < hi) {
            return Err(Error::invalid(
                "validity window must satisfy 0 < min < max and be finite",
            ));
        }
        Ok(DispersionModel {
            label: label.into(),
            polarization,
            series,
            correction,
            extrapolation,
            validity_window_m,
        })
    }

    /// Constant-index model spanning a wide window, for tests and toys.
    pub fn constant(label: impl Into<String>, polarization: Polarization, n: F) -> Self {
        DispersionModel {
            label: label.into(),
            polarization,
            series: SellmeierSeries::Constant(n),
            correction: WaveguideCorrection::zero(),
            extrapolation: ExtrapolationPolicy::Analytic,
            validity_window_m: (F::lit(1e-8), F::lit(1.0)),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    pub fn validity_window_m(&self) -> (F, F) {
        self.validity_window_m
    }

    /// Effective index at vacuum wavelength [m] and temperature [K].
    ///
    /// The bulk series sees the policy-adjusted temperature, the waveguide
    /// correction the requested one.
    pub fn refractive_index(&self, wavelength_m: F, temperature_k: F) -> Result<F> {
        if !wavelength_m.is_finite() || !temperature_k.is_finite() {
            return Err(Error::invalid(
                "wavelength and temperature must be finite numbers",
            ));
        }
        let (lo, hi) = self.validity_window_m;
        if wavelength_m < lo || wavelength_m > hi {
            return Err(Error::WavelengthOutOfWindow {
                model: self.label.clone(),
                wavelength_m: wavelength_m.as_f64(),
                min_m: lo.as_f64(),
                max_m: hi.as_f64(),
            });
        }
        if temperature_k < F::zero() || temperature_k > F::lit(400.0) {
            return Err(Error::invalid(format!(
                "temperature {temperature_k} K outside the supported range [0, 400] K"
            )));
        }
        let t_bulk = match &self.extrapolation {
            ExtrapolationPolicy::Analytic => temperature_k,
            ExtrapolationPolicy::ClampBelow { t_min_k } => temperature_k.max(*t_min_k),
        };
        let lam_um = wavelength_m * F::lit(1e6);
        let bulk = self.series.evaluate(lam_um, kelvin_to_celsius(t_bulk));
        let n = bulk + self.correction.evaluate(wavelength_m, temperature_k);
        if !n.is_finite() || n <= F::zero() {
            return Err(Error::invalid(format!(
                "dispersion model '{}' evaluated to a non-physical index at {:e} m, {} K",
                self.label,
                wavelength_m.as_f64(),
                temperature_k
            )));
        }
        Ok(n)
    }
}

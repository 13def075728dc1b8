//! Joint spectral amplitude and intensity on wavelength grids.
//!
//! The amplitude at a grid point is the product of a Gaussian pump envelope
//! over the summed angular frequency and a sinc phase-matching factor built
//! on the momentum mismatch of [`crate::phasematch`]. Only the squared
//! magnitude is kept; spectral phase is discarded.

use crate::constants::{angular_frequency, speed_of_light, two_pi, vacuum_wavelength};
use crate::phasematch::{mismatch_from_terms, CrystalSpec};
use crate::{Error, Result, Scalar};

/// Pulsed pump description. Bandwidth is a wavelength-domain FWHM at the
/// central wavelength; conversions to angular frequency happen here so every
/// consumer agrees on them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec<F> {
    pub central_wavelength_m: F,
    pub fwhm_bandwidth_m: F,
    pub repetition_rate_hz: F,
    pub transmitted_power_w: F,
}

impl<F: Scalar> PumpSpec<F> {
    pub fn new(
        central_wavelength_m: F,
        fwhm_bandwidth_m: F,
        repetition_rate_hz: F,
        transmitted_power_w: F,
    ) -> Result<Self> {
        if !(central_wavelength_m > F::zero() && central_wavelength_m.is_finite()) {
            return Err(Error::invalid("pump central wavelength must be positive"));
        }
        if !(fwhm_bandwidth_m > F::zero() && fwhm_bandwidth_m.is_finite()) {
            return Err(Error::invalid("pump bandwidth must be positive"));
        }
        if !(repetition_rate_hz > F::zero() && repetition_rate_hz.is_finite()) {
            return Err(Error::invalid("pump repetition rate must be positive"));
        }
        if !(transmitted_power_w >= F::zero() && transmitted_power_w.is_finite()) {
            return Err(Error::invalid("pump power must be non-negative"));
        }
        Ok(PumpSpec {
            central_wavelength_m,
            fwhm_bandwidth_m,
            repetition_rate_hz,
            transmitted_power_w,
        })
    }

    /// Central angular frequency [rad/s].
    pub fn central_angular_frequency(&self) -> F {
        angular_frequency(self.central_wavelength_m)
    }

    /// FWHM bandwidth converted to angular frequency [rad/s] at the central
    /// wavelength, 2 pi c dl / l^2.
    pub fn angular_fwhm_bandwidth(&self) -> F {
        two_pi::<F>() * speed_of_light::<F>() * self.fwhm_bandwidth_m
            / (self.central_wavelength_m * self.central_wavelength_m)
    }

    /// Gaussian standard deviation [rad/s] of the envelope over the summed
    /// frequency: the angular FWHM divided by 2 sqrt(2 ln 2).
    pub fn sigma_omega(&self) -> F {
        let two = F::lit(2.0);
        let ln2 = F::lit(core::f64::consts::LN_2);
        self.angular_fwhm_bandwidth() / (two * (two * ln2).sqrt())
    }
}

/// How grid intensities are scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Maximum cell is exactly 1.
    PeakOne,
    /// Cells sum to 1.
    SumOne,
    /// Whatever the producer wrote, typically detector counts.
    RawCounts,
}

impl Normalization {
    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::PeakOne => "peak_one",
            Normalization::SumOne => "sum_one",
            Normalization::RawCounts => "raw_counts",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "peak_one" => Ok(Normalization::PeakOne),
            "sum_one" => Ok(Normalization::SumOne),
            "raw_counts" => Ok(Normalization::RawCounts),
            other => Err(Error::Format(format!(
                "unknown normalization '{other}' (expected peak_one, sum_one or raw_counts)"
            ))),
        }
    }
}

/// Which marginal of a grid to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalAxis {
    Signal,
    Idler,
}

/// Joint spectral intensity sampled on a rectangular wavelength grid.
/// Intensities are row-major with the signal axis indexing rows.
#[derive(Debug, Clone, PartialEq)]
pub struct JsiGrid<F> {
    signal_axis_m: Vec<F>,
    idler_axis_m: Vec<F>,
    intensity: Vec<F>,
    normalization: Normalization,
}

fn check_axis<F: Scalar>(axis: &[F], name: &str) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::invalid(format!(
            "{name} axis needs at least 2 points, got {}",
            axis.len()
        )));
    }
    if axis.iter().any(|v| !(v.is_finite() && *v > F::zero())) {
        return Err(Error::invalid(format!(
            "{name} axis must contain positive finite wavelengths"
        )));
    }
    let increasing = axis[1] > axis[0];
    for w in axis.windows(2) {
        let ok = if increasing { w[1] > w[0] } else { w[1] < w[0] };
        if !ok {
            return Err(Error::invalid(format!("{name} axis must be strictly monotone")));
        }
    }
    Ok(())
}

impl<F: Scalar> JsiGrid<F> {
    /// Validating constructor. The intensity buffer is row-major,
    /// `intensity[i * idler_len + j]` for signal index `i`.
    pub fn new(
        signal_axis_m: Vec<F>,
        idler_axis_m: Vec<F>,
        intensity: Vec<F>,
        normalization: Normalization,
    ) -> Result<Self> {
        check_axis(&signal_axis_m, "signal")?;
        check_axis(&idler_axis_m, "idler")?;
        if intensity.len() != signal_axis_m.len() * idler_axis_m.len() {
            return Err(Error::invalid(format!(
                "intensity length {} does not match {} x {} grid",
                intensity.len(),
                signal_axis_m.len(),
                idler_axis_m.len()
            )));
        }
        if intensity.iter().any(|v| !(v.is_finite() && *v >= F::zero())) {
            return Err(Error::invalid(
                "grid intensities must be finite and non-negative",
            ));
        }
        match normalization {
            Normalization::PeakOne => {
                let max = max_of(&intensity);
                if max != F::one() {
                    return Err(Error::invalid(format!(
                        "peak_one grid has maximum {:e}, expected exactly 1",
                        max.as_f64()
                    )));
                }
            }
            Normalization::SumOne => {
                let sum = sum_of(&intensity);
                if (sum - F::one()).abs() > F::lit(1e-12) {
                    return Err(Error::invalid(format!(
                        "sum_one grid sums to {:e}, expected 1 within 1e-12",
                        sum.as_f64()
                    )));
                }
            }
            Normalization::RawCounts => {}
        }
        Ok(JsiGrid {
            signal_axis_m,
            idler_axis_m,
            intensity,
            normalization,
        })
    }

    pub fn signal_axis_m(&self) -> &[F] {
        &self.signal_axis_m
    }

    pub fn idler_axis_m(&self) -> &[F] {
        &self.idler_axis_m
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn n_signal(&self) -> usize {
        self.signal_axis_m.len()
    }

    pub fn n_idler(&self) -> usize {
        self.idler_axis_m.len()
    }

    /// Row-major backing buffer.
    pub fn intensities(&self) -> &[F] {
        &self.intensity
    }

    pub fn value(&self, signal_index: usize, idler_index: usize) -> F {
        self.intensity[signal_index * self.idler_axis_m.len() + idler_index]
    }

    /// Indices of the maximum cell; ties resolve to the first in row-major
    /// order.
    pub fn peak_index(&self) -> (usize, usize) {
        let mut best = 0usize;
        for (k, v) in self.intensity.iter().enumerate() {
            if *v > self.intensity[best] {
                best = k;
            }
        }
        (best / self.idler_axis_m.len(), best % self.idler_axis_m.len())
    }

    /// The same grid rescaled to another normalization mode.
    pub fn renormalized(&self, normalization: Normalization) -> Result<Self> {
        let values = normalize_values(self.intensity.clone(), normalization)?;
        Ok(JsiGrid {
            signal_axis_m: self.signal_axis_m.clone(),
            idler_axis_m: self.idler_axis_m.clone(),
            intensity: values,
            normalization,
        })
    }
}

fn max_of<F: Scalar>(values: &[F]) -> F {
    values
        .iter()
        .fold(F::zero(), |m, v| if *v > m { *v } else { m })
}

fn sum_of<F: Scalar>(values: &[F]) -> F {
    values.iter().fold(F::zero(), |acc, v| acc + *v)
}

fn normalize_values<F: Scalar>(mut values: Vec<F>, mode: Normalization) -> Result<Vec<F>> {
    match mode {
        Normalization::RawCounts => Ok(values),
        Normalization::PeakOne => {
            let max = max_of(&values);
            if !(max > F::zero()) {
                return Err(Error::invalid(
                    "cannot rescale an all-zero grid to peak_one",
                ));
            }
            for v in values.iter_mut() {
                *v = *v / max;
            }
            Ok(values)
        }
        Normalization::SumOne => {
            let sum = sum_of(&values);
            if !(sum > F::zero()) {
                return Err(Error::invalid("cannot rescale an all-zero grid to sum_one"));
            }
            for v in values.iter_mut() {
                *v = *v / sum;
            }
            Ok(values)
        }
    }
}

/// sin(x)/x with the removable singularity filled in, sinc(0) = 1.
pub fn sinc<F: Scalar>(x: F) -> F {
    if x.is_zero() {
        F::one()
    } else {
        x.sin() / x
    }
}

/// Gaussian pump amplitude over the summed frequency,
/// exp(-((ws + wi - wp)^2) / (2 sigma^2)). Peaks at 1 exactly when the
/// daughters' frequencies sum to the pump's.
pub fn pump_envelope<F: Scalar>(pump: &PumpSpec<F>, omega_s: F, omega_i: F) -> Result<F> {
    if !(omega_s > F::zero() && omega_i > F::zero()) {
        return Err(Error::invalid("angular frequencies must be positive"));
    }
    let sigma = pump.sigma_omega();
    if !(sigma > F::zero() && sigma.is_finite()) {
        return Err(Error::invalid("pump envelope width must be positive"));
    }
    let detune = omega_s + omega_i - pump.central_angular_frequency();
    let arg = (detune * detune) / (F::lit(2.0) * (sigma * sigma));
    Ok((-arg).exp())
}

/// sinc-shaped phase-matching amplitude, sinc(dk' L / 2). The pump
/// wavelength entering the momentum balance is derived from the summed
/// frequency of the pair, not pinned to the pump's central value.
pub fn phasematching_function<F: Scalar>(
    crystal: &CrystalSpec<F>,
    effective_length_m: F,
    omega_s: F,
    omega_i: F,
    temperature_k: F,
) -> Result<F> {
    if !(effective_length_m > F::zero() && effective_length_m.is_finite()) {
        return Err(Error::invalid("effective length must be positive"));
    }
    if !(omega_s > F::zero() && omega_i > F::zero()) {
        return Err(Error::invalid("angular frequencies must be positive"));
    }
    let pump_m = vacuum_wavelength(omega_s + omega_i);
    let signal_m = vacuum_wavelength(omega_s);
    let idler_m = vacuum_wavelength(omega_i);
    let mismatch =
        crate::phasematch::phase_mismatch(crystal, pump_m, signal_m, idler_m, temperature_k)?;
    let half = mismatch * F::lit(0.5);
    Ok(sinc(half * effective_length_m))
}

/// Length-independent part of a JSI evaluation: the pump amplitude and half
/// the momentum mismatch per cell. Rendering for a given interaction length
/// only needs one sinc per cell, which is what makes scanning candidate
/// lengths in the fit cheap.
///
/// Per-row and per-column dispersion terms are hoisted; the arithmetic is
/// routed through the same helpers as [`pump_envelope`] and
/// [`phasematching_function`] so a cell matches the scalar operations to
/// rounding.
#[derive(Debug, Clone)]
pub struct JsiPrecompute<F> {
    signal_axis_m: Vec<F>,
    idler_axis_m: Vec<F>,
    alpha: Vec<F>,
    half_mismatch_per_m: Vec<F>,
}

impl<F: Scalar> JsiPrecompute<F> {
    pub fn new(
        crystal: &CrystalSpec<F>,
        pump: &PumpSpec<F>,
        temperature_k: F,
        signal_axis_m: &[F],
        idler_axis_m: &[F],
    ) -> Result<Self> {
        check_axis(signal_axis_m, "signal")?;
        check_axis(idler_axis_m, "idler")?;
        let grating = crystal.grating_period_m(temperature_k)?;
        let inverse_grating = F::one() / grating;

        // Signal-row and idler-column terms of the momentum balance. The
        // wavelengths are round-tripped through angular frequency so they
        // take the exact path of the frequency-domain entry points.
        let omega_s: Vec<F> = signal_axis_m.iter().map(|l| angular_frequency(*l)).collect();
        let omega_i: Vec<F> = idler_axis_m.iter().map(|l| angular_frequency(*l)).collect();
        let mut signal_terms = Vec::with_capacity(omega_s.len());
        for w in &omega_s {
            let l = vacuum_wavelength(*w);
            signal_terms.push(crystal.te.refractive_index(l, temperature_k)? / l);
        }
        let mut idler_terms = Vec::with_capacity(omega_i.len());
        for w in &omega_i {
            let l = vacuum_wavelength(*w);
            idler_terms.push(crystal.tm.refractive_index(l, temperature_k)? / l);
        }

        let half = F::lit(0.5);
        let n_cells = signal_axis_m.len() * idler_axis_m.len();
        let mut alpha = Vec::with_capacity(n_cells);
        let mut half_mismatch = Vec::with_capacity(n_cells);
        for (i, ws) in omega_s.iter().enumerate() {
            for (j, wi) in omega_i.iter().enumerate() {
                alpha.push(pump_envelope(pump, *ws, *wi)?);
                let pump_m = vacuum_wavelength(*ws + *wi);
                let pump_term = crystal.te.refractive_index(pump_m, temperature_k)? / pump_m;
                let mismatch = mismatch_from_terms(
                    pump_term,
                    signal_terms[i],
                    idler_terms[j],
                    inverse_grating,
                );
                half_mismatch.push(mismatch * half);
            }
        }
        Ok(JsiPrecompute {
            signal_axis_m: signal_axis_m.to_vec(),
            idler_axis_m: idler_axis_m.to_vec(),
            alpha,
            half_mismatch_per_m: half_mismatch,
        })
    }

    pub fn signal_axis_m(&self) -> &[F] {
        &self.signal_axis_m
    }

    pub fn idler_axis_m(&self) -> &[F] {
        &self.idler_axis_m
    }

    /// JSI grid for one interaction length.
    pub fn render(&self, effective_length_m: F, normalization: Normalization) -> Result<JsiGrid<F>> {
        if !(effective_length_m > F::zero() && effective_length_m.is_finite()) {
            return Err(Error::invalid("effective length must be positive"));
        }
        let mut values = Vec::with_capacity(self.alpha.len());
        for (a, h) in self.alpha.iter().zip(&self.half_mismatch_per_m) {
            let amplitude = *a * sinc(*h * effective_length_m);
            values.push(amplitude * amplitude);
        }
        let values = normalize_values(values, normalization)?;
        Ok(JsiGrid {
            signal_axis_m: self.signal_axis_m.clone(),
            idler_axis_m: self.idler_axis_m.clone(),
            intensity: values,
            normalization,
        })
    }
}

/// Render the joint spectral intensity over the given wavelength axes.
pub fn simulate_jsi<F: Scalar>(
    crystal: &CrystalSpec<F>,
    pump: &PumpSpec<F>,
    effective_length_m: F,
    temperature_k: F,
    signal_axis_m: &[F],
    idler_axis_m: &[F],
    normalization: Normalization,
) -> Result<JsiGrid<F>> {
    JsiPrecompute::new(crystal, pump, temperature_k, signal_axis_m, idler_axis_m)?
        .render(effective_length_m, normalization)
}

/// Sum the grid over the other axis. Output follows the requested axis in
/// its stored order.
pub fn marginal_spectrum<F: Scalar>(grid: &JsiGrid<F>, axis: MarginalAxis) -> Vec<(F, F)> {
    let (n_s, n_i) = (grid.n_signal(), grid.n_idler());
    match axis {
        MarginalAxis::Signal => (0..n_s)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..n_i {
                    acc = acc + grid.value(i, j);
                }
                (grid.signal_axis_m[i], acc)
            })
            .collect(),
        MarginalAxis::Idler => (0..n_i)
            .map(|j| {
                let mut acc = F::zero();
                for i in 0..n_s {
                    acc = acc + grid.value(i, j);
                }
                (grid.idler_axis_m[j], acc)
            })
            .collect(),
    }
}

/// Full width at half maximum of a sampled curve, by linear interpolation of
/// the two half-maximum crossings adjacent to the peak. Requires the curve
/// to actually fall below half maximum on both sides of the peak within the
/// sampled range.
pub fn sampled_fwhm<F: Scalar>(points: &[(F, F)]) -> Result<F> {
    if points.len() < 3 {
        return Err(Error::invalid("fwhm needs at least 3 sampled points"));
    }
    let mut peak = 0usize;
    for (k, p) in points.iter().enumerate() {
        if !p.1.is_finite() || p.1 < F::zero() {
            return Err(Error::invalid("fwhm requires finite non-negative values"));
        }
        if p.1 > points[peak].1 {
            peak = k;
        }
    }
    let max = points[peak].1;
    if !(max > F::zero()) {
        return Err(Error::invalid("fwhm of an all-zero curve is undefined"));
    }
    let half = max * F::lit(0.5);

    let mut low = None;
    for k in (0..peak).rev() {
        if points[k].1 < half {
            let (x0, y0) = points[k];
            let (x1, y1) = points[k + 1];
            low = Some(x0 + (half - y0) * (x1 - x0) / (y1 - y0));
            break;
        }
    }
    let mut high = None;
    for k in peak + 1..points.len() {
        if points[k].1 < half {
            let (x0, y0) = points[k - 1];
            let (x1, y1) = points[k];
            high = Some(x0 + (half - y0) * (x1 - x0) / (y1 - y0));
            break;
        }
    }
    match (low, high) {
        (Some(lo), Some(hi)) => Ok((hi - lo).abs()),
        _ => Err(Error::invalid(
            "curve does not fall below half maximum on both sides of the peak within the sampled range",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pump() -> PumpSpec<f64> {
        PumpSpec::new(778.0e-9, 3.2e-9, 80.0e6, 1.0e-3).unwrap()
    }

    #[test]
    fn sinc_at_zero_and_first_zero() {
        assert_eq!(sinc(0.0_f64), 1.0);
        assert!(sinc(core::f64::consts::PI).abs() < 1e-15);
        let x = 0.5_f64;
        assert!((sinc(x) - x.sin() / x).abs() == 0.0);
    }

    #[test]
    fn envelope_peaks_at_energy_conservation() {
        let p = pump();
        let wp = p.central_angular_frequency();
        let a = pump_envelope(&p, wp * 0.5, wp * 0.5).unwrap();
        assert_eq!(a, 1.0);
    }

    #[test]
    fn envelope_fwhm_definition_closes() {
        let p = pump();
        let wp = p.central_angular_frequency();
        let half_bw = p.angular_fwhm_bandwidth() * 0.5;
        let a = pump_envelope(&p, wp * 0.5 + half_bw, wp * 0.5).unwrap();
        assert!((a - 0.5).abs() < 1e-12, "got {a}");
    }

    #[test]
    fn envelope_one_sigma_value() {
        let p = pump();
        let wp = p.central_angular_frequency();
        let a = pump_envelope(&p, wp * 0.5 + p.sigma_omega(), wp * 0.5).unwrap();
        assert!((a - 0.60653065971263342).abs() < 1e-14, "got {a}");
    }

    #[test]
    fn grid_rejects_mismatched_buffer() {
        let err = JsiGrid::new(
            vec![1.0e-6, 2.0e-6],
            vec![1.0e-6, 2.0e-6],
            vec![0.0; 3],
            Normalization::RawCounts,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn grid_rejects_non_monotone_axis() {
        let err = JsiGrid::new(
            vec![1.0e-6, 1.0e-6],
            vec![1.0e-6, 2.0e-6],
            vec![0.0; 4],
            Normalization::RawCounts,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn renormalization_postconditions() {
        let grid = JsiGrid::<f64>::new(
            vec![1.0e-6, 2.0e-6, 3.0e-6],
            vec![1.0e-6, 2.0e-6],
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 8.0],
            Normalization::RawCounts,
        )
        .unwrap();
        let peak = grid.renormalized(Normalization::PeakOne).unwrap();
        assert_eq!(max_of(peak.intensities()), 1.0);
        let sum = grid.renormalized(Normalization::SumOne).unwrap();
        assert!((sum_of(sum.intensities()) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn marginals_of_outer_product_factor() {
        let u = [1.0, 3.0, 2.0];
        let v = [2.0, 5.0];
        let mut cells = Vec::new();
        for ui in u {
            for vj in v {
                cells.push(ui * vj);
            }
        }
        let grid = JsiGrid::new(
            vec![1.0e-6, 2.0e-6, 3.0e-6],
            vec![1.0e-6, 2.0e-6],
            cells,
            Normalization::RawCounts,
        )
        .unwrap();
        let ms = marginal_spectrum(&grid, MarginalAxis::Signal);
        let mi = marginal_spectrum(&grid, MarginalAxis::Idler);
        let sv: f64 = v.iter().sum();
        let su: f64 = u.iter().sum();
        for (k, (_, y)) in ms.iter().enumerate() {
            assert!((y - u[k] * sv).abs() < 1e-12);
        }
        for (k, (_, y)) in mi.iter().enumerate() {
            assert!((y - v[k] * su).abs() < 1e-12);
        }
    }

    #[test]
    fn fwhm_of_triangle() {
        // Triangle peaking at 1 over [0, 2]: half maximum crossings at 0.5
        // and 1.5.
        let pts: Vec<(f64, f64)> = (0..21)
            .map(|k| {
                let x = k as f64 * 0.1;
                (x, 1.0 - (x - 1.0).abs())
            })
            .collect();
        let w = sampled_fwhm(&pts).unwrap();
        assert!((w - 1.0).abs() < 1e-12, "got {w}");
    }

    #[test]
    fn fwhm_requires_both_crossings() {
        let pts: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 1.0)).collect();
        assert!(sampled_fwhm(&pts).is_err());
    }
}

//! Discrete Gaussian smoothing standing in for the spectrometer's
//! instrument response.

use super::fwhm_sigma_ratio;
use crate::{Error, Result, Scalar};

/// Sampled Gaussian kernel on a uniform step, truncated at 5 sigma and
/// rescaled to unit sum so convolution preserves totals away from the
/// edges. Returns the half width in samples alongside the weights
/// (full kernel length is 2 * half + 1).
pub(crate) fn gaussian_kernel<F: Scalar>(step: F, fwhm: F) -> (usize, Vec<F>) {
    let sigma = fwhm / fwhm_sigma_ratio::<F>();
    let half_f = (F::lit(5.0) * sigma / step).ceil();
    let half = half_f.to_usize().unwrap_or(0).max(1);
    let mut weights = Vec::with_capacity(2 * half + 1);
    let mut total = F::zero();
    for k in 0..(2 * half + 1) {
        let offset = F::from_usize(k).unwrap() - F::from_usize(half).unwrap();
        let d = offset * step;
        let w = (-(d * d) / (F::lit(2.0) * sigma * sigma)).exp();
        weights.push(w);
        total = total + w;
    }
    for w in weights.iter_mut() {
        *w = *w / total;
    }
    (half, weights)
}

/// Convolve a value sequence with a prepared kernel, zero-padded at the
/// edges; output has the input's length.
pub(crate) fn convolve_values<F: Scalar>(values: &[F], half: usize, weights: &[F]) -> Vec<F> {
    let n = values.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = F::zero();
        for (k, w) in weights.iter().enumerate() {
            let j = i as isize + k as isize - half as isize;
            if j >= 0 && (j as usize) < n {
                acc = acc + *w * values[j as usize];
            }
        }
        out.push(acc);
    }
    out
}

/// Uniform grid step of a wavelength axis, or an error telling the caller
/// to resample first.
pub(crate) fn uniform_step<F: Scalar>(axis: &[F]) -> Result<F> {
    if axis.len() < 2 {
        return Err(Error::invalid("axis needs at least 2 points"));
    }
    let step = axis[1] - axis[0];
    if step.is_zero() || !step.is_finite() {
        return Err(Error::invalid("axis step must be finite and non-zero"));
    }
    let tol = step.abs() * F::lit(1e-9);
    for w in axis.windows(2) {
        if ((w[1] - w[0]) - step).abs() > tol {
            return Err(Error::invalid(
                "wavelength axis is not uniformly sampled; resample the spectrum onto a uniform grid before convolving",
            ));
        }
    }
    Ok(step)
}

/// Smooth a (wavelength, intensity) spectrum with a unit-sum Gaussian
/// kernel of the given FWHM. A zero width is the identity.
pub fn convolve_instrument_response<F: Scalar>(
    spectrum: &[(F, F)],
    response_fwhm_m: F,
) -> Result<Vec<(F, F)>> {
    if !(response_fwhm_m >= F::zero()) || !response_fwhm_m.is_finite() {
        return Err(Error::invalid("response fwhm must be non-negative and finite"));
    }
    if response_fwhm_m.is_zero() {
        return Ok(spectrum.to_vec());
    }
    let axis: Vec<F> = spectrum.iter().map(|p| p.0).collect();
    let step = uniform_step(&axis)?;
    let values: Vec<F> = spectrum.iter().map(|p| p.1).collect();
    let (half, weights) = gaussian_kernel(step.abs(), response_fwhm_m);
    let smoothed = convolve_values(&values, half, &weights);
    Ok(axis.into_iter().zip(smoothed).collect())
}

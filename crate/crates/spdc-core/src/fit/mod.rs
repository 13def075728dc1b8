//! Model fitting against measured spectra and grids: Gaussian marginals
//! with Poisson weighting, instrument-response convolution, and the 1-D
//! bounded search for the effective interaction length.

mod convolve;
mod gaussian;
mod length;

pub use convolve::convolve_instrument_response;
pub use gaussian::{fit_gaussian, GaussianFitResult};
pub use length::{fit_effective_length, fit_effective_length_with, LengthFitOptions, LengthFitResult};

use crate::Scalar;

/// 2 sqrt(2 ln 2), the ratio between a Gaussian's FWHM and its standard
/// deviation.
pub fn fwhm_sigma_ratio<F: Scalar>() -> F {
    let two = F::lit(2.0);
    two * (two * F::lit(core::f64::consts::LN_2)).sqrt()
}

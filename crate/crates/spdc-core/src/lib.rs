//! Design and analysis toolkit for pulsed, quasi-phase-matched photon-pair
//! sources in periodically poled waveguides.
//!
//! The crate covers the full chain from material dispersion to detector
//! statistics:
//!
//! * [`dispersion`]: temperature-dependent refractive indices from
//!   configurable Sellmeier coefficient sets, plus thermal expansion of
//!   macroscopic lengths down to cryogenic temperatures.
//! * [`phasematch`]: the quasi-phase-matching momentum balance, tuning-curve
//!   sweeps and the inverse poling-period design problem.
//! * [`jsa`]: joint spectral intensity of the photon pair on a wavelength
//!   grid, built from the pump envelope and the sinc phase-matching function.
//! * [`fit`]: Gaussian fits of marginal spectra with Poisson weighting,
//!   instrument-response convolution and the one-parameter effective-length
//!   fit against a measured joint spectrum.
//! * [`counts`]: time-tag coincidence counting and the standard pair-source
//!   metrics (brightness, Klyshko efficiency, CAR, heralded g2) with
//!   first-order Poisson error propagation.
//!
//! The wave-optics half is generic over the floating scalar through
//! [`Scalar`]; `f64` is the default via [`Real`]. Tag processing and file
//! formats are concrete (integer ticks, `f64` rates).

pub mod config;
pub mod constants;
pub mod counts;
pub mod dispersion;
pub mod error;
pub mod fit;
pub mod io;
pub mod jsa;
pub mod phasematch;
mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default concrete scalar for toolkit entry points.
pub type Real = f64;

/// Crystal specification at the default scalar.
pub type Crystal = phasematch::CrystalSpec<Real>;
/// Pump specification at the default scalar.
pub type Pump = jsa::PumpSpec<Real>;
/// Joint spectral intensity grid at the default scalar.
pub type Grid = jsa::JsiGrid<Real>;

use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Toolkit error type. Messages are stable surface: the command-line tool
/// prints them verbatim and integration tests match on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("wavelength {wavelength_m:e} m is outside the validity window [{min_m:e}, {max_m:e}] m of dispersion model '{model}'")]
    WavelengthOutOfWindow {
        model: String,
        wavelength_m: f64,
        min_m: f64,
        max_m: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no phase matching in window: {0}")]
    NoPhasematch(String),

    #[error("interaction not quasi-phase-matchable with this sign convention: dispersive term {term_per_m:e} 1/m must be positive and bounded away from zero")]
    NotQuasiPhasematchable { term_per_m: f64 },

    #[error("fit failed: {reason}; best iterate after {iterations} iterations: center {center_m:e} m, fwhm {fwhm_m:e} m, amplitude {amplitude:e}, residual rms {residual_rms:e}")]
    FitFailure {
        reason: String,
        iterations: usize,
        center_m: f64,
        fwhm_m: f64,
        amplitude: f64,
        residual_rms: f64,
    },

    #[error("insensitive fit: objective varies by only {variation:e} across the length grid; the measured grid does not constrain the interaction length")]
    InsensitiveFit { variation: f64 },

    #[error("tag stream on channel {channel} is not sorted: tick at index {index} precedes its predecessor")]
    UnsortedTags { channel: u8, index: usize },

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

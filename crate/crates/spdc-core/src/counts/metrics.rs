//! Source metrics on singles and coincidence counts, with first-order
//! Poisson error propagation. Counts on different channels are treated as
//! independent; the covariance between a coincidence count and its own
//! singles is neglected, which is the usual low-efficiency approximation.

use super::{CoincidenceStats, RateWithError, ZERO_COUNT_UPPER_BOUND};
use crate::jsa::PumpSpec;
use crate::{Error, Result};

/// A dimensionless (or per-unit) metric with its propagated standard
/// error. `one_sided` marks errors built from a zero-count upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measured {
    pub value: f64,
    pub error: f64,
    pub one_sided: bool,
}

fn count_sigma(n: u64) -> (f64, bool) {
    if n == 0 {
        (ZERO_COUNT_UPPER_BOUND, true)
    } else {
        ((n as f64).sqrt(), false)
    }
}

/// Heralding efficiency estimator N_si / sqrt(N_s N_i).
pub fn klyshko_from_counts(n_si: u64, n_s: u64, n_i: u64) -> Result<Measured> {
    if n_s == 0 || n_i == 0 {
        return Err(Error::UndefinedMetric(
            "klyshko efficiency needs positive singles counts in both arms".into(),
        ));
    }
    let (ns, ni, nsi) = (n_s as f64, n_i as f64, n_si as f64);
    let geometric = (ns * ni).sqrt();
    let value = nsi / geometric;
    let (s_si, one_sided) = count_sigma(n_si);
    let d_si = s_si / geometric;
    let d_s = value / (2.0 * ns) * ns.sqrt();
    let d_i = value / (2.0 * ni) * ni.sqrt();
    Ok(Measured {
        value,
        error: (d_si * d_si + d_s * d_s + d_i * d_i).sqrt(),
        one_sided,
    })
}

/// Coincidence-to-accidental ratio N_si R D / (N_s N_i) for a pulsed
/// source at repetition rate R counted over duration D.
pub fn car_from_counts(
    n_si: u64,
    n_s: u64,
    n_i: u64,
    repetition_rate_hz: f64,
    duration_s: f64,
) -> Result<Measured> {
    if n_s == 0 || n_i == 0 {
        return Err(Error::UndefinedMetric(
            "CAR needs positive singles counts in both arms".into(),
        ));
    }
    if !(repetition_rate_hz > 0.0 && repetition_rate_hz.is_finite()) {
        return Err(Error::invalid("repetition rate must be positive"));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::invalid("duration must be positive"));
    }
    let (ns, ni, nsi) = (n_s as f64, n_i as f64, n_si as f64);
    let scale = repetition_rate_hz * duration_s / (ns * ni);
    let value = nsi * scale;
    let (s_si, one_sided) = count_sigma(n_si);
    let d_si = s_si * scale;
    let d_s = value / ns * ns.sqrt();
    let d_i = value / ni * ni.sqrt();
    Ok(Measured {
        value,
        error: (d_si * d_si + d_s * d_s + d_i * d_i).sqrt(),
        one_sided,
    })
}

/// Heralded second-order autocorrelation at zero delay,
/// N_s1s2i N_i / (N_s1i N_s2i).
pub fn g2_from_counts(n_threefold: u64, n_i: u64, n_s1i: u64, n_s2i: u64) -> Result<Measured> {
    if n_s1i == 0 || n_s2i == 0 {
        return Err(Error::UndefinedMetric(
            "heralded g2 needs heralded counts in both splitter arms".into(),
        ));
    }
    if n_i == 0 {
        return Err(Error::UndefinedMetric(
            "heralded g2 needs a positive idler singles count".into(),
        ));
    }
    let (n3, ni, n1, n2) = (n_threefold as f64, n_i as f64, n_s1i as f64, n_s2i as f64);
    let value = n3 * ni / (n1 * n2);
    let (s3, one_sided) = count_sigma(n_threefold);
    let d3 = ni / (n1 * n2) * s3;
    let di = n3 / (n1 * n2) * ni.sqrt();
    let d1 = value / n1 * n1.sqrt();
    let d2 = value / n2 * n2.sqrt();
    Ok(Measured {
        value,
        error: (d3 * d3 + di * di + d1 * d1 + d2 * d2).sqrt(),
        one_sided,
    })
}

/// Detected pairs per second and per milliwatt of transmitted pump power.
pub fn brightness_from_counts(n_si: u64, duration_s: f64, power_mw: f64) -> Result<Measured> {
    if !(power_mw > 0.0 && power_mw.is_finite()) {
        return Err(Error::invalid("pump power must be positive"));
    }
    if !(duration_s > 0.0 && duration_s.is_finite()) {
        return Err(Error::invalid("duration must be positive"));
    }
    let value = (n_si as f64) / duration_s / power_mw;
    let (s, one_sided) = count_sigma(n_si);
    Ok(Measured {
        value,
        error: s / duration_s / power_mw,
        one_sided,
    })
}

/// The two-detector layout behind the 2-channel metrics: (signal singles,
/// idler singles, signal-idler pairs), with the lower channel id read as
/// the signal arm.
fn two_detector_layout(
    stats: &CoincidenceStats,
) -> Result<(RateWithError, RateWithError, RateWithError)> {
    let channels = stats.channels();
    if channels.len() != 2 {
        return Err(Error::UndefinedMetric(format!(
            "metric needs the two-detector signal/idler layout, got {} channels",
            channels.len()
        )));
    }
    let (s, i) = (channels[0], channels[1]);
    let pair = stats.coincidences_for(&[s, i]).ok_or_else(|| {
        Error::UndefinedMetric(format!(
            "no coincidence record for channels {s} and {i}; count that combination first"
        ))
    })?;
    Ok((
        *stats.singles_for(s).unwrap(),
        *stats.singles_for(i).unwrap(),
        *pair,
    ))
}

/// The splitter layout behind the heralded g2: channels sorted ascending
/// are (signal arm 1, signal arm 2, idler).
fn splitter_layout(
    stats: &CoincidenceStats,
) -> Result<(RateWithError, RateWithError, RateWithError, RateWithError)> {
    let channels = stats.channels();
    if channels.len() != 3 {
        return Err(Error::UndefinedMetric(format!(
            "heralded g2 needs the split-signal three-detector layout, got {} channels",
            channels.len()
        )));
    }
    let (s1, s2, i) = (channels[0], channels[1], channels[2]);
    let need = |chs: &[u8]| {
        stats.coincidences_for(chs).copied().ok_or_else(|| {
            Error::UndefinedMetric(format!(
                "no coincidence record for channels {chs:?}; count that combination first"
            ))
        })
    };
    Ok((
        *stats.singles_for(i).unwrap(),
        need(&[s1, i])?,
        need(&[s2, i])?,
        need(&[s1, s2, i])?,
    ))
}

pub fn klyshko_efficiency(stats: &CoincidenceStats) -> Result<Measured> {
    let (s, i, pair) = two_detector_layout(stats)?;
    klyshko_from_counts(pair.counts, s.counts, i.counts)
}

pub fn car(stats: &CoincidenceStats, pump: &PumpSpec<f64>) -> Result<Measured> {
    let (s, i, pair) = two_detector_layout(stats)?;
    car_from_counts(
        pair.counts,
        s.counts,
        i.counts,
        pump.repetition_rate_hz,
        stats.duration_s,
    )
}

pub fn brightness(stats: &CoincidenceStats, pump: &PumpSpec<f64>) -> Result<Measured> {
    let (_, _, pair) = two_detector_layout(stats)?;
    brightness_from_counts(pair.counts, stats.duration_s, pump.transmitted_power_w * 1e3)
}

pub fn heralded_g2(stats: &CoincidenceStats) -> Result<Measured> {
    let (idler, s1i, s2i, threefold) = splitter_layout(stats)?;
    g2_from_counts(threefold.counts, idler.counts, s1i.counts, s2i.counts)
}

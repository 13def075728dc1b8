//! Time-tag processing: windowed coincidence counting, the source metrics
//! built on top of singles and coincidence counts, and a seeded tag-stream
//! simulator used as a statistical oracle. Everything here is concrete in
//! u64 ticks and f64 rates; there is nothing to gain from generic scalars
//! on the counting side.

mod coincidence;
mod metrics;
mod simulate;
mod tags;

pub use coincidence::{
    count_coincidences, count_pairs_reference, count_triples_reference, CoincidenceStats,
};
pub use metrics::{
    brightness, brightness_from_counts, car, car_from_counts, g2_from_counts, heralded_g2,
    klyshko_efficiency, klyshko_from_counts, Measured,
};
pub use simulate::{simulate_tag_source, PairStatistics, SourceSim};
pub use tags::TagStream;

/// 68.27% one-sided Poisson upper bound on the mean for zero observed
/// counts, -ln(0.31731).
pub const ZERO_COUNT_UPPER_BOUND: f64 = 1.147876064974066;

/// A counted quantity turned into a rate. `error` is the Poisson standard
/// error of the rate; for zero counts it carries the one-sided upper bound
/// instead and `one_sided` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateWithError {
    pub rate_hz: f64,
    pub error_hz: f64,
    pub counts: u64,
    pub one_sided: bool,
}

impl RateWithError {
    pub fn from_counts(counts: u64, duration_s: f64) -> Self {
        let n = counts as f64;
        if counts == 0 {
            RateWithError {
                rate_hz: 0.0,
                error_hz: ZERO_COUNT_UPPER_BOUND / duration_s,
                counts,
                one_sided: true,
            }
        } else {
            RateWithError {
                rate_hz: n / duration_s,
                error_hz: n.sqrt() / duration_s,
                counts,
                one_sided: false,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_count_bound_value() {
        assert!((ZERO_COUNT_UPPER_BOUND - -(0.31731f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn rate_from_counts() {
        let r = RateWithError::from_counts(400, 8.0);
        assert_eq!(r.rate_hz, 50.0);
        assert_eq!(r.error_hz, 2.5);
        assert!(!r.one_sided);
        let z = RateWithError::from_counts(0, 2.0);
        assert_eq!(z.rate_hz, 0.0);
        assert!(z.one_sided);
        assert!((z.error_hz - ZERO_COUNT_UPPER_BOUND / 2.0).abs() < 1e-18);
    }
}

//! Seeded Monte-Carlo tag-stream generator. Serves as the statistical
//! oracle for the metric estimators: the analytic expectations of the
//! generated streams are known, so estimator checks reduce to comparing
//! against closed forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};

use super::TagStream;
use crate::{Error, Result};

/// Photon-pair number statistics per pump pulse. The mean is taken from
/// [`SourceSim::mean_pairs_per_pulse`] in all three cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatistics {
    /// n ~ Poisson(mu). The multi-pair background of a real SPDC source
    /// pumped far below saturation.
    Poisson,
    /// Thermal (geometric) number distribution, P(n) = mu^n/(1+mu)^(n+1).
    /// Single-mode SPDC statistics.
    Thermal,
    /// At most one pair per pulse, generated with probability
    /// `mean_pairs_per_pulse`. An idealized heralded single-photon source.
    SinglePair,
}

/// Source and detection model for the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SourceSim {
    pub statistics: PairStatistics,
    pub mean_pairs_per_pulse: f64,
    pub efficiency_signal: f64,
    pub efficiency_idler: f64,
    /// Dark count rate per signal detector [1/s]. With the splitter on,
    /// each arm gets this rate independently.
    pub dark_rate_signal_hz: f64,
    pub dark_rate_idler_hz: f64,
    pub repetition_rate_hz: f64,
    pub duration_s: f64,
    pub resolution_s: f64,
    /// Split the signal arm 50:50 onto two detectors (channels 0 and 1,
    /// idler on 2). Without it the channels are signal 0, idler 1.
    pub splitter: bool,
    pub seed: u64,
}

impl SourceSim {
    fn validate(&self) -> Result<()> {
        if !(self.mean_pairs_per_pulse >= 0.0 && self.mean_pairs_per_pulse.is_finite()) {
            return Err(Error::invalid("mean pairs per pulse must be non-negative"));
        }
        if self.statistics == PairStatistics::SinglePair && self.mean_pairs_per_pulse > 1.0 {
            return Err(Error::invalid(
                "single-pair statistics needs a generation probability at most 1",
            ));
        }
        for (name, eta) in [
            ("signal", self.efficiency_signal),
            ("idler", self.efficiency_idler),
        ] {
            if !(0.0..=1.0).contains(&eta) || !eta.is_finite() {
                return Err(Error::invalid(format!(
                    "{name} efficiency must lie in [0, 1]"
                )));
            }
        }
        for (name, rate) in [
            ("signal", self.dark_rate_signal_hz),
            ("idler", self.dark_rate_idler_hz),
        ] {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(Error::invalid(format!(
                    "{name} dark rate must be non-negative"
                )));
            }
        }
        if !(self.repetition_rate_hz > 0.0 && self.repetition_rate_hz.is_finite()) {
            return Err(Error::invalid("repetition rate must be positive"));
        }
        if !(self.duration_s > 0.0 && self.duration_s.is_finite()) {
            return Err(Error::invalid("duration must be positive"));
        }
        if !(self.resolution_s > 0.0 && self.resolution_s.is_finite()) {
            return Err(Error::invalid("tick resolution must be positive"));
        }
        Ok(())
    }
}

/// Inverse-CDF Poisson draw; cheap for the per-pulse means used here.
fn draw_poisson(rng: &mut ChaCha12Rng, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let u: f64 = rng.gen();
    let mut p = (-mean).exp();
    let mut cum = p;
    let mut n = 0u64;
    while u >= cum && n < 10_000 {
        n += 1;
        p *= mean / n as f64;
        cum += p;
    }
    n
}

fn draw_pairs(rng: &mut ChaCha12Rng, statistics: PairStatistics, mean: f64) -> u64 {
    match statistics {
        PairStatistics::Poisson => draw_poisson(rng, mean),
        PairStatistics::Thermal => {
            if mean <= 0.0 {
                return 0;
            }
            // P(N >= n) = (mu/(1+mu))^n; invert one uniform.
            let u: f64 = rng.gen();
            let ratio = mean / (1.0 + mean);
            let n = (1.0 - u).ln() / ratio.ln();
            if n.is_finite() && n >= 0.0 {
                n.floor() as u64
            } else {
                0
            }
        }
        PairStatistics::SinglePair => {
            let u: f64 = rng.gen();
            u64::from(u < mean)
        }
    }
}

/// Generate detector tag streams for a pulsed pair source.
///
/// Per pulse, the draw order is fixed: the pair number first, then for each
/// pair the signal detection, the idler detection and (with the splitter
/// on) the routing coin. Dark counts follow after all pulses, channel by
/// channel in ascending order: a Poisson total, then one uniform tick per
/// count. The fixed order is what makes a seed fully determine the output.
pub fn simulate_tag_source(sim: &SourceSim) -> Result<Vec<TagStream>> {
    sim.validate()?;
    let mut rng = ChaCha12Rng::seed_from_u64(sim.seed);

    let n_pulses = (sim.duration_s * sim.repetition_rate_hz + 1e-9).floor() as u64;
    let ticks_per_pulse = 1.0 / sim.repetition_rate_hz / sim.resolution_s;
    let max_tick = (sim.duration_s / sim.resolution_s + 1e-9).floor() as u64;

    let n_channels = if sim.splitter { 3 } else { 2 };
    let mut ticks: Vec<Vec<u64>> = vec![Vec::new(); n_channels];
    let idler_channel = n_channels - 1;

    for pulse in 0..n_pulses {
        let n = draw_pairs(&mut rng, sim.statistics, sim.mean_pairs_per_pulse);
        if n == 0 {
            continue;
        }
        let tick = (pulse as f64 * ticks_per_pulse).round() as u64;
        if tick > max_tick {
            break;
        }
        for _ in 0..n {
            let detect_signal = rng.gen::<f64>() < sim.efficiency_signal;
            let detect_idler = rng.gen::<f64>() < sim.efficiency_idler;
            if sim.splitter {
                let to_first: bool = rng.gen::<f64>() < 0.5;
                if detect_signal {
                    ticks[usize::from(!to_first)].push(tick);
                }
            } else if detect_signal {
                ticks[0].push(tick);
            }
            if detect_idler {
                ticks[idler_channel].push(tick);
            }
        }
    }

    for channel in 0..n_channels {
        let rate = if channel == idler_channel {
            sim.dark_rate_idler_hz
        } else {
            sim.dark_rate_signal_hz
        };
        let mean = rate * sim.duration_s;
        if mean > 0.0 {
            let n_dark = Poisson::new(mean)
                .map_err(|e| Error::invalid(format!("dark count mean invalid: {e}")))?
                .sample(&mut rng) as u64;
            for _ in 0..n_dark {
                ticks[channel].push(rng.gen_range(0..=max_tick));
            }
            ticks[channel].sort_unstable();
        }
    }

    ticks
        .into_iter()
        .enumerate()
        .map(|(c, t)| TagStream::new(c as u8, sim.resolution_s, sim.duration_s, t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::{count_coincidences, klyshko_efficiency};

    fn base() -> SourceSim {
        SourceSim {
            statistics: PairStatistics::SinglePair,
            mean_pairs_per_pulse: 1.0,
            efficiency_signal: 1.0,
            efficiency_idler: 1.0,
            dark_rate_signal_hz: 0.0,
            dark_rate_idler_hz: 0.0,
            repetition_rate_hz: 1.0e6,
            duration_s: 1e-3,
            resolution_s: 1e-12,
            splitter: false,
            seed: 7,
        }
    }

    #[test]
    fn ideal_source_is_fully_correlated() {
        let streams = simulate_tag_source(&base()).unwrap();
        let n_pulses = 1000;
        assert_eq!(streams[0].len(), n_pulses);
        assert_eq!(streams[0].ticks(), streams[1].ticks());
        let stats = count_coincidences(&streams, 3.125e-9, &[vec![0, 1]]).unwrap();
        assert_eq!(stats.coincidences_for(&[0, 1]).unwrap().counts, n_pulses as u64);
        let k = klyshko_efficiency(&stats).unwrap();
        assert!((k.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_efficiency_gives_empty_streams() {
        let mut sim = base();
        sim.efficiency_signal = 0.0;
        sim.efficiency_idler = 0.0;
        let streams = simulate_tag_source(&sim).unwrap();
        assert!(streams.iter().all(|s| s.is_empty()));
    }

    #[test]
    fn seeded_repetition_is_bitwise_identical() {
        let mut sim = base();
        sim.statistics = PairStatistics::Poisson;
        sim.mean_pairs_per_pulse = 0.2;
        sim.efficiency_signal = 0.4;
        sim.efficiency_idler = 0.7;
        sim.dark_rate_signal_hz = 2000.0;
        sim.dark_rate_idler_hz = 500.0;
        sim.splitter = true;
        let a = simulate_tag_source(&sim).unwrap();
        let b = simulate_tag_source(&sim).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn splitter_channel_layout() {
        let mut sim = base();
        sim.splitter = true;
        let streams = simulate_tag_source(&sim).unwrap();
        assert_eq!(streams.len(), 3);
        assert_eq!(streams[2].len(), 1000);
        assert_eq!(streams[0].len() + streams[1].len(), 1000);
    }

    #[test]
    fn invalid_efficiency_rejected() {
        let mut sim = base();
        sim.efficiency_signal = 1.5;
        assert!(simulate_tag_source(&sim).is_err());
    }
}

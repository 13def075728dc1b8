//! Windowed coincidence counting with greedy earliest-first one-to-one
//! matching, plus quadratic reference matchers used as cross-check oracles.

use std::collections::BTreeMap;

use super::{RateWithError, TagStream};
use crate::{Error, Result};

/// Singles and coincidence rates for one counting pass. Channel order in
/// `singles` is ascending; `coincidences` parallels the requested
/// combinations (each recorded with its channels sorted ascending).
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceStats {
    pub window_s: f64,
    pub duration_s: f64,
    pub singles: Vec<(u8, RateWithError)>,
    pub coincidences: Vec<(Vec<u8>, RateWithError)>,
}

impl CoincidenceStats {
    pub fn singles_for(&self, channel: u8) -> Option<&RateWithError> {
        self.singles
            .iter()
            .find(|(c, _)| *c == channel)
            .map(|(_, r)| r)
    }

    /// Coincidence record for a channel set, order-insensitive.
    pub fn coincidences_for(&self, channels: &[u8]) -> Option<&RateWithError> {
        let mut key = channels.to_vec();
        key.sort_unstable();
        self.coincidences
            .iter()
            .find(|(c, _)| *c == key)
            .map(|(_, r)| r)
    }

    pub(crate) fn channels(&self) -> Vec<u8> {
        self.singles.iter().map(|(c, _)| *c).collect()
    }
}

/// Greedy earliest-first one-to-one pair matching: walk both streams in
/// time order, match the current heads when they fall within the window,
/// otherwise discard the earlier head. Each tag joins at most one pair.
fn count_pairs(a: &[u64], b: &[u64], window_ticks: u64) -> u64 {
    let w = window_ticks as u128;
    let mut i = 0usize;
    let mut j = 0usize;
    let mut count = 0u64;
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i] as u128, b[j] as u128);
        if x + w < y {
            i += 1;
        } else if y + w < x {
            j += 1;
        } else {
            count += 1;
            i += 1;
            j += 1;
        }
    }
    count
}

/// Greedy one-to-one triple matching: when the three heads all sit within
/// one window of each other they form a threefold; otherwise the earliest
/// head cannot be part of any future triple and is discarded.
fn count_triples(a: &[u64], b: &[u64], c: &[u64], window_ticks: u64) -> u64 {
    let w = window_ticks as u128;
    let mut i = 0usize;
    let mut j = 0usize;
    let mut k = 0usize;
    let mut count = 0u64;
    while i < a.len() && j < b.len() && k < c.len() {
        let (x, y, z) = (a[i] as u128, b[j] as u128, c[k] as u128);
        let lo = x.min(y).min(z);
        let hi = x.max(y).max(z);
        if hi - lo <= w {
            count += 1;
            i += 1;
            j += 1;
            k += 1;
        } else if x == lo {
            i += 1;
        } else if y == lo {
            j += 1;
        } else {
            k += 1;
        }
    }
    count
}

/// O(n^2) reference pair matcher: for each tag of `a` in time order, claim
/// the earliest not-yet-claimed tag of `b` within the window. Kept separate
/// from the production matcher so the two can check each other.
pub fn count_pairs_reference(a: &[u64], b: &[u64], window_ticks: u64) -> u64 {
    let w = window_ticks as i128;
    let mut used = vec![false; b.len()];
    let mut count = 0u64;
    for &x in a {
        for (j, &y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = x as i128 - y as i128;
            if d.abs() <= w {
                used[j] = true;
                count += 1;
                break;
            }
            if (y as i128) > x as i128 + w {
                break;
            }
        }
    }
    count
}

/// Quadratic reference triple matcher: repeatedly look at the earliest
/// unclaimed tag of each stream; if the three span at most one window they
/// form a threefold, otherwise the globally earliest of them is discarded.
pub fn count_triples_reference(a: &[u64], b: &[u64], c: &[u64], window_ticks: u64) -> u64 {
    let w = window_ticks as u128;
    let mut used = [vec![false; a.len()], vec![false; b.len()], vec![false; c.len()]];
    let streams = [a, b, c];
    let mut count = 0u64;
    loop {
        let mut heads = [None::<usize>; 3];
        for s in 0..3 {
            heads[s] = (0..streams[s].len()).find(|&idx| !used[s][idx]);
        }
        let (Some(ia), Some(ib), Some(ic)) = (heads[0], heads[1], heads[2]) else {
            break;
        };
        let t = [
            streams[0][ia] as u128,
            streams[1][ib] as u128,
            streams[2][ic] as u128,
        ];
        let lo = t[0].min(t[1]).min(t[2]);
        let hi = t[0].max(t[1]).max(t[2]);
        if hi - lo <= w {
            used[0][ia] = true;
            used[1][ib] = true;
            used[2][ic] = true;
            count += 1;
        } else {
            let idx = [ia, ib, ic];
            let earliest = (0..3).fold(0, |best, s| if t[s] < t[best] { s } else { best });
            used[earliest][idx[earliest]] = true;
        }
    }
    count
}

/// Count singles and the requested coincidence combinations over a set of
/// tag streams sharing one clock. Combinations are pairs or triples of
/// channel ids; matching within each combination is greedy earliest-first
/// and one-to-one, so a coincidence count never exceeds any of its
/// constituent singles counts.
pub fn count_coincidences(
    streams: &[TagStream],
    window_s: f64,
    combinations: &[Vec<u8>],
) -> Result<CoincidenceStats> {
    if streams.len() < 2 {
        return Err(Error::invalid("coincidence counting needs at least 2 streams"));
    }
    let resolution = streams[0].resolution_s();
    let duration = streams[0].duration_s();
    for s in streams {
        if s.resolution_s() != resolution {
            return Err(Error::invalid(
                "streams must share one tick resolution",
            ));
        }
        if s.duration_s() != duration {
            return Err(Error::invalid(
                "streams must share one acquisition duration",
            ));
        }
    }
    if !(window_s > 0.0 && window_s.is_finite()) {
        return Err(Error::invalid("coincidence window must be positive"));
    }
    let window_ticks = (window_s / resolution + 1e-9).floor() as u64;
    if window_ticks < 1 {
        return Err(Error::invalid(format!(
            "coincidence window {window_s:e} s is below one tick ({resolution:e} s)"
        )));
    }

    let mut by_channel: BTreeMap<u8, &TagStream> = BTreeMap::new();
    for s in streams {
        if by_channel.insert(s.channel(), s).is_some() {
            return Err(Error::invalid(format!(
                "channel id {} appears in more than one stream",
                s.channel()
            )));
        }
    }

    let singles = by_channel
        .iter()
        .map(|(c, s)| (*c, RateWithError::from_counts(s.len() as u64, duration)))
        .collect();

    let mut coincidences = Vec::with_capacity(combinations.len());
    for combo in combinations {
        let mut key = combo.clone();
        key.sort_unstable();
        key.dedup();
        if key.len() != combo.len() {
            return Err(Error::invalid(format!(
                "combination {combo:?} repeats a channel"
            )));
        }
        let members: Vec<&TagStream> = key
            .iter()
            .map(|c| {
                by_channel.get(c).copied().ok_or_else(|| {
                    Error::invalid(format!("combination references unknown channel {c}"))
                })
            })
            .collect::<Result<_>>()?;
        let counts = match members.as_slice() {
            [a, b] => count_pairs(a.ticks(), b.ticks(), window_ticks),
            [a, b, c] => count_triples(a.ticks(), b.ticks(), c.ticks(), window_ticks),
            _ => {
                return Err(Error::invalid(format!(
                    "combinations must have 2 or 3 channels, got {}",
                    key.len()
                )))
            }
        };
        coincidences.push((key, RateWithError::from_counts(counts, duration)));
    }

    Ok(CoincidenceStats {
        window_s,
        duration_s: duration,
        singles,
        coincidences,
    })
}

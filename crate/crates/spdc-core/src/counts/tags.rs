//! Detector click records from a time-tagging module.

use crate::{Error, Result};

/// One detector channel's clicks: sorted integer ticks at a fixed tick
/// resolution, recorded over a known acquisition span. Duplicate ticks are
/// allowed (coincident clicks register individually).
#[derive(Debug, Clone, PartialEq)]
pub struct TagStream {
    channel: u8,
    resolution_s: f64,
    duration_s: f64,
    ticks: Vec<u64>,
}

impl TagStream {
    pub fn new(channel: u8, resolution_s: f64, duration_s: f64, ticks: Vec<u64>) -> Result<Self> {
        if !(resolution_s > 0.0 && resolution_s.is_finite()) {
            return Err(Error::invalid("tick resolution must be positive"));
        }
        if !(duration_s > 0.0 && duration_s.is_finite()) {
            return Err(Error::invalid("acquisition duration must be positive"));
        }
        for (index, pair) in ticks.windows(2).enumerate() {
            if pair[1] < pair[0] {
                return Err(Error::UnsortedTags {
                    channel,
                    index: index + 1,
                });
            }
        }
        // Integer tick capacity of the acquisition, with a small slack for
        // the floating division.
        let max_tick = (duration_s / resolution_s + 1e-9).floor();
        if let Some(last) = ticks.last() {
            if (*last as f64) > max_tick {
                return Err(Error::invalid(format!(
                    "tick {last} on channel {channel} lies beyond the acquisition duration"
                )));
            }
        }
        Ok(TagStream {
            channel,
            resolution_s,
            duration_s,
            ticks,
        })
    }

    pub fn channel(&self) -> u8 {
        self.channel
    }

    pub fn resolution_s(&self) -> f64 {
        self.resolution_s
    }

    pub fn duration_s(&self) -> f64 {
        self.duration_s
    }

    pub fn ticks(&self) -> &[u64] {
        &self.ticks
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }
}

//! Spectral occupancy of a span input: an ordered set of rectangular channel
//! slabs with launch powers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LoadError {
    #[error("spectral load must contain at least one channel")]
    Empty,
    #[error("channel {index} has non-positive bandwidth {bandwidth_hz}")]
    BadBandwidth { index: usize, bandwidth_hz: f64 },
    #[error("channel {index} has negative power {power_w}")]
    NegativePower { index: usize, power_w: f64 },
    #[error("channels {first} and {second} overlap edge-to-edge")]
    Overlap { first: usize, second: usize },
}

/// One rectangular WDM channel: center frequency relative to the reference
/// carrier, occupied bandwidth, launch power.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Channel {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
    pub power_w: f64,
}

impl Channel {
    pub fn lower_edge(&self) -> f64 {
        self.center_hz - 0.5 * self.bandwidth_hz
    }

    pub fn upper_edge(&self) -> f64 {
        self.center_hz + 0.5 * self.bandwidth_hz
    }

    /// Power spectral density of the rectangular slab (W/Hz).
    pub fn psd(&self) -> f64 {
        self.power_w / self.bandwidth_hz
    }
}

/// Ordered, non-overlapping channel set describing one span's input spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Channel>", into = "Vec<Channel>")]
pub struct SpectralLoad {
    channels: Vec<Channel>,
    total_power_w: f64,
    total_bandwidth_hz: f64,
}

impl SpectralLoad {
    /// Build a load from channels in any order; they are sorted by center
    /// frequency and checked for edge overlap.
    pub fn new(mut channels: Vec<Channel>) -> Result<Self, LoadError> {
        if channels.is_empty() {
            return Err(LoadError::Empty);
        }
        channels.sort_by(|a, b| a.center_hz.total_cmp(&b.center_hz));
        for (i, ch) in channels.iter().enumerate() {
            if ch.bandwidth_hz <= 0.0 {
                return Err(LoadError::BadBandwidth { index: i, bandwidth_hz: ch.bandwidth_hz });
            }
            if ch.power_w < 0.0 {
                return Err(LoadError::NegativePower { index: i, power_w: ch.power_w });
            }
        }
        // A hair of slack absorbs roundoff in grid construction.
        for i in 1..channels.len() {
            let gap = channels[i].lower_edge() - channels[i - 1].upper_edge();
            if gap < -1e-3 * channels[i].bandwidth_hz {
                return Err(LoadError::Overlap { first: i - 1, second: i });
            }
        }
        let total_power_w = channels.iter().map(|c| c.power_w).sum();
        let total_bandwidth_hz =
            channels.last().unwrap().upper_edge() - channels.first().unwrap().lower_edge();
        Ok(SpectralLoad { channels, total_power_w, total_bandwidth_hz })
    }

    /// `n` equal channels on a uniform grid centered on f = 0.
    pub fn uniform_grid(
        n: usize,
        spacing_hz: f64,
        bandwidth_hz: f64,
        power_w: f64,
    ) -> Result<Self, LoadError> {
        let mid = 0.5 * (n as f64 - 1.0);
        SpectralLoad::new(
            (0..n)
                .map(|k| Channel {
                    center_hz: (k as f64 - mid) * spacing_hz,
                    bandwidth_hz,
                    power_w,
                })
                .collect(),
        )
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    /// Total launch power (W).
    pub fn total_power_w(&self) -> f64 {
        self.total_power_w
    }

    /// Edge-to-edge occupied bandwidth (Hz), lowest channel edge to highest.
    pub fn total_bandwidth_hz(&self) -> f64 {
        self.total_bandwidth_hz
    }

    /// Channels carrying power, with their indices.
    pub fn occupied(&self) -> impl Iterator<Item = (usize, &Channel)> {
        self.channels.iter().enumerate().filter(|(_, c)| c.power_w > 0.0)
    }

    /// Replace one channel's power, keeping the cached totals consistent.
    pub fn with_power(&self, index: usize, power_w: f64) -> Result<Self, LoadError> {
        let mut channels = self.channels.clone();
        channels[index].power_w = power_w;
        SpectralLoad::new(channels)
    }
}

impl TryFrom<Vec<Channel>> for SpectralLoad {
    type Error = LoadError;

    fn try_from(channels: Vec<Channel>) -> Result<Self, LoadError> {
        SpectralLoad::new(channels)
    }
}

impl From<SpectralLoad> for Vec<Channel> {
    fn from(load: SpectralLoad) -> Vec<Channel> {
        load.channels
    }
}

//! Simulation configuration and its validity rules.

use isrs_gn_core::SpectralLoad;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SsfmError {
    #[error("n_channels must be at least 1")]
    NoChannels,
    #[error("n_symbols {0} is not a power of two")]
    SymbolsNotPowerOfTwo(usize),
    #[error("samples_per_symbol {0} is not a power of two")]
    OversamplingNotPowerOfTwo(usize),
    #[error("n_symbols {n} exceeds the desk-scale cap {cap}")]
    SymbolCapExceeded { n: usize, cap: usize },
    #[error("simulated band {simulated_hz:.3e} Hz exceeds the desk-scale cap {cap_hz:.3e} Hz")]
    BandwidthCapExceeded { simulated_hz: f64, cap_hz: f64 },
    #[error(
        "occupied band {occupied_hz:.3e} Hz needs a 20% guard inside the \
         {sample_rate_hz:.3e} Hz sampled band"
    )]
    NyquistGuard { occupied_hz: f64, sample_rate_hz: f64 },
    #[error("rrc_rolloff {0} outside (0, 1]")]
    RolloffOutOfRange(f64),
    #[error("n_steps_per_span {0} below the desk-scale minimum of 1000")]
    TooFewSteps(usize),
    #[error("n_realizations must be at least 1")]
    NoRealizations,
    #[error("load carries {got} channels, config expects {expected}")]
    LoadMismatch { expected: usize, got: usize },
    #[error("channel {index} centred at {center_hz:.6e} Hz is off the simulation frequency grid")]
    CarrierOffGrid { index: usize, center_hz: f64 },
    #[error("channel {0} carries no power")]
    UnpoweredChannel(usize),
    #[error("span list is empty")]
    NoSpans,
    #[error("fiber parameters rejected: {0}")]
    BadFiber(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepDistribution {
    /// Step edges uniform in 1 − e^{−αz}: shortest steps at the span input.
    Logarithmic,
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulation {
    /// Circular complex Gaussian symbols, unit mean power.
    Gaussian,
    /// Square 64-QAM, unit mean power.
    Qam64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GainMode {
    /// Per-channel power restored to launch after each span (gain-flattened).
    Gff,
    /// Single scalar gain restoring total power after each span.
    Flat,
    /// No amplification.
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarization {
    /// Independent data on both polarizations, Manakov 8/9 factor.
    Dual,
    /// One polarization carried; the 8/9 factor is kept for comparability.
    Single,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SsfmConfig {
    pub n_channels: usize,
    pub symbol_rate_hz: f64,
    pub channel_spacing_hz: f64,
    pub rrc_rolloff: f64,
    pub n_symbols: usize,
    pub samples_per_symbol: usize,
    pub n_steps_per_span: usize,
    pub step_distribution: StepDistribution,
    pub rng_seed: u64,
    pub modulation: Modulation,
    pub n_realizations: usize,
    pub gain: GainMode,
    pub polarization: Polarization,
    /// Desk-scale cap on the sampled band.
    pub bandwidth_cap_hz: f64,
    /// Desk-scale cap on symbols per realization.
    pub symbol_cap: usize,
    /// Keep the last realization's received symbols in the result.
    pub keep_constellations: bool,
}

impl Default for SsfmConfig {
    fn default() -> Self {
        Self {
            n_channels: 5,
            symbol_rate_hz: 10e9,
            channel_spacing_hz: 12.5e9,
            rrc_rolloff: 1e-4,
            n_symbols: 4096,
            samples_per_symbol: 16,
            n_steps_per_span: 1000,
            step_distribution: StepDistribution::Logarithmic,
            rng_seed: 1,
            modulation: Modulation::Gaussian,
            n_realizations: 4,
            gain: GainMode::Gff,
            polarization: Polarization::Dual,
            bandwidth_cap_hz: 1e12,
            symbol_cap: 1 << 14,
            keep_constellations: false,
        }
    }
}

impl SsfmConfig {
    /// Aggregate sampling rate of the simulated field.
    pub fn sample_rate_hz(&self) -> f64 {
        self.symbol_rate_hz * self.samples_per_symbol as f64
    }

    /// Time samples per realization.
    pub fn fft_size(&self) -> usize {
        self.n_symbols * self.samples_per_symbol
    }

    /// Frequency resolution of the simulation grid.
    pub fn bin_hz(&self) -> f64 {
        self.sample_rate_hz() / self.fft_size() as f64
    }

    /// Band actually occupied by the channel plan, edge to edge.
    pub fn occupied_hz(&self) -> f64 {
        (self.n_channels as f64 - 1.0) * self.channel_spacing_hz
            + self.symbol_rate_hz * (1.0 + self.rrc_rolloff)
    }

    /// Channel carrier relative to band center.
    pub fn carrier_hz(&self, index: usize) -> f64 {
        (index as f64 - 0.5 * (self.n_channels as f64 - 1.0)) * self.channel_spacing_hz
    }

    pub fn validate(&self) -> Result<(), SsfmError> {
        if self.n_channels == 0 {
            return Err(SsfmError::NoChannels);
        }
        if !self.n_symbols.is_power_of_two() {
            return Err(SsfmError::SymbolsNotPowerOfTwo(self.n_symbols));
        }
        if !self.samples_per_symbol.is_power_of_two() {
            return Err(SsfmError::OversamplingNotPowerOfTwo(self.samples_per_symbol));
        }
        if self.n_symbols > self.symbol_cap {
            return Err(SsfmError::SymbolCapExceeded { n: self.n_symbols, cap: self.symbol_cap });
        }
        if !(self.rrc_rolloff > 0.0 && self.rrc_rolloff <= 1.0) {
            return Err(SsfmError::RolloffOutOfRange(self.rrc_rolloff));
        }
        let sample_rate = self.sample_rate_hz();
        if sample_rate > self.bandwidth_cap_hz {
            return Err(SsfmError::BandwidthCapExceeded {
                simulated_hz: sample_rate,
                cap_hz: self.bandwidth_cap_hz,
            });
        }
        if 1.2 * self.occupied_hz() > sample_rate {
            return Err(SsfmError::NyquistGuard {
                occupied_hz: self.occupied_hz(),
                sample_rate_hz: sample_rate,
            });
        }
        if self.n_steps_per_span < 1000 {
            return Err(SsfmError::TooFewSteps(self.n_steps_per_span));
        }
        if self.n_realizations == 0 {
            return Err(SsfmError::NoRealizations);
        }
        Ok(())
    }

    /// Check a launch load against the channel plan: one powered channel per
    /// carrier, each on the frequency grid.
    pub fn validate_load(&self, load: &SpectralLoad) -> Result<(), SsfmError> {
        self.validate()?;
        let chans = load.channels();
        if chans.len() != self.n_channels {
            return Err(SsfmError::LoadMismatch { expected: self.n_channels, got: chans.len() });
        }
        let df = self.bin_hz();
        for (k, ch) in chans.iter().enumerate() {
            let bins = ch.center_hz / df;
            if (bins - bins.round()).abs() > 1e-6 || (ch.center_hz - self.carrier_hz(k)).abs() > 1.0
            {
                return Err(SsfmError::CarrierOffGrid { index: k, center_hz: ch.center_hz });
            }
            if ch.power_w <= 0.0 {
                return Err(SsfmError::UnpoweredChannel(k));
            }
        }
        Ok(())
    }
}

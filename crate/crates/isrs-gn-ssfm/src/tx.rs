//! Transmitter: seeded symbol generation and spectral pulse shaping.
//!
//! Channels are assembled directly on the simulation frequency grid. With
//! `df = symbol_rate / n_symbols`, the spectrum of a symbol train is the
//! length-M symbol DFT tiled across the band, so shaping reduces to one
//! small FFT per channel and polarization plus a windowed copy. The signal
//! is periodic, which makes the raised-cosine Nyquist property exact.

use isrs_gn_core::SpectralLoad;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;

use crate::config::{Modulation, Polarization, SsfmConfig, SsfmError};

/// Per-channel reference symbols, unit mean power per polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSymbols {
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

/// One realization of the aggregate launch field.
#[derive(Debug, Clone)]
pub struct TxFrame {
    pub spec_x: Vec<Complex64>,
    pub spec_y: Vec<Complex64>,
    pub symbols: Vec<ChannelSymbols>,
}

/// Root-raised-cosine amplitude response at baseband frequency `f`.
pub fn rrc_amplitude(f: f64, symbol_rate: f64, rolloff: f64) -> f64 {
    let a = f.abs();
    let inner = 0.5 * symbol_rate * (1.0 - rolloff);
    let outer = 0.5 * symbol_rate * (1.0 + rolloff);
    if a <= inner {
        1.0
    } else if a >= outer {
        0.0
    } else {
        let rc = 0.5
            * (1.0 + (std::f64::consts::PI / (rolloff * symbol_rate) * (a - inner)).cos());
        rc.sqrt()
    }
}

fn draw_symbols(rng: &mut ChaCha8Rng, modulation: Modulation, n: usize) -> Vec<Complex64> {
    match modulation {
        Modulation::Gaussian => (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect(),
        Modulation::Qam64 => {
            // Unit mean power: E[l²] over {±1,±3,±5,±7} is 21, two rails.
            let scale = 1.0 / 42f64.sqrt();
            (0..n)
                .map(|_| {
                    let i = 2 * rng.random_range(0..8i32) - 7;
                    let q = 2 * rng.random_range(0..8i32) - 7;
                    Complex64::new(f64::from(i) * scale, f64::from(q) * scale)
                })
                .collect()
        }
    }
}

/// Build one seeded realization of the launch spectrum for `load`.
///
/// The RNG stream index makes realizations independent while keeping the
/// whole simulation reproducible from `rng_seed`.
pub fn transmit(
    cfg: &SsfmConfig,
    load: &SpectralLoad,
    realization: u64,
) -> Result<TxFrame, SsfmError> {
    cfg.validate_load(load)?;
    let n = cfg.fft_size();
    let m = cfg.n_symbols;
    let df = cfg.bin_hz();
    let mut planner = FftPlanner::new();
    let fft_m = planner.plan_fft_forward(m);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(realization);

    let mut spec_x = vec![Complex64::ZERO; n];
    let mut spec_y = vec![Complex64::ZERO; n];
    let mut symbols = Vec::with_capacity(cfg.n_channels);
    // Baseband window: the shaped spectrum is confined to ±(1+β)Rs/2.
    let half_bins = (0.5 * (1.0 + cfg.rrc_rolloff) * cfg.symbol_rate_hz / df).floor() as i64;

    for ch in load.channels() {
        let carrier_bin = (ch.center_hz / df).round() as i64;
        let p_pol = match cfg.polarization {
            Polarization::Dual => 0.5 * ch.power_w,
            Polarization::Single => ch.power_w,
        };
        let mut per_pol = Vec::new();
        for pol in 0..2 {
            if pol == 1 && cfg.polarization == Polarization::Single {
                per_pol.push(Vec::new());
                break;
            }
            let syms = draw_symbols(&mut rng, cfg.modulation, m);
            let mut tiled = syms.clone();
            fft_m.process(&mut tiled);
            // Mean time power of the shaped channel, by Parseval.
            let mut pw = 0.0;
            for b in -half_bins..=half_bins {
                let s = tiled[b.rem_euclid(m as i64) as usize];
                let h = rrc_amplitude(b as f64 * df, cfg.symbol_rate_hz, cfg.rrc_rolloff);
                pw += s.norm_sqr() * h * h;
            }
            pw /= (n * n) as f64;
            let scale = (p_pol / pw).sqrt();
            let target = if pol == 0 { &mut spec_x } else { &mut spec_y };
            for b in -half_bins..=half_bins {
                let s = tiled[b.rem_euclid(m as i64) as usize];
                let h = rrc_amplitude(b as f64 * df, cfg.symbol_rate_hz, cfg.rrc_rolloff);
                target[(carrier_bin + b).rem_euclid(n as i64) as usize] += s * (h * scale);
            }
            per_pol.push(syms);
        }
        let y = per_pol.pop().unwrap_or_default();
        let x = per_pol.pop().unwrap_or_default();
        symbols.push(ChannelSymbols { x, y });
    }
    Ok(TxFrame { spec_x, spec_y, symbols })
}

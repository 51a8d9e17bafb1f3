//! Receiver chain: dispersion compensation, matched filtering, symbol-rate
//! sampling and least-squares rotation.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::config::{Polarization, SsfmConfig};
use crate::tx::{rrc_amplitude, ChannelSymbols};

/// Accumulated linear metadata of the traversed link.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LinkMeta {
    /// Σ β₂·L over spans (s²).
    pub beta2_length: f64,
    /// Σ β₃·L over spans (s³).
    pub beta3_length: f64,
}

/// One channel's demodulation outcome.
#[derive(Debug, Clone)]
pub struct RxChannel {
    /// E|X|² / E|X − cY|² over both polarizations.
    pub snr: f64,
    /// Σ|X|², for pooling estimates across realizations.
    pub signal_energy: f64,
    /// Σ|X − cY|², same pooling.
    pub error_energy: f64,
    /// Received symbols after the least-squares rotation.
    pub x: Vec<Complex64>,
    pub y: Vec<Complex64>,
}

fn ls_fit(reference: &[Complex64], received: &[Complex64]) -> (Vec<Complex64>, f64, f64) {
    let mut xy = Complex64::ZERO;
    let mut yy = 0.0;
    for (&x, &y) in reference.iter().zip(received) {
        xy += x * y.conj();
        yy += y.norm_sqr();
    }
    let c = if yy > 0.0 { xy / yy } else { Complex64::ZERO };
    let mut sig = 0.0;
    let mut err = 0.0;
    let rotated: Vec<Complex64> = received.iter().map(|&y| c * y).collect();
    for (&x, &ry) in reference.iter().zip(&rotated) {
        sig += x.norm_sqr();
        err += (x - ry).norm_sqr();
    }
    (rotated, sig, err)
}

/// Demodulate every channel of an aggregate received spectrum.
///
/// The reference symbols are the transmitted ones; scaling and common phase
/// are absorbed by the per-polarization least-squares coefficient, so any
/// flat link gain or loss drops out of the SNR.
pub fn receiver(
    spec_x: &[Complex64],
    spec_y: &[Complex64],
    cfg: &SsfmConfig,
    meta: &LinkMeta,
    reference: &[ChannelSymbols],
) -> Vec<RxChannel> {
    let n = cfg.fft_size();
    let m = cfg.n_symbols;
    let df = cfg.bin_hz();
    let mut planner = FftPlanner::new();
    let ifft_m = planner.plan_fft_inverse(m);

    // Electronic dispersion compensation over the whole band.
    let mut cdc_x = spec_x.to_vec();
    let mut cdc_y = spec_y.to_vec();
    for k in 0..n {
        let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
        let w = 2.0 * std::f64::consts::PI * kk * df;
        let phase = -(0.5 * meta.beta2_length * w * w + meta.beta3_length / 6.0 * w * w * w);
        let rot = Complex64::from_polar(1.0, phase);
        cdc_x[k] *= rot;
        cdc_y[k] *= rot;
    }

    let half_bins = (0.5 * (1.0 + cfg.rrc_rolloff) * cfg.symbol_rate_hz / df).floor() as i64;
    let mut out = Vec::with_capacity(reference.len());
    for (k, syms) in reference.iter().enumerate() {
        let carrier_bin = (cfg.carrier_hz(k) / df).round() as i64;
        let mut channel = Vec::new();
        for (pol, (spectrum, tx)) in
            [(&cdc_x, &syms.x), (&cdc_y, &syms.y)].into_iter().enumerate()
        {
            if pol == 1 && cfg.polarization == Polarization::Single {
                channel.push((Vec::new(), 0.0, 0.0));
                break;
            }
            // Matched filter and fold onto the symbol-rate grid: sampling at
            // the symbol rate aliases the band tiles onto one length-M DFT.
            let mut folded = vec![Complex64::ZERO; m];
            for b in -half_bins..=half_bins {
                let h = rrc_amplitude(b as f64 * df, cfg.symbol_rate_hz, cfg.rrc_rolloff);
                let v = spectrum[(carrier_bin + b).rem_euclid(n as i64) as usize];
                folded[b.rem_euclid(m as i64) as usize] += v * h;
            }
            ifft_m.process(&mut folded);
            channel.push(ls_fit(tx, &folded));
        }
        let (y, sig_y, err_y) = channel.pop().unwrap_or((Vec::new(), 0.0, 0.0));
        let (x, sig_x, err_x) = channel.pop().unwrap_or((Vec::new(), 0.0, 0.0));
        let signal_energy = sig_x + sig_y;
        let error_energy = err_x + err_y;
        out.push(RxChannel {
            snr: signal_energy / error_energy,
            signal_energy,
            error_energy,
            x,
            y,
        });
    }
    out
}

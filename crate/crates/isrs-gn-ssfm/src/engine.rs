//! Split-step propagation with ISRS-shaped linear steps.

use isrs_gn_core::raman::{isrs_denominator, isrs_x};
use isrs_gn_core::{Channel, DerivedFiberParams, FiberSpec, SpectralLoad};
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

use crate::config::{GainMode, SsfmConfig, SsfmError, StepDistribution};
use crate::rx::{receiver, LinkMeta};
use crate::tx::{transmit, ChannelSymbols};

/// One linear step of the audit trail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepAudit {
    pub span: usize,
    pub z_end_m: f64,
    pub dz_m: f64,
    /// Mean field power (W) after the step, both polarizations.
    pub mean_power_w: f64,
}

/// Aggregated outcome of all realizations.
#[derive(Debug, Clone)]
pub struct SimResult {
    /// Per-channel SNR pooled over realizations.
    pub snr: Vec<f64>,
    /// Per-channel NLI coefficient 1/(SNR·P²) (1/W²), pooled.
    pub eta: Vec<f64>,
    /// Per-realization η estimates, realization-major.
    pub eta_runs: Vec<Vec<f64>>,
    /// Per-channel band power (W) entering the receiver, last realization.
    pub received_power_w: Vec<f64>,
    /// Received symbols of the last realization, when kept.
    pub constellations: Option<Vec<ChannelSymbols>>,
    /// Step audit of the first realization.
    pub steps: Vec<StepAudit>,
    pub link: LinkMeta,
}

impl SimResult {
    /// Per-channel SNR/η table.
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(w, "channel,snr,snr_db,eta_per_w2,eta_db")?;
        for (k, (&snr, &eta)) in self.snr.iter().zip(&self.eta).enumerate() {
            writeln!(
                w,
                "{k},{snr:.6e},{:.4},{eta:.6e},{:.4}",
                10.0 * snr.log10(),
                10.0 * eta.log10()
            )?;
        }
        Ok(())
    }

    /// Little-endian binary dump of the kept constellations: for each channel
    /// in index order, `n_symbols` complex64 X symbols (f32 re, f32 im)
    /// interleaved with the Y symbols as X₀Y₀X₁Y₁….
    pub fn write_constellations(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        let Some(chans) = &self.constellations else {
            return Ok(());
        };
        for ch in chans {
            let pad = vec![Complex64::ZERO; ch.x.len().saturating_sub(ch.y.len())];
            for (x, y) in ch.x.iter().zip(ch.y.iter().chain(pad.iter())) {
                for v in [x.re as f32, x.im as f32, y.re as f32, y.im as f32] {
                    w.write_all(&v.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }
}

fn step_edges(length: f64, alpha: f64, n: usize, dist: StepDistribution) -> Vec<f64> {
    match dist {
        StepDistribution::Uniform => {
            (0..=n).map(|j| length * j as f64 / n as f64).collect()
        }
        StepDistribution::Logarithmic => {
            let u_full = 1.0 - (-alpha * length).exp();
            let mut edges: Vec<f64> = (0..=n)
                .map(|j| {
                    let u = u_full * j as f64 / n as f64;
                    -(1.0 - u).ln() / alpha
                })
                .collect();
            edges[n] = length;
            edges
        }
    }
}

/// Complex per-bin transfer of the linear evolution from `z0` to `z1`:
/// dispersion phase times the ISRS field loss √(ρ(z1,f)/ρ(z0,f)).
fn fill_linear_factors(
    out: &mut [Complex64],
    freqs: &[f64],
    fiber: &DerivedFiberParams,
    load: &SpectralLoad,
    z0: f64,
    z1: f64,
) {
    let dz = z1 - z0;
    let p_tot = load.total_power_w();
    let x0 = isrs_x(p_tot, fiber.cr, fiber.alpha, z0);
    let x1 = isrs_x(p_tot, fiber.cr, fiber.alpha, z1);
    let flat = ((-fiber.alpha * dz).exp() * isrs_denominator(x0, load)
        / isrs_denominator(x1, load))
    .sqrt();
    let half_dx = 0.5 * (x1 - x0);
    let tau2 = 0.5 * fiber.beta2 * dz;
    let tau3 = fiber.beta3 / 6.0 * dz;
    for (o, &f) in out.iter_mut().zip(freqs) {
        let w = 2.0 * std::f64::consts::PI * f;
        let phase = (tau2 + tau3 * w) * w * w;
        *o = Complex64::from_polar(flat * (-half_dx * f).exp(), phase);
    }
}

/// Apply one linear step (dispersion and ISRS-shaped loss) to a spectrum.
///
/// The power-domain transfer of the step equals ρ(z+dz, f)/ρ(z, f) for the
/// given launch load, so composing sub-steps reproduces one long step.
pub fn isrs_linear_step(
    spectrum: &mut [Complex64],
    freqs: &[f64],
    fiber: &DerivedFiberParams,
    load: &SpectralLoad,
    z_m: f64,
    dz_m: f64,
) {
    let mut factors = vec![Complex64::ZERO; spectrum.len()];
    fill_linear_factors(&mut factors, freqs, fiber, load, z_m, z_m + dz_m);
    for (s, f) in spectrum.iter_mut().zip(&factors) {
        *s *= f;
    }
}

struct Field {
    x: Vec<Complex64>,
    y: Vec<Complex64>,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
    /// True while x/y hold the spectrum; false in the time domain.
    in_freq: bool,
}

impl Field {
    fn new(spec_x: Vec<Complex64>, spec_y: Vec<Complex64>) -> Self {
        let n = spec_x.len();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n);
        let ifft = planner.plan_fft_inverse(n);
        let scratch =
            vec![Complex64::ZERO; fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len())];
        Self { x: spec_x, y: spec_y, fft, ifft, scratch, in_freq: true }
    }

    fn to_time(&mut self) {
        debug_assert!(self.in_freq);
        let n = self.x.len() as f64;
        for buf in [&mut self.x, &mut self.y] {
            self.ifft.process_with_scratch(buf, &mut self.scratch);
            for v in buf.iter_mut() {
                *v /= n;
            }
        }
        self.in_freq = false;
    }

    fn to_freq(&mut self) {
        debug_assert!(!self.in_freq);
        for buf in [&mut self.x, &mut self.y] {
            self.fft.process_with_scratch(buf, &mut self.scratch);
        }
        self.in_freq = true;
    }

    fn apply(&mut self, factors: &[Complex64]) {
        debug_assert!(self.in_freq);
        for buf in [&mut self.x, &mut self.y] {
            for (s, f) in buf.iter_mut().zip(factors) {
                *s *= f;
            }
        }
    }

    /// Kerr rotation over the summed polarization intensity.
    fn kerr(&mut self, gamma_eff: f64, dz: f64) {
        debug_assert!(!self.in_freq);
        for i in 0..self.x.len() {
            let p = self.x[i].norm_sqr() + self.y[i].norm_sqr();
            let rot = Complex64::from_polar(1.0, gamma_eff * p * dz);
            self.x[i] *= rot;
            self.y[i] *= rot;
        }
    }

    /// Mean power (W) from the spectrum, by Parseval.
    fn mean_power(&self) -> f64 {
        debug_assert!(self.in_freq);
        let n2 = (self.x.len() * self.x.len()) as f64;
        self.x.iter().chain(self.y.iter()).map(Complex64::norm_sqr).sum::<f64>() / n2
    }

    /// Power inside [lo, hi) bins (indices on the signed grid, wrapped).
    fn band_power(&self, n: usize, lo: i64, hi: i64) -> f64 {
        let n2 = (n * n) as f64;
        let mut acc = 0.0;
        for b in lo..hi {
            let i = b.rem_euclid(n as i64) as usize;
            acc += self.x[i].norm_sqr() + self.y[i].norm_sqr();
        }
        acc / n2
    }
}

/// Propagate seeded realizations over the span list and demodulate.
pub fn simulate(
    cfg: &SsfmConfig,
    spans: &[FiberSpec],
    load: &SpectralLoad,
) -> Result<SimResult, SsfmError> {
    cfg.validate_load(load)?;
    if spans.is_empty() {
        return Err(SsfmError::NoSpans);
    }
    let fibers = spans
        .iter()
        .map(|s| s.derive().map_err(|e| SsfmError::BadFiber(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;

    let n = cfg.fft_size();
    let df = cfg.bin_hz();
    let freqs: Vec<f64> = (0..n)
        .map(|k| {
            let kk = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
            kk * df
        })
        .collect();
    let link = LinkMeta {
        beta2_length: fibers.iter().map(|f| f.beta2 * f.length).sum(),
        beta3_length: fibers.iter().map(|f| f.beta3 * f.length).sum(),
    };
    // Band ownership for power measurement and gain flattening: each bin
    // belongs to the nearest carrier.
    let bands: Vec<(i64, i64)> = (0..cfg.n_channels)
        .map(|k| {
            let center = (cfg.carrier_hz(k) / df).round() as i64;
            let half = (0.5 * cfg.channel_spacing_hz / df).round() as i64;
            let lo = if k == 0 { -(n as i64) / 2 } else { center - half };
            let hi = if k + 1 == cfg.n_channels { n as i64 / 2 } else { center + half };
            (lo, hi)
        })
        .collect();

    let mut factors = vec![Complex64::ZERO; n];
    let mut steps_audit = Vec::new();
    let mut eta_runs = Vec::with_capacity(cfg.n_realizations);
    let mut signal_energy = vec![0.0; cfg.n_channels];
    let mut error_energy = vec![0.0; cfg.n_channels];
    let mut constellations = None;
    let mut received_power_w = Vec::new();

    for realization in 0..cfg.n_realizations {
        let frame = transmit(cfg, load, realization as u64)?;
        let mut field = Field::new(frame.spec_x, frame.spec_y);
        for (span_idx, fiber) in fibers.iter().enumerate() {
            let gamma_eff = 8.0 / 9.0 * fiber.gamma;
            // The profile follows the power actually entering this span.
            let span_launch: Vec<f64> =
                bands.iter().map(|&(lo, hi)| field.band_power(n, lo, hi)).collect();
            let span_load = SpectralLoad::new(
                load.channels()
                    .iter()
                    .zip(&span_launch)
                    .map(|(c, &p)| Channel { power_w: p, ..*c })
                    .collect(),
            )
            .expect("channel grid is valid by construction");

            let edges = step_edges(fiber.length, fiber.alpha, cfg.n_steps_per_span, cfg.step_distribution);
            if gamma_eff == 0.0 {
                // Linear fiber: the whole span is diagonal in frequency.
                for j in 0..cfg.n_steps_per_span {
                    fill_linear_factors(&mut factors, &freqs, fiber, &span_load, edges[j], edges[j + 1]);
                    field.apply(&factors);
                    if realization == 0 {
                        steps_audit.push(StepAudit {
                            span: span_idx,
                            z_end_m: edges[j + 1],
                            dz_m: edges[j + 1] - edges[j],
                            mean_power_w: field.mean_power(),
                        });
                    }
                }
            } else {
                // Symmetrized split: Kerr rotations act at step midpoints,
                // linear evolution runs midpoint to midpoint.
                let mid = |j: usize| 0.5 * (edges[j] + edges[j + 1]);
                let mut z_from = edges[0];
                for j in 0..cfg.n_steps_per_span {
                    fill_linear_factors(&mut factors, &freqs, fiber, &span_load, z_from, mid(j));
                    field.apply(&factors);
                    field.to_time();
                    field.kerr(gamma_eff, edges[j + 1] - edges[j]);
                    field.to_freq();
                    z_from = mid(j);
                    if realization == 0 {
                        steps_audit.push(StepAudit {
                            span: span_idx,
                            z_end_m: z_from,
                            dz_m: edges[j + 1] - edges[j],
                            mean_power_w: field.mean_power(),
                        });
                    }
                }
                fill_linear_factors(&mut factors, &freqs, fiber, &span_load, z_from, fiber.length);
                field.apply(&factors);
            }

            match cfg.gain {
                GainMode::Off => {}
                GainMode::Flat => {
                    let now = field.mean_power();
                    let want: f64 = span_launch.iter().sum();
                    let g = (want / now).sqrt();
                    for buf in [&mut field.x, &mut field.y] {
                        for v in buf.iter_mut() {
                            *v *= g;
                        }
                    }
                }
                GainMode::Gff => {
                    for (&(lo, hi), target) in bands.iter().zip(load.channels()) {
                        let now = field.band_power(n, lo, hi);
                        let g = (target.power_w / now).sqrt();
                        for b in lo..hi {
                            let i = b.rem_euclid(n as i64) as usize;
                            field.x[i] *= g;
                            field.y[i] *= g;
                        }
                    }
                }
            }
        }

        if realization + 1 == cfg.n_realizations {
            received_power_w =
                bands.iter().map(|&(lo, hi)| field.band_power(n, lo, hi)).collect();
        }
        let rx = receiver(&field.x, &field.y, cfg, &link, &frame.symbols);
        let mut etas = Vec::with_capacity(cfg.n_channels);
        for (k, ch) in rx.iter().enumerate() {
            signal_energy[k] += ch.signal_energy;
            error_energy[k] += ch.error_energy;
            let p = load.channels()[k].power_w;
            etas.push(1.0 / (ch.snr * p * p));
        }
        eta_runs.push(etas);
        if cfg.keep_constellations && realization + 1 == cfg.n_realizations {
            constellations =
                Some(rx.into_iter().map(|c| ChannelSymbols { x: c.x, y: c.y }).collect());
        }
    }

    let snr: Vec<f64> =
        signal_energy.iter().zip(&error_energy).map(|(&s, &e)| s / e).collect();
    let eta: Vec<f64> = snr
        .iter()
        .zip(load.channels())
        .map(|(&snr, ch)| 1.0 / (snr * ch.power_w * ch.power_w))
        .collect();
    Ok(SimResult {
        snr,
        eta,
        eta_runs,
        received_power_w,
        constellations,
        steps: steps_audit,
        link,
    })
}

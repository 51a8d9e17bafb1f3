//! Closed-form SPM and XPM NLI coefficients with first-order ISRS, multi-span
//! accumulation, and SNR assembly.
//!
//! Conventions: η values are in 1/W² and refer to one span unless a span count
//! is applied through [`eta_total`]. `P_nli = η·P_i³`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::load::{Channel, SpectralLoad};
use crate::raman::taylor_t;
use crate::units::DerivedFiberParams;

#[derive(Debug, Error, PartialEq)]
pub enum CfError {
    #[error("channel of interest must carry power for XPM normalization")]
    CoiPowerZero,
    #[error("channel of interest index {0} out of range")]
    BadCoiIndex(usize),
    #[error("interferer coincides with the channel of interest")]
    ZeroSeparation,
}

/// Multi-span SPM accumulation exponent selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpsilonMode {
    /// User-supplied ε.
    Fixed(f64),
    /// Closed-form ε over the channel bandwidth.
    Auto,
    /// ε = 0.
    Incoherent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClosedFormConfig {
    pub epsilon_mode: EpsilonMode,
    /// Below this magnitude of the asinh/atan argument the x→0 series limit
    /// is used instead of the direct quotient.
    pub phi_singularity_eps: f64,
    /// Optional scalar correction applied to XPM terms only (1.0 = none).
    pub modulation_correction: f64,
}

impl Default for ClosedFormConfig {
    fn default() -> Self {
        ClosedFormConfig {
            epsilon_mode: EpsilonMode::Auto,
            phi_singularity_eps: 1e-6,
            modulation_correction: 1.0,
        }
    }
}

/// Per-channel η decomposition for one link evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaBreakdown {
    /// Single-span SPM coefficient (1/W²).
    pub eta_spm: f64,
    /// Single-span XPM coefficient summed over interferers (1/W²).
    pub eta_xpm: f64,
    /// Single-span XPM per interferer, by channel index.
    pub eta_xpm_per_interferer: Vec<(usize, f64)>,
    /// Accumulated η over the reported span count.
    pub eta_total: f64,
    pub epsilon: f64,
    pub n_spans: u32,
}

/// asinh(x)/x, even, finite at 0.
fn asinhc(x: f64, eps: f64) -> f64 {
    if x.abs() < eps {
        1.0 - x * x / 6.0
    } else {
        x.asinh() / x
    }
}

/// atan(x)/x, even, finite at 0.
fn atanc(x: f64, eps: f64) -> f64 {
    if x.abs() < eps {
        1.0 - x * x / 3.0
    } else {
        x.atan() / x
    }
}

/// SPM phase-mismatch coefficient φ_i = 12π²(β₂ + 2πβ₃ f_i), in s²/m·rad².
pub fn phi_spm(f_i: f64, fiber: &DerivedFiberParams) -> f64 {
    12.0 * std::f64::consts::PI.powi(2) * fiber.beta2_eff(2.0 * f_i)
}

/// XPM phase-mismatch coefficient φ_{i,k} = 2π²(f_k−f_i)(β₂ + πβ₃(f_i+f_k)).
pub fn phi_xpm(f_i: f64, f_k: f64, fiber: &DerivedFiberParams) -> f64 {
    2.0 * std::f64::consts::PI.powi(2) * (f_k - f_i) * fiber.beta2_eff(f_i + f_k)
}

/// Closed-form single-span SPM NLI coefficient (1/W²).
pub fn eta_spm_cf(
    f_i: f64,
    b_i: f64,
    fiber: &DerivedFiberParams,
    p_tot: f64,
    cfg: &ClosedFormConfig,
) -> f64 {
    let a = fiber.alpha;
    let phi = phi_spm(f_i, fiber);
    let t = taylor_t(f_i, p_tot, fiber.cr, a);
    let x = b_i * b_i * phi / (16.0 * a);
    let g2 = fiber.gamma * fiber.gamma;
    (16.0 / 27.0) * g2 / (a * a)
        * (std::f64::consts::PI * (t * t - 4.0 / 9.0) / 16.0 * asinhc(x, cfg.phi_singularity_eps)
            + 1.0 / 9.0)
}

/// Closed-form single-span XPM contribution of one interferer (1/W²).
pub fn eta_xpm_pair_cf(
    coi: &Channel,
    inf: &Channel,
    fiber: &DerivedFiberParams,
    p_tot: f64,
    cfg: &ClosedFormConfig,
) -> Result<f64, CfError> {
    if coi.power_w <= 0.0 {
        return Err(CfError::CoiPowerZero);
    }
    if inf.center_hz == coi.center_hz {
        return Err(CfError::ZeroSeparation);
    }
    let a = fiber.alpha;
    let phi = phi_xpm(coi.center_hz, inf.center_hz, fiber);
    let t = taylor_t(inf.center_hz, p_tot, fiber.cr, a);
    let x1 = coi.bandwidth_hz * phi / a;
    let x2 = 0.5 * x1;
    let pr = inf.power_w / coi.power_w;
    let g2 = fiber.gamma * fiber.gamma;
    Ok((32.0 / 27.0) * g2 / a * pr * pr * coi.bandwidth_hz / (a * inf.bandwidth_hz)
        * ((t * t - 1.0) / 3.0 * atanc(x1, cfg.phi_singularity_eps)
            + (4.0 - t * t) / 12.0 * atanc(x2, cfg.phi_singularity_eps)))
}

/// Total closed-form XPM over all powered interferers, with the per-interferer
/// map. The configured modulation correction multiplies every XPM term.
pub fn eta_xpm_total_cf(
    load: &SpectralLoad,
    coi_index: usize,
    fiber: &DerivedFiberParams,
    cfg: &ClosedFormConfig,
) -> Result<(f64, Vec<(usize, f64)>), CfError> {
    let channels = load.channels();
    let coi = channels.get(coi_index).ok_or(CfError::BadCoiIndex(coi_index))?;
    let p_tot = load.total_power_w();
    let mut per = Vec::new();
    let mut sum = 0.0;
    for (k, inf) in channels.iter().enumerate() {
        if k == coi_index || inf.power_w <= 0.0 {
            continue;
        }
        let eta = cfg.modulation_correction * eta_xpm_pair_cf(coi, inf, fiber, p_tot, cfg)?;
        per.push((k, eta));
        sum += eta;
    }
    Ok((sum, per))
}

/// Coherence exponent for SPM accumulation, evaluated over the channel
/// bandwidth. Decays to 0 as the bandwidth grows.
pub fn coherence_epsilon(b_i: f64, fiber: &DerivedFiberParams) -> f64 {
    let a = fiber.alpha;
    let arg = 0.5 * std::f64::consts::PI.powi(2) * fiber.beta2.abs() / a * b_i * b_i;
    0.3 * (1.0 + 6.0 / (a * fiber.length) / arg.asinh()).ln()
}

/// Resolve the configured ε for a channel.
pub fn epsilon_for(cfg: &ClosedFormConfig, b_i: f64, fiber: &DerivedFiberParams) -> f64 {
    match cfg.epsilon_mode {
        EpsilonMode::Fixed(e) => e,
        EpsilonMode::Auto => coherence_epsilon(b_i, fiber),
        EpsilonMode::Incoherent => 0.0,
    }
}

/// Multi-span accumulation: η_SPM·n^{1+ε} + η_XPM·n.
pub fn eta_total(eta_spm: f64, eta_xpm: f64, n_spans: u32, epsilon: f64) -> f64 {
    let n = n_spans as f64;
    eta_spm * n.powf(1.0 + epsilon) + eta_xpm * n
}

/// SNR = P_i/(P_ase + η·P_i³); +∞ when both noise terms vanish.
pub fn snr(p_i: f64, p_ase: f64, eta: f64) -> f64 {
    let denom = p_ase + eta * p_i * p_i * p_i;
    if denom == 0.0 {
        f64::INFINITY
    } else {
        p_i / denom
    }
}

/// Full per-channel closed-form evaluation for one homogeneous-span link.
pub fn eta_breakdown(
    load: &SpectralLoad,
    coi_index: usize,
    fiber: &DerivedFiberParams,
    cfg: &ClosedFormConfig,
    n_spans: u32,
) -> Result<EtaBreakdown, CfError> {
    let coi = load.channels().get(coi_index).ok_or(CfError::BadCoiIndex(coi_index))?;
    let eta_spm = eta_spm_cf(coi.center_hz, coi.bandwidth_hz, fiber, load.total_power_w(), cfg);
    let (eta_xpm, per) = eta_xpm_total_cf(load, coi_index, fiber, cfg)?;
    let epsilon = epsilon_for(cfg, coi.bandwidth_hz, fiber);
    Ok(EtaBreakdown {
        eta_spm,
        eta_xpm,
        eta_xpm_per_interferer: per,
        eta_total: eta_total(eta_spm, eta_xpm, n_spans, epsilon),
        epsilon,
        n_spans,
    })
}

/// Algebraically rearranged forms of the same closed-form coefficients,
/// derived along the first-order-expansion route. They must agree with the
/// primary forms to near machine precision and exist as cross-checks; do not
/// use them as the production path.
pub mod alt_form {
    use super::*;

    /// SPM coefficient via the expansion-route algebra.
    pub fn eta_spm(
        f_i: f64,
        b_i: f64,
        fiber: &DerivedFiberParams,
        p_tot: f64,
        cfg: &ClosedFormConfig,
    ) -> f64 {
        let a = fiber.alpha;
        // Expansion-route constants: φ' = −4π²(β₂+2πβ₃f_i), T' = −P_tot·Cr·f_i/α.
        let phi = -4.0 * std::f64::consts::PI.powi(2) * fiber.beta2_eff(2.0 * f_i);
        let t = -p_tot * fiber.cr * f_i / a;
        let u = 3.0 * phi * b_i * b_i / (16.0 * a);
        let tp2 = 2.0 + t;
        let g2 = fiber.gamma * fiber.gamma;
        4.0 * (16.0 / 27.0) * g2 / (b_i * b_i)
            * ((tp2 * tp2 / 6.0 - 2.0 / 27.0) * (3.0 * b_i * b_i / (16.0 * a * a))
                * (std::f64::consts::PI / 2.0)
                * super::asinhc(u, cfg.phi_singularity_eps)
                + b_i * b_i / (36.0 * a * a))
    }

    /// Single-interferer XPM coefficient via the expansion-route algebra.
    pub fn eta_xpm_pair(
        coi: &Channel,
        inf: &Channel,
        fiber: &DerivedFiberParams,
        p_tot: f64,
        cfg: &ClosedFormConfig,
    ) -> Result<f64, CfError> {
        if coi.power_w <= 0.0 {
            return Err(CfError::CoiPowerZero);
        }
        let a = fiber.alpha;
        let phi = -4.0
            * std::f64::consts::PI.powi(2)
            * (inf.center_hz - coi.center_hz)
            * fiber.beta2_eff(coi.center_hz + inf.center_hz);
        let t = -p_tot * fiber.cr * inf.center_hz / a;
        let tp2 = 2.0 + t;
        let y1 = phi * coi.bandwidth_hz / (2.0 * a);
        let y2 = 0.5 * y1;
        let pr = inf.power_w / coi.power_w;
        let g2 = fiber.gamma * fiber.gamma;
        Ok((32.0 / 27.0) * g2 / (inf.bandwidth_hz * inf.bandwidth_hz)
            * pr
            * pr
            * 2.0
            * inf.bandwidth_hz
            * ((tp2 * tp2 - 1.0) / 3.0 * (coi.bandwidth_hz / (2.0 * a * a))
                * super::atanc(y1, cfg.phi_singularity_eps)
                + (4.0 - tp2 * tp2) / 6.0 * (coi.bandwidth_hz / (4.0 * a * a))
                    * super::atanc(y2, cfg.phi_singularity_eps)))
    }
}

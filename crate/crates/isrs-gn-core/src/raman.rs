//! ISRS signal-power-profile math shared by all engines.
//!
//! The linear-Raman-slope model: over the occupied band, inter-channel power
//! transfer is proportional to frequency separation with slope `Cr`. The
//! normalized per-frequency power evolution (including flat loss) is
//!
//! ```text
//! profile(f, z) = e^{−αz} · P_tot · e^{−x(z)·f} / Σ_k P_k e^{−x(z)·f_k} sinch(x(z)·B_k/2)
//! ```
//!
//! with `x(z) = P_tot·Cr·L_eff(z)` and `sinch(u) = sinh(u)/u`. The denominator
//! is the exact integral of the piecewise-constant launch spectrum against
//! `e^{−x·ν}`, evaluated slab by slab in closed form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::load::SpectralLoad;

/// Validity limit for the first-order ISRS expansion: the second-order term
/// stays negligible while the net transfer is far below this many dB.
pub const VALIDITY_LIMIT_DB: f64 = 25.8;

#[derive(Debug, Error, PartialEq)]
pub enum RamanError {
    #[error("validity threshold must lie in (0, 1], got {0}")]
    BadThreshold(f64),
}

/// Effective length (1 − e^{−αz})/α in meters.
pub fn effective_length(alpha: f64, z: f64) -> f64 {
    -(-alpha * z).exp_m1() / alpha
}

/// Net ISRS power transfer between the band edges after one span, in dB.
pub fn delta_rho_db(p_tot_w: f64, cr: f64, leff_m: f64, btot_hz: f64) -> f64 {
    crate::units::DB_PER_NEPER * p_tot_w * cr * leff_m * btot_hz
}

/// sinh(x)/x with the removable singularity handled by series below 1e-8.
pub fn sinch(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// ISRS exponent scale x(z) = P_tot·Cr·L_eff(z), in 1/Hz.
pub fn isrs_x(p_tot_w: f64, cr: f64, alpha: f64, z: f64) -> f64 {
    p_tot_w * cr * effective_length(alpha, z)
}

/// Normalized power evolution (flat loss included) for a uniform, gapless
/// launch spectrum of total power `p_tot_w` over `btot_hz`.
///
/// Returns 1 at z = 0 and e^{−αz} when Cr = 0.
pub fn profile_uniform(
    f_hz: f64,
    z_m: f64,
    p_tot_w: f64,
    btot_hz: f64,
    cr: f64,
    alpha: f64,
) -> f64 {
    let x = isrs_x(p_tot_w, cr, alpha, z_m);
    (-alpha * z_m).exp() * (-x * f_hz).exp() / sinch(0.5 * x * btot_hz)
}

/// Denominator of the general profile at exponent scale `x`:
/// Σ_k P_k e^{−x f_k} sinch(x B_k/2), the slab-wise exact integral of the
/// launch spectrum against e^{−x·ν}.
pub fn isrs_denominator(x: f64, load: &SpectralLoad) -> f64 {
    load.channels()
        .iter()
        .filter(|c| c.power_w > 0.0)
        .map(|c| c.power_w * (-x * c.center_hz).exp() * sinch(0.5 * x * c.bandwidth_hz))
        .sum()
}

/// Normalized power evolution (flat loss included) for an arbitrary channel
/// load. Agrees with [`profile_uniform`] for a uniform gapless load.
pub fn profile_general(f_hz: f64, z_m: f64, load: &SpectralLoad, cr: f64, alpha: f64) -> f64 {
    let p_tot = load.total_power_w();
    let x = isrs_x(p_tot, cr, alpha, z_m);
    (-alpha * z_m).exp() * p_tot * (-x * f_hz).exp() / isrs_denominator(x, load)
}

/// First-order ISRS normalization T(f) = 2 − f·P_tot·Cr/α (the value that
/// multiplies the closed-form bracket terms; 2 with ISRS off or at f = 0).
pub fn taylor_t(f_hz: f64, p_tot_w: f64, cr: f64, alpha: f64) -> f64 {
    2.0 - f_hz * p_tot_w * cr / alpha
}

/// Validity diagnostics for the first-order ISRS expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsrsDiagnostics {
    pub delta_rho_db: f64,
    /// delta_rho_db / 25.8.
    pub validity_ratio: f64,
    pub warn: bool,
}

/// Flag spans whose net power transfer approaches the expansion limit.
pub fn validity_check(delta_rho_db: f64, threshold: f64) -> Result<IsrsDiagnostics, RamanError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(RamanError::BadThreshold(threshold));
    }
    let validity_ratio = delta_rho_db / VALIDITY_LIMIT_DB;
    Ok(IsrsDiagnostics {
        delta_rho_db,
        validity_ratio,
        warn: delta_rho_db > threshold * VALIDITY_LIMIT_DB,
    })
}

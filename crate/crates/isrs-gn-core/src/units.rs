//! Engineering-unit conversions and fiber parameter derivation.
//!
//! Everything downstream works in strict SI; the engineering units accepted
//! here exist only at the ingestion boundary.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in vacuum (m/s).
pub const C_LIGHT: f64 = 2.997_924_58e8;
/// Planck constant (J·s).
pub const H_PLANCK: f64 = 6.626_070_15e-34;
/// 10·log10(e): dB per neper. The exact value is used, never a rounded 4.3.
pub const DB_PER_NEPER: f64 = 4.342_944_819_032_518;

#[derive(Debug, Error, PartialEq)]
pub enum UnitsError {
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be non-negative, got {value}")]
    Negative { name: &'static str, value: f64 },
    #[error("reference wavelength {0} m outside the supported (1.2e-6, 1.7e-6) window")]
    WavelengthOutOfRange(f64),
}

/// Per-span physical fiber parameters in conventional engineering units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberSpec {
    /// Attenuation (dB/km).
    pub alpha_db_per_km: f64,
    /// Dispersion parameter D (ps/nm/km).
    pub d_ps_nm_km: f64,
    /// Dispersion slope S (ps/nm²/km).
    pub s_ps_nm2_km: f64,
    /// Nonlinearity coefficient γ (1/W/km).
    pub gamma_per_w_km: f64,
    /// Raman gain slope C_r (1/W/km/THz).
    pub cr_per_w_km_thz: f64,
    /// Span length (m).
    pub length_m: f64,
    /// Reference (carrier) wavelength (m).
    pub ref_wavelength_m: f64,
}

impl FiberSpec {
    /// Typical standard single-mode fiber at 1550 nm.
    pub fn smf_1550(length_m: f64) -> Self {
        FiberSpec {
            alpha_db_per_km: 0.2,
            d_ps_nm_km: 17.0,
            s_ps_nm2_km: 0.067,
            gamma_per_w_km: 1.2,
            cr_per_w_km_thz: 0.028,
            length_m,
            ref_wavelength_m: 1550e-9,
        }
    }

    pub fn validate(&self) -> Result<(), UnitsError> {
        if self.alpha_db_per_km <= 0.0 {
            return Err(UnitsError::NonPositive {
                name: "alpha_db_per_km",
                value: self.alpha_db_per_km,
            });
        }
        if self.length_m <= 0.0 {
            return Err(UnitsError::NonPositive { name: "length_m", value: self.length_m });
        }
        if self.gamma_per_w_km < 0.0 {
            return Err(UnitsError::Negative {
                name: "gamma_per_w_km",
                value: self.gamma_per_w_km,
            });
        }
        if self.cr_per_w_km_thz < 0.0 {
            return Err(UnitsError::Negative {
                name: "cr_per_w_km_thz",
                value: self.cr_per_w_km_thz,
            });
        }
        if self.ref_wavelength_m <= 1.2e-6 || self.ref_wavelength_m >= 1.7e-6 {
            return Err(UnitsError::WavelengthOutOfRange(self.ref_wavelength_m));
        }
        Ok(())
    }

    /// Convert to the SI representation used by the engines.
    pub fn derive(&self) -> Result<DerivedFiberParams, UnitsError> {
        self.validate()?;
        let alpha = to_linear_alpha(self.alpha_db_per_km)?;
        Ok(DerivedFiberParams {
            alpha,
            beta2: beta2_from_d(self.d_ps_nm_km, self.ref_wavelength_m)?,
            beta3: beta3_from_s(self.s_ps_nm2_km, self.d_ps_nm_km, self.ref_wavelength_m)?,
            gamma: self.gamma_per_w_km * 1e-3,
            cr: self.cr_per_w_km_thz * 1e-15,
            length: self.length_m,
            leff_full: crate::raman::effective_length(alpha, self.length_m),
            ref_frequency: C_LIGHT / self.ref_wavelength_m,
        })
    }
}

/// SI fiber parameters derived from a [`FiberSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedFiberParams {
    /// Power attenuation (1/m): P(z) = P(0)·e^{−αz}.
    pub alpha: f64,
    /// Group-velocity dispersion β₂ (s²/m).
    pub beta2: f64,
    /// Dispersion slope β₃ (s³/m).
    pub beta3: f64,
    /// Nonlinearity γ (1/W/m).
    pub gamma: f64,
    /// Raman gain slope C_r (1/W/m/Hz).
    pub cr: f64,
    /// Span length (m).
    pub length: f64,
    /// Effective length at z = length (m).
    pub leff_full: f64,
    /// Absolute reference carrier frequency (Hz), for ASE bookkeeping.
    pub ref_frequency: f64,
}

impl DerivedFiberParams {
    /// β₂ + πβ₃·fsum, the local dispersion seen by a mixing product whose
    /// participating frequencies sum to `fsum`.
    pub fn beta2_eff(&self, fsum: f64) -> f64 {
        self.beta2 + std::f64::consts::PI * self.beta3 * fsum
    }
}

/// dB/km attenuation to linear power attenuation (1/m).
pub fn to_linear_alpha(alpha_db_per_km: f64) -> Result<f64, UnitsError> {
    if alpha_db_per_km <= 0.0 {
        return Err(UnitsError::NonPositive { name: "alpha_db_per_km", value: alpha_db_per_km });
    }
    Ok(alpha_db_per_km / DB_PER_NEPER / 1e3)
}

/// Dispersion parameter D (ps/nm/km) to β₂ (s²/m). D > 0 maps to β₂ < 0.
pub fn beta2_from_d(d_ps_nm_km: f64, ref_wavelength_m: f64) -> Result<f64, UnitsError> {
    if ref_wavelength_m <= 0.0 {
        return Err(UnitsError::NonPositive { name: "ref_wavelength_m", value: ref_wavelength_m });
    }
    // 1 ps/nm/km = 1e-6 s/m².
    let d_si = d_ps_nm_km * 1e-6;
    Ok(-d_si * ref_wavelength_m * ref_wavelength_m / (2.0 * std::f64::consts::PI * C_LIGHT))
}

/// Dispersion slope S (ps/nm²/km) plus D to β₃ (s³/m).
pub fn beta3_from_s(
    s_ps_nm2_km: f64,
    d_ps_nm_km: f64,
    ref_wavelength_m: f64,
) -> Result<f64, UnitsError> {
    if ref_wavelength_m <= 0.0 {
        return Err(UnitsError::NonPositive { name: "ref_wavelength_m", value: ref_wavelength_m });
    }
    // 1 ps/nm²/km = 1e3 s/m³.
    let s_si = s_ps_nm2_km * 1e3;
    let d_si = d_ps_nm_km * 1e-6;
    let scale = ref_wavelength_m * ref_wavelength_m / (2.0 * std::f64::consts::PI * C_LIGHT);
    Ok(scale * scale * (s_si + 2.0 * d_si / ref_wavelength_m))
}

/// dBm to watts.
pub fn dbm_to_watt(p_dbm: f64) -> f64 {
    1e-3 * 10f64.powf(p_dbm / 10.0)
}

/// Watts to dBm.
pub fn watt_to_dbm(p_w: f64) -> Result<f64, UnitsError> {
    if p_w <= 0.0 {
        return Err(UnitsError::NonPositive { name: "power_w", value: p_w });
    }
    Ok(10.0 * (p_w / 1e-3).log10())
}

//! Core engines for per-channel nonlinear-interference (NLI) estimation in
//! wideband WDM systems with inter-channel stimulated Raman scattering (ISRS).
//!
//! The crate is organized bottom-up:
//!
//! - [`units`]: engineering-unit ingestion (dB/km, ps/nm/km, dBm) into a strict
//!   SI representation used everywhere else.
//! - [`load`]: per-channel spectral occupancy of a span input.
//! - [`raman`]: ISRS signal-power profiles, net power transfer, validity
//!   diagnostics.
//! - [`closed_form`]: closed-form SPM/XPM NLI coefficients, multi-span
//!   accumulation with a coherence exponent, SNR assembly.
//! - [`quad`]: adaptive 1-D quadrature and the integral identities used by the
//!   closed-form derivation, kept as independently testable helpers.
//! - [`integral`]: the reference quadrature engine for the full NLI integral
//!   and its two-channel reduction.
//!
//! All quantities are SI (Hz, W, m, s) unless a name says otherwise.
//! Frequencies are relative to the reference carrier (band center at `f = 0`).

pub mod closed_form;
pub mod integral;
pub mod load;
pub mod quad;
pub mod raman;
pub mod units;

pub use load::{Channel, SpectralLoad};
pub use units::{DerivedFiberParams, FiberSpec};

/// Linear power ratio to dB.
pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// dB to linear power ratio.
pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

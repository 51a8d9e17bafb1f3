//! Split-step Fourier simulation of dual-polarization WDM transmission with
//! inter-channel Raman power transfer, at desk scale.
//!
//! The simulator propagates the Manakov field (8/9-scaled Kerr rotation over
//! the summed polarization intensity) and applies a frequency-dependent loss
//! at every linear step so that the power evolution follows the same analytic
//! ISRS profile the analytic engines integrate over. The receiver chain is
//! ideal: full electronic dispersion compensation, root-raised-cosine matched
//! filtering, symbol-rate sampling and a single least-squares complex
//! rotation per channel. With noiseless amplifiers the resulting SNR isolates
//! nonlinear interference, so `eta = 1 / (SNR * P^2)` estimates the NLI
//! coefficient directly.
//!
//! Scale is deliberately capped (band, symbol count); the simulator is an
//! oracle for spot checks of the analytic engines, not a campaign tool.

pub mod config;
pub mod engine;
pub mod rx;
pub mod tx;

pub use config::{GainMode, Modulation, Polarization, SsfmConfig, SsfmError, StepDistribution};
pub use engine::{isrs_linear_step, simulate, SimResult, StepAudit};
pub use rx::{receiver, LinkMeta, RxChannel};
pub use tx::{transmit, ChannelSymbols, TxFrame};

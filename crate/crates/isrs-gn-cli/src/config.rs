//! Run configuration schema. Version-gated JSON with unknown keys rejected at
//! every level, so a typo fails the run instead of silently defaulting.

use isrs_gn_core::closed_form::ClosedFormConfig;
use isrs_gn_core::integral::QuadratureConfig;
use isrs_gn_core::FiberSpec;
use isrs_gn_network::{Engine, EvalConfig, GridSpec, NoiseConfig, ScenarioSpec, Topology};
use isrs_gn_ssfm::SsfmConfig;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must equal [`SCHEMA_VERSION`].
    pub schema_version: u32,
    /// Seed for commands with randomized inputs; overridable from the
    /// command line. Deterministic commands ignore it.
    #[serde(default)]
    pub seed: Option<u64>,
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Command {
    /// Per-channel η and SNR over a uniform (optionally tilted) comb.
    Eval(EvalCommand),
    /// Closed form vs quadrature for one channel of interest against single
    /// interferers at increasing separation.
    PairScan(PairScanCommand),
    /// Launch-power sweep on a fully loaded homogeneous link.
    Sweep(SweepCommand),
    /// Seeded lightpath scenario over a topology.
    Network(NetworkCommand),
    /// Split-step field simulation.
    Ssfm(SsfmCommand),
}

impl Command {
    pub fn kind(&self) -> &'static str {
        match self {
            Command::Eval(_) => "eval",
            Command::PairScan(_) => "pair_scan",
            Command::Sweep(_) => "sweep",
            Command::Network(_) => "network",
            Command::Ssfm(_) => "ssfm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalCommand {
    pub span: FiberSpec,
    pub n_spans: u32,
    pub grid: GridSpec,
    /// End-to-end launch tilt across the comb (dB); linear in frequency,
    /// pivoted at band center, positive raising the high-frequency edge.
    #[serde(default)]
    pub tilt_db: f64,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairScanCommand {
    pub span: FiberSpec,
    /// Background comb; the scan runs inside this fully loaded grid.
    pub grid: GridSpec,
    pub coi_slot: usize,
    pub inf_slots: Vec<usize>,
    /// Also emit the zero-separation self-channel row.
    #[serde(default)]
    pub include_spm: bool,
    #[serde(default)]
    pub cf: ClosedFormConfig,
    #[serde(default)]
    pub quad: QuadratureConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCommand {
    pub span: FiberSpec,
    pub n_spans: u32,
    pub grid: GridSpec,
    pub coi_slots: Vec<usize>,
    pub power_dbm: PowerGridDbm,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub cf: ClosedFormConfig,
}

/// Inclusive dBm range walked in fixed steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerGridDbm {
    pub start_dbm: f64,
    pub stop_dbm: f64,
    pub step_db: f64,
}

impl PowerGridDbm {
    pub fn points_w(&self) -> Vec<f64> {
        let mut v = Vec::new();
        if self.step_db <= 0.0 {
            return v;
        }
        let n = ((self.stop_dbm - self.start_dbm) / self.step_db + 1.5).floor() as i64;
        for k in 0..n.max(0) {
            let dbm = self.start_dbm + k as f64 * self.step_db;
            if dbm > self.stop_dbm + 1e-9 {
                break;
            }
            v.push(1e-3 * 10f64.powf(dbm / 10.0));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkCommand {
    pub topology: Topology,
    /// Edge indices in traversal order.
    pub path: Vec<usize>,
    pub scenario: ScenarioSpec,
    #[serde(default)]
    pub eval: EvalConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SsfmCommand {
    pub spans: Vec<FiberSpec>,
    #[serde(default)]
    pub config: SsfmConfig,
    pub power_dbm_per_channel: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineFlag {
    Cf,
    Integral,
    Ssfm,
}

impl EngineFlag {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "cf" => Some(EngineFlag::Cf),
            "integral" => Some(EngineFlag::Integral),
            "ssfm" => Some(EngineFlag::Ssfm),
            _ => None,
        }
    }

    pub fn as_engine(self) -> Option<Engine> {
        match self {
            EngineFlag::Cf => Some(Engine::ClosedForm),
            EngineFlag::Integral => Some(Engine::Integral),
            EngineFlag::Ssfm => None,
        }
    }
}

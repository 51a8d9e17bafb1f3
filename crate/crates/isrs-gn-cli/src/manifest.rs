//! Run manifest: enough provenance to reproduce any output bit for bit.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub schema_version: u32,
    pub command: String,
    /// Seed the run actually used, when the command consumes one.
    pub seed: Option<u64>,
    pub threads: usize,
    /// Digest of `resolved_config.json`; rerunning that file reproduces
    /// every output below.
    pub config_sha256: String,
    pub outputs: Vec<OutputRecord>,
}

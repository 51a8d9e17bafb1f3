//! Per-channel evaluation results and their CSV/JSON serializations.

use serde::{Deserialize, Serialize};

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoiRow {
    pub coi_slot: usize,
    pub f_rel_hz: f64,
    /// Launch power of this channel (W).
    pub p_i_w: f64,
    /// Path-accumulated NLI coefficient (1/W²).
    pub eta_total: f64,
    /// Path-accumulated self-channel part (1/W²).
    pub eta_spm: f64,
    /// Path-accumulated cross-channel part (1/W²); for the quadrature engine
    /// this is the full integral minus the self-channel cell, so four-wave
    /// mixing terms land here.
    pub eta_xpm: f64,
    /// Incoherent per-edge totals (1/W²), in path order.
    pub eta_per_edge: Vec<f64>,
    pub p_nli_w: f64,
    pub p_ase_w: f64,
    pub snr: f64,
    /// Largest single-span power transfer seen along the path (dB).
    pub delta_rho_db_max: f64,
    pub validity_warn: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NliReport {
    /// Engine name as selected for the run.
    pub engine: String,
    pub rows: Vec<CoiRow>,
}

impl NliReport {
    pub fn write_csv(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        writeln!(
            w,
            "coi_index,f_rel_Hz,eta_db_1_per_W2,eta_spm_db,eta_xpm_db,p_nli_dbm,p_ase_dbm,\
             snr_db,delta_rho_db_max,validity_warn"
        )?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{:.6e},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{:.4},{}",
                r.coi_slot,
                r.f_rel_hz,
                db(r.eta_total),
                db(r.eta_spm),
                db(r.eta_xpm),
                dbm(r.p_nli_w),
                dbm(r.p_ase_w),
                db(r.snr),
                r.delta_rho_db_max,
                r.validity_warn
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Worst deviation of the identity SNR = P/(P_ase + ηP³) over the rows,
    /// as a relative error. Zero-noise rows are skipped.
    pub fn self_consistency(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| {
                let denom = r.p_ase_w + r.eta_total * r.p_i_w.powi(3);
                (denom > 0.0).then(|| (r.p_i_w / denom / r.snr - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }
}

//! Path evaluation: per-span NLI, noise accumulation, and launch sweeps.

use isrs_gn_core::closed_form::{
    epsilon_for, eta_breakdown, eta_spm_cf, eta_xpm_total_cf, snr, CfError, ClosedFormConfig,
};
use isrs_gn_core::integral::{
    eta_full_integral, eta_spm_general_integral, IntegralError, QuadratureConfig,
};
use isrs_gn_core::raman::{delta_rho_db, validity_check, RamanError};
use isrs_gn_core::units::{H_PLANCK, UnitsError};
use isrs_gn_core::{FiberSpec, SpectralLoad};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::report::{CoiRow, NliReport};
use crate::scenario::{GridSpec, LightpathScenario};
use crate::topology::{Topology, TopologyError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Units(#[from] UnitsError),
    #[error(transparent)]
    ClosedForm(#[from] CfError),
    #[error(transparent)]
    Integral(#[from] IntegralError),
    #[error(transparent)]
    Raman(#[from] RamanError),
    #[error(
        "quadrature engine needs {needed} full-spectrum integrals, over the budget of \
         {budget}; widen coi_stride to sample fewer channels of interest or raise \
         integral_budget"
    )]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("channel of interest in slot {slot} is missing from edge {edge}'s load")]
    MissingCoi { slot: usize, edge: usize },
    #[error("scenario has no edges")]
    EmptyScenario,
    #[error("power grid is empty")]
    EmptyPowerGrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    ClosedForm,
    Integral,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::ClosedForm => "closed_form",
            Engine::Integral => "integral",
        }
    }
}

/// Amplifier noise model: one amplifier per span, gain exactly restoring the
/// span loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub nf_db: f64,
    /// Noise reference bandwidth; the channel bandwidth when absent.
    pub ref_bandwidth_hz: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig { nf_db: 5.0, ref_bandwidth_hz: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    pub engine: Engine,
    pub cf: ClosedFormConfig,
    pub quad: QuadratureConfig,
    /// Hard cap on (channel, span) full-spectrum quadratures per evaluation.
    pub integral_budget: usize,
    /// Evaluate every n-th channel of interest.
    pub coi_stride: usize,
    /// Per-span power-transfer ratio above which rows are flagged.
    pub validity_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            engine: Engine::ClosedForm,
            cf: ClosedFormConfig::default(),
            quad: QuadratureConfig { rel_tol: 1e-3, ..QuadratureConfig::default() },
            integral_budget: 512,
            coi_stride: 1,
            validity_threshold: 0.5,
        }
    }
}

/// Total amplified-spontaneous-emission power (W) of one amplifier in the
/// reference bandwidth, both polarizations: NF·(G−1)·h·f·B.
pub fn ase_power(nf_db: f64, gain_db: f64, f_abs_hz: f64, b_ref_hz: f64) -> f64 {
    let nf = 10f64.powf(nf_db / 10.0);
    let g = 10f64.powf(gain_db / 10.0);
    nf * (g - 1.0) * H_PLANCK * f_abs_hz * b_ref_hz
}

/// Band extent of the occupied spectrum (Hz), outer slab edge to outer slab
/// edge, for the power-transfer diagnostic.
fn band_extent(load: &SpectralLoad) -> f64 {
    let ch = load.channels();
    match (ch.first(), ch.last()) {
        (Some(a), Some(b)) => b.upper_edge() - a.lower_edge(),
        _ => 0.0,
    }
}

/// Evaluate every sampled channel of interest over the scenario's path.
///
/// Per span, the NLI coefficient is computed against that edge's load. Cross
/// terms accumulate incoherently across all spans; the self-channel term
/// accumulates as (Σ per-span SPM)·n^ε̄ with ε̄ the span-mean coherence
/// exponent, which reduces to the homogeneous n^{1+ε} law on identical spans.
/// The quadrature engine accumulates its per-span full integral incoherently.
pub fn evaluate_lightpath(
    topology: &Topology,
    scenario: &LightpathScenario,
    eval: &EvalConfig,
    noise: &NoiseConfig,
) -> Result<NliReport, EvalError> {
    if scenario.path.is_empty() {
        return Err(EvalError::EmptyScenario);
    }
    topology.trace_path(&scenario.path)?;
    let stride = eval.coi_stride.max(1);
    let cois: Vec<usize> = scenario.coi_slots.iter().copied().step_by(stride).collect();
    let n_spans_total: usize = scenario
        .path
        .iter()
        .map(|&e| topology.edges[e].spans.len())
        .sum();
    if eval.engine == Engine::Integral {
        let needed = cois.len() * n_spans_total;
        if needed > eval.integral_budget {
            return Err(EvalError::BudgetExceeded { needed, budget: eval.integral_budget });
        }
    }

    let mut rows = Vec::with_capacity(cois.len());
    for &slot in &cois {
        let f_rel = scenario.spec.grid.slot_center_hz(slot);
        let mut p_i = 0.0;
        let mut spm_sum = 0.0;
        let mut eps_sum = 0.0;
        let mut xpm_sum = 0.0;
        let mut eta_per_edge = Vec::with_capacity(scenario.path.len());
        let mut p_ase = 0.0;
        let mut drho_max = f64::NEG_INFINITY;

        for (ordinal, &edge_idx) in scenario.path.iter().enumerate() {
            let load = &scenario.edge_loads[ordinal];
            let coi_idx = scenario
                .load_index(ordinal, slot)
                .ok_or(EvalError::MissingCoi { slot, edge: ordinal })?;
            let coi = load.channels()[coi_idx];
            if ordinal == 0 {
                p_i = coi.power_w;
            }
            let b_ref = noise.ref_bandwidth_hz.unwrap_or(coi.bandwidth_hz);
            let mut edge_eta = 0.0;
            for span in &topology.edges[edge_idx].spans {
                let fiber = span.derive()?;
                let gain_db = span.alpha_db_per_km * span.length_m / 1e3;
                let f_abs = fiber.ref_frequency + f_rel;
                p_ase += ase_power(noise.nf_db, gain_db, f_abs, b_ref);
                drho_max = drho_max.max(delta_rho_db(
                    load.total_power_w(),
                    fiber.cr,
                    fiber.leff_full,
                    band_extent(load),
                ));
                match eval.engine {
                    Engine::ClosedForm => {
                        let spm = eta_spm_cf(
                            coi.center_hz,
                            coi.bandwidth_hz,
                            &fiber,
                            load.total_power_w(),
                            &eval.cf,
                        );
                        let (xpm, _) = eta_xpm_total_cf(load, coi_idx, &fiber, &eval.cf)?;
                        spm_sum += spm;
                        eps_sum += epsilon_for(&eval.cf, coi.bandwidth_hz, &fiber);
                        xpm_sum += xpm;
                        edge_eta += spm + xpm;
                    }
                    Engine::Integral => {
                        let full = eta_full_integral(&fiber, load, coi_idx, &eval.quad)?;
                        let spm = eta_spm_general_integral(&fiber, load, coi_idx, &eval.quad)?;
                        spm_sum += spm;
                        xpm_sum += full - spm;
                        edge_eta += full;
                    }
                }
            }
            eta_per_edge.push(edge_eta);
        }

        let eta_total = match eval.engine {
            Engine::ClosedForm => {
                let eps_mean = eps_sum / n_spans_total as f64;
                spm_sum * (n_spans_total as f64).powf(eps_mean) + xpm_sum
            }
            Engine::Integral => spm_sum + xpm_sum,
        };
        let eta_spm_report = match eval.engine {
            Engine::ClosedForm => eta_total - xpm_sum,
            Engine::Integral => spm_sum,
        };
        let diag = validity_check(drho_max, eval.validity_threshold)?;
        rows.push(CoiRow {
            coi_slot: slot,
            f_rel_hz: f_rel,
            p_i_w: p_i,
            eta_total,
            eta_spm: eta_spm_report,
            eta_xpm: xpm_sum,
            eta_per_edge,
            p_nli_w: eta_total * p_i * p_i * p_i,
            p_ase_w: p_ase,
            snr: snr(p_i, p_ase, eta_total),
            delta_rho_db_max: drho_max,
            validity_warn: diag.warn,
        });
    }
    Ok(NliReport { engine: eval.engine.name().to_string(), rows })
}

/// One channel's launch-power optimum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub coi_slot: usize,
    pub optimum_power_w: f64,
    pub snr_at_optimum: f64,
}

/// Sweep a uniform per-channel launch power over a fully loaded homogeneous
/// link and report each sampled channel's best power and SNR. η is recomputed
/// at every power point because the Raman-shaped profile couples it to the
/// total power.
pub fn sweep_launch_power(
    span: &FiberSpec,
    n_spans: u32,
    grid: &GridSpec,
    coi_slots: &[usize],
    powers_w: &[f64],
    noise: &NoiseConfig,
    cf: &ClosedFormConfig,
) -> Result<Vec<SweepRow>, EvalError> {
    if powers_w.is_empty() {
        return Err(EvalError::EmptyPowerGrid);
    }
    let fiber = span.derive()?;
    let gain_db = span.alpha_db_per_km * span.length_m / 1e3;
    let b_ref = noise.ref_bandwidth_hz.unwrap_or(grid.channel_bandwidth_hz);
    let mut best: Vec<Option<SweepRow>> = vec![None; coi_slots.len()];
    for &p in powers_w {
        let load = SpectralLoad::new(
            (0..grid.n_slots)
                .map(|s| isrs_gn_core::Channel {
                    center_hz: grid.slot_center_hz(s),
                    bandwidth_hz: grid.channel_bandwidth_hz,
                    power_w: p,
                })
                .collect(),
        )
        .expect("grid slots are distinct");
        for (i, &slot) in coi_slots.iter().enumerate() {
            let bd = eta_breakdown(&load, slot, &fiber, cf, n_spans)?;
            let f_abs = fiber.ref_frequency + grid.slot_center_hz(slot);
            let p_ase = n_spans as f64 * ase_power(noise.nf_db, gain_db, f_abs, b_ref);
            let s = snr(p, p_ase, bd.eta_total);
            if best[i].is_none_or(|b| s > b.snr_at_optimum) {
                best[i] = Some(SweepRow {
                    coi_slot: slot,
                    optimum_power_w: p,
                    snr_at_optimum: s,
                });
            }
        }
    }
    Ok(best.into_iter().map(|b| b.expect("grid nonempty")).collect())
}

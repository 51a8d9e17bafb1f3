//! Seeded generation of per-edge channel loads along a lightpath.

use isrs_gn_core::{Channel, SpectralLoad};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topology::{Topology, TopologyError};

#[derive(Debug, Error, PartialEq)]
pub enum ScenarioError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error("utilization {utilization} fills {target} slots, below the {cois} channels of interest")]
    UtilizationBelowCois { utilization: f64, target: usize, cois: usize },
    #[error("utilization {0} outside (0, 1]")]
    UtilizationOutOfRange(f64),
    #[error("drop fraction {0} outside [0, 1]")]
    DropFractionOutOfRange(f64),
    #[error("jitter bound {0} dB is negative")]
    NegativeJitter(f64),
    #[error("slot grid is empty")]
    EmptyGrid,
    #[error("coi stride must be at least 1")]
    ZeroStride,
}

/// The fixed slot grid channels are assigned to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n_slots: usize,
    pub slot_spacing_hz: f64,
    pub channel_bandwidth_hz: f64,
    /// Launch power per channel before jitter (W).
    pub base_power_w: f64,
    /// Every `coi_stride`-th slot carries a channel of interest.
    pub coi_stride: usize,
}

impl GridSpec {
    /// The 251-slot C+L grid used throughout: 40.005 GHz slots, 40.004 GHz
    /// channels, a channel of interest in every fifth slot.
    pub fn dense_cl_band(base_power_w: f64) -> Self {
        GridSpec {
            n_slots: 251,
            slot_spacing_hz: 40.005e9,
            channel_bandwidth_hz: 40.004e9,
            base_power_w,
            coi_stride: 5,
        }
    }

    /// Slot center relative to the band pivot.
    pub fn slot_center_hz(&self, slot: usize) -> f64 {
        (slot as f64 - 0.5 * (self.n_slots as f64 - 1.0)) * self.slot_spacing_hz
    }

    pub fn coi_slots(&self) -> Vec<usize> {
        (0..self.n_slots).step_by(self.coi_stride.max(1)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub grid: GridSpec,
    /// Fraction of slots occupied on every edge.
    pub utilization: f64,
    /// Fraction of interferers dropped at each intermediate node.
    pub drop_fraction: f64,
    /// Interferer power offset bound: offsets are uniform in ±jitter_db.
    pub jitter_db: f64,
    /// Interferers join with a random accumulated-dispersion history up to
    /// this distance. The analytic engines ignore it by construction; it is
    /// recorded for field-level cross checks.
    pub predispersion_max_m: f64,
    pub seed: u64,
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if self.grid.n_slots == 0 {
            return Err(ScenarioError::EmptyGrid);
        }
        if self.grid.coi_stride == 0 {
            return Err(ScenarioError::ZeroStride);
        }
        if !(self.utilization > 0.0 && self.utilization <= 1.0) {
            return Err(ScenarioError::UtilizationOutOfRange(self.utilization));
        }
        if !(0.0..=1.0).contains(&self.drop_fraction) {
            return Err(ScenarioError::DropFractionOutOfRange(self.drop_fraction));
        }
        if self.jitter_db < 0.0 {
            return Err(ScenarioError::NegativeJitter(self.jitter_db));
        }
        let target = self.occupied_target();
        let cois = self.grid.coi_slots().len();
        if target < cois {
            return Err(ScenarioError::UtilizationBelowCois {
                utilization: self.utilization,
                target,
                cois,
            });
        }
        Ok(())
    }

    pub fn occupied_target(&self) -> usize {
        ((self.utilization * self.grid.n_slots as f64).round() as usize).min(self.grid.n_slots)
    }
}

/// One interfering channel as it joins the path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interferer {
    pub slot: usize,
    pub power_w: f64,
    pub predispersion_m: f64,
}

/// Load change applied when entering an edge. The first event has no drops:
/// it is the initial fill at the transmitter node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoadmEvent {
    pub dropped_slots: Vec<usize>,
    pub added: Vec<Interferer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightpathScenario {
    /// Edge indices into the topology, in traversal order.
    pub path: Vec<usize>,
    pub coi_slots: Vec<usize>,
    /// Occupied slots per edge, ascending.
    pub occupied_slots: Vec<Vec<usize>>,
    /// One load per edge, channels ascending in frequency.
    pub edge_loads: Vec<SpectralLoad>,
    pub events: Vec<RoadmEvent>,
    pub spec: ScenarioSpec,
}

impl LightpathScenario {
    /// Index of a slot's channel within an edge load.
    pub fn load_index(&self, edge_ordinal: usize, slot: usize) -> Option<usize> {
        self.occupied_slots[edge_ordinal].binary_search(&slot).ok()
    }
}

fn build_load(
    grid: &GridSpec,
    coi_slots: &[usize],
    interferers: &std::collections::BTreeMap<usize, Interferer>,
) -> SpectralLoad {
    let mut channels: Vec<Channel> = coi_slots
        .iter()
        .map(|&s| Channel {
            center_hz: grid.slot_center_hz(s),
            bandwidth_hz: grid.channel_bandwidth_hz,
            power_w: grid.base_power_w,
        })
        .collect();
    channels.extend(interferers.values().map(|i| Channel {
        center_hz: grid.slot_center_hz(i.slot),
        bandwidth_hz: grid.channel_bandwidth_hz,
        power_w: i.power_w,
    }));
    SpectralLoad::new(channels).expect("slots are distinct and on-grid by construction")
}

/// Populate every edge of `path` with a deterministic, seeded load sequence:
/// fill to the utilization target at the transmitter, then at each
/// intermediate node drop a fraction of the surviving interferers uniformly
/// at random and refill empty slots to the target. Channels of interest are
/// never dropped and carry the unjittered base power end to end.
pub fn generate_scenario(
    topology: &Topology,
    path: &[usize],
    spec: &ScenarioSpec,
) -> Result<LightpathScenario, ScenarioError> {
    spec.validate()?;
    topology.trace_path(path)?;
    let grid = &spec.grid;
    let coi_slots = grid.coi_slots();
    let is_coi: Vec<bool> = {
        let mut v = vec![false; grid.n_slots];
        for &s in &coi_slots {
            v[s] = true;
        }
        v
    };
    let target = spec.occupied_target();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let draw = |rng: &mut ChaCha8Rng, free: &mut Vec<usize>| -> Interferer {
        let pick = rng.random_range(0..free.len());
        let slot = free.swap_remove(pick);
        let offset_db = rng.random_range(-spec.jitter_db..=spec.jitter_db);
        Interferer {
            slot,
            power_w: grid.base_power_w * 10f64.powf(offset_db / 10.0),
            predispersion_m: rng.random_range(0.0..=spec.predispersion_max_m),
        }
    };

    let mut interferers = std::collections::BTreeMap::<usize, Interferer>::new();
    let mut events = Vec::with_capacity(path.len());
    let mut occupied_slots = Vec::with_capacity(path.len());
    let mut edge_loads = Vec::with_capacity(path.len());

    for hop in 0..path.len() {
        let mut dropped = Vec::new();
        if hop > 0 && !interferers.is_empty() {
            let n_drop =
                (spec.drop_fraction * interferers.len() as f64).round() as usize;
            let mut alive: Vec<usize> = interferers.keys().copied().collect();
            for _ in 0..n_drop {
                let pick = rng.random_range(0..alive.len());
                let slot = alive.swap_remove(pick);
                interferers.remove(&slot);
                dropped.push(slot);
            }
            dropped.sort_unstable();
        }
        let mut free: Vec<usize> = (0..grid.n_slots)
            .filter(|&s| !is_coi[s] && !interferers.contains_key(&s))
            .collect();
        let mut added = Vec::new();
        while coi_slots.len() + interferers.len() < target {
            let inf = draw(&mut rng, &mut free);
            interferers.insert(inf.slot, inf);
            added.push(inf);
        }
        events.push(RoadmEvent { dropped_slots: dropped, added });
        let mut occ: Vec<usize> = coi_slots
            .iter()
            .copied()
            .chain(interferers.keys().copied())
            .collect();
        occ.sort_unstable();
        occupied_slots.push(occ);
        edge_loads.push(build_load(grid, &coi_slots, &interferers));
    }

    Ok(LightpathScenario {
        path: path.to_vec(),
        coi_slots,
        occupied_slots,
        edge_loads,
        events,
        spec: *spec,
    })
}

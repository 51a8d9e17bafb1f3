//! Lightpath evaluation over a mesh of variably loaded fiber spans.
//!
//! A [`Topology`] holds nodes and span-annotated edges; a seeded scenario
//! generator populates each edge of a chosen path with interfering channels
//! (drop and refill at every intermediate node), and the evaluator runs
//! either the closed-form engine or the direct-quadrature reference per span,
//! accumulates NLI across the path, adds amplifier noise, and emits one SNR
//! report row per channel of interest.

pub mod evaluate;
pub mod report;
pub mod scenario;
pub mod topology;

pub use evaluate::{
    ase_power, evaluate_lightpath, sweep_launch_power, Engine, EvalConfig, EvalError,
    NoiseConfig, SweepRow,
};
pub use report::{CoiRow, NliReport};
pub use scenario::{
    generate_scenario, GridSpec, Interferer, LightpathScenario, RoadmEvent, ScenarioError,
    ScenarioSpec,
};
pub use topology::{Edge, Topology, TopologyError};

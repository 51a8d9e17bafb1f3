//! Command execution: resolve overrides, run the requested engine, write
//! outputs plus a manifest that reproduces them.

use std::io::Write as _;
use std::path::Path;

use isrs_gn_core::closed_form::{eta_spm_cf, eta_xpm_pair_cf};
use isrs_gn_core::integral::{eta_spm_integral, eta_xpm_pair_integral};
use isrs_gn_core::{Channel, SpectralLoad};
use isrs_gn_network::{
    evaluate_lightpath, generate_scenario, sweep_launch_power, Edge, LightpathScenario,
    ScenarioSpec, Topology,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{
    Command, EngineFlag, EvalCommand, NetworkCommand, PairScanCommand, RunConfig, SsfmCommand,
    SweepCommand, SCHEMA_VERSION,
};
use crate::manifest::{sha256_hex, Manifest, OutputRecord};
use crate::CliError;

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub threads: usize,
    pub engine: Option<EngineFlag>,
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { threads: 1, engine: None, seed: None }
    }
}

type Outputs = Vec<(String, Vec<u8>)>;

/// Run a config and write `resolved_config.json`, the command outputs, and
/// `manifest.json` into `out_dir`. Rerunning the resolved config reproduces
/// every listed output byte for byte.
pub fn execute(mut config: RunConfig, opts: &RunOptions, out_dir: &Path) -> Result<Manifest, CliError> {
    if config.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "unsupported schema_version {}; this build reads version {SCHEMA_VERSION}",
            config.schema_version
        )));
    }
    if opts.threads == 0 {
        return Err(CliError::Config("--threads must be at least 1".into()));
    }
    apply_engine_override(&mut config.command, opts.engine)?;
    let seed = opts.seed.or(config.seed);
    config.seed = seed;
    match &mut config.command {
        Command::Network(c) => {
            if let Some(s) = seed {
                c.scenario.seed = s;
            }
            config.seed = Some(c.scenario.seed);
        }
        Command::Ssfm(c) => {
            if let Some(s) = seed {
                c.config.rng_seed = s;
            }
            config.seed = Some(c.config.rng_seed);
        }
        _ => {}
    }

    let mut resolved = serde_json::to_vec_pretty(&config)?;
    resolved.push(b'\n');

    let outputs = match &config.command {
        Command::Eval(c) => run_eval(c)?,
        Command::PairScan(c) => run_pair_scan(c, opts.threads)?,
        Command::Sweep(c) => run_sweep(c)?,
        Command::Network(c) => run_network(c)?,
        Command::Ssfm(c) => run_ssfm(c)?,
    };

    std::fs::create_dir_all(out_dir)?;
    std::fs::write(out_dir.join("resolved_config.json"), &resolved)?;
    let mut records = Vec::with_capacity(outputs.len());
    for (name, bytes) in &outputs {
        std::fs::write(out_dir.join(name), bytes)?;
        records.push(OutputRecord { file: name.clone(), sha256: sha256_hex(bytes) });
    }
    let manifest = Manifest {
        tool: "isrs-gn".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        schema_version: config.schema_version,
        command: config.command.kind().into(),
        seed: config.seed,
        threads: opts.threads,
        config_sha256: sha256_hex(&resolved),
        outputs: records,
    };
    let mut mbytes = serde_json::to_vec_pretty(&manifest)?;
    mbytes.push(b'\n');
    std::fs::write(out_dir.join("manifest.json"), mbytes)?;
    Ok(manifest)
}

fn apply_engine_override(cmd: &mut Command, flag: Option<EngineFlag>) -> Result<(), CliError> {
    let Some(flag) = flag else { return Ok(()) };
    let analytic = |flag: EngineFlag| {
        flag.as_engine().ok_or_else(|| {
            CliError::Config("the ssfm engine runs only through an ssfm command".into())
        })
    };
    match cmd {
        Command::Eval(c) => c.eval.engine = analytic(flag)?,
        Command::Network(c) => c.eval.engine = analytic(flag)?,
        Command::Ssfm(_) if flag == EngineFlag::Ssfm => {}
        Command::Ssfm(_) => {
            return Err(CliError::Config(
                "an ssfm command only accepts --engine ssfm".into(),
            ))
        }
        Command::PairScan(_) | Command::Sweep(_) => {
            return Err(CliError::Config(
                "this command's engines are fixed; drop --engine".into(),
            ))
        }
    }
    Ok(())
}

fn uniform_load(grid: &isrs_gn_network::GridSpec, tilt_db: f64) -> Result<SpectralLoad, CliError> {
    if grid.n_slots == 0 {
        return Err(CliError::Config("channel grid is empty".into()));
    }
    let n = grid.n_slots;
    let channels = (0..n)
        .map(|s| {
            let u = if n > 1 { s as f64 / (n - 1) as f64 - 0.5 } else { 0.0 };
            Channel {
                center_hz: grid.slot_center_hz(s),
                bandwidth_hz: grid.channel_bandwidth_hz,
                power_w: grid.base_power_w * 10f64.powf(tilt_db * u / 10.0),
            }
        })
        .collect();
    Ok(SpectralLoad::new(channels)?)
}

/// A single-link scenario carrying one fully specified load; the evaluation
/// path for canned grids and the seeded generator meet at the same type.
fn single_edge_scenario(
    span: &isrs_gn_core::FiberSpec,
    n_spans: u32,
    grid: &isrs_gn_network::GridSpec,
    load: SpectralLoad,
) -> (Topology, LightpathScenario) {
    let topology = Topology {
        nodes: vec!["tx".into(), "rx".into()],
        edges: vec![Edge {
            from: "tx".into(),
            to: "rx".into(),
            spans: vec![*span; n_spans as usize],
        }],
        directed: true,
    };
    let all: Vec<usize> = (0..grid.n_slots).collect();
    let scenario = LightpathScenario {
        path: vec![0],
        coi_slots: all.clone(),
        occupied_slots: vec![all],
        edge_loads: vec![load],
        events: vec![],
        spec: ScenarioSpec {
            grid: *grid,
            utilization: 1.0,
            drop_fraction: 0.0,
            jitter_db: 0.0,
            predispersion_max_m: 0.0,
            seed: 0,
        },
    };
    (topology, scenario)
}

fn run_eval(cmd: &EvalCommand) -> Result<Outputs, CliError> {
    if cmd.n_spans == 0 {
        return Err(CliError::Config("n_spans must be at least 1".into()));
    }
    let load = uniform_load(&cmd.grid, cmd.tilt_db)?;
    let (topology, scenario) = single_edge_scenario(&cmd.span, cmd.n_spans, &cmd.grid, load);
    let report = evaluate_lightpath(&topology, &scenario, &cmd.eval, &cmd.noise)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(vec![
        ("report.csv".into(), csv),
        ("report.json".into(), json_bytes(&report)),
    ])
}

#[derive(Serialize)]
struct PairRow {
    kind: &'static str,
    delta_f_hz: f64,
    eta_cf_1_per_w2: f64,
    eta_integral_1_per_w2: f64,
    gap_db: f64,
}

fn run_pair_scan(cmd: &PairScanCommand, threads: usize) -> Result<Outputs, CliError> {
    let load = uniform_load(&cmd.grid, 0.0)?;
    let chans = load.channels();
    let coi = *chans
        .get(cmd.coi_slot)
        .ok_or_else(|| CliError::Config(format!("coi_slot {} is off the grid", cmd.coi_slot)))?;
    for &s in &cmd.inf_slots {
        if s >= chans.len() {
            return Err(CliError::Config(format!("inf_slot {s} is off the grid")));
        }
        if s == cmd.coi_slot {
            return Err(CliError::Config(
                "inf_slots must differ from coi_slot; set include_spm for the self term".into(),
            ));
        }
    }
    let fiber = cmd.span.derive()?;
    let p_tot = load.total_power_w();
    let btot = chans[chans.len() - 1].upper_edge() - chans[0].lower_edge();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let mut rows: Vec<PairRow> = Vec::new();
    if cmd.include_spm {
        let cf = eta_spm_cf(coi.center_hz, coi.bandwidth_hz, &fiber, p_tot, &cmd.cf);
        let int = eta_spm_integral(&coi, &fiber, p_tot, btot, &cmd.quad)?;
        rows.push(PairRow {
            kind: "spm",
            delta_f_hz: 0.0,
            eta_cf_1_per_w2: cf,
            eta_integral_1_per_w2: int,
            gap_db: 10.0 * (cf / int).log10(),
        });
    }
    let xpm: Result<Vec<PairRow>, CliError> = pool.install(|| {
        cmd.inf_slots
            .par_iter()
            .map(|&s| {
                let inf = chans[s];
                let cf = eta_xpm_pair_cf(&coi, &inf, &fiber, p_tot, &cmd.cf)?;
                let int = eta_xpm_pair_integral(&coi, &inf, &fiber, p_tot, btot, &cmd.quad)?;
                Ok(PairRow {
                    kind: "xpm",
                    delta_f_hz: inf.center_hz - coi.center_hz,
                    eta_cf_1_per_w2: cf,
                    eta_integral_1_per_w2: int,
                    gap_db: 10.0 * (cf / int).log10(),
                })
            })
            .collect()
    });
    rows.extend(xpm?);

    let mut csv = Vec::new();
    writeln!(csv, "kind,delta_f_hz,eta_cf_1_per_w2,eta_integral_1_per_w2,gap_db")?;
    for r in &rows {
        writeln!(
            csv,
            "{},{:.6e},{:.9e},{:.9e},{:+.4}",
            r.kind, r.delta_f_hz, r.eta_cf_1_per_w2, r.eta_integral_1_per_w2, r.gap_db
        )?;
    }
    Ok(vec![
        ("pair_scan.csv".into(), csv),
        ("pair_scan.json".into(), json_bytes(&rows)),
    ])
}

fn run_sweep(cmd: &SweepCommand) -> Result<Outputs, CliError> {
    if cmd.power_dbm.step_db <= 0.0 {
        return Err(CliError::Config("power step_db must be positive".into()));
    }
    let powers = cmd.power_dbm.points_w();
    let rows = sweep_launch_power(
        &cmd.span,
        cmd.n_spans,
        &cmd.grid,
        &cmd.coi_slots,
        &powers,
        &cmd.noise,
        &cmd.cf,
    )?;
    let mut csv = Vec::new();
    writeln!(csv, "coi_slot,optimum_dbm,snr_db")?;
    for r in &rows {
        writeln!(
            csv,
            "{},{:.4},{:.4}",
            r.coi_slot,
            10.0 * (r.optimum_power_w / 1e-3).log10(),
            10.0 * r.snr_at_optimum.log10()
        )?;
    }
    Ok(vec![("sweep.csv".into(), csv), ("sweep.json".into(), json_bytes(&rows))])
}

fn run_network(cmd: &NetworkCommand) -> Result<Outputs, CliError> {
    let scenario = generate_scenario(&cmd.topology, &cmd.path, &cmd.scenario)?;
    let report = evaluate_lightpath(&cmd.topology, &scenario, &cmd.eval, &cmd.noise)?;
    let mut csv = Vec::new();
    report.write_csv(&mut csv)?;
    Ok(vec![
        ("report.csv".into(), csv),
        ("report.json".into(), json_bytes(&report)),
        ("scenario.json".into(), json_bytes(&scenario)),
    ])
}

fn run_ssfm(cmd: &SsfmCommand) -> Result<Outputs, CliError> {
    let cfg = &cmd.config;
    let n = cfg.n_channels;
    let p = 1e-3 * 10f64.powf(cmd.power_dbm_per_channel / 10.0);
    let channels = (0..n)
        .map(|i| Channel {
            center_hz: (i as f64 - 0.5 * (n as f64 - 1.0)) * cfg.channel_spacing_hz,
            bandwidth_hz: cfg.symbol_rate_hz,
            power_w: p,
        })
        .collect();
    let load = SpectralLoad::new(channels)?;
    let result = isrs_gn_ssfm::simulate(cfg, &cmd.spans, &load)?;
    let mut csv = Vec::new();
    result.write_csv(&mut csv)?;
    let summary = json!({
        "snr": result.snr,
        "eta_per_w2": result.eta,
        "eta_runs": result.eta_runs,
        "received_power_w": result.received_power_w,
        "n_steps": result.steps.len(),
    });
    let mut out: Outputs = vec![
        ("ssfm.csv".into(), csv),
        ("ssfm.json".into(), pretty_bytes(&summary)),
    ];
    if result.constellations.is_some() {
        let mut blob = Vec::new();
        result.write_constellations(&mut blob)?;
        out.push(("constellations.bin".into(), blob));
    }
    Ok(out)
}

fn json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(value).expect("report serializes");
    b.push(b'\n');
    b
}

fn pretty_bytes(value: &serde_json::Value) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(value).expect("json serializes");
    b.push(b'\n');
    b
}

//! Workspace acceptance gate: one test per headline requirement, each
//! printing the measured values next to the bounds they must meet so the
//! per-test pass/fail lines double as the acceptance report. Bounds are
//! asserted exactly as stated; nothing is loosened to force a pass, so a
//! failing test here documents a real shortfall of the named requirement.

use isrs_gn_core::closed_form::{
    alt_form, coherence_epsilon, eta_breakdown, eta_spm_cf, eta_xpm_pair_cf, ClosedFormConfig,
    EpsilonMode,
};
use isrs_gn_core::integral::{
    eta_full_integral, eta_spm_general_integral, eta_spm_integral, eta_xpm_pair_integral,
    QuadratureConfig,
};
use isrs_gn_core::quad::{
    adaptive, identity_i1, identity_i2, identity_i3, identity_i4_asinh, identity_i4_exact,
};
use isrs_gn_core::raman::{delta_rho_db, profile_general, validity_check};
use isrs_gn_core::units::DB_PER_NEPER;
use isrs_gn_core::{Channel, FiberSpec, SpectralLoad};
use isrs_gn_network::{
    evaluate_lightpath, generate_scenario, Edge, Engine, EvalConfig, GridSpec, NoiseConfig,
    ScenarioSpec, Topology,
};
use isrs_gn_ssfm::{simulate, GainMode, SsfmConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Reference 251-channel C+L grid: 40.005 GHz slots, 40.004 GHz channels.
const SP: f64 = 40.005e9;
const BCH: f64 = 40.004e9;
const N_CH: usize = 251;
const P_CH: f64 = 1e-3;

fn db(x: f64) -> f64 {
    10.0 * x.log10()
}

fn band_extent() -> f64 {
    (N_CH - 1) as f64 * SP + BCH
}

fn table_span(length_m: f64, cr_on: bool) -> FiberSpec {
    let mut s = FiberSpec::smf_1550(length_m);
    if !cr_on {
        s.cr_per_w_km_thz = 0.0;
    }
    s
}

fn full_grid(p_ch: f64) -> SpectralLoad {
    SpectralLoad::uniform_grid(N_CH, SP, BCH, p_ch).unwrap()
}

fn slot_center(slot: usize) -> f64 {
    (slot as f64 - 0.5 * (N_CH as f64 - 1.0)) * SP
}

fn quad_cfg() -> QuadratureConfig {
    QuadratureConfig { rel_tol: 1e-3, ..QuadratureConfig::default() }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[test]
fn criterion_01_band_edge_power_transfer() {
    let fiber = table_span(100e3, true).derive().unwrap();
    let p0 = N_CH as f64 * P_CH;
    let p2 = p0 * 10f64.powf(0.2);
    let d0 = delta_rho_db(p0, fiber.cr, fiber.leff_full, band_extent());
    let d2 = delta_rho_db(p2, fiber.cr, fiber.leff_full, band_extent());
    println!(
        "criterion 1: power transfer {d0:.4} dB at 0 dBm/ch (want 6.3 +- 0.3), \
         {d2:.4} dB at 2 dBm/ch (want 10.3 +- 0.4)"
    );
    assert!((d0 - 6.3).abs() <= 0.3, "power transfer at 0 dBm/ch is {d0:.4} dB, outside 6.3 +- 0.3");
    assert!((d2 - 10.3).abs() <= 0.4, "power transfer at 2 dBm/ch is {d2:.4} dB, outside 10.3 +- 0.4");
}

#[test]
fn criterion_02_closed_form_route_equivalence() {
    // The expansion-route rearrangements must match the primary closed forms
    // to 1e-9 relative over 1000 randomized parameter draws.
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let cfg = ClosedFormConfig::default();
    let mut worst_spm = 0.0f64;
    let mut worst_xpm = 0.0f64;
    for _ in 0..1000 {
        let mut spec = FiberSpec::smf_1550(100e3);
        spec.alpha_db_per_km = rng.random_range(0.15..0.25);
        spec.d_ps_nm_km = rng.random_range(2.0..25.0);
        let fiber = spec.derive().unwrap();
        let drho: f64 = rng.random_range(0.0..13.0);
        let p_tot = drho / (DB_PER_NEPER * fiber.cr * fiber.leff_full * band_extent());
        let f_i = rng.random_range(-7.5e12..7.5e12);
        let b_i = rng.random_range(10e9..100e9);

        let spm_main = eta_spm_cf(f_i, b_i, &fiber, p_tot, &cfg);
        let spm_alt = alt_form::eta_spm(f_i, b_i, &fiber, p_tot, &cfg);
        worst_spm = worst_spm.max((spm_alt / spm_main - 1.0).abs());

        let df_mag = rng.random_range(40e9..2e12);
        let df = if rng.random_bool(0.5) { df_mag } else { -df_mag };
        let coi = Channel { center_hz: f_i, bandwidth_hz: b_i, power_w: P_CH };
        let inf = Channel {
            center_hz: f_i + df,
            bandwidth_hz: rng.random_range(10e9..100e9),
            power_w: rng.random_range(0.2e-3..5e-3),
        };
        let xpm_main = eta_xpm_pair_cf(&coi, &inf, &fiber, p_tot, &cfg).unwrap();
        let xpm_alt = alt_form::eta_xpm_pair(&coi, &inf, &fiber, p_tot, &cfg).unwrap();
        worst_xpm = worst_xpm.max((xpm_alt / xpm_main - 1.0).abs());
    }
    println!(
        "criterion 2: worst relative route gap over 1000 draws: self {worst_spm:.3e}, \
         cross {worst_xpm:.3e} (want <= 1e-9)"
    );
    assert!(worst_spm <= 1e-9, "self-channel route gap {worst_spm:.3e} exceeds 1e-9");
    assert!(worst_xpm <= 1e-9, "cross-channel route gap {worst_xpm:.3e} exceeds 1e-9");
}

#[test]
fn criterion_03_quadrature_identities() {
    // The three rational/quartic identities must match adaptive quadrature to
    // 1e-8 relative over randomized parameters with real quartic roots.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = [0.0f64; 3];
    for _ in 0..200 {
        let b: f64 = rng.random_range(0.5..8.0);
        let a: f64 = rng.random_range(0.01..1.0) * (b * b / 4.0) * 0.95;
        let x: f64 = rng.random_range(0.1..20.0);
        let i1 = identity_i1(a, b, x).unwrap();
        let q1 = adaptive(&mut |t: f64| 1.0 / (a + b * t * t + t.powi(4)), 0.0, x, 1e-12, 2000)
            .unwrap()
            .value;
        worst[0] = worst[0].max((i1 / q1 - 1.0).abs());
        let i2 = identity_i2(a, b, x).unwrap();
        let q2 =
            adaptive(&mut |t: f64| t * t / (a + b * t * t + t.powi(4)), 0.0, x, 1e-12, 2000)
                .unwrap()
                .value;
        worst[1] = worst[1].max((i2 / q2 - 1.0).abs());
        let ar: f64 = rng.random_range(-4.0..4.0);
        let br: f64 = rng.random_range(0.05..6.0);
        let xr: f64 = rng.random_range(0.1..10.0);
        let i3 = identity_i3(ar, br, xr).unwrap();
        let q3 = adaptive(
            &mut |f: f64| (1.0 + ar * ar * f * f) / (1.0 + br * br * f * f),
            0.0,
            xr,
            1e-12,
            2000,
        )
        .unwrap()
        .value;
        worst[2] = worst[2].max((i3 / q3 - 1.0).abs());
    }
    println!(
        "criterion 3: worst identity-vs-quadrature gaps: I1 {:.2e}, I2 {:.2e}, I3 {:.2e} (want <= 1e-8)",
        worst[0], worst[1], worst[2]
    );
    for (k, w) in worst.iter().enumerate() {
        assert!(*w <= 1e-8, "identity I{} deviates {w:.3e} from adaptive quadrature", k + 1);
    }

    // The asinh surrogate of the inverse-tangent integral must stay within 3%
    // of the exact evaluation for arguments Dx in [0.1, 100].
    let n = 121;
    let mut max_rel = 0.0f64;
    let mut argmax = 0.0f64;
    let mut crossover = f64::NAN;
    for k in 0..n {
        let dx = 10f64.powf(-1.0 + 3.0 * k as f64 / (n - 1) as f64);
        let rel = (identity_i4_asinh(1.0, dx) / identity_i4_exact(1.0, dx) - 1.0).abs();
        if rel > max_rel {
            max_rel = rel;
            argmax = dx;
        }
        if crossover.is_nan() && rel <= 0.03 {
            crossover = dx;
        }
    }
    println!(
        "criterion 3: asinh surrogate worst relative gap {max_rel:.4} at Dx = {argmax:.3}; \
         first within 3% at Dx ~ {crossover:.2}"
    );
    assert!(
        max_rel <= 0.03,
        "asinh form deviates {max_rel:.4} from the exact inverse-tangent integral at \
         Dx = {argmax:.3}; the two small-argument limits differ by the factor pi/4 \
         (~0.215 floor), so the surrogate only reaches 3% beyond Dx ~ {crossover:.1}"
    );
}

#[test]
fn criterion_04_pair_level_agreement() {
    // Closed form vs direct pair quadrature near the low band edge at
    // 0 dBm/ch: cross terms within 0.15 dB from the first neighbor outward,
    // the self term within 0.35 dB with Raman coupling on and 0.15 dB with
    // it off.
    let qc = QuadratureConfig::default();
    let cfg = ClosedFormConfig::default();
    let p_tot = N_CH as f64 * P_CH;
    let coi = Channel { center_hz: slot_center(25), bandwidth_hz: BCH, power_w: P_CH };
    let mut failures = Vec::new();

    for (cr_on, bound) in [(true, 0.35), (false, 0.15)] {
        let label = if cr_on { "on" } else { "off" };
        let fiber = table_span(100e3, cr_on).derive().unwrap();
        let cf = eta_spm_cf(coi.center_hz, coi.bandwidth_hz, &fiber, p_tot, &cfg);
        let int = eta_spm_integral(&coi, &fiber, p_tot, band_extent(), &qc).unwrap();
        let gap = db(cf / int);
        println!(
            "criterion 4: self term, raman {label}: gap {gap:+.4} dB (want |gap| <= {bound})"
        );
        if gap.abs() > bound {
            failures
                .push(format!("self term with raman {label} deviates {gap:+.4} dB (bound {bound})"));
        }
    }

    let fiber = table_span(100e3, true).derive().unwrap();
    for inf_slot in [26usize, 27, 28, 29, 50, 125] {
        let inf = Channel { center_hz: slot_center(inf_slot), bandwidth_hz: BCH, power_w: P_CH };
        let cf = eta_xpm_pair_cf(&coi, &inf, &fiber, p_tot, &cfg).unwrap();
        let int = eta_xpm_pair_integral(&coi, &inf, &fiber, p_tot, band_extent(), &qc).unwrap();
        let gap = db(cf / int);
        let df_ghz = (inf.center_hz - coi.center_hz) / 1e9;
        println!(
            "criterion 4: cross term at df = {df_ghz:.3} GHz: gap {gap:+.4} dB (want |gap| < 0.15)"
        );
        if gap.abs() >= 0.15 {
            failures.push(format!(
                "cross term at df = {df_ghz:.3} GHz deviates {gap:+.4} dB (bound 0.15)"
            ));
        }
    }
    assert!(failures.is_empty(), "pair-level agreement violations:\n  {}", failures.join("\n  "));
}

#[test]
fn criterion_05_single_span_spectrum_agreement() {
    // Mean closed-form vs full-quadrature gap over 11 channels sampled evenly
    // across the grid, one 100 km span.
    let qc = quad_cfg();
    let cfg = ClosedFormConfig::default();
    let cases = [
        ("raman off, 0 dBm/ch", false, P_CH, 0.15),
        ("raman on, 0 dBm/ch", true, P_CH, 0.3),
        ("raman on, 2 dBm/ch", true, P_CH * 10f64.powf(0.2), 0.4),
    ];
    let mut failures = Vec::new();
    for (label, cr_on, p_ch, bound) in cases {
        let fiber = table_span(100e3, cr_on).derive().unwrap();
        let load = full_grid(p_ch);
        let gaps: Vec<f64> = (0..N_CH)
            .step_by(25)
            .map(|slot| {
                let cf = eta_breakdown(&load, slot, &fiber, &cfg, 1).unwrap().eta_total;
                let full = eta_full_integral(&fiber, &load, slot, &qc).unwrap();
                db(cf / full).abs()
            })
            .collect();
        let avg = mean(&gaps);
        let max = gaps.iter().copied().fold(0.0, f64::max);
        println!(
            "criterion 5: {label}: mean |gap| {avg:.4} dB over {} channels (want <= {bound}), max {max:.4} dB",
            gaps.len()
        );
        if avg > bound {
            failures.push(format!("{label}: mean |gap| {avg:.4} dB exceeds {bound}"));
        }
    }
    assert!(failures.is_empty(), "spectrum agreement violations:\n  {}", failures.join("\n  "));
}

#[test]
fn criterion_06_accuracy_vs_power_transfer_trend() {
    // The band-edge closed-form error must not shrink as the end-of-span
    // power transfer grows over {0, 3, 6.3, 10.3, 13} dB, and must stay below
    // 1 dB throughout. Launch power is scaled to hit each transfer target;
    // the 0 dB point turns the coupling off at the nominal launch.
    let qc = quad_cfg();
    let cfg = ClosedFormConfig::default();
    // Quadrature tolerance grants this much slack on the monotonicity check.
    let slack = 2e-3;
    let mut rows: Vec<(f64, [f64; 2])> = Vec::new();
    for drho in [0.0, 3.0, 6.3, 10.3, 13.0] {
        let cr_on = drho > 0.0;
        let fiber = table_span(100e3, cr_on).derive().unwrap();
        let p_tot = if cr_on {
            drho / (DB_PER_NEPER * fiber.cr * fiber.leff_full * band_extent())
        } else {
            N_CH as f64 * P_CH
        };
        let load = full_grid(p_tot / N_CH as f64);
        let gaps = [0usize, 250].map(|slot| {
            let cf = eta_breakdown(&load, slot, &fiber, &cfg, 1).unwrap().eta_total;
            let full = eta_full_integral(&fiber, &load, slot, &qc).unwrap();
            db(cf / full).abs()
        });
        println!(
            "criterion 6: transfer {drho:>4.1} dB: |gap| {:.4} dB at the low edge, {:.4} dB at the high edge",
            gaps[0], gaps[1]
        );
        rows.push((drho, gaps));
    }
    let mut failures = Vec::new();
    for w in rows.windows(2) {
        let ((d0, g0), (d1, g1)) = (w[0], w[1]);
        for (edge, lo, hi) in [("low", g0[0], g1[0]), ("high", g0[1], g1[1])] {
            if hi < lo - slack {
                failures.push(format!(
                    "{edge}-edge |gap| falls from {lo:.4} to {hi:.4} dB between transfer {d0} and {d1} dB"
                ));
            }
        }
    }
    for (drho, gaps) in &rows {
        for (edge, g) in [("low", gaps[0]), ("high", gaps[1])] {
            if g >= 1.0 {
                failures.push(format!("{edge}-edge |gap| {g:.4} dB at transfer {drho} dB breaches 1 dB"));
            }
        }
    }
    assert!(failures.is_empty(), "accuracy trend violations:\n  {}", failures.join("\n  "));
}

fn single_link(spans: Vec<FiberSpec>) -> Topology {
    Topology {
        nodes: vec!["tx".into(), "rx".into()],
        edges: vec![Edge { from: "tx".into(), to: "rx".into(), spans }],
        directed: true,
    }
}

#[test]
fn criterion_07_multi_span_coherence() {
    // Six identical spans, full grid: a fixed coherence exponent of 0.15
    // must lift the total coefficient by 0.2 +- 0.1 dB over the incoherent
    // sum, and the auto exponent for this channel bandwidth must itself land
    // at 0.15 +- 0.03.
    let topo = single_link(vec![table_span(100e3, true); 6]);
    let spec = ScenarioSpec {
        grid: GridSpec {
            n_slots: N_CH,
            slot_spacing_hz: SP,
            channel_bandwidth_hz: BCH,
            base_power_w: P_CH,
            coi_stride: 1,
        },
        utilization: 1.0,
        drop_fraction: 0.0,
        jitter_db: 0.0,
        predispersion_max_m: 0.0,
        seed: 1,
    };
    let scen = generate_scenario(&topo, &[0], &spec).unwrap();
    let noise = NoiseConfig::default();
    let run = |mode: EpsilonMode| {
        let eval = EvalConfig {
            cf: ClosedFormConfig { epsilon_mode: mode, ..ClosedFormConfig::default() },
            ..EvalConfig::default()
        };
        evaluate_lightpath(&topo, &scen, &eval, &noise).unwrap()
    };
    let coherent = run(EpsilonMode::Fixed(0.15));
    let incoherent = run(EpsilonMode::Incoherent);
    let excesses: Vec<f64> = coherent
        .rows
        .iter()
        .zip(&incoherent.rows)
        .map(|(c, i)| db(c.eta_total / i.eta_total))
        .collect();
    let avg = mean(&excesses);
    let fiber = table_span(100e3, true).derive().unwrap();
    let eps = coherence_epsilon(BCH, &fiber);
    println!(
        "criterion 7: six-span coherent excess {avg:.4} dB mean over {} channels (want 0.2 +- 0.1); \
         auto exponent {eps:.4} (want 0.15 +- 0.03)",
        excesses.len()
    );
    assert!((avg - 0.2).abs() <= 0.1, "coherent excess {avg:.4} dB outside 0.2 +- 0.1");
    assert!((eps - 0.15).abs() <= 0.03, "auto coherence exponent {eps:.4} outside 0.15 +- 0.03");
}

fn two_edge_topology(cr_on: bool) -> Topology {
    Topology {
        nodes: vec!["a".into(), "b".into(), "c".into()],
        edges: vec![
            Edge { from: "a".into(), to: "b".into(), spans: vec![table_span(98.5e3, cr_on); 2] },
            Edge { from: "b".into(), to: "c".into(), spans: vec![table_span(101.5e3, cr_on); 2] },
        ],
        directed: true,
    }
}

#[test]
fn criterion_08_network_scenario() {
    // Two-edge lightpath with seeded random fill at 0.8 and 0.9 utilization:
    // closed form tracks the per-span quadrature within 0.3 dB mean on the
    // sampled channels; the Raman on/off change is positive at the low band
    // edge, negative at the high edge, at most 2 dB either way; the fuller
    // grid fluctuates less across channels.
    let topo_on = two_edge_topology(true);
    let topo_off = two_edge_topology(false);
    let noise = NoiseConfig::default();
    let cf_eval = EvalConfig {
        cf: ClosedFormConfig {
            epsilon_mode: EpsilonMode::Incoherent,
            ..ClosedFormConfig::default()
        },
        ..EvalConfig::default()
    };
    let int_eval = EvalConfig { engine: Engine::Integral, coi_stride: 5, ..EvalConfig::default() };
    let mut variances = Vec::new();
    let mut failures = Vec::new();
    for utilization in [0.8, 0.9] {
        let spec = ScenarioSpec {
            grid: GridSpec::dense_cl_band(P_CH),
            utilization,
            drop_fraction: 0.5,
            jitter_db: 1.0,
            predispersion_max_m: 1e5,
            seed: 17,
        };
        let scen = generate_scenario(&topo_on, &[0, 1], &spec).unwrap();
        let cf = evaluate_lightpath(&topo_on, &scen, &cf_eval, &noise).unwrap();
        let full = evaluate_lightpath(&topo_on, &scen, &int_eval, &noise).unwrap();
        let off = evaluate_lightpath(&topo_off, &scen, &cf_eval, &noise).unwrap();

        let by_slot = |rep: &isrs_gn_network::NliReport, slot: usize| {
            rep.rows.iter().find(|r| r.coi_slot == slot).unwrap().eta_total
        };
        let gaps: Vec<f64> = full
            .rows
            .iter()
            .map(|r| db(by_slot(&cf, r.coi_slot) / r.eta_total).abs())
            .collect();
        let avg = mean(&gaps);
        println!(
            "criterion 8: utilization {utilization}: mean |closed form - quadrature| {avg:.4} dB \
             over {} sampled channels (want <= 0.3)",
            gaps.len()
        );
        if avg > 0.3 {
            failures.push(format!("utilization {utilization}: mean |gap| {avg:.4} dB exceeds 0.3"));
        }

        let lo = db(by_slot(&cf, 0) / by_slot(&off, 0));
        let hi = db(by_slot(&cf, 250) / by_slot(&off, 250));
        println!(
            "criterion 8: utilization {utilization}: raman on/off change {lo:+.4} dB at the low \
             edge, {hi:+.4} dB at the high edge (want opposite signs, |change| <= 2)"
        );
        if lo <= 0.0 {
            failures.push(format!(
                "utilization {utilization}: low-edge on/off change {lo:+.4} dB is not positive"
            ));
        }
        if hi >= 0.0 {
            failures.push(format!(
                "utilization {utilization}: high-edge on/off change {hi:+.4} dB is not negative"
            ));
        }
        if lo.abs() > 2.0 || hi.abs() > 2.0 {
            failures.push(format!(
                "utilization {utilization}: on/off change magnitude beyond 2 dB ({lo:+.4}/{hi:+.4})"
            ));
        }

        let etas_db: Vec<f64> = cf.rows.iter().map(|r| db(r.eta_total)).collect();
        let m = mean(&etas_db);
        variances.push(etas_db.iter().map(|e| (e - m) * (e - m)).sum::<f64>() / etas_db.len() as f64);
    }
    println!(
        "criterion 8: eta variance across channels: {:.5} dB^2 at 0.8, {:.5} dB^2 at 0.9 (want decreasing)",
        variances[0], variances[1]
    );
    if variances[1] >= variances[0] {
        failures.push(format!(
            "variance did not drop with utilization: {:.5} dB^2 at 0.8 vs {:.5} dB^2 at 0.9",
            variances[0], variances[1]
        ));
    }
    assert!(failures.is_empty(), "network scenario violations:\n  {}", failures.join("\n  "));
}

#[test]
fn criterion_09_sloped_launch_spm_deviation() {
    // +-2 dB end-to-end launch tilt at constant total power: the self-channel
    // coefficient from the general-spectrum quadrature moves by about
    // -+0.2 dB relative to the uniform load, sign opposite to the tilt.
    let qc = QuadratureConfig::default();
    let fiber = table_span(100e3, true).derive().unwrap();
    let p_tot = N_CH as f64 * P_CH;
    let uniform = full_grid(P_CH);
    let sloped = |tilt_db: f64| {
        let raw: Vec<f64> = (0..N_CH)
            .map(|k| 10f64.powf(tilt_db * (k as f64 / (N_CH - 1) as f64) / 10.0))
            .collect();
        let scale = p_tot / raw.iter().sum::<f64>();
        SpectralLoad::new(
            (0..N_CH)
                .map(|k| Channel {
                    center_hz: slot_center(k),
                    bandwidth_hz: BCH,
                    power_w: raw[k] * scale,
                })
                .collect(),
        )
        .unwrap()
    };
    let samp = [0usize, 42, 84, 125, 167, 209, 250];
    let spm_u: Vec<f64> = samp
        .iter()
        .map(|&s| eta_spm_general_integral(&fiber, &uniform, s, &qc).unwrap())
        .collect();
    let mut failures = Vec::new();
    // Center-channel deviations are pinned against an independent reference
    // computation of the same quadrature.
    for (tilt, want_mean, pin_center) in [(2.0, -0.2, -0.2231), (-2.0, 0.2, 0.2162)] {
        let load = sloped(tilt);
        let devs: Vec<f64> = samp
            .iter()
            .zip(&spm_u)
            .map(|(&s, &u)| db(u / eta_spm_general_integral(&fiber, &load, s, &qc).unwrap()))
            .collect();
        let avg = mean(&devs);
        let center = devs[3];
        println!(
            "criterion 9: tilt {tilt:+.0} dB: mean deviation {avg:+.4} dB (want {want_mean:+.1} +- 0.1), \
             center channel {center:+.4} dB (reference {pin_center:+.4} +- 0.01)"
        );
        if (avg - want_mean).abs() > 0.1 {
            failures.push(format!(
                "tilt {tilt:+.0} dB: mean deviation {avg:+.4} dB outside {want_mean:+.1} +- 0.1"
            ));
        }
        if (center - pin_center).abs() > 0.01 {
            failures.push(format!(
                "tilt {tilt:+.0} dB: center-channel deviation {center:+.4} dB off the \
                 {pin_center:+.4} reference by more than 0.01 dB"
            ));
        }
        if devs.iter().any(|d| d.signum() != want_mean.signum()) {
            failures.push(format!("tilt {tilt:+.0} dB: deviation changes sign within the samples"));
        }
    }
    assert!(failures.is_empty(), "sloped-launch violations:\n  {}", failures.join("\n  "));
}

fn ssfm_load(cfg: &SsfmConfig, p_ch: f64) -> SpectralLoad {
    SpectralLoad::new(
        (0..cfg.n_channels)
            .map(|k| Channel {
                center_hz: cfg.carrier_hz(k),
                bandwidth_hz: cfg.symbol_rate_hz,
                power_w: p_ch,
            })
            .collect(),
    )
    .unwrap()
}

#[test]
fn criterion_10_ssfm_oracle_agreement() {
    // Desk-scale split-step run, 5 x 10 GBd over one 80 km span: the
    // simulated central-channel coefficient lands within 0.8 dB of the full
    // quadrature; a Kerr-free run is transparent to better than 50 dB SNR;
    // a Kerr-free Raman run tracks the analytic power profile to 0.05 dB.
    let cfg = SsfmConfig::default();
    let span = FiberSpec {
        gamma_per_w_km: 1.2,
        cr_per_w_km_thz: 0.028,
        ..FiberSpec::smf_1550(80e3)
    };
    let load = ssfm_load(&cfg, P_CH);
    let res = simulate(&cfg, &[span.clone()], &load).unwrap();
    let eta_int = eta_full_integral(&span.derive().unwrap(), &load, 2, &quad_cfg()).unwrap();
    let gap = db(res.eta[2] / eta_int);
    println!("criterion 10: simulated vs quadrature central-channel gap {gap:+.4} dB (want |gap| <= 0.8)");
    assert!(gap.abs() <= 0.8, "simulated eta off the quadrature by {gap:+.4} dB (bound 0.8)");

    let lin_cfg = SsfmConfig { n_realizations: 1, ..SsfmConfig::default() };
    let lin_span = FiberSpec { gamma_per_w_km: 0.0, ..span.clone() };
    let lin = simulate(&lin_cfg, &[lin_span], &ssfm_load(&lin_cfg, P_CH)).unwrap();
    let floor = lin.snr.iter().copied().fold(f64::INFINITY, f64::min);
    println!("criterion 10: linear-run SNR floor {:.1} dB (want > 50)", db(floor));
    assert!(db(floor) > 50.0, "linear-run SNR floor {:.1} dB at or below 50 dB", db(floor));

    let prof_cfg = SsfmConfig { gain: GainMode::Off, n_realizations: 1, ..SsfmConfig::default() };
    let prof_span = FiberSpec {
        gamma_per_w_km: 0.0,
        cr_per_w_km_thz: 0.73,
        ..FiberSpec::smf_1550(80e3)
    };
    let p_ch = 0.05;
    let prof_load = ssfm_load(&prof_cfg, p_ch);
    let prof = simulate(&prof_cfg, &[prof_span.clone()], &prof_load).unwrap();
    let d = prof_span.derive().unwrap();
    let worst = (0..prof_cfg.n_channels)
        .map(|k| {
            let want =
                p_ch * profile_general(prof_cfg.carrier_hz(k), d.length, &prof_load, d.cr, d.alpha);
            db(prof.received_power_w[k] / want).abs()
        })
        .fold(0.0, f64::max);
    println!("criterion 10: raman-only power profile worst gap {worst:.5} dB (want <= 0.05)");
    assert!(worst <= 0.05, "raman-only profile off the analytic solution by {worst:.5} dB");
}

#[test]
fn criterion_11_validity_bound() {
    let strong = validity_check(13.0, 0.5).unwrap();
    let typical = validity_check(6.3, 0.5).unwrap();
    println!(
        "criterion 11: validity ratio {:.3} at 13 dB transfer (want flagged at threshold 0.5), \
         {:.3} at 6.3 dB (want clear)",
        strong.validity_ratio, typical.validity_ratio
    );
    assert!(strong.warn, "a 13 dB per-span power transfer must trip the 0.5 validity threshold");
    assert!(!typical.warn, "a 6.3 dB per-span power transfer must pass the 0.5 validity threshold");
}

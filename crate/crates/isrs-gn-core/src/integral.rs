//! Reference quadrature engine: the general-spectrum NLI triple integral and
//! its two-channel (pair) reduction under the uniform-spectrum ISRS profile.
//!
//! The innermost distance integral is evaluated by a fixed-node composite
//! rule on a grid concentrated toward z = 0; the outer frequency integrals
//! use adaptive Gauss pairs (pair route) or fixed-order panels graded toward
//! the phase-matching ridge (general route).

use std::cell::RefCell;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::load::{Channel, SpectralLoad};
use crate::quad::{self, QuadError, GL4, GL5};
use crate::raman::{effective_length, isrs_denominator, sinch};
use crate::units::DerivedFiberParams;

#[derive(Debug, Error)]
pub enum IntegralError {
    #[error("rel_tol {0:e} outside the supported range (1e-12, 1e-1)")]
    RelTolOutOfRange(f64),
    #[error("z_nodes {0} below the minimum of 64")]
    TooFewZNodes(usize),
    #[error("max_subdivisions must be at least 1")]
    NoSubdivisions,
    #[error("channel of interest carries no power")]
    CoiNotPowered,
    #[error("channel index {index} out of range for {len} channels")]
    BadCoiIndex { index: usize, len: usize },
    #[error("no channel centred at {0:.6e} Hz in span load")]
    CoiMissing(f64),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// Tolerances and node counts for the reference engine.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct QuadratureConfig {
    /// Target relative tolerance of the adaptive frequency integrals.
    pub rel_tol: f64,
    /// Subdivision cap per adaptive dimension.
    pub max_subdivisions: u32,
    /// Sample count for the inner distance integral (grid is concentrated
    /// toward z = 0 where the signal power sits).
    pub z_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-4, max_subdivisions: 2000, z_nodes: 1000 }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<(), IntegralError> {
        if !(self.rel_tol > 1e-12 && self.rel_tol < 1e-1) {
            return Err(IntegralError::RelTolOutOfRange(self.rel_tol));
        }
        if self.z_nodes < 64 {
            return Err(IntegralError::TooFewZNodes(self.z_nodes));
        }
        if self.max_subdivisions == 0 {
            return Err(IntegralError::NoSubdivisions);
        }
        Ok(())
    }
}

/// Per-meter phase-mismatch slope of the (f1, f2, f_coi) mixing triplet.
pub fn phase_slope(fiber: &DerivedFiberParams, f1: f64, f2: f64, f_coi: f64) -> f64 {
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    -four_pi_sq * (f1 - f_coi) * (f2 - f_coi) * fiber.beta2_eff(f1 + f2)
}

/// Distance integral ∫₀^L ρ(ζ, f)·e^{jwζ} dζ for one span, where ρ is the
/// loss- and ISRS-shaped power profile normalized to launch.
///
/// Panel edges are uniform in u = 1 − e^{−αζ}, concentrating nodes toward
/// ζ = 0. Within each panel the slowly varying ISRS factor is interpolated
/// quadratically while e^{(jw−α)ζ} is integrated exactly, so the rule stays
/// accurate for |w|·L far beyond the node density.
pub struct InnerKernel {
    alpha: f64,
    edges: Vec<f64>,
    /// Raman exposure P_tot·Cr·Leff(ζ) at panel edges and midpoints.
    x: Vec<f64>,
    /// Frequency-independent part of the profile at each sample.
    pref: Vec<f64>,
}

impl InnerKernel {
    fn build(
        fiber: &DerivedFiberParams,
        p_tot: f64,
        z_nodes: usize,
        mut pref_of_x: impl FnMut(f64) -> f64,
    ) -> Self {
        let npan = ((z_nodes - 1) / 2).max(32);
        let alpha = fiber.alpha;
        let u_full = 1.0 - (-alpha * fiber.length).exp();
        let mut edges: Vec<f64> = (0..=npan)
            .map(|j| {
                let u = u_full * j as f64 / npan as f64;
                -(1.0 - u).ln() / alpha
            })
            .collect();
        edges[npan] = fiber.length;
        let mut samples = Vec::with_capacity(2 * npan + 1);
        for p in 0..npan {
            samples.push(edges[p]);
            samples.push(0.5 * (edges[p] + edges[p + 1]));
        }
        samples.push(edges[npan]);
        let x: Vec<f64> = samples
            .iter()
            .map(|&z| p_tot * fiber.cr * effective_length(alpha, z))
            .collect();
        let pref: Vec<f64> = x.iter().map(|&xi| pref_of_x(xi)).collect();
        Self { alpha, edges, x, pref }
    }

    /// Uniform-spectrum profile: triangular Raman tilt over total bandwidth
    /// `btot_hz`, normalized by its own power integral.
    pub fn uniform(
        fiber: &DerivedFiberParams,
        p_tot: f64,
        btot_hz: f64,
        z_nodes: usize,
    ) -> Self {
        Self::build(fiber, p_tot, z_nodes, |x| 1.0 / sinch(0.5 * x * btot_hz))
    }

    /// General piecewise-constant load: the normalization is the exact
    /// per-slab sum of the spectral integral.
    pub fn general(fiber: &DerivedFiberParams, load: &SpectralLoad, z_nodes: usize) -> Self {
        let p_tot = load.total_power_w();
        Self::build(fiber, p_tot, z_nodes, |x| p_tot / isrs_denominator(x, load))
    }

    /// |∫₀^L ρ(ζ, f_mix)·e^{jwζ} dζ|² with `f_mix` the absolute frequency of
    /// the mixing product.
    pub fn eval_mag2(&self, w: f64, f_mix: f64) -> f64 {
        let s = Complex64::new(-self.alpha, w);
        let npan = self.edges.len() - 1;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut phase = Complex64::new(1.0, 0.0);
        let mut r1 = (-f_mix * self.x[0]).exp() * self.pref[0];
        for p in 0..npan {
            let h = self.edges[p + 1] - self.edges[p];
            let r0 = r1;
            let rm = (-f_mix * self.x[2 * p + 1]).exp() * self.pref[2 * p + 1];
            r1 = (-f_mix * self.x[2 * p + 2]).exp() * self.pref[2 * p + 2];
            let c0 = r0;
            let c1 = (4.0 * rm - 3.0 * r0 - r1) / h;
            let c2 = 2.0 * (r0 - 2.0 * rm + r1) / (h * h);
            let t = s.scale(h);
            let et = t.exp();
            let (m0, m1, m2) = if t.norm_sqr() < 1e-6 {
                // |t| < 1e-3: the closed moments lose too many digits, use
                // the series in t with explicit h powers.
                let m0 = (((t / 120.0 + 1.0 / 24.0) * t + 1.0 / 6.0) * t + 0.5) * t + 1.0;
                let m1 = (((t / 144.0 + 1.0 / 30.0) * t + 0.125) * t + 1.0 / 3.0) * t + 0.5;
                let m2 = (((t / 168.0 + 1.0 / 36.0) * t + 0.1) * t + 0.25) * t + 1.0 / 3.0;
                (m0.scale(h), m1.scale(h * h), m2.scale(h * h * h))
            } else {
                let s2 = s * s;
                (
                    (et - 1.0) / s,
                    (et * (t - 1.0) + 1.0) / s2,
                    (et * (t * t - t.scale(2.0) + 2.0) - 2.0) / (s2 * s),
                )
            };
            acc += phase * (m0.scale(c0) + m1.scale(c1) + m2.scale(c2));
            phase *= et;
        }
        acc.norm_sqr()
    }
}

/// Magnitude-squared inner distance integral at one (f1, f2) point for a
/// general load, phase slope taken from the span dispersion.
pub fn inner_link_integral(
    f1: f64,
    f2: f64,
    f_coi: f64,
    fiber: &DerivedFiberParams,
    load: &SpectralLoad,
    cfg: &QuadratureConfig,
) -> Result<f64, IntegralError> {
    cfg.validate()?;
    let kernel = InnerKernel::general(fiber, load, cfg.z_nodes);
    Ok(kernel.eval_mag2(phase_slope(fiber, f1, f2, f_coi), f1 + f2 - f_coi))
}

fn pair_eta(
    kernel: &InnerKernel,
    fiber: &DerivedFiberParams,
    f_i: f64,
    b_i: f64,
    p_i: f64,
    f_k: f64,
    b_k: f64,
    p_k: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, IntegralError> {
    let df = f_k - f_i;
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let inner_tol = cfg.rel_tol * 0.1;
    let inner_failure: RefCell<Option<QuadError>> = RefCell::new(None);
    // Relative coordinates: u1 around the COI, u2 around the interferer.
    // The mixing product lands inside the interferer slab iff |u1+u2| ≤ B_k/2.
    let mut outer = |u2: f64| -> f64 {
        let lo = (-0.5 * b_i).max(-0.5 * b_k - u2);
        let hi = (0.5 * b_i).min(0.5 * b_k - u2);
        if hi <= lo {
            return 0.0;
        }
        let mut inner = |u1: f64| -> f64 {
            let w = -four_pi_sq
                * u1
                * (u2 + df)
                * fiber.beta2_eff(u1 + u2 + 2.0 * f_i + df);
            kernel.eval_mag2(w, u1 + u2 + f_i + df)
        };
        match quad::adaptive_split(&mut inner, lo, hi, &[0.0], inner_tol, cfg.max_subdivisions) {
            Ok(r) => r.value,
            Err(e) => {
                inner_failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    // Kinks of the u1 range sit where the gate clips at a slab edge; the
    // phase-matching ridge in u2 sits at u2 = −df (only reachable for k = i).
    let bps = [0.5 * (b_i - b_k), 0.5 * (b_k - b_i), -df];
    let result = quad::adaptive_split(
        &mut outer,
        -0.5 * b_k,
        0.5 * b_k,
        &bps,
        cfg.rel_tol,
        cfg.max_subdivisions,
    )?;
    if let Some(e) = inner_failure.into_inner() {
        return Err(e.into());
    }
    let pref = 32.0 / 27.0 * fiber.gamma * fiber.gamma / (b_k * b_k) * (p_k / p_i).powi(2);
    Ok(pref * result.value)
}

/// Pair NLI coefficient: the two-channel reduction with the gate on the
/// mixing product and the uniform-spectrum ISRS profile. `interferer` equal
/// to `coi` gives twice the SPM coefficient.
pub fn eta_xpm_pair_integral(
    coi: &Channel,
    interferer: &Channel,
    fiber: &DerivedFiberParams,
    p_tot: f64,
    btot_hz: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, IntegralError> {
    cfg.validate()?;
    if coi.power_w <= 0.0 {
        return Err(IntegralError::CoiNotPowered);
    }
    let kernel = InnerKernel::uniform(fiber, p_tot, btot_hz, cfg.z_nodes);
    pair_eta(
        &kernel,
        fiber,
        coi.center_hz,
        coi.bandwidth_hz,
        coi.power_w,
        interferer.center_hz,
        interferer.bandwidth_hz,
        interferer.power_w,
        cfg,
    )
}

/// SPM coefficient: half the self-pair integral.
pub fn eta_spm_integral(
    coi: &Channel,
    fiber: &DerivedFiberParams,
    p_tot: f64,
    btot_hz: f64,
    cfg: &QuadratureConfig,
) -> Result<f64, IntegralError> {
    Ok(0.5 * eta_xpm_pair_integral(coi, coi, fiber, p_tot, btot_hz, cfg)?)
}

const RIDGE_LEVELS: u32 = 11;

/// One integration cell: f1 in slab `a`, f2 in slab `b`, and the mixing
/// product f1+f2−f_i gated to slab `c` expressed as bounds on f1+f2.
struct Cell {
    a_lo: f64,
    a_hi: f64,
    b_lo: f64,
    b_hi: f64,
    gate_lo: f64,
    gate_hi: f64,
    ridge_a: bool,
    ridge_b: bool,
    /// PSD product of the three slabs times the (a,b) symmetry factor.
    weight: f64,
}

fn graded_edges(lo: f64, hi: f64, center: f64, levels: u32) -> Vec<f64> {
    let c = center.clamp(lo, hi);
    let mut e = Vec::with_capacity(2 * levels as usize + 3);
    e.push(lo);
    e.push(hi);
    let left = c - lo;
    let right = hi - c;
    if left > 0.0 && right > 0.0 {
        e.push(c);
    }
    for j in 1..=levels as i32 {
        let s = 0.5f64.powi(j);
        if left > 0.0 {
            e.push(c - left * s);
        }
        if right > 0.0 {
            e.push(c + right * s);
        }
    }
    e.sort_by(f64::total_cmp);
    e.dedup();
    e
}

fn segment_edges(lo: f64, hi: f64, breakpoints: &[f64]) -> Vec<f64> {
    let mut e: Vec<f64> = std::iter::once(lo)
        .chain(breakpoints.iter().copied().filter(|&x| x > lo && x < hi))
        .chain(std::iter::once(hi))
        .collect();
    e.sort_by(f64::total_cmp);
    e.dedup();
    e
}

fn integrate_cell(cell: &Cell, f_i: f64, fiber: &DerivedFiberParams, kernel: &InnerKernel) -> f64 {
    let four_pi_sq = 4.0 * std::f64::consts::PI * std::f64::consts::PI;
    let bps = [
        cell.gate_lo - cell.a_hi,
        cell.gate_lo - cell.a_lo,
        cell.gate_hi - cell.a_hi,
        cell.gate_hi - cell.a_lo,
    ];
    let f2_edges = if cell.ridge_b {
        let mut e = graded_edges(cell.b_lo, cell.b_hi, f_i, RIDGE_LEVELS);
        e.extend(bps.iter().copied().filter(|&x| x > cell.b_lo && x < cell.b_hi));
        e.sort_by(f64::total_cmp);
        e.dedup();
        e
    } else {
        segment_edges(cell.b_lo, cell.b_hi, &bps)
    };
    let f1_rule: &[(f64, f64)] = if cell.ridge_a || cell.ridge_b { &GL5 } else { &GL4 };
    let f2_rule: &[(f64, f64)] = if cell.ridge_a || cell.ridge_b { &GL5 } else { &GL4 };
    let mut total = 0.0;
    for seg in f2_edges.windows(2) {
        let mut f2_integrand = |f2: f64| -> f64 {
            let f1_lo = cell.a_lo.max(cell.gate_lo - f2);
            let f1_hi = cell.a_hi.min(cell.gate_hi - f2);
            if f1_hi <= f1_lo {
                return 0.0;
            }
            let mut f1_integrand = |f1: f64| -> f64 {
                let w = -four_pi_sq * (f1 - f_i) * (f2 - f_i) * fiber.beta2_eff(f1 + f2);
                kernel.eval_mag2(w, f1 + f2 - f_i)
            };
            if cell.ridge_a {
                graded_edges(f1_lo, f1_hi, f_i, RIDGE_LEVELS)
                    .windows(2)
                    .map(|p| quad::gauss(&mut f1_integrand, p[0], p[1], f1_rule))
                    .sum()
            } else {
                quad::gauss(&mut f1_integrand, f1_lo, f1_hi, f1_rule)
            }
        };
        total += quad::gauss(&mut f2_integrand, seg[0], seg[1], f2_rule);
    }
    cell.weight * total
}

fn build_cells(load: &SpectralLoad, coi: &Channel) -> Vec<Cell> {
    let f_i = coi.center_hz;
    let occ: Vec<&Channel> = load.channels().iter().filter(|c| c.power_w > 0.0).collect();
    let mut cells = Vec::new();
    for (ia, a) in occ.iter().enumerate() {
        for (ib, b) in occ.iter().enumerate().skip(ia) {
            let sym = if ia == ib { 1.0 } else { 2.0 };
            let sig_lo = a.lower_edge() + b.lower_edge();
            let sig_hi = a.upper_edge() + b.upper_edge();
            for c in occ.iter() {
                let gate_lo = (f_i + c.lower_edge()).max(sig_lo);
                let gate_hi = (f_i + c.upper_edge()).min(sig_hi);
                if gate_hi <= gate_lo {
                    continue;
                }
                cells.push(Cell {
                    a_lo: a.lower_edge(),
                    a_hi: a.upper_edge(),
                    b_lo: b.lower_edge(),
                    b_hi: b.upper_edge(),
                    gate_lo,
                    gate_hi,
                    ridge_a: a.lower_edge() <= f_i && f_i <= a.upper_edge(),
                    ridge_b: b.lower_edge() <= f_i && f_i <= b.upper_edge(),
                    weight: sym * a.psd() * b.psd() * c.psd(),
                });
            }
        }
    }
    cells
}

/// Full-spectrum NLI coefficient of one span by direct quadrature over every
/// slab triple, four-wave mixing terms included. The (f1, f2) symmetry of the
/// integrand halves the cell count.
pub fn eta_full_integral(
    fiber: &DerivedFiberParams,
    load: &SpectralLoad,
    coi_index: usize,
    cfg: &QuadratureConfig,
) -> Result<f64, IntegralError> {
    cfg.validate()?;
    let chans = load.channels();
    let coi = *chans
        .get(coi_index)
        .ok_or(IntegralError::BadCoiIndex { index: coi_index, len: chans.len() })?;
    if coi.power_w <= 0.0 {
        return Err(IntegralError::CoiNotPowered);
    }
    let kernel = InnerKernel::general(fiber, load, cfg.z_nodes);
    let cells = build_cells(load, &coi);
    let contributions: Vec<f64> = cells
        .par_iter()
        .map(|cell| integrate_cell(cell, coi.center_hz, fiber, &kernel))
        .collect();
    let total: f64 = contributions.iter().sum();
    let pref =
        16.0 / 27.0 * fiber.gamma * fiber.gamma * coi.bandwidth_hz / coi.power_w.powi(3);
    Ok(pref * total)
}

/// SPM coefficient of one span under an arbitrary load: the self-slab cell of
/// the full integral, with the general ISRS profile.
pub fn eta_spm_general_integral(
    fiber: &DerivedFiberParams,
    load: &SpectralLoad,
    coi_index: usize,
    cfg: &QuadratureConfig,
) -> Result<f64, IntegralError> {
    cfg.validate()?;
    let chans = load.channels();
    let coi = *chans
        .get(coi_index)
        .ok_or(IntegralError::BadCoiIndex { index: coi_index, len: chans.len() })?;
    if coi.power_w <= 0.0 {
        return Err(IntegralError::CoiNotPowered);
    }
    let kernel = InnerKernel::general(fiber, load, cfg.z_nodes);
    let f_i = coi.center_hz;
    let cell = Cell {
        a_lo: coi.lower_edge(),
        a_hi: coi.upper_edge(),
        b_lo: coi.lower_edge(),
        b_hi: coi.upper_edge(),
        gate_lo: f_i + coi.lower_edge(),
        gate_hi: f_i + coi.upper_edge(),
        ridge_a: true,
        ridge_b: true,
        weight: coi.psd().powi(3),
    };
    let pref =
        16.0 / 27.0 * fiber.gamma * fiber.gamma * coi.bandwidth_hz / coi.power_w.powi(3);
    Ok(pref * integrate_cell(&cell, f_i, fiber, &kernel))
}

/// One span of a multi-span reference evaluation.
#[derive(Debug, Clone)]
pub struct SpanLoad {
    pub fiber: DerivedFiberParams,
    pub load: SpectralLoad,
}

/// Multi-span reference kernel. Spans accumulate incoherently: each span
/// contributes the full integral of its own input load.
#[derive(Debug, Clone)]
pub struct LinkKernel {
    pub spans: Vec<SpanLoad>,
}

impl LinkKernel {
    pub fn single(fiber: DerivedFiberParams, load: SpectralLoad) -> Self {
        Self { spans: vec![SpanLoad { fiber, load }] }
    }

    /// Full-spectrum η of the link for the channel centred at `coi_center_hz`,
    /// which must be present in every span's load.
    pub fn eta_full(&self, coi_center_hz: f64, cfg: &QuadratureConfig) -> Result<f64, IntegralError> {
        let mut total = 0.0;
        for span in &self.spans {
            let idx = span
                .load
                .channels()
                .iter()
                .position(|c| (c.center_hz - coi_center_hz).abs() < 1.0)
                .ok_or(IntegralError::CoiMissing(coi_center_hz))?;
            total += eta_full_integral(&span.fiber, &span.load, idx, cfg)?;
        }
        Ok(total)
    }
}

//! Adaptive 1-D quadrature (embedded 7/15-point Gauss pair, bisection of the
//! worst interval) and the closed-form integral identities used by the
//! derivation of the closed-form NLI coefficients.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not reach rel_tol {target:e}: achieved {achieved:e} after {subdivisions} subdivisions")]
    NonConvergence { target: f64, achieved: f64, subdivisions: u32 },
    #[error("quartic roots are complex: B^2 = {b2} <= 4A = {a4}")]
    ComplexRoots { b2: f64, a4: f64 },
    #[error("quartic factors require A > 0, got {0}")]
    NonPositiveA(f64),
    #[error("identity undefined for B = 0")]
    ZeroB,
}

pub(crate) const GL4: [(f64, f64); 4] = [
    (-0.8611363115940526, 0.3478548451374537),
    (-0.33998104358485626, 0.6521451548625462),
    (0.33998104358485626, 0.6521451548625462),
    (0.8611363115940526, 0.3478548451374537),
];

pub(crate) const GL5: [(f64, f64); 5] = [
    (-0.906179845938664, 0.23692688505618942),
    (-0.5384693101056831, 0.4786286704993662),
    (0.0, 0.568888888888889),
    (0.5384693101056831, 0.4786286704993662),
    (0.906179845938664, 0.23692688505618942),
];

const G7: [(f64, f64); 7] = [
    (-0.9491079123427585, 0.12948496616887065),
    (-0.7415311855993945, 0.2797053914892766),
    (-0.4058451513773972, 0.3818300505051183),
    (0.0, 0.41795918367346896),
    (0.4058451513773972, 0.3818300505051183),
    (0.7415311855993945, 0.2797053914892766),
    (0.9491079123427585, 0.12948496616887065),
];

const G15: [(f64, f64); 15] = [
    (-0.9879925180204854, 0.030753241996118647),
    (-0.937273392400706, 0.07036604748810807),
    (-0.8482065834104272, 0.10715922046717177),
    (-0.7244177313601701, 0.1395706779261539),
    (-0.5709721726085388, 0.16626920581699378),
    (-0.3941513470775634, 0.18616100001556188),
    (-0.20119409399743451, 0.19843148532711125),
    (0.0, 0.2025782419255609),
    (0.20119409399743451, 0.19843148532711125),
    (0.3941513470775634, 0.18616100001556188),
    (0.5709721726085388, 0.16626920581699378),
    (0.7244177313601701, 0.1395706779261539),
    (0.8482065834104272, 0.10715922046717177),
    (0.937273392400706, 0.07036604748810807),
    (0.9879925180204854, 0.030753241996118647),
];

/// Fixed-order Gauss-Legendre rule on [a, b].
pub fn gauss<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, rule: &[(f64, f64)]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    /// Conservative absolute error estimate.
    pub error: f64,
    pub subdivisions: u32,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn eval_segment<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Segment {
    let v7 = gauss(f, a, b, &G7);
    let v15 = gauss(f, a, b, &G15);
    Segment { a, b, value: v15, error: (v15 - v7).abs() }
}

/// Adaptive integration of `f` over [a, b] to relative tolerance `rel_tol`,
/// bisecting the interval with the largest error estimate.
pub fn adaptive<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_subdivisions: u32,
) -> Result<QuadResult, QuadError> {
    if a == b {
        return Ok(QuadResult { value: 0.0, error: 0.0, subdivisions: 0 });
    }
    let mut segments = vec![eval_segment(f, a, b)];
    let mut subdivisions = 0u32;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        let target = rel_tol * total.abs().max(f64::MIN_POSITIVE);
        if err <= target {
            return Ok(QuadResult { value: total, error: err, subdivisions });
        }
        if subdivisions >= max_subdivisions {
            return Err(QuadError::NonConvergence {
                target: rel_tol,
                achieved: err / total.abs().max(f64::MIN_POSITIVE),
                subdivisions,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Segment { a, b, .. } = segments[worst];
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval width at floating-point resolution: accept what we have.
            let seg = &mut segments[worst];
            seg.error = 0.0;
            continue;
        }
        segments[worst] = eval_segment(f, a, mid);
        segments.push(eval_segment(f, mid, b));
        subdivisions += 1;
    }
}

/// Adaptive integration over a piecewise-smooth function with known interior
/// breakpoints (gate edges, ridge centers): each sub-interval is integrated
/// independently so the adaptive rule never straddles a kink.
pub fn adaptive_split<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    max_subdivisions: u32,
) -> Result<QuadResult, QuadError> {
    let mut edges: Vec<f64> = std::iter::once(a)
        .chain(breakpoints.iter().copied().filter(|&x| x > a && x < b))
        .chain(std::iter::once(b))
        .collect();
    edges.sort_by(f64::total_cmp);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut subdivisions = 0;
    for pair in edges.windows(2) {
        let r = adaptive(f, pair[0], pair[1], rel_tol, max_subdivisions)?;
        value += r.value;
        error += r.error;
        subdivisions += r.subdivisions;
    }
    Ok(QuadResult { value, error, subdivisions })
}

fn quartic_roots(a: f64, b: f64) -> Result<(f64, f64), QuadError> {
    // A + Bx² + x⁴ = (x² + (B−C)/2)(x² + (B+C)/2) with C = √(B²−4A).
    let disc = b * b - 4.0 * a;
    if disc <= 0.0 {
        return Err(QuadError::ComplexRoots { b2: b * b, a4: 4.0 * a });
    }
    if a <= 0.0 {
        return Err(QuadError::NonPositiveA(a));
    }
    Ok((disc.sqrt(), b))
}

/// ∫₀^X dx/(A + Bx² + x⁴) in closed form. Requires A > 0 and B² > 4A.
pub fn identity_i1(a: f64, b: f64, x: f64) -> Result<f64, QuadError> {
    let (c, b) = quartic_roots(a, b)?;
    let s2 = std::f64::consts::SQRT_2;
    Ok(s2 / (c * (b - c).sqrt()) * (s2 * x / (b - c).sqrt()).atan()
        - s2 / (c * (b + c).sqrt()) * (s2 * x / (b + c).sqrt()).atan())
}

/// ∫₀^X x²dx/(A + Bx² + x⁴) in closed form. Requires A > 0 and B² > 4A.
pub fn identity_i2(a: f64, b: f64, x: f64) -> Result<f64, QuadError> {
    let (c, b) = quartic_roots(a, b)?;
    let s2 = std::f64::consts::SQRT_2;
    Ok((b + c).sqrt() / (s2 * c) * (s2 * x / (b + c).sqrt()).atan()
        - (b - c).sqrt() / (s2 * c) * (s2 * x / (b - c).sqrt()).atan())
}

/// ∫₀^X (1 + A²f²)/(1 + B²f²) df in closed form. Requires B ≠ 0.
pub fn identity_i3(a: f64, b: f64, x: f64) -> Result<f64, QuadError> {
    if b == 0.0 {
        return Err(QuadError::ZeroB);
    }
    Ok(((b * b - a * a) * (b * x).atan() + a * a * b * x) / (b * b * b))
}

/// The asinh approximation of ∫₀^x atan(Df)/f df used by the closed forms.
pub fn identity_i4_asinh(d: f64, x: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * (0.5 * d * x).asinh()
}

/// Exact ∫₀^x atan(Df)/f df = Ti₂(Dx), the inverse tangent integral.
pub fn identity_i4_exact(d: f64, x: f64) -> f64 {
    inverse_tangent_integral(d * x)
}

/// Ti₂(x) = Σ (−1)ⁿ x^{2n+1}/(2n+1)², extended beyond |x| ≤ 1 through
/// Ti₂(x) = (π/2)·ln(x) + Ti₂(1/x).
pub fn inverse_tangent_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -inverse_tangent_integral(-x);
    }
    if x > 1.0 {
        return std::f64::consts::FRAC_PI_2 * x.ln() + inverse_tangent_integral(1.0 / x);
    }
    // Alternating series: truncation error is bounded by the first dropped
    // term, so an absolute cutoff of 1e-12 costs at most ~5e5 terms at x = 1.
    let mut sum = 0.0;
    let mut xp = x;
    let x2 = x * x;
    let mut n = 0u64;
    loop {
        let odd = (2 * n + 1) as f64;
        let term = xp / (odd * odd);
        sum += if n % 2 == 0 { term } else { -term };
        if term < 1e-12 || n > 1_000_000 {
            return sum;
        }
        xp *= x2;
        n += 1;
    }
}

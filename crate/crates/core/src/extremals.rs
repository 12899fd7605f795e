//! Sharpness and optimality experiments: the boundary-concentrating bubble
//! for the Rellich–Sobolev inequality, the `u_{ε,δ}` family for the `X⁴`
//! power in three dimensions, and instance checks of the main inequalities.

use std::f64::consts::{LN_2, PI};

use statrs::function::exponential;
use statrs::function::gamma::gamma_ui;

use crate::constants::{sobolev_constants, sphere_area, x_of_r, x_unchecked, Dimension};
use crate::error::{Error, Result};
use crate::harmonics::{bilap_form, gradhardy_form, mode, poly_mul, random_corpus, PolyProfile, RadialProfile};
use crate::par;
use crate::quadrature::{UnitRule, WeightedQuadrature};

/// `1 + ln 2`, the value of `1/X` at `r = 1/2`.
const Y_HALF: f64 = 1.0 + LN_2;

/// Default truncation depth `L = −ln r` for the direct route of [`thm2_lhs`].
pub const DIRECT_DEPTH: f64 = 400.0;

// ---------------------------------------------------------------------------
// special functions

/// Upper incomplete gamma `Γ(b, x)` for real `b` and `x > 0`.
pub fn upper_gamma(b: f64, x: f64) -> f64 {
    if b > 0.0 {
        return gamma_ui(b, x);
    }
    let steps = (-b).ceil();
    let base = b + steps;
    let mut g = if base == 0.0 {
        exponential::integral(x, 1).unwrap_or(f64::NAN)
    } else {
        gamma_ui(base, x)
    };
    // Γ(c, x) = (Γ(c+1, x) − x^c e^{−x}) / c, stepping down from `base`
    let mut c = base;
    for _ in 0..steps as usize {
        c -= 1.0;
        g = (g - x.powf(c) * (-x).exp()) / c;
    }
    g
}

/// `∫_{y}^{∞} e^{−a(t−1)} t^{−s} dt` for `a ≥ 0`, `y ≥ 1`; `+∞` when divergent.
fn upper_log_tail(a: f64, s: f64, y: f64) -> f64 {
    if a == 0.0 {
        return if s > 1.0 { y.powf(1.0 - s) / (s - 1.0) } else { f64::INFINITY };
    }
    // substitute z = a t
    (a + (s - 1.0) * a.ln()).exp() * upper_gamma(1.0 - s, a * y)
}

/// `∫ r^{−1+a} X^s dr` over `e^{−(depth)} ≤ r ≤ 1/2` (`depth = ∞` for the
/// full interval), computed in the variable `t = 1 − ln r = 1/X`.
pub fn log_power_integral(a: f64, s: f64, depth: f64) -> f64 {
    let yc = 1.0 + depth;
    if depth.is_infinite() {
        return upper_log_tail(a, s, Y_HALF);
    }
    if a == 0.0 {
        return if (s - 1.0).abs() < 1e-14 {
            (yc / Y_HALF).ln()
        } else {
            (yc.powf(1.0 - s) - Y_HALF.powf(1.0 - s)) / (1.0 - s)
        };
    }
    upper_log_tail(a, s, Y_HALF) - upper_log_tail(a, s, yc)
}

// ---------------------------------------------------------------------------
// cutoff

/// Degree-7 smoothstep `S(y) = 35y⁴ − 84y⁵ + 70y⁶ − 20y⁷` with two derivatives.
fn smoothstep(y: f64) -> [f64; 3] {
    if y <= 0.0 {
        return [0.0; 3];
    }
    if y >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let y2 = y * y;
    let y3 = y2 * y;
    [
        y3 * y * (35.0 - 84.0 * y + 70.0 * y2 - 20.0 * y3),
        y3 * (140.0 - 420.0 * y + 420.0 * y2 - 140.0 * y3),
        y2 * (420.0 - 1680.0 * y + 2100.0 * y2 - 840.0 * y3),
    ]
}

/// `C³` cutoff equal to `1` on `[0, 1/2]` and `0` on `[1, ∞)`, with `ψ', ψ''`.
pub fn cutoff(r: f64) -> [f64; 3] {
    let s = smoothstep(2.0 * r - 1.0);
    [1.0 - s[0], -2.0 * s[1], -4.0 * s[2]]
}

/// `d(ψ²)/dr`.
fn cutoff_sq_deriv(r: f64) -> f64 {
    let c = cutoff(r);
    2.0 * c[0] * c[1]
}

/// Composite Gauss–Legendre sum over `[1/2, 1]`, where the cutoff varies.
fn far_integral(quad: &WeightedQuadrature, f: impl Fn(f64) -> f64) -> f64 {
    let rule = UnitRule::new(quad.points());
    let panels = 16;
    (0..panels)
        .map(|i| {
            let a = 0.5 + 0.5 * i as f64 / panels as f64;
            rule.apply(a, a + 0.5 / panels as f64, &f)
        })
        .sum()
}

// ---------------------------------------------------------------------------
// the u_{ε,δ} family

/// Parameters of `f_{ε,δ} = r^{1/2+ε} X^{−1/2+δ} ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpsDeltaParams {
    pub eps: f64,
    pub delta: f64,
}

impl EpsDeltaParams {
    /// Validated constructor: `0 < ε ≤ 0.1`, `0 ≤ δ ≤ 0.5`.
    pub fn new(eps: f64, delta: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 0.1) {
            return Err(Error::Parameter(format!("ε must lie in (0, 0.1], got {eps}")));
        }
        Self::limit(eps, delta)
    }

    /// As [`EpsDeltaParams::new`] but also admitting `ε = 0` (used for the
    /// `ε → 0` limits, which are evaluated in closed form).
    pub fn limit(eps: f64, delta: f64) -> Result<Self> {
        if !(0.0..=0.1).contains(&eps) {
            return Err(Error::Parameter(format!("ε must lie in [0, 0.1], got {eps}")));
        }
        if !(0.0..=0.5).contains(&delta) {
            return Err(Error::Parameter(format!("δ must lie in [0, 1/2], got {delta}")));
        }
        Ok(EpsDeltaParams { eps, delta })
    }
}

/// Mode-1 profile `f_{ε,δ}` in three dimensions, optionally cut off below
/// `r = e^{−depth}`.
#[derive(Debug, Clone, Copy)]
pub struct EpsDeltaProfile {
    pub params: EpsDeltaParams,
    depth: f64,
}

pub fn eps_delta_profile(p: EpsDeltaParams) -> EpsDeltaProfile {
    EpsDeltaProfile { params: p, depth: f64::INFINITY }
}

impl EpsDeltaProfile {
    /// Same profile restricted to `r ≥ e^{−depth}`.
    pub fn truncated(self, depth: f64) -> Self {
        EpsDeltaProfile { depth, ..self }
    }

    /// `[f, f', f'']` without the cutoff, from the closed-form derivatives.
    pub fn bare(&self, r: f64) -> [f64; 3] {
        let EpsDeltaParams { eps, delta } = self.params;
        let x = x_unchecked(r);
        let a = delta - 0.5;
        let lx = x.ln();
        let lr = r.ln();
        let f = ((0.5 + eps) * lr + a * lx).exp();
        let d1 = ((eps - 0.5) * lr + a * lx).exp() * ((0.5 + eps) + a * x);
        let d2 = ((eps - 1.5) * lr + a * lx).exp()
            * ((eps * eps - 0.25) + 2.0 * eps * a * x + (delta * delta - 0.25) * x * x);
        [f, d1, d2]
    }
}

impl RadialProfile for EpsDeltaProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        if r >= 1.0 {
            return [0.0; 3];
        }
        let b = self.bare(r);
        if r <= 0.5 {
            return b;
        }
        let c = cutoff(r);
        [
            b[0] * c[0],
            b[1] * c[0] + b[0] * c[1],
            b[2] * c[0] + 2.0 * b[1] * c[1] + b[0] * c[2],
        ]
    }

    fn vanishing_exponent(&self) -> f64 {
        0.5 + self.params.eps
    }

    fn support(&self) -> (f64, f64) {
        (if self.depth.is_finite() { (-self.depth).exp() } else { 0.0 }, 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.5]
    }
}

/// `I^{(j)} = ∫₀¹ r^{−1+2ε} X^{−1+j+2δ} ψ² dr`; `+∞` when it diverges (`ε = 0`).
pub fn i_integral(j: u32, p: EpsDeltaParams, quad: &WeightedQuadrature) -> f64 {
    i_integral_to(j, p, f64::INFINITY, quad)
}

fn i_integral_to(j: u32, p: EpsDeltaParams, depth: f64, quad: &WeightedQuadrature) -> f64 {
    let s = -1.0 + f64::from(j) + 2.0 * p.delta;
    let near = log_power_integral(2.0 * p.eps, s, depth);
    let far = far_integral(quad, |r| {
        let psi = cutoff(r)[0];
        r.powf(-1.0 + 2.0 * p.eps) * x_unchecked(r).powf(s) * psi * psi
    });
    near + far
}

/// `R_j = 2ε I^{(j)} − (1−j−2δ) I^{(j+1)}` from integration by parts:
/// `−∫ r^{2ε} X^{−1+j+2δ} (ψ²)' dr` minus the truncation boundary term.
pub fn ibp_combination(j: u32, p: EpsDeltaParams, quad: &WeightedQuadrature) -> f64 {
    ibp_combination_to(j, p, f64::INFINITY, quad)
}

fn ibp_combination_to(j: u32, p: EpsDeltaParams, depth: f64, quad: &WeightedQuadrature) -> f64 {
    let s = -1.0 + f64::from(j) + 2.0 * p.delta;
    let inner = -far_integral(quad, |r| r.powf(2.0 * p.eps) * x_unchecked(r).powf(s) * cutoff_sq_deriv(r));
    if depth.is_infinite() {
        return inner;
    }
    inner - (-2.0 * p.eps * depth).exp() * (1.0 + depth).powf(-s)
}

// ---------------------------------------------------------------------------
// left-hand side of the three-dimensional inequality

/// `25/36`, the gradient-Rellich constant for `n = 3`.
const C3: f64 = 25.0 / 36.0;

/// Pointwise `r`-integrand of `∫(Δu)² − 25/36 ∫|∇u|²/|x|²` for `u = f φ₁`.
fn lhs_density(v: [f64; 3], r: f64) -> f64 {
    let lap = v[2] + 2.0 * v[1] / r - 2.0 * v[0] / (r * r);
    lap * lap * r * r - C3 * (v[1] * v[1] + 2.0 * v[0] * v[0] / (r * r))
}

/// Exact coefficients `a_j` with `lhs_density = r^{−1+2ε} X^{−1+2δ} Σ a_j X^j`
/// where `ψ = 1`.
pub fn density_coefficients(p: EpsDeltaParams) -> [f64; 5] {
    let (e, d) = (p.eps, p.delta);
    let m = 2.0 * d - 1.0;
    [
        e.powi(4) + 4.0 * e.powi(3) + 29.0 / 36.0 * e * e - 205.0 / 36.0 * e,
        m * (144.0 * e.powi(3) + 432.0 * e * e + 58.0 * e - 205.0) / 72.0,
        m * (432.0 * d * e * e + 864.0 * d * e + 58.0 * d - 72.0 * e * e - 144.0 * e - 209.0) / 144.0,
        m * m * (2.0 * d + 1.0) * (e + 1.0) / 2.0,
        m * m * (2.0 * d + 1.0).powi(2) / 16.0,
    ]
}

/// Leading coefficients of `I^{(0)}, I^{(1)}, I^{(2)}` as displayed in the
/// published expansion.
pub fn published_coefficients(p: EpsDeltaParams) -> [f64; 3] {
    let (e, d) = (p.eps, p.delta);
    [
        191.0 / 36.0 * e + 173.0 / 36.0 * e * e + e.powi(4),
        -(1.0 - 2.0 * d) * (191.0 / 72.0 + 173.0 / 36.0 * e + 2.0 * e.powi(3)),
        209.0 / 144.0 - 191.0 / 36.0 * d + 173.0 / 36.0 * d * d + (0.5 - 4.0 * d + 6.0 * d * d) * e * e,
    ]
}

/// `∫_{1/2}^{1}` of the density minus its `ψ = 1` expansion weighted by `ψ²`.
fn cutoff_remainder(p: EpsDeltaParams, quad: &WeightedQuadrature) -> f64 {
    let prof = eps_delta_profile(p);
    let a = density_coefficients(p);
    far_integral(quad, |r| {
        let x = x_unchecked(r);
        let psi = cutoff(r)[0];
        let base = r.powf(-1.0 + 2.0 * p.eps) * x.powf(-1.0 + 2.0 * p.delta) * psi * psi;
        let series = a.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        lhs_density(prof.eval(r), r) - base * series
    })
}

/// Both evaluations of the left-hand side, on `r ≥ e^{−depth}`, plus the
/// full value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thm2Lhs {
    /// Mode-1 quadratic forms on the truncated profile.
    pub direct: f64,
    /// Published `I^{(0..2)}` combination plus the bounded remainder, same truncation.
    pub combination: f64,
    pub difference: f64,
    pub tolerance: f64,
    /// The bounded remainder (integration-by-parts combinations, `I^{(3,4)}`,
    /// cutoff terms) over the full interval.
    pub remainder: f64,
    /// Full-interval value.
    pub value: f64,
}

/// Published combination with the bounded remainder, on `r ≥ e^{−depth}`.
/// Returns `(total, remainder, Σ|p_j I_j|)`.
fn published_route(p: EpsDeltaParams, depth: f64, quad: &WeightedQuadrature) -> (f64, f64, f64) {
    let (e, d) = (p.eps, p.delta);
    let pc = published_coefficients(p);
    let a = density_coefficients(p);
    let i: Vec<f64> = (0..5).map(|j| i_integral_to(j, p, depth, quad)).collect();
    let r0 = ibp_combination_to(0, p, depth, quad);
    let r1 = ibp_combination_to(1, p, depth, quad);
    let alpha = (4.0 * e * e - 4.0 * e - 11.0) / 2.0;
    let beta = (2.0 * d - 1.0) * (2.0 * e - 1.0);
    let rem = alpha * r0 + beta * r1 + e * (1.0 - 2.0 * d).powi(2) * i[2] + a[3] * i[3] + a[4] * i[4]
        + cutoff_remainder(p, quad);
    let lead: Vec<f64> = (0..3).map(|j| pc[j] * i[j]).collect();
    (lead.iter().sum::<f64>() + rem, rem, lead.iter().map(|v| v.abs()).sum())
}

/// Full left-hand side, valid down to `ε = 0` (where `I^{(0)}, I^{(1)}` are
/// infinite but enter only through bounded combinations).
pub fn thm2_lhs_value(p: EpsDeltaParams, quad: &WeightedQuadrature) -> f64 {
    let (e, d) = (p.eps, p.delta);
    let a = density_coefficients(p);
    let k = (108.0 * e * e + 288.0 * e + 29.0) / 144.0;
    let c0 = (36.0 * e.powi(3) + 144.0 * e * e + 29.0 * e - 205.0) / 72.0;
    let c1 = -(1.0 - 2.0 * d) * k;
    let c2 = a[2] + 2.0 * d * (1.0 - 2.0 * d) * k;
    c0 * ibp_combination(0, p, quad)
        + c1 * ibp_combination(1, p, quad)
        + c2 * i_integral(2, p, quad)
        + a[3] * i_integral(3, p, quad)
        + a[4] * i_integral(4, p, quad)
        + cutoff_remainder(p, quad)
}

/// Left-hand side computed by the mode-1 forms and by the published
/// coefficient combination; fails when the two disagree.
pub fn thm2_lhs(p: EpsDeltaParams, quad: &WeightedQuadrature) -> Result<Thm2Lhs> {
    let m = mode(3, 1)?;
    let prof = eps_delta_profile(p).truncated(DIRECT_DEPTH);
    // the bilaplacian form is reduced by parts; the cut at r_c leaves
    // −[2r f'² − 4f f' − 4f²/r] at r_c behind
    let rc = (-DIRECT_DEPTH).exp();
    let v = prof.eval(rc);
    let boundary = 2.0 * rc * v[1] * v[1] - 4.0 * v[0] * v[1] - 4.0 * v[0] * v[0] / rc;
    let direct = bilap_form(&m, &prof, quad)? - boundary - C3 * gradhardy_form(&m, &prof, quad)?;
    let (combination, _, scale) = published_route(p, DIRECT_DEPTH, quad);
    let (_, remainder, _) = published_route(p, f64::INFINITY, quad);
    let value = thm2_lhs_value(p, quad);
    let difference = direct - combination;
    let tolerance = 1e-8 * (scale + direct.abs()) + 1e-10;
    if !(difference.abs() <= tolerance) {
        return Err(Error::Verification(format!(
            "direct and expanded left-hand sides disagree at ε = {}, δ = {}: {direct} vs {combination}",
            p.eps, p.delta
        )));
    }
    Ok(Thm2Lhs { direct, combination, difference, tolerance, remainder, value })
}

// ---------------------------------------------------------------------------
// right-hand side: (∫|∇u|⁶ X^μ dx)^{1/3}

/// `3/(4π)`, the square of the normalised first harmonic's amplitude.
const PHI1_SQ: f64 = 3.0 / (4.0 * PI);

/// `∫_{S²} (φ₁² f'² + |∇_ωφ₁|² (f/r)²)³ dω` by a Gauss rule in `t = cos θ`.
fn angular_sixth(d1: f64, fr: f64, rule: &UnitRule) -> f64 {
    2.0 * PI
        * rule.apply(-1.0, 1.0, |t| {
            let g = PHI1_SQ * (d1 * d1 * t * t + fr * fr * (1.0 - t * t));
            g * g * g
        })
}

/// `∫_{B₁} |∇u|⁶ X^μ dx` for `u = f_{ε,δ} φ₁`; closed form on `r ≤ 1/2`,
/// nested Gauss quadrature on `[1/2, 1]`. `+∞` if the integral diverges.
pub fn thm2_rhs_integral(p: EpsDeltaParams, mu: f64, quad: &WeightedQuadrature) -> f64 {
    let (a, b) = (0.5 + p.eps, p.delta - 0.5);
    // (A + BX)² − 1 as a polynomial in X, then 4π(1 + c + 3c²/5 + c³/7)
    let c = [a * a - 1.0, 2.0 * a * b, b * b];
    let c2 = poly_mul(&c, &c);
    let c3 = poly_mul(&c2, &c);
    let mut ang = [0.0; 7];
    ang[0] += 1.0;
    for (k, v) in c.iter().enumerate() {
        ang[k] += v;
    }
    for (k, v) in c2.iter().enumerate() {
        ang[k] += 0.6 * v;
    }
    for (k, v) in c3.iter().enumerate() {
        ang[k] += v / 7.0;
    }
    let base = mu - 3.0 + 6.0 * p.delta;
    let near: f64 = ang
        .iter()
        .enumerate()
        .filter(|(_, &v)| v != 0.0)
        .map(|(k, &v)| 4.0 * PI * v * log_power_integral(6.0 * p.eps, base + k as f64, f64::INFINITY))
        .sum::<f64>()
        * PHI1_SQ.powi(3);
    let prof = eps_delta_profile(p);
    let rule = UnitRule::new(quad.points());
    let far = far_integral(quad, |r| {
        let v = prof.eval(r);
        r * r * x_unchecked(r).powf(mu) * angular_sixth(v[1], v[0] / r, &rule)
    });
    near + far
}

/// `(∫_{B₁} |∇u|⁶ X^μ dx)^{1/3}` for `u = f_{ε,δ} φ₁`.
pub fn thm2_rhs(p: EpsDeltaParams, mu: f64, quad: &WeightedQuadrature) -> f64 {
    thm2_rhs_integral(p, mu, quad).cbrt()
}

// ---------------------------------------------------------------------------
// optimality sweep

/// One `(ε, δ)` evaluation of the quotient `LHS / RHS`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub eps: f64,
    pub delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub quotient: f64,
}

/// Quotients in sweep order (`δ` outer, decreasing; `ε` inner, decreasing),
/// plus the closed-form `ε → 0` value for each `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub mu: f64,
    pub points: Vec<SweepPoint>,
    pub limits: Vec<SweepPoint>,
    /// First over last of the `ε → 0` quotients (the `ε`-first order of limits).
    pub collapse: f64,
    /// Same ratio restricted to `δ > (4−μ)/6`, where the right-hand side stays finite.
    pub collapse_above_threshold: f64,
    /// First over last of the finite-`ε` quotients.
    pub finite_collapse: f64,
    /// Smallest quotient seen, limits included.
    pub floor: f64,
}

pub const SWEEP_EPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// `δ ∈ {0.25, 0.1, 0.05, (4−μ)/6 + 0.01}`, decreasing; the last entry is
/// clamped to `0` when `μ > 4.06`.
pub fn sweep_deltas(mu: f64) -> Vec<f64> {
    let mut d = vec![0.25, 0.1, 0.05, ((4.0 - mu) / 6.0 + 0.01).max(0.0)];
    d.sort_by(|a, b| b.total_cmp(a));
    d.dedup();
    d
}

fn sweep_point(eps: f64, delta: f64, mu: f64, quad: &WeightedQuadrature) -> Result<SweepPoint> {
    let lhs = if eps > 0.0 {
        thm2_lhs(EpsDeltaParams::new(eps, delta)?, quad)?.value
    } else {
        thm2_lhs_value(EpsDeltaParams::limit(0.0, delta)?, quad)
    };
    let rhs = thm2_rhs(EpsDeltaParams::limit(eps, delta)?, mu, quad);
    Ok(SweepPoint { eps, delta, lhs, rhs, quotient: lhs / rhs })
}

/// Sweep over an explicit grid.
pub fn optimality_sweep_on(mu: f64, eps: &[f64], deltas: &[f64], quad: &WeightedQuadrature) -> Result<SweepReport> {
    let grid: Vec<(f64, f64)> = deltas.iter().flat_map(|&d| eps.iter().map(move |&e| (e, d))).collect();
    let points = par::map(&grid, |&(e, d)| sweep_point(e, d, mu, quad)).into_iter().collect::<Result<Vec<_>>>()?;
    let limits = par::map(deltas, |&d| sweep_point(0.0, d, mu, quad)).into_iter().collect::<Result<Vec<_>>>()?;
    let ratio = |v: &[SweepPoint]| match (v.first(), v.last()) {
        (Some(a), Some(b)) => a.quotient / b.quotient,
        _ => f64::NAN,
    };
    let threshold = (4.0 - mu) / 6.0;
    let above: Vec<SweepPoint> = limits.iter().copied().filter(|p| p.delta > threshold).collect();
    let floor = points.iter().chain(&limits).map(|p| p.quotient).fold(f64::INFINITY, f64::min);
    Ok(SweepReport {
        mu,
        collapse: ratio(&limits),
        collapse_above_threshold: ratio(&above),
        finite_collapse: ratio(&points),
        floor,
        points,
        limits,
    })
}

/// Sweep on the standard grid: `ε ∈ {10⁻¹, …, 10⁻⁴}` inside each `δ` of
/// [`sweep_deltas`].
pub fn optimality_sweep(mu: f64, quad: &WeightedQuadrature) -> Result<SweepReport> {
    optimality_sweep_on(mu, &SWEEP_EPS, &sweep_deltas(mu), quad)
}

// ---------------------------------------------------------------------------
// concentrating bubble

/// Truncated bubble `(1 + λ²s²)^{−(n−4)/2} χ(s/ρ)`, `s = |x − x₀|`, with
/// `|x₀| = 1 − offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleParams {
    pub n: u32,
    pub lambda: f64,
    pub rho: f64,
    pub offset: f64,
}

impl BubbleParams {
    /// Bubble centred at distance `2ρ` from the unit sphere.
    pub fn new(n: u32, lambda: f64, rho: f64) -> Result<Self> {
        let p = BubbleParams { n, lambda, rho, offset: 2.0 * rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 5 {
            return Err(Error::Domain(format!("bubble quotient needs n ≥ 5, got {}", self.n)));
        }
        if !(self.rho > 0.0 && self.rho < 0.25) {
            return Err(Error::Parameter(format!("support radius must lie in (0, 1/4), got {}", self.rho)));
        }
        if !(self.lambda * self.rho >= 10.0) {
            return Err(Error::Parameter(format!("need λρ ≥ 10, got {}", self.lambda * self.rho)));
        }
        if !(self.offset > self.rho && self.offset + self.rho < 1.0) {
            return Err(Error::Parameter(format!(
                "support must sit inside the unit ball away from the origin (offset {}, ρ {})",
                self.offset, self.rho
            )));
        }
        Ok(())
    }

    /// `|x₀|`.
    pub fn center(&self) -> f64 {
        1.0 - self.offset
    }

    /// `[U, U', U'']` as functions of `s`.
    pub fn profile(&self, s: f64) -> [f64; 3] {
        let k = (f64::from(self.n) - 4.0) / 2.0;
        let l2 = self.lambda * self.lambda;
        let q = 1.0 + l2 * s * s;
        let b = q.powf(-k);
        let b1 = -2.0 * k * l2 * s * b / q;
        let b2 = -2.0 * k * l2 * b / q + 4.0 * k * (k + 1.0) * l2 * l2 * s * s * b / (q * q);
        let c = cutoff(s / self.rho);
        let (c1, c2) = (c[1] / self.rho, c[2] / (self.rho * self.rho));
        [b * c[0], b1 * c[0] + b * c1, b2 * c[0] + 2.0 * b1 * c1 + b * c2]
    }

    /// `∫_{|x−x₀|<ρ} g(s) dx` for a radial `g`.
    fn radial<F: Fn(f64) -> f64>(&self, quad: &WeightedQuadrature, g: F) -> Result<f64> {
        let n = self.n;
        let q = quad.clone().with_breakpoints(&[0.5]);
        let val = q.integrate(|t| g(self.rho * t), f64::from(n) - 1.0, 0.0)?;
        Ok(sphere_area(n) * self.rho.powi(n as i32) * val)
    }

    fn laplacian_sq(&self, quad: &WeightedQuadrature) -> Result<f64> {
        let n1 = f64::from(self.n) - 1.0;
        self.radial(quad, |s| {
            if s == 0.0 {
                return 0.0;
            }
            let u = self.profile(s);
            let lap = u[2] + n1 * u[1] / s;
            lap * lap
        })
    }
}

/// Certified bounds on the full quotient together with its pure Sobolev part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BubbleBounds {
    pub lower: f64,
    pub upper: f64,
    /// `∫(ΔU)² / (∫|U|^{2n/(n−4)})^{(n−4)/n}`.
    pub sobolev: f64,
}

/// Sobolev quotient of the truncated bubble.
pub fn sobolev_quotient(p: &BubbleParams, quad: &WeightedQuadrature) -> Result<f64> {
    p.validate()?;
    let nf = f64::from(p.n);
    let q = 2.0 * nf / (nf - 4.0);
    let a = p.laplacian_sq(quad)?;
    let m = p.radial(quad, |s| p.profile(s)[0].abs().powf(q))?;
    Ok(a / m.powf((nf - 4.0) / nf))
}

/// Bounds on
/// `[∫(ΔU)² − c∫U²/|x|⁴ + c∫U² X^{2(n−2)/(n−1)}/|x|⁴] / (∫X^{2(n−2)/(n−4)}|U|^{2n/(n−4)})^{(n−4)/n}`,
/// `c = n²(n−4)²/16`. At distance `s` from `x₀` the weights are bracketed by
/// their values at `|x| = |x₀| ∓ s`.
pub fn bubble_quotient(p: &BubbleParams, quad: &WeightedQuadrature) -> Result<BubbleBounds> {
    p.validate()?;
    let nf = f64::from(p.n);
    let c = nf * nf * (nf - 4.0).powi(2) / 16.0;
    let a_exp = 2.0 * (nf - 2.0) / (nf - 1.0);
    let w_exp = 2.0 * (nf - 2.0) / (nf - 4.0);
    let q = 2.0 * nf / (nf - 4.0);
    let e = (nf - 4.0) / nf;
    let d0 = p.center();
    // |x|^{-4}(1 − X^a) decreases in |x|; X^{w} increases
    let hardy = |r: f64| -> Result<f64> { Ok(r.powi(-4) * (1.0 - x_of_r(r)?.powf(a_exp))) };
    let lap = p.laplacian_sq(quad)?;
    let corr_hi = p.radial(quad, |s| p.profile(s)[0].powi(2) * hardy(d0 - s).unwrap_or(f64::NAN))?;
    let corr_lo = p.radial(quad, |s| p.profile(s)[0].powi(2) * hardy(d0 + s).unwrap_or(f64::NAN))?;
    let den_lo = p.radial(quad, |s| x_unchecked(d0 - s).powf(w_exp) * p.profile(s)[0].abs().powf(q))?;
    let den_hi = p.radial(quad, |s| x_unchecked(d0 + s).powf(w_exp) * p.profile(s)[0].abs().powf(q))?;
    let m = p.radial(quad, |s| p.profile(s)[0].abs().powf(q))?;
    Ok(BubbleBounds {
        lower: (lap - c * corr_hi) / den_hi.powf(e),
        upper: (lap - c * corr_lo) / den_lo.powf(e),
        sobolev: lap / m.powf(e),
    })
}

/// Which closed form of `S_{2,n}` a numerical value matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S2nForm {
    /// Gamma ratio raised to the fourth power.
    Printed,
    /// Gamma ratio raised to the power `4/n`.
    Alternate,
}

/// Outcome of comparing the bubble's Sobolev quotient to both closed forms.
#[derive(Debug, Clone, PartialEq)]
pub struct S2nResolution {
    pub n: u32,
    /// `λ` values of the sweep at `ρ = 0.05`.
    pub lambdas: Vec<f64>,
    pub quotients: Vec<f64>,
    /// Quotient at the largest `λ`.
    pub value: f64,
    pub printed: f64,
    pub alternate: f64,
    pub printed_gap: f64,
    pub alternate_gap: f64,
    /// The unique candidate within 1%, if exactly one is.
    pub chosen: Option<S2nForm>,
}

impl S2nResolution {
    /// Closed-form value of the chosen candidate.
    pub fn constant(&self) -> Option<f64> {
        self.chosen.map(|c| match c {
            S2nForm::Printed => self.printed,
            S2nForm::Alternate => self.alternate,
        })
    }
}

/// `λ → ∞` sweep of the pure Sobolev quotient, matched against both closed forms.
pub fn resolve_s2n(n: u32, quad: &WeightedQuadrature) -> Result<S2nResolution> {
    let dim = Dimension::new(n)?.require_at_least(5, "S_{2,n}")?;
    let sc = sobolev_constants(dim);
    let (printed, alternate) = match (sc.s2n_printed, sc.s2n_alternate) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Domain(format!("S_{{2,n}} needs n ≥ 5, got {n}"))),
    };
    let rho = 0.05;
    let lambdas: Vec<f64> = [1e3, 1e4, 1e5, 1e6].to_vec();
    let quotients = par::map(&lambdas, |&l| sobolev_quotient(&BubbleParams::new(n, l, rho)?, quad))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let value = *quotients.last().expect("non-empty sweep");
    let printed_gap = (value - printed).abs() / printed;
    let alternate_gap = (value - alternate).abs() / alternate;
    let chosen = match (printed_gap < 0.01, alternate_gap < 0.01) {
        (true, false) => Some(S2nForm::Printed),
        (false, true) => Some(S2nForm::Alternate),
        _ => None,
    };
    Ok(S2nResolution { n, lambdas, quotients, value, printed, alternate, printed_gap, alternate_gap, chosen })
}

// ---------------------------------------------------------------------------
// instance checks

/// Inequalities that can be checked on single-mode inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inequality {
    /// `∫(Δu)² − 25/36∫|∇u|²/|x|² ≥ C(∫|∇u|⁶X⁴)^{1/3}`, `n = 3`.
    Thm2N3,
    /// `∫(Δu)² − 3∫|∇u|²/|x|² ≥ C(∫|∇u|⁴)^{1/2}`, `n = 4`.
    Thm2N4,
    /// Hardy–Sobolev with `S_{1,n}` and the `X²` correction.
    Eli,
    /// Rellich–Sobolev with `S_{2,n}` and the `X^{2(n−2)/(n−1)}` correction.
    Thm1,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::Thm2N3 => "thm2_n3",
            Inequality::Thm2N4 => "thm2_n4",
            Inequality::Eli => "eli",
            Inequality::Thm1 => "thm1",
        }
    }
}

/// `u = f(r) φ(ω)` with `φ` an `L²(S^{n−1})`-normalised harmonic of degree
/// `k ∈ {0, 1}`.
#[derive(Clone, Copy)]
pub struct ModeInput<'a> {
    pub n: u32,
    pub k: i64,
    pub profile: &'a dyn RadialProfile,
}

/// `lhs − rhs` with the size of the terms involved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InstanceRemainder {
    pub lhs: f64,
    pub rhs: f64,
    pub remainder: f64,
    /// Sum of magnitudes of all contributing integrals.
    pub scale: f64,
}

/// `∫|∇u|^{2m} X^σ dx`; the angular part by Gauss–Legendre in `θ`.
pub fn grad_power_integral(u: ModeInput<'_>, m: i32, sigma: f64, quad: &WeightedQuadrature) -> Result<f64> {
    let n = u.n;
    let omega = sphere_area(n);
    let f = u.profile;
    match u.k {
        0 => {
            let amp = omega.powi(-m);
            let v = quad.integrate(|r| f.eval(r)[1].abs().powi(2 * m), f64::from(n) - 1.0, sigma)?;
            Ok(omega * amp * v)
        }
        1 => {
            let c2 = f64::from(n) / omega;
            let slice = sphere_area(n - 1);
            let rule = UnitRule::new(2 * quad.points());
            let panels = 8;
            let ang = |d1: f64, fr: f64| -> f64 {
                (0..panels)
                    .map(|i| {
                        let a = PI * f64::from(i) / f64::from(panels);
                        rule.apply(a, a + PI / f64::from(panels), |th| {
                            let (s, c) = th.sin_cos();
                            let g = c2 * (d1 * d1 * c * c + fr * fr * s * s);
                            g.powi(m) * s.powi(n as i32 - 2)
                        })
                    })
                    .sum::<f64>()
                    * slice
            };
            quad.integrate(
                |r| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let v = f.eval(r);
                    ang(v[1], v[0] / r)
                },
                f64::from(n) - 1.0,
                sigma,
            )
        }
        k => Err(Error::Domain(format!("gradient powers are implemented for k ∈ {{0, 1}}, got {k}"))),
    }
}

/// `∫ X^σ |u|^q dx` for radial `u = f φ₀`.
fn radial_power(n: u32, f: &dyn RadialProfile, q: f64, sigma: f64, quad: &WeightedQuadrature) -> Result<f64> {
    let omega = sphere_area(n);
    let v = quad.integrate(|r| f.eval(r)[0].abs().powf(q), f64::from(n) - 1.0, sigma)?;
    Ok(omega.powf(1.0 - q / 2.0) * v)
}

/// `lhs − rhs` of `ineq` for one input. `constant` is the thm2 `C` or the
/// Sobolev constant for thm1; it defaults to `S_{1,n}` for eli.
pub fn instance_check(
    ineq: Inequality,
    u: ModeInput<'_>,
    constant: Option<f64>,
    quad: &WeightedQuadrature,
) -> Result<InstanceRemainder> {
    let n = u.n;
    let nf = f64::from(n);
    let f = u.profile;
    let need = |what: &str| Error::Parameter(format!("{} needs {what}", ineq.name()));
    match ineq {
        Inequality::Thm2N3 | Inequality::Thm2N4 => {
            let (want, c, m, sigma) = if ineq == Inequality::Thm2N3 { (3, C3, 3, 4.0) } else { (4, 3.0, 2, 0.0) };
            if n != want {
                return Err(Error::Domain(format!("{} is stated for n = {want}, got {n}", ineq.name())));
            }
            let cc = constant.ok_or_else(|| need("a constant C"))?;
            let md = mode(n, u.k)?;
            let b = bilap_form(&md, f, quad)?;
            let g = gradhardy_form(&md, f, quad)?;
            let rhs = cc * grad_power_integral(u, m, sigma, quad)?.powf(1.0 / f64::from(m));
            let lhs = b - c * g;
            Ok(InstanceRemainder { lhs, rhs, remainder: lhs - rhs, scale: b + c * g + rhs.abs() })
        }
        Inequality::Eli => {
            if u.k != 0 {
                return Err(Error::Domain("eli is checked on radial inputs only".into()));
            }
            let dim = Dimension::new(n)?;
            let s1 = constant.unwrap_or(sobolev_constants(dim).s1n);
            let grad = quad.integrate(|r| f.eval(r)[1].powi(2), nf - 1.0, 0.0)?;
            let hardy = quad.integrate(|r| f.eval(r)[0].powi(2), nf - 3.0, 0.0)?;
            let corr = quad.integrate(|r| f.eval(r)[0].powi(2), nf - 3.0, 2.0)?;
            let (h, k) = (((nf - 2.0) / 2.0).powi(2), (nf - 1.0) * (nf - 3.0) / 4.0);
            let lhs = grad - h * hardy + k * corr;
            let q = 2.0 * nf / (nf - 2.0);
            let pw = radial_power(n, f, q, 2.0 * (nf - 1.0) / (nf - 2.0), quad)?;
            let rhs = s1 * pw.powf((nf - 2.0) / nf);
            Ok(InstanceRemainder { lhs, rhs, remainder: lhs - rhs, scale: grad + h * hardy + k * corr + rhs })
        }
        Inequality::Thm1 => {
            if u.k != 0 {
                return Err(Error::Domain("thm1 is checked on radial inputs only".into()));
            }
            Dimension::new(n)?.require_at_least(5, "thm1")?;
            let s2 = constant.ok_or_else(|| need("a Sobolev constant"))?;
            let md = mode(n, 0)?;
            let b = bilap_form(&md, f, quad)?;
            let h4 = quad.integrate(|r| f.eval(r)[0].powi(2), nf - 5.0, 0.0)?;
            let corr = quad.integrate(|r| f.eval(r)[0].powi(2), nf - 5.0, 2.0 * (nf - 2.0) / (nf - 1.0))?;
            let c = nf * nf * (nf - 4.0).powi(2) / 16.0;
            let lhs = b - c * h4 + c * corr;
            let q = 2.0 * nf / (nf - 4.0);
            let pw = radial_power(n, f, q, 2.0 * (nf - 2.0) / (nf - 4.0), quad)?;
            let rhs = s2 * pw.powf((nf - 4.0) / nf);
            Ok(InstanceRemainder { lhs, rhs, remainder: lhs - rhs, scale: b + c * (h4 + corr) + rhs })
        }
    }
}

/// Seeded 20-profile inputs for each inequality: `(n, [(k, f)])`.
pub fn shipped_corpus(ineq: Inequality) -> (u32, Vec<(i64, PolyProfile)>) {
    let radial = |seed| random_corpus(0, 20, seed).into_iter().map(|f| (0, f)).collect::<Vec<_>>();
    let mixed = |seed| {
        let mut v: Vec<(i64, PolyProfile)> = random_corpus(0, 10, seed).into_iter().map(|f| (0, f)).collect();
        v.extend(random_corpus(1, 10, seed + 1).into_iter().map(|f| (1, f)));
        v
    };
    match ineq {
        Inequality::Thm2N3 => (3, mixed(31)),
        Inequality::Thm2N4 => (4, mixed(41)),
        Inequality::Eli => (3, radial(51)),
        Inequality::Thm1 => (5, radial(61)),
    }
}

/// Remainders of one inequality over its shipped corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusReport {
    pub inequality: Inequality,
    pub n: u32,
    /// Constant used on the right-hand side.
    pub constant: f64,
    pub remainders: Vec<InstanceRemainder>,
}

impl CorpusReport {
    /// Smallest `remainder / scale`.
    pub fn min_relative(&self) -> f64 {
        self.remainders.iter().map(|r| r.remainder / r.scale).fold(f64::INFINITY, f64::min)
    }

    /// Every remainder is at least `−tol · scale`.
    pub fn nonnegative(&self, tol: f64) -> bool {
        self.remainders.iter().all(|r| r.remainder >= -tol * r.scale)
    }
}

/// Largest `C` with nonnegative thm2 remainders on `inputs`: the smallest
/// `LHS / (∫|∇u|^{2m}X^σ)^{1/m}` over the inputs.
pub fn calibrate_constant(ineq: Inequality, n: u32, inputs: &[(i64, PolyProfile)], quad: &WeightedQuadrature) -> Result<f64> {
    if !matches!(ineq, Inequality::Thm2N3 | Inequality::Thm2N4) {
        return Err(Error::Domain(format!("{} uses a closed-form constant", ineq.name())));
    }
    let ratios = par::map(inputs, |(k, f)| {
        let r = instance_check(ineq, ModeInput { n, k: *k, profile: f }, Some(1.0), quad)?;
        Ok(r.lhs / r.rhs)
    });
    ratios.into_iter().try_fold(f64::INFINITY, |acc, r: Result<f64>| Ok(acc.min(r?)))
}

/// Runs `ineq` over its shipped corpus: calibrated `C` for thm2, `S_{1,3}`
/// for eli, the bubble-resolved `S_{2,5}` for thm1.
pub fn corpus_check(ineq: Inequality, quad: &WeightedQuadrature) -> Result<CorpusReport> {
    let (n, inputs) = shipped_corpus(ineq);
    let constant = match ineq {
        Inequality::Thm2N3 | Inequality::Thm2N4 => calibrate_constant(ineq, n, &inputs, quad)?,
        Inequality::Eli => sobolev_constants(Dimension::new(n)?).s1n,
        Inequality::Thm1 => resolve_s2n(n, quad)?
            .constant()
            .ok_or_else(|| Error::Verification("S_{2,n} could not be resolved".into()))?,
    };
    let remainders = par::map(&inputs, |(k, f)| {
        instance_check(ineq, ModeInput { n, k: *k, profile: f }, Some(constant), quad)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(CorpusReport { inequality: ineq, n, constant, remainders })
}

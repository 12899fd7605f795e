//! Mellin symbols of the per-mode radial problems.
//!
//! Substituting `f(r) = r^{(4−n)/2 + iτ}` into the forms of
//! [`crate::harmonics`] turns every weighted integral into the same
//! scale-invariant density, so each form becomes a polynomial in `τ²`:
//!
//! ```text
//! ∫(Δu)²        ↦ (τ² + μ + n(n−4)/4)² + 4τ²
//! ∫|∇u|²/|x|²   ↦ τ² + μ + (n−4)²/4
//! ∫u²/|x|⁴      ↦ 1
//! ```
//!
//! Their ratios are the symbols below. Because the symbol route is
//! independent of the quadrature route, [`certify_symbol`] compares the two
//! on modulated test profiles.

use crate::constants::{rat, Dimension, Rational};
use crate::error::{Error, Result};
use crate::harmonics::{bilap_form, gradhardy_form, mode, RadialProfile};
use crate::par;
use crate::quadrature::WeightedQuadrature;

/// Point of the symbol domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolPoint {
    pub n: u32,
    pub k: u32,
    pub tau: f64,
}

impl SymbolPoint {
    pub fn new(n: u32, k: u32, tau: f64) -> Self {
        SymbolPoint { n, k, tau }
    }
}

/// Minimum of one mode's symbol over `τ ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeRow {
    pub k: u32,
    pub value: f64,
    pub tau: f64,
}

/// Result of [`minimize_modes`].
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMinimum {
    pub k_star: u32,
    pub tau_star: f64,
    pub value: f64,
    pub table: Vec<ModeRow>,
    /// Lower bound for every symbol with `k > k_max`.
    pub tail_bound: f64,
    /// Whether `tail_bound` exceeds `value`, so larger `k` cannot win.
    pub truncation_certified: bool,
    /// Smallest `k₀` from which the tabulated minima increase strictly.
    pub monotone_from: Option<u32>,
}

fn shifts(n: f64) -> (f64, f64) {
    (n * (n - 4.0) / 4.0, (n - 4.0) * (n - 4.0) / 4.0)
}

fn mu(n: u32, k: u32) -> f64 {
    let (n, k) = (f64::from(n), f64::from(k));
    k * (k + n - 2.0)
}

/// `Q_k(τ)`, the ratio of the `(Δu)²` density to the `|∇u|²/|x|²` density.
pub fn grad_symbol(p: SymbolPoint) -> Result<f64> {
    Dimension::new(p.n)?;
    if !p.tau.is_finite() {
        return Err(Error::Domain(format!("tau must be finite, got {}", p.tau)));
    }
    let (a, b) = shifts(f64::from(p.n));
    let m = mu(p.n, p.k);
    let x = p.tau * p.tau;
    let den = x + m + b;
    if den == 0.0 {
        return Err(Error::Singular(format!(
            "gradient symbol denominator vanishes at n = {}, k = {}, tau = 0",
            p.n, p.k
        )));
    }
    let s = x + m + a;
    Ok((s * s + 4.0 * x) / den)
}

/// Continuous extension of [`grad_symbol`] through its single removable
/// singularity (`n = 4`, `k = 0`, where `Q = τ² + 4`).
fn grad_symbol_ext(n: u32, k: u32, tau: f64) -> f64 {
    if n == 4 && k == 0 {
        return tau * tau + 4.0;
    }
    grad_symbol(SymbolPoint::new(n, k, tau)).expect("validated dimension")
}

/// `Q_k(0)` in exact arithmetic.
pub fn grad_symbol_at_zero(n: u32, k: u32) -> Result<Rational> {
    let dim = Dimension::new(n)?;
    let ni = dim.as_i64();
    let ki = i64::from(k);
    let m = ki * (ki + ni - 2);
    // over the common denominator 4
    let s = 4 * m + ni * (ni - 4);
    let d = 4 * m + (ni - 4) * (ni - 4);
    if d == 0 {
        return Err(Error::Singular(format!("gradient symbol is singular at n = {n}, k = {k}, tau = 0")));
    }
    Ok(rat(s * s, 4 * d))
}

/// `(τ² + n(n−4)/4)² + 4τ²`, the radial ratio of `(Δu)²` to `u²/|x|⁴`.
pub fn rellich_symbol(n: u32, tau: f64) -> Result<f64> {
    Dimension::new(n)?.require_at_least(5, "rellich_symbol")?;
    if !tau.is_finite() {
        return Err(Error::Domain(format!("tau must be finite, got {tau}")));
    }
    let (a, _) = shifts(f64::from(n));
    let x = tau * tau;
    Ok((x + a) * (x + a) + 4.0 * x)
}

/// Mellin wave `r^{(4−n)/2} cos(τ ln r) χ(−ln r)`, with `χ = sin²(π s / L)`
/// on `s ∈ [0, L]`, `L = 2 · width`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinWave {
    pub gamma: f64,
    pub tau: f64,
    pub length: f64,
}

impl MellinWave {
    pub fn new(n: u32, tau: f64, width: f64) -> Self {
        MellinWave { gamma: (4.0 - f64::from(n)) / 2.0, tau, length: 2.0 * width }
    }

    /// `F, F', F''` in `s = −ln r`.
    fn in_s(&self, s: f64) -> [f64; 3] {
        if !(0.0..=self.length).contains(&s) {
            return [0.0; 3];
        }
        let w = std::f64::consts::PI / self.length;
        let (sn, cs) = (w * s).sin_cos();
        let h = [sn * sn, 2.0 * w * sn * cs, 2.0 * w * w * (cs * cs - sn * sn)];
        let e0 = (-self.gamma * s).exp();
        let e = [e0, -self.gamma * e0, self.gamma * self.gamma * e0];
        let (ts, tc) = (self.tau * s).sin_cos();
        let c = [tc, -self.tau * ts, -self.tau * self.tau * tc];
        let f = e[0] * c[0] * h[0];
        let f1 = e[1] * c[0] * h[0] + e[0] * c[1] * h[0] + e[0] * c[0] * h[1];
        let f2 = e[2] * c[0] * h[0]
            + e[0] * c[2] * h[0]
            + e[0] * c[0] * h[2]
            + 2.0 * (e[1] * c[1] * h[0] + e[1] * c[0] * h[1] + e[0] * c[1] * h[1]);
        [f, f1, f2]
    }
}

impl RadialProfile for MellinWave {
    fn eval(&self, r: f64) -> [f64; 3] {
        if r <= 0.0 {
            return [0.0; 3];
        }
        let s = -r.ln();
        let [f, f1, f2] = self.in_s(s);
        [f, -f1 / r, (f2 + f1) / (r * r)]
    }

    fn vanishing_exponent(&self) -> f64 {
        f64::INFINITY
    }

    fn support(&self) -> (f64, f64) {
        ((-self.length).exp(), 1.0)
    }
}

/// Relative gap between the quadrature quotient on a [`MellinWave`] and
/// [`grad_symbol`].
pub fn certify_symbol(p: SymbolPoint, envelope_width: f64, quad: &WeightedQuadrature) -> Result<f64> {
    let target = grad_symbol(p)?;
    if !(1.0..=100.0).contains(&envelope_width) {
        return Err(Error::Parameter(format!("envelope width must lie in [1, 100], got {envelope_width}")));
    }
    let wave = MellinWave::new(p.n, p.tau, envelope_width);
    let q = WeightedQuadrature::covering_depth(wave.length + 1.0, quad.points(), quad.ratio())?;
    let m = mode(p.n, i64::from(p.k))?;
    let quotient = bilap_form(&m, &wave, &q)? / gradhardy_form(&m, &wave, &q)?;
    Ok((quotient - target).abs() / target)
}

const GOLDEN_TOL: f64 = 1e-12;

fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x);
    // the minimum may sit on an endpoint of the bracket
    [(a, f(a)), (b, f(b))].into_iter().fold((x, fx), |best, cand| if cand.1 < best.1 { cand } else { best })
}

fn minimize_mode(n: u32, k: u32, tau_max: f64, steps: usize) -> ModeRow {
    let h = tau_max / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| grad_symbol_ext(n, k, i as f64 * h)).collect();
    let (i, _) = grid
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    let lo = (i.saturating_sub(1)) as f64 * h;
    let hi = ((i + 1).min(steps)) as f64 * h;
    let (tau, value) = golden_min(|t| grad_symbol_ext(n, k, t), lo, hi);
    ModeRow { k, value, tau }
}

/// Per-mode minimisation of [`grad_symbol`] over `τ ∈ [0, tau_max]` and
/// `k ≤ k_max`.
pub fn minimize_modes(n: u32, k_max: u32, tau_max: f64, tau_steps: usize) -> Result<ModeMinimum> {
    Dimension::new(n)?;
    if k_max < 2 {
        return Err(Error::Domain(format!("k_max must be >= 2, got {k_max}")));
    }
    if !(tau_max > 0.0 && tau_max.is_finite()) || tau_steps < 2 {
        return Err(Error::Domain("tau grid must be positive with at least 2 steps".into()));
    }
    let ks: Vec<u32> = (0..=k_max).collect();
    let table = par::map(&ks, |&k| minimize_mode(n, k, tau_max, tau_steps));
    let best = table
        .iter()
        .fold(&table[0], |best, row| if row.value < best.value { row } else { best });
    let nf = f64::from(n);
    // Q ≥ μ + (n² − 16)/4 once μ + (n−4)²/4 > 0
    let tail_bound = mu(n, k_max + 1) + (nf * nf - 16.0) / 4.0;
    let mut monotone_from = None;
    for k0 in (0..=k_max as usize).rev() {
        if k0 == k_max as usize || table[k0].value < table[k0 + 1].value {
            monotone_from = Some(k0 as u32);
        } else {
            break;
        }
    }
    Ok(ModeMinimum {
        k_star: best.k,
        tau_star: best.tau,
        value: best.value,
        truncation_certified: tail_bound > best.value,
        tail_bound,
        monotone_from,
        table,
    })
}

/// `1 − c_n / min_{k ≥ 2, τ ≥ 0} Q_k(τ)` for `n ∈ {3, 4}`.
pub fn ploi2_constant(n: u32, k_max: u32) -> Result<f64> {
    if n != 3 && n != 4 {
        return Err(Error::Domain(format!("ploi2 constant is defined for n = 3, 4, got {n}")));
    }
    let res = minimize_modes(n, k_max.max(2), 10.0, 400)?;
    let min = res.table.iter().filter(|r| r.k >= 2).map(|r| r.value).fold(f64::INFINITY, f64::min);
    let cn = crate::constants::to_f64(&crate::constants::c_n(Dimension::new(n)?));
    let c = 1.0 - cn / min;
    if c <= 0.0 {
        return Err(Error::Verification(format!("nonpositive ploi2 constant {c} for n = {n}")));
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_anchors() {
        let q = |n, k| grad_symbol(SymbolPoint::new(n, k, 0.0)).unwrap();
        assert!((q(3, 1) - 25.0 / 36.0).abs() < 1e-15);
        assert!((q(3, 2) - 4.41).abs() < 1e-14);
        assert!((q(4, 2) - 8.0).abs() < 1e-14);
        assert!((q(5, 0) - 6.25).abs() < 1e-15);
        assert_eq!(grad_symbol_at_zero(3, 2).unwrap(), rat(441, 100));
        assert_eq!(grad_symbol_at_zero(4, 1).unwrap(), rat(3, 1));
    }

    #[test]
    fn singular_point_is_rejected() {
        assert!(matches!(grad_symbol(SymbolPoint::new(4, 0, 0.0)), Err(Error::Singular(_))));
        assert!(grad_symbol(SymbolPoint::new(4, 0, 0.1)).is_ok());
        assert!(grad_symbol_at_zero(4, 0).is_err());
    }

    #[test]
    fn rellich_symbol_anchors() {
        assert!((rellich_symbol(5, 0.0).unwrap() - 25.0 / 16.0).abs() < 1e-15);
        assert!((rellich_symbol(6, 0.0).unwrap() - 9.0).abs() < 1e-15);
        assert!(rellich_symbol(4, 0.0).is_err());
        let big = rellich_symbol(5, 1e3).unwrap();
        assert!((big / 1e12 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn golden_finds_interior_minimum() {
        let (x, v) = golden_min(|t| (t - 0.3).powi(2) + 1.0, 0.0, 1.0);
        assert!((x - 0.3).abs() < 1e-6 && (v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn wave_derivatives_match_finite_differences() {
        let w = MellinWave::new(3, 0.7, 5.0);
        for &r in &[0.5, 0.1, 0.01, 1e-3] {
            let h = 1e-5 * r;
            let [_, d1, d2] = w.eval(r);
            let fd1 = (w.eval(r + h)[0] - w.eval(r - h)[0]) / (2.0 * h);
            let fd2 = (w.eval(r + h)[1] - w.eval(r - h)[1]) / (2.0 * h);
            assert!((d1 - fd1).abs() < 1e-6 * d1.abs().max(1.0 / r), "{d1} {fd1}");
            assert!((d2 - fd2).abs() < 1e-6 * d2.abs().max(1.0 / (r * r)), "{d2} {fd2}");
        }
    }
}

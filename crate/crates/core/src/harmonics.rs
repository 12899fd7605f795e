//! Spherical-harmonic modes and the per-mode radial quadratic forms.
//!
//! For `u = f(r) φ_k(ω)` with `φ_k` an `L²(S^{n−1})`-normalised harmonic of
//! degree `k` (Laplace–Beltrami eigenvalue `μ_k = k(k+n−2)`):
//!
//! ```text
//! ∫(Δu)²          = ∫ r^{n−1} f''² + (n−1+2μ) ∫ r^{n−3} f'² + (2(n−4)μ + μ²) ∫ r^{n−5} f²
//! ∫|∇u|²/|x|²     = ∫ r^{n−3} f'² + μ ∫ r^{n−5} f²
//! ∫u²/|x|⁴        = ∫ r^{n−5} f²
//! ```
//!
//! Profiles live on `(0, 1)`; all forms are evaluated with
//! [`WeightedQuadrature`].

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{c_n, to_f64, Dimension};
use crate::error::{Error, Result};
use crate::quadrature::WeightedQuadrature;

/// A spherical-harmonic mode `(k, μ_k, d_k)` in dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpec {
    pub n: Dimension,
    pub k: u32,
    pub mu: u64,
    /// Multiplicity of `μ_k`.
    pub d: BigUint,
}

fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Mode `k` in dimension `n`.
pub fn mode(n: u32, k: i64) -> Result<ModeSpec> {
    let dim = Dimension::new(n)?;
    if k < 0 {
        return Err(Error::Domain(format!("mode index must be >= 0, got {k}")));
    }
    let k = k as u32;
    let (nn, kk) = (u64::from(n), u64::from(k));
    let d = match k {
        0 => BigUint::one(),
        1 => BigUint::from(nn),
        _ => binomial(nn + kk - 1, kk) - binomial(nn + kk - 3, kk - 2),
    };
    Ok(ModeSpec { n: dim, k, mu: kk * (kk + nn - 2), d })
}

impl ModeSpec {
    pub fn mu_f64(&self) -> f64 {
        self.mu as f64
    }

    pub fn multiplicity_f64(&self) -> f64 {
        self.d.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// A radial profile `f` on `(0, 1)` with its first two derivatives.
pub trait RadialProfile: Sync {
    /// `[f(r), f'(r), f''(r)]`.
    fn eval(&self, r: f64) -> [f64; 3];

    /// Exponent `a` with `f(r) = O(r^a)` as `r → 0`; `INFINITY` when the
    /// support stays away from the origin.
    fn vanishing_exponent(&self) -> f64;

    /// Growth exponents of `f, f', f''` at the origin.
    fn orders(&self) -> [f64; 3] {
        let a = self.vanishing_exponent();
        [a, a - 1.0, a - 2.0]
    }

    /// Closed support, contained in `[0, 1]`.
    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    /// Points where the profile is only piecewise smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<P: RadialProfile + ?Sized> RadialProfile for &P {
    fn eval(&self, r: f64) -> [f64; 3] {
        (**self).eval(r)
    }
    fn vanishing_exponent(&self) -> f64 {
        (**self).vanishing_exponent()
    }
    fn orders(&self) -> [f64; 3] {
        (**self).orders()
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

impl<P: RadialProfile + ?Sized> RadialProfile for Box<P> {
    fn eval(&self, r: f64) -> [f64; 3] {
        (**self).eval(r)
    }
    fn vanishing_exponent(&self) -> f64 {
        (**self).vanishing_exponent()
    }
    fn orders(&self) -> [f64; 3] {
        (**self).orders()
    }
    fn support(&self) -> (f64, f64) {
        (**self).support()
    }
    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// Polynomial profile `Σ c_i r^i` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyProfile {
    pub coeffs: Vec<f64>,
}

impl PolyProfile {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolyProfile { coeffs }
    }

    pub fn zero() -> Self {
        PolyProfile { coeffs: vec![] }
    }

    /// `r^m (1−r)^j · (1 + Σ extra_i r^{i+1})`.
    pub fn bump(m: usize, j: usize, extra: &[f64]) -> Self {
        let mut p = vec![0.0; m + 1];
        p[m] = 1.0;
        for _ in 0..j {
            p = poly_mul(&p, &[1.0, -1.0]);
        }
        let mut tail = vec![1.0];
        tail.extend_from_slice(extra);
        PolyProfile { coeffs: poly_mul(&p, &tail) }
    }

    pub fn scaled(&self, c: f64) -> Self {
        PolyProfile { coeffs: self.coeffs.iter().map(|x| c * x).collect() }
    }

    fn lowest_power(coeffs: &[f64]) -> Option<usize> {
        coeffs.iter().position(|&c| c != 0.0)
    }

    fn deriv(coeffs: &[f64]) -> Vec<f64> {
        coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect()
    }
}

pub(crate) fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn horner(c: &[f64], r: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &x| acc * r + x)
}

impl RadialProfile for PolyProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let d1 = Self::deriv(&self.coeffs);
        let d2 = Self::deriv(&d1);
        [horner(&self.coeffs, r), horner(&d1, r), horner(&d2, r)]
    }

    fn vanishing_exponent(&self) -> f64 {
        Self::lowest_power(&self.coeffs).map_or(f64::INFINITY, |p| p as f64)
    }

    fn orders(&self) -> [f64; 3] {
        let d1 = Self::deriv(&self.coeffs);
        let d2 = Self::deriv(&d1);
        let o = |c: &[f64]| Self::lowest_power(c).map_or(f64::INFINITY, |p| p as f64);
        [o(&self.coeffs), o(&d1), o(&d2)]
    }
}

/// Which weighted quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// `∫(Δu)²`.
    Bilap,
    /// `∫|∇u|²/|x|²`.
    GradHardy,
    /// `∫u²/|x|⁴`.
    Hardy4,
}

impl FormKind {
    /// `[(coefficient, power of r)]` for `f''², f'², f²`.
    pub fn terms(self, n: Dimension, mu: f64) -> [(f64, f64); 3] {
        let nf = n.as_f64();
        match self {
            FormKind::Bilap => [
                (1.0, nf - 1.0),
                (nf - 1.0 + 2.0 * mu, nf - 3.0),
                (2.0 * (nf - 4.0) * mu + mu * mu, nf - 5.0),
            ],
            FormKind::GradHardy => [(0.0, nf - 1.0), (1.0, nf - 3.0), (mu, nf - 5.0)],
            FormKind::Hardy4 => [(0.0, nf - 1.0), (0.0, nf - 3.0), (1.0, nf - 5.0)],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FormKind::Bilap => "bilap",
            FormKind::GradHardy => "gradhardy",
            FormKind::Hardy4 => "hardy4",
        }
    }
}

impl std::str::FromStr for FormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bilap" => Ok(FormKind::Bilap),
            "gradhardy" | "grad" => Ok(FormKind::GradHardy),
            "hardy4" | "u" => Ok(FormKind::Hardy4),
            other => Err(Error::Parameter(format!("unknown form kind '{other}'"))),
        }
    }
}

/// Quadrature adapted to a profile's support and kinks.
/// Supports reaching below `quad.r_min()` get a deeper geometric part.
pub(crate) fn adapted(quad: &WeightedQuadrature, f: &dyn RadialProfile) -> Result<WeightedQuadrature> {
    let (lo, hi) = f.support();
    let mut bps = f.breakpoints();
    bps.push(lo);
    bps.push(hi);
    let base = if lo > 0.0 && lo < quad.r_min() {
        WeightedQuadrature::covering_depth(-lo.ln(), quad.points(), quad.ratio())?
    } else {
        quad.clone()
    };
    Ok(base.with_breakpoints(&bps))
}

/// Evaluates `form` for mode `mode` on profile `f`.
pub fn form(kind: FormKind, mode: &ModeSpec, f: &dyn RadialProfile, quad: &WeightedQuadrature) -> Result<f64> {
    let terms = kind.terms(mode.n, mode.mu_f64());
    let orders = f.orders();
    let (lo, hi) = f.support();
    if lo <= 0.0 {
        // term j holds (f^{(2-j)})², whose order is orders[2-j]
        for (j, &(c, w)) in terms.iter().enumerate() {
            let ord = orders[2 - j];
            if c != 0.0 && ord.is_finite() && w + 2.0 * ord <= -1.0 {
                return Err(Error::Precondition(format!(
                    "{} form diverges at r = 0 for mode k = {} (weight r^{w}, profile order {ord})",
                    kind.name(),
                    mode.k
                )));
            }
        }
    }
    let q = adapted(quad, f)?;
    let mut total = 0.0;
    for (j, &(c, w)) in terms.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let idx = 2 - j;
        // weight applied before squaring: f'' alone can exceed 1e154 deep in (0, 1)
        let half = w / 2.0;
        let val = q.integrate(
            |r| {
                if r < lo || r > hi {
                    return 0.0;
                }
                let v = f.eval(r)[idx];
                if v == 0.0 {
                    return 0.0;
                }
                let mut s = if half >= 0.0 { v * r.powf(half) } else { v / r.powf(-half) };
                if !s.is_finite() {
                    s = (v.abs().ln() + half * r.ln()).exp();
                }
                s * s
            },
            0.0,
            0.0,
        )?;
        total += c * val;
    }
    Ok(total)
}

pub fn bilap_form(mode: &ModeSpec, f: &dyn RadialProfile, quad: &WeightedQuadrature) -> Result<f64> {
    form(FormKind::Bilap, mode, f, quad)
}

pub fn gradhardy_form(mode: &ModeSpec, f: &dyn RadialProfile, quad: &WeightedQuadrature) -> Result<f64> {
    form(FormKind::GradHardy, mode, f, quad)
}

pub fn hardy4_form(mode: &ModeSpec, f: &dyn RadialProfile, quad: &WeightedQuadrature) -> Result<f64> {
    form(FormKind::Hardy4, mode, f, quad)
}

/// `Σ_modes [∫(Δu)² − c_n ∫|∇u|²/|x|²]` for `n ∈ {3, 4}`.
pub fn rellich_remainder_thm2(
    n: u32,
    modes: &[(ModeSpec, &dyn RadialProfile)],
    quad: &WeightedQuadrature,
) -> Result<f64> {
    if n != 3 && n != 4 {
        return Err(Error::Domain(format!("remainder functional is defined here for n = 3, 4, got {n}")));
    }
    let dim = Dimension::new(n)?;
    let c = to_f64(&c_n(dim));
    let mut total = 0.0;
    for (m, f) in modes {
        if m.n != dim {
            return Err(Error::Domain(format!("mode dimension {} does not match n = {n}", m.n)));
        }
        total += bilap_form(m, *f, quad)? - c * gradhardy_form(m, *f, quad)?;
    }
    Ok(total)
}

/// Seeded corpus of polynomial bumps `r^{max(k,2)}(1−r)²·(1 + p(r))`, `deg p ≤ 3`.
pub fn random_corpus(k: u32, count: usize, seed: u64) -> Vec<PolyProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (u64::from(k) << 32));
    (0..count)
        .map(|_| {
            let deg = rng.gen_range(0..=3);
            let extra: Vec<f64> = (0..deg).map(|_| rng.gen_range(-0.5..0.5)).collect();
            let scale = rng.gen_range(0.5..2.0);
            PolyProfile::bump(k.max(2) as usize, 2, &extra).scaled(scale)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mode_examples() {
        let m = mode(3, 1).unwrap();
        assert_eq!((m.mu, m.d.clone()), (2, BigUint::from(3u32)));
        let m = mode(3, 2).unwrap();
        assert_eq!((m.mu, m.d.clone()), (6, BigUint::from(5u32)));
        for n in 3..10 {
            let m = mode(n, 0).unwrap();
            assert_eq!((m.mu, m.d), (0, BigUint::one()));
        }
        assert!(mode(3, -1).is_err());
        assert!(mode(2, 1).is_err());
    }

    #[test]
    fn multiplicity_matches_dimension_of_harmonic_polynomials() {
        // d_k(n=3) = 2k+1, d_k(n=4) = (k+1)².
        for k in 0..20 {
            assert_eq!(mode(3, k).unwrap().d, BigUint::from(2 * k as u64 + 1));
            assert_eq!(mode(4, k).unwrap().d, BigUint::from(((k + 1) * (k + 1)) as u64));
        }
    }

    #[test]
    fn mu_lower_bound() {
        for n in 3..13 {
            for k in 1..=50 {
                assert!(mode(n, k).unwrap().mu >= u64::from(n - 1));
            }
        }
    }

    #[test]
    fn zero_profile_gives_zero() {
        let q = WeightedQuadrature::default();
        let z = PolyProfile::zero();
        for n in [3, 4, 5] {
            for k in 0..3 {
                let m = mode(n, k).unwrap();
                assert_eq!(bilap_form(&m, &z, &q).unwrap(), 0.0);
                assert_eq!(gradhardy_form(&m, &z, &q).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn divergence_is_rejected() {
        let q = WeightedQuadrature::default();
        // constant near 0 in n = 3 makes ∫ r^{-2} f² diverge
        let f = PolyProfile::new(vec![1.0, -1.0]);
        let m = mode(3, 1).unwrap();
        assert!(matches!(gradhardy_form(&m, &f, &q), Err(Error::Precondition(_))));
        assert!(matches!(hardy4_form(&mode(3, 0).unwrap(), &f, &q), Err(Error::Precondition(_))));
    }

    #[test]
    fn homogeneity() {
        let q = WeightedQuadrature::default();
        let f = PolyProfile::bump(1, 2, &[]);
        let m = mode(3, 1).unwrap();
        let a = gradhardy_form(&m, &f, &q).unwrap();
        let b = gradhardy_form(&m, &f.scaled(2.0), &q).unwrap();
        assert!((b - 4.0 * a).abs() < 1e-13 * b);
        let m5 = mode(5, 0).unwrap();
        let g = PolyProfile::bump(2, 2, &[]);
        let a = hardy4_form(&m5, &g, &q).unwrap();
        let b = hardy4_form(&m5, &g.scaled(2.0), &q).unwrap();
        assert!((b - 4.0 * a).abs() < 1e-13 * b);
    }

    #[test]
    fn hardy4_beta_integral() {
        // ∫₀¹ r⁴(1−r)⁴ dr = B(5,5) = 1/630
        let q = WeightedQuadrature::default();
        let v = hardy4_form(&mode(5, 0).unwrap(), &PolyProfile::bump(2, 2, &[]), &q).unwrap();
        assert!((v - 1.0 / 630.0).abs() < 1e-14);
    }

    #[test]
    fn gradhardy_dominates_hardy_for_nonradial_modes() {
        let q = WeightedQuadrature::default();
        for n in 3..8 {
            for k in 1..4 {
                let m = mode(n, k).unwrap();
                for f in random_corpus(k as u32, 5, 7) {
                    let g = gradhardy_form(&m, &f, &q).unwrap();
                    let h = hardy4_form(&m, &f, &q).unwrap();
                    assert!(g >= f64::from(n - 1) * h * (1.0 - 1e-12));
                }
            }
        }
    }
}

//! The power substitution `u = |x|^{−(n−4)/2} v` and the logarithmic one
//! `v(r) = α(r) w(g(r))`, with numerical checks of the identities they
//! produce.
//!
//! All derivative stacks are stored in scaled form: `r^j g^{(j)} / g` and
//! `r^j α^{(j)} / g^s` are finite sums of powers of `X(r)`, so nothing is
//! evaluated as `g` or `1/r` alone until the final product.

use crate::constants::{x_of_r, Dimension};
use crate::error::{Error, Result};
use crate::exactpoly::{encode, ExactLaurentPoly, Which};
use crate::harmonics::{ModeSpec, RadialProfile};
use crate::quadrature::WeightedQuadrature;

/// `c · X^{e / (4(n−1))}`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coef: f64,
    e: f64,
}

fn sum_terms(terms: &[Term], ln_x: f64, unit: f64) -> f64 {
    terms.iter().map(|t| t.coef * (t.e / unit * ln_x).exp()).sum()
}

/// `g(r) = exp(1 − X^{−n/(2(n−1))})`, `α(r) = X^{−3(n−2)/(4(n−1))} g^s` and
/// their derivatives, for fixed `n` and `β` (`s = (n−4)/(2β)`).
#[derive(Debug, Clone, PartialEq)]
pub struct SubstitutionMaps {
    pub n: u32,
    pub beta: f64,
    pub s: f64,
    ghat: [Vec<Term>; 4],
    ahat: [Vec<Term>; 5],
}

pub fn maps(n: u32, beta: f64) -> Result<SubstitutionMaps> {
    Dimension::new(n)?.require_at_least(5, "substitution maps")?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let nf = f64::from(n);
    let m = nf - 1.0;
    let s = (nf - 4.0) / (2.0 * beta);
    let t = |coef: f64, e: f64| Term { coef, e };
    let c = nf / (2.0 * m);
    let ghat = [
        vec![t(1.0, 0.0)],
        vec![t(c, 2.0 * (nf - 2.0))],
        vec![
            t(-c, 2.0 * (nf - 2.0)),
            t(nf * nf / (4.0 * m * m), 4.0 * (nf - 2.0)),
            t(nf * (nf - 2.0) / (4.0 * m * m), 2.0 * (3.0 * nf - 4.0)),
        ],
        vec![
            t(-3.0 * nf * (nf - 2.0) / (4.0 * m * m), 2.0 * (3.0 * nf - 4.0)),
            t(3.0 * nf * nf * (nf - 2.0) / (8.0 * m.powi(3)), 4.0 * (2.0 * nf - 3.0)),
            t(nf * (nf - 2.0) * (3.0 * nf - 4.0) / (8.0 * m.powi(3)), 2.0 * (5.0 * nf - 6.0)),
            t(nf / m, 2.0 * (nf - 2.0)),
            t(-3.0 * nf * nf / (4.0 * m * m), 4.0 * (nf - 2.0)),
            t(nf.powi(3) / (8.0 * m.powi(3)), 2.0 * (3.0 * nf - 6.0)),
        ],
    ];
    let (n2, s2) = (nf * nf, s * s);
    let k = nf - 2.0;
    let ahat = [
        vec![t(1.0, -3.0 * k)],
        vec![t(s * nf / (2.0 * m), 2.0 - nf), t(-3.0 * k / (4.0 * m), nf + 2.0)],
        vec![
            t(-s * nf / (2.0 * m), 2.0 - nf),
            t(s2 * n2 / (4.0 * m * m), nf - 2.0),
            t(3.0 * k / (4.0 * m), nf + 2.0),
            t(-s * nf * k / (2.0 * m * m), 3.0 * nf - 2.0),
            t(-3.0 * (n2 - 4.0) / (16.0 * m * m), 5.0 * nf - 2.0),
        ],
        vec![
            t(s * nf / m, 2.0 - nf),
            t(-3.0 * s2 * n2 / (4.0 * m * m), nf - 2.0),
            t(-3.0 * k / (2.0 * m), nf + 2.0),
            t(s.powi(3) * nf.powi(3) / (8.0 * m.powi(3)), 3.0 * nf - 6.0),
            t(3.0 * s * nf * k / (2.0 * m * m), 3.0 * nf - 2.0),
            t(-3.0 * s2 * n2 * k / (16.0 * m.powi(3)), 5.0 * nf - 6.0),
            t(9.0 * (n2 - 4.0) / (16.0 * m * m), 5.0 * nf - 2.0),
            t(-s * nf * k * (15.0 * nf - 2.0) / (32.0 * m.powi(3)), 7.0 * nf - 6.0),
            t(-3.0 * (n2 - 4.0) * (5.0 * nf - 2.0) / (64.0 * m.powi(3)), 9.0 * nf - 6.0),
        ],
        vec![
            t(-3.0 * s * nf / m, 2.0 - nf),
            t(11.0 * s2 * n2 / (4.0 * m * m), nf - 2.0),
            t(9.0 * k / (2.0 * m), nf + 2.0),
            t(-3.0 * s.powi(3) * nf.powi(3) / (4.0 * m.powi(3)), 3.0 * nf - 6.0),
            t(-11.0 * s * nf * k / (2.0 * m * m), 3.0 * nf - 2.0),
            t(s.powi(4) * n2 * n2 / (16.0 * m.powi(4)), 5.0 * nf - 10.0),
            t(9.0 * s2 * n2 * k / (8.0 * m.powi(3)), 5.0 * nf - 6.0),
            t(-33.0 * (n2 - 4.0) / (16.0 * m * m), 5.0 * nf - 2.0),
            t(3.0 * s * nf * k * (15.0 * nf - 2.0) / (16.0 * m.powi(3)), 7.0 * nf - 6.0),
            t(-5.0 * s2 * n2 * k * (3.0 * nf - 2.0) / (32.0 * m.powi(4)), 9.0 * nf - 10.0),
            t(9.0 * (5.0 * nf - 2.0) * (n2 - 4.0) / (32.0 * m.powi(3)), 9.0 * nf - 6.0),
            t(-5.0 * s * n2 * k * (3.0 * nf - 2.0) / (16.0 * m.powi(4)), 11.0 * nf - 10.0),
            t(-9.0 * (3.0 * nf - 2.0) * (5.0 * nf - 2.0) * (n2 - 4.0) / (256.0 * m.powi(4)), 13.0 * nf - 10.0),
        ],
    ];
    Ok(SubstitutionMaps { n, beta, s, ghat, ahat })
}

impl SubstitutionMaps {
    fn unit(&self) -> f64 {
        4.0 * (f64::from(self.n) - 1.0)
    }

    /// `n / (2(n−1))`.
    pub fn ratio(&self) -> f64 {
        let n = f64::from(self.n);
        n / (2.0 * (n - 1.0))
    }

    /// `ln g(r) = 1 − X^{−n/(2(n−1))}`, finite even where `g` underflows.
    pub fn ln_g(&self, r: f64) -> Result<f64> {
        let x = x_of_r(r)?;
        Ok(1.0 - (-self.ratio() * x.ln()).exp())
    }

    pub fn g(&self, r: f64) -> Result<f64> {
        Ok(self.ln_g(r)?.exp())
    }

    /// The `r` with `g(r) = t`, through `X(r) = X(t)^{2(n−1)/n}`.
    pub fn g_inverse(&self, t: f64) -> Result<f64> {
        let xt = x_of_r(t)?;
        let xr = xt.powf(1.0 / self.ratio());
        Ok((1.0 - 1.0 / xr).exp())
    }

    /// `[r^j g^{(j)}(r) / g(r)]` for `j = 0..=3`.
    pub fn g_scaled(&self, r: f64) -> Result<[f64; 4]> {
        let lx = x_of_r(r)?.ln();
        let u = self.unit();
        Ok(std::array::from_fn(|j| sum_terms(&self.ghat[j], lx, u)))
    }

    /// `[r^j α^{(j)}(r) / g(r)^s]` for `j = 0..=4`.
    pub fn alpha_scaled(&self, r: f64) -> Result<[f64; 5]> {
        let lx = x_of_r(r)?.ln();
        let u = self.unit();
        Ok(std::array::from_fn(|j| sum_terms(&self.ahat[j], lx, u)))
    }

    /// `[g, g', g'', g''']` at `r`.
    pub fn g_derivs(&self, r: f64) -> Result<[f64; 4]> {
        let ln_g = self.ln_g(r)?;
        let sc = self.g_scaled(r)?;
        Ok(std::array::from_fn(|j| sc[j] * (ln_g - j as f64 * r.ln()).exp()))
    }

    /// `[α, α', α'', α''', α'''']` at `r`.
    pub fn alpha_derivs(&self, r: f64) -> Result<[f64; 5]> {
        let ln_g = self.ln_g(r)?;
        let sc = self.alpha_scaled(r)?;
        Ok(std::array::from_fn(|j| sc[j] * (self.s * ln_g - j as f64 * r.ln()).exp()))
    }

    /// Relative defect of `X(g(r)) = X(r)^{n/(2(n−1))}`.
    pub fn relation_residual(&self, r: f64) -> Result<f64> {
        let xr = x_of_r(r)?;
        let t = self.g(r)?;
        let lhs = x_of_r(t)?;
        let rhs = xr.powf(self.ratio());
        Ok((lhs - rhs).abs() / rhs)
    }

    /// `(ln g^s, [v, r v', r² v''] / g^s)` for `v = α w∘g`.
    fn v_scaled(&self, r: f64, w: &dyn RadialProfile) -> Result<(f64, [f64; 3])> {
        let ln_g = self.ln_g(r)?;
        let t = ln_g.exp();
        let g = self.g_scaled(r)?;
        let a = self.alpha_scaled(r)?;
        let [w0, w1, w2] = w.eval(t);
        let (big_w1, big_w2) = (t * w1, t * t * w2);
        let v0 = a[0] * w0;
        let v1 = a[0] * g[1] * big_w1 + a[1] * w0;
        let v2 = a[0] * g[1] * g[1] * big_w2 + (2.0 * a[1] * g[1] + a[0] * g[2]) * big_w1 + a[2] * w0;
        Ok((self.s * ln_g, [v0, v1, v2]))
    }
}

/// `u(r) = r^{−(n−4)/2} v(r)`.
#[derive(Debug, Clone)]
pub struct UFromV<P> {
    pub n: u32,
    pub v: P,
}

/// `v(r) = r^{(n−4)/2} u(r)`.
#[derive(Debug, Clone)]
pub struct VFromU<P> {
    pub n: u32,
    pub u: P,
}

/// `c · r^e` without forming `r^e` alone when it would overflow.
fn times_pow(c: f64, e: f64, r: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    let v = c * r.powf(e);
    if v.is_finite() && v != 0.0 {
        v
    } else {
        c.signum() * (c.abs().ln() + e * r.ln()).exp()
    }
}

fn power_times(p: f64, r: f64, f: [f64; 3]) -> [f64; 3] {
    [
        times_pow(f[0], p, r),
        times_pow(r * f[1] + p * f[0], p - 1.0, r),
        times_pow(r * r * f[2] + 2.0 * p * r * f[1] + p * (p - 1.0) * f[0], p - 2.0, r),
    ]
}

impl<P: RadialProfile> RadialProfile for UFromV<P> {
    fn eval(&self, r: f64) -> [f64; 3] {
        power_times(-(f64::from(self.n) - 4.0) / 2.0, r, self.v.eval(r))
    }
    fn vanishing_exponent(&self) -> f64 {
        self.v.vanishing_exponent() - (f64::from(self.n) - 4.0) / 2.0
    }
    fn support(&self) -> (f64, f64) {
        self.v.support()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.v.breakpoints()
    }
}

impl<P: RadialProfile> RadialProfile for VFromU<P> {
    fn eval(&self, r: f64) -> [f64; 3] {
        power_times((f64::from(self.n) - 4.0) / 2.0, r, self.u.eval(r))
    }
    fn vanishing_exponent(&self) -> f64 {
        self.u.vanishing_exponent() + (f64::from(self.n) - 4.0) / 2.0
    }
    fn support(&self) -> (f64, f64) {
        self.u.support()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.u.breakpoints()
    }
}

pub fn u_to_v<P: RadialProfile>(n: u32, u: P) -> VFromU<P> {
    VFromU { n, u }
}

pub fn v_to_u<P: RadialProfile>(n: u32, v: P) -> UFromV<P> {
    UFromV { n, v }
}

/// `v(r) = α(r) w(g(r))`.
#[derive(Debug, Clone)]
pub struct VFromW<'a, P> {
    pub maps: &'a SubstitutionMaps,
    pub w: P,
}

/// `w(t) = v(r) / α(r)` with `t = g(r)`.
#[derive(Debug, Clone)]
pub struct WFromV<'a, P> {
    pub maps: &'a SubstitutionMaps,
    pub v: P,
}

impl<P: RadialProfile> RadialProfile for VFromW<'_, P> {
    fn eval(&self, r: f64) -> [f64; 3] {
        if !(r > 0.0 && r <= 1.0) {
            return [0.0; 3];
        }
        let (ln_gs, sc) = self.maps.v_scaled(r, &self.w).expect("r checked above");
        let lr = r.ln();
        std::array::from_fn(|j| {
            if sc[j] == 0.0 {
                0.0
            } else {
                sc[j].signum() * (ln_gs - j as f64 * lr + sc[j].abs().ln()).exp()
            }
        })
    }
    fn vanishing_exponent(&self) -> f64 {
        // decays slower than every positive power of r
        0.0
    }
}

impl<P: RadialProfile> RadialProfile for WFromV<'_, P> {
    fn eval(&self, t: f64) -> [f64; 3] {
        if !(t > 0.0 && t <= 1.0) {
            return [0.0; 3];
        }
        let m = self.maps;
        let r = m.g_inverse(t).expect("t checked above");
        let g = m.g_derivs(r).expect("r in (0, 1]");
        let a = m.alpha_derivs(r).expect("r in (0, 1]");
        let [v0, v1, v2] = self.v.eval(r);
        let w0 = v0 / a[0];
        let w1 = (v1 - a[1] * w0) / (a[0] * g[1]);
        let w2 = (v2 - (2.0 * a[1] * g[1] + a[0] * g[2]) * w1 - a[2] * w0) / (a[0] * g[1] * g[1]);
        [w0, w1, w2]
    }
    fn vanishing_exponent(&self) -> f64 {
        0.0
    }
}

pub fn v_to_w<'a, P: RadialProfile>(maps: &'a SubstitutionMaps, v: P) -> WFromV<'a, P> {
    WFromV { maps, v }
}

pub fn w_to_v<'a, P: RadialProfile>(maps: &'a SubstitutionMaps, w: P) -> VFromW<'a, P> {
    VFromW { maps, w }
}

/// Both sides of one identity and their relative gap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

impl Comparison {
    fn new(lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let residual = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
        Comparison { lhs, rhs, residual }
    }
}

fn is_zero_profile(f: &dyn RadialProfile, quad: &WeightedQuadrature) -> bool {
    quad.nodes().iter().all(|&r| f.eval(r).iter().all(|&v| v == 0.0))
}

/// `(v · r^half)²`, robust where `r^half` alone overflows.
fn weighted_sq(v: f64, half: f64, r: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let mut s = if half >= 0.0 { v * r.powf(half) } else { v / r.powf(-half) };
    if !s.is_finite() || s == 0.0 {
        s = (v.abs().ln() + half * r.ln()).exp();
    }
    s * s
}

/// `∫ f^{(j)}(r)² r^p dr`.
fn moment(f: &dyn RadialProfile, j: usize, p: f64, quad: &WeightedQuadrature) -> Result<f64> {
    quad.integrate(|r| weighted_sq(f.eval(r)[j], p / 2.0, r), 0.0, 0.0)
}

/// `∫(Δv)² r^{n−1+θ} dr` for `v = f φ_k` against the expanded five-term form.
pub fn validate_sph_lapl(
    mode: &ModeSpec,
    theta: f64,
    f: &dyn RadialProfile,
    quad: &WeightedQuadrature,
) -> Result<Comparison> {
    let n = mode.n.as_f64();
    let mu = mode.mu_f64();
    let p = n + theta - 1.0;
    // r²Δv = r²f'' + (n−1) r f' − μ f
    let lhs = quad.integrate(
        |r| {
            let [f0, f1, f2] = f.eval(r);
            let lap = r * r * f2 + (n - 1.0) * r * f1 - mu * f0;
            weighted_sq(lap, p / 2.0 - 2.0, r)
        },
        0.0,
        0.0,
    )?;
    let i2 = moment(f, 2, p, quad)?;
    let i1 = moment(f, 1, p - 2.0, quad)?;
    let i0 = moment(f, 0, p - 4.0, quad)?;
    let rhs = i2
        + (n - 1.0) * (1.0 - theta) * i1
        + mu * mu * i0
        + 2.0 * mu * i1
        - (theta - 2.0) * (n + theta - 4.0) * mu * i0;
    Ok(Comparison::new(lhs, rhs))
}

/// Residuals of the power change of variable `u(r) = y(r^β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma1Report {
    pub energy: Comparison,
    pub measure: Comparison,
}

impl Lemma1Report {
    pub fn max_residual(&self) -> f64 {
        self.energy.residual.max(self.measure.residual)
    }
}

pub fn validate_lemma1(n: u32, beta: f64, y: &dyn RadialProfile, quad: &WeightedQuadrature) -> Result<Lemma1Report> {
    Dimension::new(n)?.require_at_least(5, "validate_lemma1")?;
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::Domain(format!("beta must be positive, got {beta}")));
    }
    let nf = f64::from(n);
    let q = 2.0 * nf / (nf - 4.0);
    let a = (2.0 * nf - 4.0 - beta * (nf - 4.0 + beta)) / (beta * beta);
    let scaled = |t: f64| {
        let [y0, y1, y2] = y.eval(t);
        [y0, t * y1, t * t * y2]
    };
    // r²(u_rr + (n−1)u_r/r) = β(β+n−2) t y' + β² t² y''
    let lhs = quad.integrate(
        |r| {
            let [_, t1, t2] = scaled(r.powf(beta));
            (beta * (beta + nf - 2.0) * t1 + beta * beta * t2).powi(2)
        },
        nf - 5.0,
        0.0,
    )?;
    let rhs = beta.powi(3)
        * quad.integrate(
            |t| {
                let [_, t1, t2] = scaled(t);
                t2 * t2 + a * t1 * t1
            },
            (nf - 4.0) / beta - 1.0,
            0.0,
        )?;
    let m_lhs = quad.integrate(|r| y.eval(r.powf(beta))[0].abs().powf(q), nf - 1.0, 0.0)?;
    let m_rhs = quad.integrate(|t| y.eval(t)[0].abs().powf(q), (nf - beta) / beta, 0.0)? / beta;
    Ok(Lemma1Report { energy: Comparison::new(lhs, rhs), measure: Comparison::new(m_lhs, m_rhs) })
}

/// Residuals of the three parts of the logarithmic change of variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarkReport {
    pub radial: Comparison,
    pub angular: Comparison,
    pub measure: Comparison,
}

impl MarkReport {
    pub fn max_residual(&self) -> f64 {
        self.radial.residual.max(self.angular.residual).max(self.measure.residual)
    }
}

/// [`validate_lemma_mark_beta`] at `β = n/(2(n−1))`.
pub fn validate_lemma_mark(
    mode: &ModeSpec,
    w: &dyn RadialProfile,
    quad: &WeightedQuadrature,
) -> Result<MarkReport> {
    let n = mode.n.as_f64();
    validate_lemma_mark_beta(mode, n / (2.0 * (n - 1.0)), w, quad)
}

/// Builds `v = α w∘g` and compares `J_R`, `J_NR` and the weighted Sobolev
/// measure of `v` with their `t`-side forms, using the exact `G, H, K`.
pub fn validate_lemma_mark_beta(
    mode: &ModeSpec,
    beta: f64,
    w: &dyn RadialProfile,
    quad: &WeightedQuadrature,
) -> Result<MarkReport> {
    let n = mode.n.get();
    let m = maps(n, beta)?;
    let nf = f64::from(n);
    let mu = mode.mu_f64();
    let b = 1.0 / beta;
    let [g, h, k] = [Which::G, Which::H, Which::K].map(|which| encode(n, which));
    let (g, h, k) = (g?, h?, k?);
    let cr = (nf * nf - 4.0 * nf + 6.0) / 2.0;
    let cn = nf * (nf - 4.0) / 2.0;
    let q = 2.0 * nf / (nf - 4.0);
    let ratio = m.ratio();

    if is_zero_profile(w, quad) {
        let z = Comparison::new(0.0, 0.0);
        return Ok(MarkReport { radial: z, angular: z, measure: z });
    }

    // r-side: every integrand is r^{-1} g^{2s} × (bounded), weight p = −1.
    let r_side = |sel: &dyn Fn(&[f64; 3], f64) -> f64, power: f64| -> Result<f64> {
        quad.integrate(
            |r| {
                let Ok((ln_gs, v)) = m.v_scaled(r, w) else { return 0.0 };
                let inner = sel(&v, r);
                if inner == 0.0 {
                    return 0.0;
                }
                inner.signum() * (power * ln_gs + inner.abs().ln()).exp()
            },
            -1.0,
            0.0,
        )
    };
    let jr = r_side(&|v, _| v[2] * v[2] + cr * v[1] * v[1], 2.0)?;
    let jnr = r_side(&|v, _| (mu * mu + cn * mu) * v[0] * v[0] + 2.0 * mu * v[1] * v[1], 2.0)?;
    let meas_r = r_side(
        &|v, r| {
            let x = x_of_r(r).unwrap_or(0.0);
            x.powf((2.0 * nf - 4.0) / (nf - 4.0)) * v[0].abs().powf(q)
        },
        q,
    )?;

    // t-side, in W_j = t^j w^{(j)}; t^{(n−4)/β − 1} = t^{2s−1}.
    let eval_poly = |p: &ExactLaurentPoly, x: f64| p.eval_f64(x, b);
    let t_side = |f: &dyn Fn(f64, [f64; 3]) -> f64, p: f64| -> Result<f64> {
        quad.integrate(
            |t| {
                let [w0, w1, w2] = w.eval(t);
                let big = [w0, t * w1, t * t * w2];
                if big.iter().all(|&v| v == 0.0) {
                    return 0.0;
                }
                f(crate::constants::x_of_r(t).unwrap_or(0.0), big)
            },
            p,
            0.0,
        )
    };
    let e = 2.0 * m.s - 1.0;
    let rad_t = t_side(
        &|x, wv| ratio.powi(3) * wv[2] * wv[2] + eval_poly(&g, x) * wv[1] * wv[1] + eval_poly(&h, x) * wv[0] * wv[0],
        e,
    )?;
    let ang_t = t_side(
        &|x, wv| {
            let y = x.powf((4.0 - 2.0 * nf) / nf);
            mu * mu / ratio * y * y * wv[0] * wv[0] + 2.0 * ratio * mu * y * wv[1] * wv[1]
                + mu * eval_poly(&k, x) * wv[0] * wv[0]
        },
        e,
    )?;
    let meas_t = t_side(&|_, wv| wv[0].abs().powf(q), nf / beta - 1.0)? / ratio;

    Ok(MarkReport {
        radial: Comparison::new(jr, rad_t),
        angular: Comparison::new(jnr, ang_t),
        measure: Comparison::new(meas_r, meas_t),
    })
}

/// `J[v]` for `v = f φ_k`: the five radial integrals left after the power
/// substitution.
pub fn j_functional(mode: &ModeSpec, v: &dyn RadialProfile, quad: &WeightedQuadrature) -> Result<f64> {
    let n = mode.n.as_f64();
    let mu = mode.mu_f64();
    let i2 = moment(v, 2, 3.0, quad)?;
    let i1 = moment(v, 1, 1.0, quad)?;
    let i0 = moment(v, 0, -1.0, quad)?;
    Ok(i2 + (n * n - 4.0 * n + 6.0) / 2.0 * i1 + mu * mu * i0 + 2.0 * mu * i1 + n * (n - 4.0) / 2.0 * mu * i0)
}

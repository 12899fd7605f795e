//! Composite Gauss–Legendre quadrature for `∫₀¹ r^p X(r)^σ f(r) dr`.
//!
//! The interval is split into a geometrically graded mesh
//! `[q^{m}, q^{m-1}], …, [q, 1]` plus a tail `(0, q^m]`. The tail is mapped
//! to the weight variable `X = X(q^m)·v^κ` and itself graded toward
//! `v = 0`, so weights like `r^{-1} X^σ` whose mass sits at `ln r → −∞`
//! are integrated to full precision. The stretching power `κ` is chosen per
//! call from `(p, σ)`: for the borderline case `p = −1` it makes the tail
//! integrand of `f ≡ 1` constant.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;

use crate::constants::x_unchecked;
use crate::error::{Error, Result};

const TAIL_RATIO: f64 = 0.5;

/// Reference Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub(crate) struct UnitRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl UnitRule {
    pub fn new(points: usize) -> Self {
        let gl = GaussLegendre::new(NonZeroUsize::new(points.max(1)).unwrap());
        let mut pairs: Vec<(f64, f64)> = gl
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        UnitRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn apply(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(a + h * x))
            .sum::<f64>()
            * h
    }
}

/// Graded composite rule on `(0, 1)`.
#[derive(Debug, Clone)]
pub struct WeightedQuadrature {
    subintervals: usize,
    points: usize,
    ratio: f64,
    tail_panels: usize,
    panels: Vec<(f64, f64)>,
    rule: UnitRule,
    low_rule: UnitRule,
}

impl Default for WeightedQuadrature {
    fn default() -> Self {
        WeightedQuadrature::new(60, 16, 0.7).expect("default quadrature parameters are valid")
    }
}

impl WeightedQuadrature {
    /// `subintervals` geometric panels with `points` nodes each, grading `ratio`.
    pub fn new(subintervals: usize, points: usize, ratio: f64) -> Result<Self> {
        if subintervals == 0 || points < 2 {
            return Err(Error::Parameter("quadrature needs >= 1 subinterval and >= 2 points".into()));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::Parameter(format!("grading ratio must lie in (0,1), got {ratio}")));
        }
        let panels = (0..subintervals)
            .rev()
            .map(|i| (ratio.powi(i as i32 + 1), ratio.powi(i as i32)))
            .collect();
        Ok(WeightedQuadrature {
            subintervals,
            points,
            ratio,
            tail_panels: 48,
            panels,
            rule: UnitRule::new(points),
            low_rule: UnitRule::new((points / 2).max(2)),
        })
    }

    /// Rule whose geometric part reaches `ln r = −depth`.
    pub fn covering_depth(depth: f64, points: usize, ratio: f64) -> Result<Self> {
        let m = (depth / -ratio.ln()).ceil().max(1.0) as usize;
        WeightedQuadrature::new(m, points, ratio)
    }

    /// Twice as many panels over the same range (`ratio → √ratio`).
    pub fn refined(&self) -> Self {
        let mut q = WeightedQuadrature::new(self.subintervals * 2, self.points, self.ratio.sqrt())
            .expect("refinement of a valid rule is valid");
        q.tail_panels = self.tail_panels;
        let extra: Vec<f64> = self.extra_breakpoints();
        q.with_breakpoints(&extra)
    }

    /// Splits panels at the given interior points (kinks of an integrand).
    pub fn with_breakpoints(mut self, points: &[f64]) -> Self {
        for &c in points {
            if !(c > self.r_min() && c < 1.0) {
                continue;
            }
            if let Some(i) = self.panels.iter().position(|&(a, b)| c > a && c < b) {
                let (a, b) = self.panels[i];
                let tol = 1e-12 * (b - a);
                if c - a > tol && b - c > tol {
                    self.panels.splice(i..=i, [(a, c), (c, b)]);
                }
            }
        }
        self
    }

    fn extra_breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for &(a, _) in &self.panels {
            let k = (a.ln() / self.ratio.ln()).round();
            if (self.ratio.powf(k) - a).abs() > 1e-12 * a {
                out.push(a);
            }
        }
        out
    }

    pub fn subintervals(&self) -> usize {
        self.subintervals
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Left end of the geometric part; below it the log tail takes over.
    pub fn r_min(&self) -> f64 {
        self.ratio.powi(self.subintervals as i32)
    }

    /// Panel endpoints, increasing.
    pub fn panels(&self) -> &[(f64, f64)] {
        &self.panels
    }

    /// Nodes of the geometric part, strictly increasing in `(0, 1)`.
    pub fn nodes(&self) -> Vec<f64> {
        self.panels
            .iter()
            .flat_map(|&(a, b)| self.rule.nodes.iter().map(move |&x| a + (b - a) * x))
            .collect()
    }

    /// Weights matching [`nodes`](Self::nodes), all positive.
    pub fn weights(&self) -> Vec<f64> {
        self.panels
            .iter()
            .flat_map(|&(a, b)| self.rule.weights.iter().map(move |&w| w * (b - a)))
            .collect()
    }

    fn kappa(p: f64, sigma: f64) -> f64 {
        if (p + 1.0).abs() < 1e-12 && sigma > 1.0 {
            (1.0 / (sigma - 1.0)).clamp(1.0, 1e3)
        } else {
            1.0
        }
    }

    fn sum_with<F>(&self, rule: &UnitRule, f: &F, p: f64, sigma: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64 + ?Sized,
    {
        let mut total = 0.0;
        let mut bad = None;
        for &(a, b) in &self.panels {
            total += rule.apply(a, b, |r| {
                let v = f(r);
                if !v.is_finite() {
                    bad.get_or_insert(r);
                }
                r.powf(p) * x_unchecked(r).powf(sigma) * v
            });
        }
        if let Some(r) = bad {
            return Err(Error::Evaluation { r });
        }
        // Tail: r ∈ (0, r_min], X = X_m v^κ, dr = r dX / X².
        let xm = x_unchecked(self.r_min());
        let kappa = Self::kappa(p, sigma);
        let ln_xm = xm.ln();
        let tail_term = |v: f64| -> (f64, f64) {
            // (1/v) r^{p+1} X^{σ−1} κ, in log form to survive tiny r and X.
            let ln_x = ln_xm + kappa * v.ln();
            let inv_x = (-ln_x).exp();
            let r = (1.0 - inv_x).exp();
            let r_part = if p + 1.0 == 0.0 { 0.0 } else { (p + 1.0) * (1.0 - inv_x) };
            (r, r_part + (sigma - 1.0) * ln_x - v.ln() + kappa.ln())
        };
        let mut hi = 1.0;
        for _ in 0..self.tail_panels {
            let lo = hi * TAIL_RATIO;
            total += rule.apply(lo, hi, |v| {
                let (r, log_w) = tail_term(v);
                if log_w == f64::NEG_INFINITY {
                    return 0.0;
                }
                let val = f(r);
                if !val.is_finite() {
                    bad.get_or_insert(r);
                    return 0.0;
                }
                if val == 0.0 {
                    return 0.0;
                }
                val.signum() * (log_w + val.abs().ln()).exp()
            });
            hi = lo;
        }
        if let Some(r) = bad {
            return Err(Error::Evaluation { r });
        }
        Ok(total)
    }

    /// `∫₀¹ r^p X(r)^σ f(r) dr`.
    pub fn integrate<F>(&self, f: F, p: f64, sigma: f64) -> Result<f64>
    where
        F: Fn(f64) -> f64,
    {
        self.sum_with(&self.rule, &f, p, sigma)
    }

    /// Value together with a residual estimate from a half-order rule.
    pub fn integrate_with_estimate<F>(&self, f: F, p: f64, sigma: f64) -> Result<(f64, f64)>
    where
        F: Fn(f64) -> f64,
    {
        let hi = self.sum_with(&self.rule, &f, p, sigma)?;
        let lo = self.sum_with(&self.low_rule, &f, p, sigma)?;
        Ok((hi, (hi - lo).abs() + 64.0 * f64::EPSILON * hi.abs()))
    }
}

/// Free-function form of [`WeightedQuadrature::integrate`].
pub fn integrate<F>(f: F, p: f64, sigma: f64, quad: &WeightedQuadrature) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    quad.integrate(f, p, sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_examples() {
        let q = WeightedQuadrature::default();
        assert!((q.integrate(|_| 1.0, 1.0, 0.0).unwrap() - 0.5).abs() < 1e-14);
        assert!((q.integrate(|_| 1.0, -1.0, 3.0).unwrap() - 0.5).abs() < 1e-10);
        assert_eq!(q.integrate(|_| 0.0, -1.0, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn nodes_and_weights_are_well_formed() {
        let q = WeightedQuadrature::default();
        let nodes = q.nodes();
        assert_eq!(nodes.len(), 60 * 16);
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(nodes[0] > 0.0 && *nodes.last().unwrap() < 1.0);
        assert!(q.weights().iter().all(|&w| w > 0.0));
        for w in q.panels().windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-300);
            assert!((w[0].0 / w[1].0 - 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(WeightedQuadrature::new(0, 16, 0.7).is_err());
        assert!(WeightedQuadrature::new(10, 16, 1.0).is_err());
        assert!(WeightedQuadrature::new(10, 1, 0.5).is_err());
    }

    #[test]
    fn non_finite_sample_is_reported() {
        let q = WeightedQuadrature::default();
        let err = q.integrate(|r| if r > 0.5 { f64::NAN } else { 1.0 }, 0.0, 0.0);
        assert!(matches!(err, Err(Error::Evaluation { .. })));
    }

    #[test]
    fn breakpoints_restore_accuracy_for_kinks() {
        let kink = |r: f64| (r - 0.3).abs();
        let exact = 0.3f64.powi(2) / 2.0 + 0.7f64.powi(2) / 2.0;
        let q = WeightedQuadrature::default().with_breakpoints(&[0.3]);
        assert!((q.integrate(kink, 0.0, 0.0).unwrap() - exact).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn log_weight_antiderivative(sigma in 1.05f64..8.0) {
            let q = WeightedQuadrature::default();
            let v = q.integrate(|_| 1.0, -1.0, sigma).unwrap();
            prop_assert!((v - 1.0 / (sigma - 1.0)).abs() < 1e-8 * (1.0 / (sigma - 1.0)).max(1.0));
        }

        #[test]
        fn refinement_within_estimate(p in -0.9f64..3.0, sigma in 0.0f64..4.0, c in 0.5f64..3.0) {
            let q = WeightedQuadrature::default();
            let f = |r: f64| (c * r).cos() * (1.0 - r).powi(2);
            let (v, est) = q.integrate_with_estimate(f, p, sigma).unwrap();
            let v2 = q.refined().integrate(f, p, sigma).unwrap();
            prop_assert!((v - v2).abs() <= est + 1e-13 * v.abs().max(1.0), "{v} {v2} {est}");
        }
    }

    #[test]
    fn log_weight_near_borderline() {
        // σ = 1.01 puts almost all mass at astronomically small r.
        let q = WeightedQuadrature::default();
        let v = q.integrate(|_| 1.0, -1.0, 1.01).unwrap();
        assert!((v - 100.0).abs() < 1e-8 * 100.0, "{v}");
    }
}

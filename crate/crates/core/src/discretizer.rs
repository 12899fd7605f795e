//! Cubic Hermite finite elements for the per-mode quotients.
//!
//! Degrees of freedom are scaled by the homogeneity of the forms: at node
//! `r_i` we store `V_i = f(r_i) r_i^{−γ}` and `S_i = f'(r_i) r_i^{1−γ}` with
//! `γ = (4−n)/2`. Every term of every form is dilation invariant, so each
//! element matrix depends only on the element ratio `r_{i+1}/r_i`. This keeps
//! the matrices `O(1)` on meshes reaching `r ~ e^{−300}`.
//!
//! Two element spaces share these dofs: plain cubic Hermite in `r`, and
//! `r^γ` times a cubic Hermite in `ln r` (the default). The second is exact on
//! pure powers `r^γ`, which is what the near-extremals of these quotients
//! look like, so it converges at a fraction of the element count.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::harmonics::{FormKind, ModeSpec, RadialProfile};
use crate::quadrature::{UnitRule, WeightedQuadrature};

/// Deepest log-depth whose first node `e^{−depth}` is a normal double.
pub const MAX_DEPTH: f64 = 700.0;

/// Element space on each mesh cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ElementKind {
    /// Cubic Hermite in `r`.
    Cubic,
    /// `r^γ` times a cubic Hermite in `ln r`.
    #[default]
    LogCubic,
}

/// Nodes `0 < r_0 < … < r_N` of a mesh on `[r_0, r_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    pub breakpoints: Vec<f64>,
    /// Ratio `r_i / r_{i+1}` for geometric meshes, `NaN` otherwise.
    pub ratio: f64,
    pub element: ElementKind,
}

impl Mesh1D {
    pub fn new(breakpoints: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Parameter("a mesh needs at least two nodes".into()));
        }
        if !(breakpoints[0] > 0.0) || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Parameter("mesh nodes must be positive and strictly increasing".into()));
        }
        Ok(Mesh1D { breakpoints, ratio: f64::NAN, element: ElementKind::default() })
    }

    /// Geometric mesh on `[e^{−depth}, 1]` with `elements` equal log-steps.
    pub fn log_uniform(depth: f64, elements: usize) -> Result<Self> {
        if !(depth > 0.0 && depth <= MAX_DEPTH) || elements == 0 {
            return Err(Error::Parameter(format!(
                "log-uniform mesh needs 0 < depth <= {MAX_DEPTH} and elements > 0, got ({depth}, {elements})"
            )));
        }
        let h = depth / elements as f64;
        let pts = (0..=elements).map(|i| (-(depth - i as f64 * h)).exp()).collect();
        Ok(Mesh1D { breakpoints: pts, ratio: (-h).exp(), element: ElementKind::default() })
    }

    pub fn with_element(mut self, element: ElementKind) -> Self {
        self.element = element;
        self
    }

    pub fn elements(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Log depth `−ln(r_0 / r_N)`.
    pub fn depth(&self) -> f64 {
        (self.breakpoints[self.elements()] / self.breakpoints[0]).ln()
    }

    /// Nested refinement: every element split at its geometric midpoint.
    pub fn refined(&self) -> Self {
        let mut pts = Vec::with_capacity(2 * self.breakpoints.len());
        for w in self.breakpoints.windows(2) {
            pts.push(w[0]);
            pts.push(w[0] * (w[1] / w[0]).sqrt());
        }
        pts.push(*self.breakpoints.last().unwrap());
        Mesh1D { breakpoints: pts, ratio: self.ratio.sqrt(), element: self.element }
    }

    /// Mesh dilated by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Mesh1D { breakpoints: self.breakpoints.iter().map(|r| r * c).collect(), ratio: self.ratio, element: self.element }
    }
}

/// Cubic Hermite shape functions on `[0, 1]` for an element of length `hh`:
/// values and first two derivatives in the element coordinate.
fn hermite(x: f64, hh: f64) -> [[f64; 4]; 3] {
    let (x2, x3) = (x * x, x * x * x);
    [
        [1.0 - 3.0 * x2 + 2.0 * x3, hh * (x - 2.0 * x2 + x3), 3.0 * x2 - 2.0 * x3, hh * (x3 - x2)],
        [-6.0 * x + 6.0 * x2, hh * (1.0 - 4.0 * x + 3.0 * x2), 6.0 * x - 6.0 * x2, hh * (3.0 * x2 - 2.0 * x)],
        [-6.0 + 12.0 * x, hh * (-4.0 + 6.0 * x), 6.0 - 12.0 * x, hh * (6.0 * x - 2.0)],
    ]
}

/// Shape functions of the four scaled dofs at reference coordinate `xi` of
/// an element with ratio `t`: `[g, g', g'']` in `ρ = r/a`, and `dρ/dξ`.
fn basis(xi: f64, t: f64, gamma: f64, kind: ElementKind) -> ([[f64; 4]; 3], f64) {
    match kind {
        ElementKind::Cubic => {
            let hh = t - 1.0;
            let h = hermite(xi, hh);
            let scale = [1.0, 1.0, t.powf(gamma), t.powf(gamma - 1.0)];
            let mut out = [[0.0; 4]; 3];
            for j in 0..3 {
                for p in 0..4 {
                    out[j][p] = scale[p] * h[j][p] / hh.powi(j as i32);
                }
            }
            (out, hh)
        }
        ElementKind::LogCubic => {
            let ell = t.ln();
            let h = hermite(xi, ell);
            let rho = (xi * ell).exp();
            // P in σ = ln ρ, with P' = S − γV at each node
            let mut pb = [[0.0; 4]; 3];
            for j in 0..3 {
                let d = ell.powi(j as i32);
                let hj = h[j].map(|v| v / d);
                pb[j] = [hj[0] - gamma * hj[1], hj[1], hj[2] - gamma * hj[3], hj[3]];
            }
            let (r0, r1, r2) = (rho.powf(gamma), rho.powf(gamma - 1.0), rho.powf(gamma - 2.0));
            let mut out = [[0.0; 4]; 3];
            for p in 0..4 {
                let (v, d1, d2) = (pb[0][p], pb[1][p], pb[2][p]);
                out[0][p] = r0 * v;
                out[1][p] = r1 * (gamma * v + d1);
                out[2][p] = r2 * (gamma * (gamma - 1.0) * v + (2.0 * gamma - 1.0) * d1 + d2);
            }
            (out, rho * ell)
        }
    }
}

/// `∫₁ᵗ ρ^{n−5+2j} φ_p^{(j)} φ_q^{(j)} dρ` for `j = 0, 1, 2`.
fn element_matrices(t: f64, gamma: f64, n: f64, kind: ElementKind, rule: &UnitRule) -> [[[f64; 4]; 4]; 3] {
    let mut m = [[[0.0; 4]; 4]; 3];
    for (&xi, &w) in rule.nodes.iter().zip(&rule.weights) {
        let (b, jac) = basis(xi, t, gamma, kind);
        let rho = match kind {
            ElementKind::Cubic => 1.0 + (t - 1.0) * xi,
            ElementKind::LogCubic => jac / t.ln(),
        };
        for (j, mj) in m.iter_mut().enumerate() {
            let wt = w * jac * rho.powf(n - 5.0 + 2.0 * j as f64);
            for p in 0..4 {
                for q in 0..4 {
                    mj[p][q] += wt * b[j][p] * b[j][q];
                }
            }
        }
    }
    m
}

/// Assembled numerator and denominator matrices.
#[derive(Debug, Clone)]
pub struct FormMatrixPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    /// Per node: global indices of the (value, slope) dofs, `None` if
    /// constrained to zero.
    pub dofs: Vec<[Option<usize>; 2]>,
    pub mesh: Mesh1D,
    pub mode: ModeSpec,
    pub gamma: f64,
}

impl FormMatrixPair {
    pub fn size(&self) -> usize {
        self.a.nrows()
    }

    /// Coefficient vector of the Hermite interpolant of `f`.
    pub fn interpolate(&self, f: &dyn RadialProfile) -> DVector<f64> {
        let mut x = DVector::zeros(self.size());
        for (i, &r) in self.mesh.breakpoints.iter().enumerate() {
            let [v, d1, _] = f.eval(r);
            if let Some(k) = self.dofs[i][0] {
                x[k] = v * r.powf(-self.gamma);
            }
            if let Some(k) = self.dofs[i][1] {
                x[k] = d1 * r.powf(1.0 - self.gamma);
            }
        }
        x
    }

    /// Largest deviation from symmetry of `A` and `B`, relative to their norms.
    pub fn asymmetry(&self) -> f64 {
        let rel = |m: &DMatrix<f64>| (m - m.transpose()).amax() / m.amax().max(f64::MIN_POSITIVE);
        rel(&self.a).max(rel(&self.b))
    }
}

/// Assembles `(A, B)` for the quotient `numerator / denominator` on `mesh`.
///
/// Constraints: `f = f' = 0` at the last node; at the first node the slope
/// is dropped for `k = 0`, the value for `k = 1`, both for `k ≥ 2`.
pub fn assemble(
    mode: &ModeSpec,
    numerator: FormKind,
    denominator: FormKind,
    mesh: &Mesh1D,
    quad: &WeightedQuadrature,
) -> Result<FormMatrixPair> {
    let nodes = mesh.breakpoints.len();
    let mut dofs = vec![[None, None]; nodes];
    let mut next = 0;
    for (i, d) in dofs.iter_mut().enumerate() {
        let keep = if i == nodes - 1 {
            [false, false]
        } else if i == 0 {
            match mode.k {
                0 => [true, false],
                1 => [false, true],
                _ => [false, false],
            }
        } else {
            [true, true]
        };
        for s in 0..2 {
            if keep[s] {
                d[s] = Some(next);
                next += 1;
            }
        }
    }
    if next == 0 {
        return Err(Error::Assembly(format!(
            "no free degrees of freedom on a {}-element mesh for k = {}",
            mesh.elements(),
            mode.k
        )));
    }
    let nf = mode.n.as_f64();
    let gamma = (4.0 - nf) / 2.0;
    let mu = mode.mu_f64();
    let num_c = numerator.terms(mode.n, mu).map(|(c, _)| c);
    let den_c = denominator.terms(mode.n, mu).map(|(c, _)| c);
    let rule = UnitRule::new(quad.points().max(10));
    let mut a = DMatrix::zeros(next, next);
    let mut b = DMatrix::zeros(next, next);
    let mut cached: Option<(f64, [[[f64; 4]; 4]; 3])> = None;
    for e in 0..mesh.elements() {
        let t = mesh.breakpoints[e + 1] / mesh.breakpoints[e];
        let m = match cached {
            Some((tc, m)) if (tc - t).abs() <= 1e-14 * t => m,
            _ => {
                let m = element_matrices(t, gamma, nf, mesh.element, &rule);
                cached = Some((t, m));
                m
            }
        };
        let loc = [dofs[e][0], dofs[e][1], dofs[e + 1][0], dofs[e + 1][1]];
        for p in 0..4 {
            let Some(gp) = loc[p] else { continue };
            for q in 0..4 {
                let Some(gq) = loc[q] else { continue };
                // term order in FormKind::terms is (f'', f', f)
                let (mut va, mut vb) = (0.0, 0.0);
                for j in 0..3 {
                    va += num_c[2 - j] * m[j][p][q];
                    vb += den_c[2 - j] * m[j][p][q];
                }
                a[(gp, gq)] += va;
                b[(gp, gq)] += vb;
            }
        }
    }
    Ok(FormMatrixPair { a, b, dofs, mesh: mesh.clone(), mode: mode.clone(), gamma })
}

/// Piecewise-cubic profile on a mesh, zero outside `[r_0, r_N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct FemProfile {
    pub nodes: Vec<f64>,
    /// Scaled `(V_i, S_i)` per node.
    pub coeffs: Vec<[f64; 2]>,
    pub gamma: f64,
    pub element: ElementKind,
}

impl FemProfile {
    pub fn from_vector(pair: &FormMatrixPair, x: &DVector<f64>) -> Self {
        let coeffs = pair.dofs.iter().map(|d| d.map(|i| i.map_or(0.0, |k| x[k]))).collect();
        FemProfile { nodes: pair.mesh.breakpoints.clone(), coeffs, gamma: pair.gamma, element: pair.mesh.element }
    }
}

impl RadialProfile for FemProfile {
    fn eval(&self, r: f64) -> [f64; 3] {
        let last = self.nodes.len() - 1;
        if !(r >= self.nodes[0] && r <= self.nodes[last]) {
            return [0.0; 3];
        }
        let e = self.nodes.partition_point(|&x| x <= r).saturating_sub(1).min(last - 1);
        let (a, t) = (self.nodes[e], self.nodes[e + 1] / self.nodes[e]);
        let xi = match self.element {
            ElementKind::Cubic => (r / a - 1.0) / (t - 1.0),
            ElementKind::LogCubic => (r / a).ln() / t.ln(),
        }
        .clamp(0.0, 1.0);
        let (b, _) = basis(xi, t, self.gamma, self.element);
        let c = [self.coeffs[e][0], self.coeffs[e][1], self.coeffs[e + 1][0], self.coeffs[e + 1][1]];
        let mut out = [0.0; 3];
        for (j, o) in out.iter_mut().enumerate() {
            let g: f64 = (0..4).map(|p| c[p] * b[j][p]).sum();
            *o = a.powf(self.gamma - j as f64) * g;
        }
        out
    }

    fn vanishing_exponent(&self) -> f64 {
        f64::INFINITY
    }

    fn support(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.nodes.clone()
    }
}

/// Smallest generalized eigenpair of a [`FormMatrixPair`].
#[derive(Debug, Clone)]
pub struct MinQuotient {
    pub lambda_min: f64,
    pub vector: DVector<f64>,
    pub profile: FemProfile,
    /// `‖Ax − λBx‖ / ((‖A‖ + λ‖B‖)‖x‖)`.
    pub residual: f64,
}

/// Smallest eigenvalue of `A x = λ B x` via Cholesky of `B`.
pub fn min_quotient(pair: &FormMatrixPair) -> Result<MinQuotient> {
    if pair.b.amax() == 0.0 {
        return Err(Error::Singular("denominator matrix vanishes".into()));
    }
    let chol = nalgebra::Cholesky::new(pair.b.clone()).ok_or_else(|| {
        Error::Conditioning(format!(
            "denominator matrix of size {} is not numerically positive definite (max |B| = {:e}, min diag = {:e})",
            pair.size(),
            pair.b.amax(),
            pair.b.diagonal().min()
        ))
    })?;
    let l = chol.l();
    let y = l.solve_lower_triangular(&pair.a).expect("Cholesky factor is nonsingular");
    let mut c = l.solve_lower_triangular(&y.transpose()).expect("Cholesky factor is nonsingular");
    c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let (imin, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty spectrum");
    let z = eig.eigenvectors.column(imin).into_owned();
    let mut x = l.transpose().solve_upper_triangular(&z).expect("Cholesky factor is nonsingular");
    // fix the sign so the profile is positive near r = 1
    if let Some(i) = (0..x.len()).rev().find(|&i| x[i].abs() > 1e-12 * x.amax()) {
        if x[i] < 0.0 {
            x = -x;
        }
    }
    let resid = (&pair.a * &x - lambda * (&pair.b * &x)).norm();
    let scale = (pair.a.norm() + lambda.abs() * pair.b.norm()) * x.norm();
    let residual = resid / scale;
    let profile = FemProfile::from_vector(pair, &x);
    Ok(MinQuotient { lambda_min: lambda, vector: x, profile, residual })
}

/// Outcome of [`convergence_sweep`].
#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub lambdas: Vec<f64>,
    pub elements: Vec<usize>,
    /// Aitken-extrapolated limit of the last three values.
    pub extrapolated: f64,
    /// Observed convergence order in the element size.
    pub order: f64,
    /// Largest relative increase between consecutive meshes (≤ 0 when monotone).
    pub max_increase: f64,
    /// `λ_min` on the finest mesh dilated into `(0, 1/2)`.
    pub shrunk_lambda: f64,
}

const MONOTONE_TOL: f64 = 1e-10;

/// `λ_min` over nested meshes, with extrapolation and a truncation probe.
pub fn convergence_sweep(
    mode: &ModeSpec,
    numerator: FormKind,
    denominator: FormKind,
    meshes: &[Mesh1D],
    quad: &WeightedQuadrature,
) -> Result<SweepReport> {
    if meshes.len() < 3 {
        return Err(Error::Parameter(format!("a sweep needs at least 3 meshes, got {}", meshes.len())));
    }
    let mut lambdas = Vec::with_capacity(meshes.len());
    for m in meshes {
        lambdas.push(min_quotient(&assemble(mode, numerator, denominator, m, quad)?)?.lambda_min);
    }
    let max_increase = lambdas
        .windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs())
        .fold(f64::NEG_INFINITY, f64::max);
    if max_increase > MONOTONE_TOL {
        return Err(Error::Verification(format!(
            "eigenvalue increased under refinement by {max_increase:e} (relative); sequence {lambdas:?}"
        )));
    }
    let k = lambdas.len();
    let (l1, l2, l3) = (lambdas[k - 3], lambdas[k - 2], lambdas[k - 1]);
    let (d1, d2) = (l1 - l2, l2 - l3);
    let (extrapolated, order) = if d1 > 0.0 && d2 > 0.0 && d2 < d1 {
        let ratio = d1 / d2;
        let h1 = meshes[k - 2].elements() as f64 / meshes[k - 3].elements() as f64;
        (l3 - d2 / (ratio - 1.0), ratio.ln() / h1.ln())
    } else {
        (l3, f64::INFINITY)
    };
    let finest = meshes.last().expect("nonempty");
    let shrunk = min_quotient(&assemble(mode, numerator, denominator, &finest.scaled(0.5), quad)?)?.lambda_min;
    Ok(SweepReport {
        lambdas,
        elements: meshes.iter().map(Mesh1D::elements).collect(),
        extrapolated,
        order,
        max_increase,
        shrunk_lambda: shrunk,
    })
}

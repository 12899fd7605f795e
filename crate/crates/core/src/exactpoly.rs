//! Exact Laurent polynomials in fractional powers of `X`, with coefficients
//! polynomial in `b = 1/β`, and the identity checks built on them.
//!
//! An exponent `e` stands for `X^{e / (2n(n−1))}`; every power of `X` that
//! occurs in the weighted radial coefficients below is a multiple of that
//! unit. Coefficients are dense polynomials in `b` over `ℚ`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::constants::{beta_star, gammas, int, rat, to_f64, Dimension, Rational};
use crate::error::{Error, Result};

/// Polynomial in `b` with rational coefficients; index = power of `b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BPoly(Vec<Rational>);

impl BPoly {
    pub fn zero() -> Self {
        BPoly(Vec::new())
    }

    pub fn constant(c: Rational) -> Self {
        BPoly(vec![c]).trimmed()
    }

    /// `c · b^k`.
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::zero(); k + 1];
        v[k] = c;
        BPoly(v).trimmed()
    }

    pub fn from_coeffs(c: Vec<Rational>) -> Self {
        BPoly(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    /// Coefficient of `b^k`.
    pub fn coeff(&self, k: usize) -> Rational {
        self.0.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        BPoly(self.0.iter().map(|x| x * c).collect()).trimmed()
    }

    pub fn eval(&self, b: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * b + c)
    }

    pub fn eval_f64(&self, b: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * b + to_f64(c))
    }

    /// Value at `b² = b_sq`; fails if an odd power of `b` is present.
    pub fn eval_even(&self, b_sq: &Rational) -> Result<Rational> {
        let mut acc = Rational::zero();
        let mut pow = Rational::one();
        for (k, c) in self.0.iter().enumerate() {
            if k % 2 == 1 {
                if !c.is_zero() {
                    return Err(Error::Domain("polynomial has odd powers of b".into()));
                }
                continue;
            }
            acc += c * &pow;
            pow *= b_sq;
        }
        Ok(acc)
    }

    pub fn has_odd_powers(&self) -> bool {
        self.0.iter().enumerate().any(|(k, c)| k % 2 == 1 && !c.is_zero())
    }
}

impl Add for &BPoly {
    type Output = BPoly;
    fn add(self, o: &BPoly) -> BPoly {
        let len = self.0.len().max(o.0.len());
        BPoly((0..len).map(|k| self.coeff(k) + o.coeff(k)).collect()).trimmed()
    }
}

impl Sub for &BPoly {
    type Output = BPoly;
    fn sub(self, o: &BPoly) -> BPoly {
        let len = self.0.len().max(o.0.len());
        BPoly((0..len).map(|k| self.coeff(k) - o.coeff(k)).collect()).trimmed()
    }
}

impl Mul for &BPoly {
    type Output = BPoly;
    fn mul(self, o: &BPoly) -> BPoly {
        if self.is_zero() || o.is_zero() {
            return BPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, c) in o.0.iter().enumerate() {
                out[i + j] += a * c;
            }
        }
        BPoly(out).trimmed()
    }
}

impl Neg for &BPoly {
    type Output = BPoly;
    fn neg(self) -> BPoly {
        BPoly(self.0.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for BPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})b")?,
                _ => write!(f, "({c})b^{k}")?,
            }
        }
        Ok(())
    }
}

/// `Σ c_e(b) X^{e/(2n(n−1))}` with no zero coefficients stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactLaurentPoly {
    n: u32,
    terms: BTreeMap<i64, BPoly>,
}

impl ExactLaurentPoly {
    pub fn zero(n: u32) -> Self {
        ExactLaurentPoly { n, terms: BTreeMap::new() }
    }

    /// Exponent unit denominator `2n(n−1)`.
    pub fn unit(n: u32) -> i64 {
        let n = i64::from(n);
        2 * n * (n - 1)
    }

    /// Integer exponent representing `X^{num/den}`.
    pub fn exponent(n: u32, num: i64, den: i64) -> Result<i64> {
        let u = Self::unit(n);
        if den == 0 || (num * u) % den != 0 {
            return Err(Error::Domain(format!("X^({num}/{den}) is not on the exponent lattice for n = {n}")));
        }
        Ok(num * u / den)
    }

    /// `c(b) · X^{num/den}`.
    pub fn term(n: u32, c: BPoly, num: i64, den: i64) -> Result<Self> {
        let e = Self::exponent(n, num, den)?;
        let mut p = Self::zero(n);
        p.add_term(e, c);
        Ok(p)
    }

    pub fn constant(n: u32, c: BPoly) -> Self {
        let mut p = Self::zero(n);
        p.add_term(0, c);
        p
    }

    fn add_term(&mut self, e: i64, c: BPoly) {
        let merged = match self.terms.remove(&e) {
            Some(old) => &old + &c,
            None => c,
        };
        if !merged.is_zero() {
            self.terms.insert(e, merged);
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BPoly)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Coefficient of `X^{num/den}`.
    pub fn coeff(&self, num: i64, den: i64) -> Result<BPoly> {
        let e = Self::exponent(self.n, num, den)?;
        Ok(self.terms.get(&e).cloned().unwrap_or_default())
    }

    pub fn scale(&self, c: &BPoly) -> Self {
        let mut p = Self::zero(self.n);
        for (e, v) in &self.terms {
            p.add_term(*e, v * c);
        }
        p
    }

    pub fn scale_rational(&self, c: &Rational) -> Self {
        self.scale(&BPoly::constant(c.clone()))
    }

    /// Substitutes a rational `b`, leaving constant coefficients.
    pub fn at_b(&self, b: &Rational) -> Self {
        let mut p = Self::zero(self.n);
        for (e, v) in &self.terms {
            p.add_term(*e, BPoly::constant(v.eval(b)));
        }
        p
    }

    pub fn eval_f64(&self, x: f64, b: f64) -> f64 {
        let u = Self::unit(self.n) as f64;
        self.terms.iter().map(|(e, c)| c.eval_f64(b) * x.powf(*e as f64 / u)).sum()
    }

    fn check_same_n(&self, o: &Self) {
        assert_eq!(self.n, o.n, "Laurent polynomials from different dimensions");
    }
}

impl Add for &ExactLaurentPoly {
    type Output = ExactLaurentPoly;
    fn add(self, o: &ExactLaurentPoly) -> ExactLaurentPoly {
        self.check_same_n(o);
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, c.clone());
        }
        p
    }
}

impl Sub for &ExactLaurentPoly {
    type Output = ExactLaurentPoly;
    fn sub(self, o: &ExactLaurentPoly) -> ExactLaurentPoly {
        self.check_same_n(o);
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(*e, -c);
        }
        p
    }
}

impl Mul for &ExactLaurentPoly {
    type Output = ExactLaurentPoly;
    fn mul(self, o: &ExactLaurentPoly) -> ExactLaurentPoly {
        self.check_same_n(o);
        let mut p = ExactLaurentPoly::zero(self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }
}

impl Neg for &ExactLaurentPoly {
    type Output = ExactLaurentPoly;
    fn neg(self) -> ExactLaurentPoly {
        ExactLaurentPoly { n: self.n, terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl fmt::Display for ExactLaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let u = Self::unit(self.n);
        let parts: Vec<String> =
            self.terms.iter().map(|(e, c)| format!("[{c}]·X^({})", rat(*e, u))).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `c·p + X·(X dp/dX)`, i.e. `t^{1−c}(t^c p(X(t)))_t` using `dX/dt = X²/t`.
pub fn tderive(p: &ExactLaurentPoly, power_coeff: &BPoly) -> ExactLaurentPoly {
    let u = ExactLaurentPoly::unit(p.n);
    let mut out = p.scale(power_coeff);
    for (e, c) in &p.terms {
        out.add_term(e + u, c.scale(&rat(*e, u)));
    }
    out
}

/// Functions that [`encode`] knows about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    G,
    H,
    K,
    Gsharp,
    Hsharp,
    /// `Hsharp` with its `X⁴` coefficient missing the factor `1/64`.
    HsharpUnscaled,
}

fn ri(v: i64) -> Rational {
    int(v)
}

fn b_pow(c: Rational, k: usize) -> BPoly {
    BPoly::monomial(c, k)
}

/// `s = (n−4) b / 2` as a polynomial in `b`.
fn s_poly(n: i64) -> BPoly {
    b_pow(rat(n - 4, 2), 1)
}

fn s_pow(n: i64, k: usize) -> BPoly {
    let mut acc = BPoly::constant(Rational::one());
    for _ in 0..k {
        acc = &acc * &s_poly(n);
    }
    acc
}

/// `(n/(2(n−1)))³`.
pub fn cube_factor(n: u32) -> Rational {
    let n = i64::from(n);
    let q = rat(n, 2 * (n - 1));
    &q * &q * &q
}

/// `A(b) = (2n−4)b² − (n−4)b − 1`.
pub fn a_poly(n: u32) -> BPoly {
    let n = i64::from(n);
    BPoly::from_coeffs(vec![ri(-1), ri(-(n - 4)), ri(2 * n - 4)])
}

/// `[p₁, p₂, p₃]` of `G# = p₁X^{(4−2n)/n} + p₂ + p₃X²`.
pub fn gsharp_coefficients(n: u32) -> [BPoly; 3] {
    let n = i64::from(n);
    let q = n * n - 4 * n + 8;
    let m1 = n - 1;
    [
        BPoly::constant(rat(n * q, 4 * m1)),
        b_pow(rat(-n * n * n * q, 16 * m1 * m1 * m1), 2),
        BPoly::constant(rat(5 * n * (n - 2) * (3 * n - 2), 16 * m1 * m1 * m1)),
    ]
}

fn lp(n: u32, terms: &[(BPoly, i64, i64)]) -> ExactLaurentPoly {
    let mut p = ExactLaurentPoly::zero(n);
    for (c, num, den) in terms {
        p = &p + &ExactLaurentPoly::term(n, c.clone(), *num, *den).expect("exponent on lattice");
    }
    p
}

/// `p₁X^{(4−2n)/n} + p₂ + p₃X²` from given coefficients.
pub fn gsharp_from(n: u32, p: &[BPoly; 3]) -> ExactLaurentPoly {
    let ni = i64::from(n);
    lp(n, &[(p[0].clone(), 4 - 2 * ni, ni), (p[1].clone(), 0, 1), (p[2].clone(), 2, 1)])
}

/// `r₁ = (n−4)b/2`.
pub fn r1(n: u32) -> BPoly {
    s_poly(i64::from(n))
}

/// `r₂ = −3(n−2)/(2n)`.
pub fn r2(n: u32) -> Rational {
    let n = i64::from(n);
    rat(-3 * (n - 2), 2 * n)
}

/// Term-by-term encoding of the weighted radial coefficient functions.
pub fn encode(n: u32, which: Which) -> Result<ExactLaurentPoly> {
    Dimension::new(n)?.require_at_least(5, "encode")?;
    let ni = i64::from(n);
    let q = ni * ni - 4 * ni + 8;
    let m1 = ni - 1;
    let m3 = m1 * m1 * m1;
    let c = |r: Rational| BPoly::constant(r);
    Ok(match which {
        Which::G => {
            // −n³(2s² + 2s + 1)/(8(n−1)³)
            let inner = &(&s_pow(ni, 2).scale(&ri(2)) + &s_poly(ni).scale(&ri(2))) + &c(ri(1));
            lp(
                n,
                &[
                    (c(rat(ni * q, 4 * m1)), 4 - 2 * ni, ni),
                    (inner.scale(&rat(-ni * ni * ni, 8 * m3)), 0, 1),
                    (c(rat(5 * ni * (ni - 2) * (3 * ni - 2), 16 * m3)), 2, 1),
                ],
            )
        }
        Which::H => lp(
            n,
            &[
                (s_pow(ni, 2).scale(&rat(-ni * q, 4 * m1)), 4 - 2 * ni, ni),
                (s_poly(ni).scale(&rat((ni - 2) * q, 2 * m1)), 4 - ni, ni),
                (s_pow(ni, 4).scale(&rat(ni * ni * ni, 8 * m3)), 0, 1),
                (c(rat(3 * (ni * ni - 4) * q, 16 * ni * m1)), 4, ni),
                (s_pow(ni, 2).scale(&rat(-5 * ni * (ni - 2) * (3 * ni - 2), 16 * m3)), 2, 1),
                (s_poly(ni).scale(&rat(-5 * ni * (ni - 2) * (3 * ni - 2), 8 * m3)), 3, 1),
                (c(rat(-9 * (3 * ni - 2) * (5 * ni - 2) * (ni * ni - 4), 128 * ni * m3)), 4, 1),
            ],
        ),
        Which::K => lp(
            n,
            &[
                (c(ri(m1 * (ni - 4))), 8 - 4 * ni, ni),
                (b_pow(rat(-ni * (ni - 4) * (ni - 4), 4 * m1), 2), 4 - 2 * ni, ni),
                (b_pow(rat((ni - 2) * (ni - 4), m1), 1), 4 - ni, ni),
                (c(rat(3 * (ni * ni - 4), 4 * ni * m1)), 4, ni),
            ],
        ),
        Which::Gsharp => gsharp_from(n, &gsharp_coefficients(n)),
        Which::Hsharp | Which::HsharpUnscaled => {
            let x4_den = if which == Which::Hsharp { 64 * ni * m3 } else { ni * m3 };
            let n4 = ni - 4;
            lp(
                n,
                &[
                    (b_pow(rat(-ni * n4 * n4 * q, 16 * m1), 2), 4 - 2 * ni, ni),
                    (b_pow(rat((ni - 2) * n4 * q, 4 * m1), 1), 4 - ni, ni),
                    (b_pow(rat(ni * ni * ni * n4 * n4 * q, 64 * m3), 4), 0, 1),
                    (c(rat(3 * (ni * ni - 4) * q, 16 * ni * m1)), 4, ni),
                    (
                        b_pow(
                            rat(
                                -ni * (ni - 2) * (15 * ni * ni * ni - 104 * ni * ni + 256 * ni - 152),
                                32 * m3,
                            ),
                            2,
                        ),
                        2,
                        1,
                    ),
                    (b_pow(rat(-5 * ni * (ni - 2) * n4 * (3 * ni - 2), 16 * m3), 1), 3, 1),
                    (c(rat(45 * (ni - 2) * (ni - 2) * (3 * ni - 2) * (3 * ni - 2), x4_den)), 4, 1),
                ],
            )
        }
    })
}

/// Outcome class of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// Report of one identity or inequality check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub n: u32,
    pub status: Status,
    /// Number of nonzero terms left in the residual (0 on exact identities).
    pub residual_terms: usize,
    pub residual: Option<ExactLaurentPoly>,
    /// Exact value for value-type checks (e.g. a minimum).
    pub value: Option<Rational>,
    pub detail: String,
}

impl CheckReport {
    fn identity(name: &'static str, n: u32, residual: ExactLaurentPoly, detail: String) -> Self {
        CheckReport {
            name,
            n,
            status: if residual.is_zero() { Status::Pass } else { Status::Fail },
            residual_terms: residual.term_count(),
            residual: Some(residual),
            value: None,
            detail,
        }
    }

    fn boolean(name: &'static str, n: u32, ok: bool, value: Option<Rational>, detail: String) -> Self {
        CheckReport {
            name,
            n,
            status: if ok { Status::Pass } else { Status::Fail },
            residual_terms: 0,
            residual: None,
            value,
            detail,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// `Err(Verification)` carrying the residual unless the check passed.
    pub fn into_result(self) -> Result<Self> {
        match self.status {
            Status::Pass => Ok(self),
            _ => {
                let res = self.residual.as_ref().map(ToString::to_string).unwrap_or_default();
                Err(Error::Verification(format!(
                    "{} (n = {}) {}: {} {}",
                    self.name,
                    self.n,
                    self.status.as_str(),
                    self.detail,
                    res
                )))
            }
        }
    }
}

/// `G − (n/(2(n−1)))³A` against `p₁X^{(4−2n)/n} + p₂ + p₃X²` with given `p`.
pub fn check_gsharp_form_with(n: u32, p: &[BPoly; 3]) -> Result<CheckReport> {
    let g = encode(n, Which::G)?;
    let shifted = &g - &ExactLaurentPoly::constant(n, a_poly(n).scale(&cube_factor(n)));
    let residual = &shifted - &gsharp_from(n, p);
    Ok(CheckReport::identity("gsharp_form", n, residual, String::new()))
}

pub fn check_gsharp_form(n: u32) -> Result<CheckReport> {
    check_gsharp_form_with(n, &gsharp_coefficients(n))
}

/// `(n/(2(n−1)))(H − H#) = −γ₁b⁴ + γ₂b²X² − γ₃X⁴` with given `γ`.
pub fn check_gol_identity_with(n: u32, g: &[Rational; 3]) -> Result<CheckReport> {
    let ni = i64::from(n);
    let lhs = (&encode(n, Which::H)? - &encode(n, Which::Hsharp)?).scale_rational(&rat(ni, 2 * (ni - 1)));
    let rhs = lp(n, &[(b_pow(-g[0].clone(), 4), 0, 1), (b_pow(g[1].clone(), 2), 2, 1), (b_pow(-g[2].clone(), 0), 4, 1)]);
    let residual = &lhs - &rhs;
    let odd = residual.terms().any(|(_, c)| c.has_odd_powers()) || lhs.terms().any(|(_, c)| c.has_odd_powers());
    let detail = if odd { "odd powers of b survive".to_string() } else { String::new() };
    Ok(CheckReport::identity("gol_identity", n, residual, detail))
}

pub fn check_gol_identity(n: u32) -> Result<CheckReport> {
    check_gol_identity_with(n, &gammas(Dimension::new(n)?))
}

/// Replays the square completion with multipliers `(r₁, r₂)` against `target`.
pub fn check_completion_with(n: u32, r1: &BPoly, r2: &Rational, target: &ExactLaurentPoly) -> Result<CheckReport> {
    let gs = encode(n, Which::Gsharp)?;
    let lin = lp(n, &[(r1.clone(), 0, 1), (BPoly::constant(r2.clone()), 1, 1)]);
    let gl = &gs * &lin;
    let ni = i64::from(n);
    let bracket = &(&gl * &lin) - &tderive(&gl, &b_pow(ri(ni - 4), 1));
    let residual = target - &bracket;
    Ok(CheckReport::identity("completion", n, residual, String::new()))
}

pub fn check_completion(n: u32) -> Result<CheckReport> {
    check_completion_with(n, &r1(n), &r2(n), &encode(n, Which::Hsharp)?)
}

/// Minimum `p₁ + p₂ + p₃` of `G#` on `(0, 1]` at `β² = beta_sq`.
pub fn check_gsharp_nonneg(n: u32, beta_sq: &Rational) -> Result<CheckReport> {
    Dimension::new(n)?.require_at_least(5, "check_gsharp_nonneg")?;
    if !beta_sq.is_positive() {
        return Err(Error::Domain(format!("beta_sq must be positive, got {beta_sq}")));
    }
    let p = gsharp_coefficients(n);
    let b_sq = beta_sq.recip();
    let min = p.iter().try_fold(Rational::zero(), |acc, c| c.eval_even(&b_sq).map(|v| acc + v))?;
    let ni = i64::from(n);
    let p1 = p[0].coeff(0);
    let p3 = p[2].coeff(0);
    let monotone = &p1 * rat(2 * ni - 4, ni) >= &p3 * ri(2);
    let status = if min.is_negative() {
        Status::Fail
    } else if !monotone {
        Status::Inconclusive
    } else {
        Status::Pass
    };
    Ok(CheckReport {
        name: "gsharp_nonneg",
        n,
        status,
        residual_terms: 0,
        residual: None,
        value: Some(min),
        detail: if monotone { String::new() } else { "monotonicity condition fails".into() },
    })
}

/// Displayed `(in1)` coefficients `[γ₂β²/γ₁, γ₃β⁴/γ₁]` at `β = n/(2(n−1))`.
pub fn in1_displayed(n: u32) -> [Rational; 2] {
    let n = i64::from(n);
    let (m1, n4) = (n - 1, n - 4);
    [
        rat(3 * (n - 2) * (5 * n - 6) * (n * n - 4 * n + 8), 2 * n * n * m1 * m1 * n4 * n4),
        rat(9 * (n - 2) * (3 * n - 2) * (5 * n - 6) * (7 * n - 6), 16 * n * n * m1 * m1 * m1 * m1 * n4 * n4),
    ]
}

pub fn check_in1_coefficients_with(n: u32, g: &[Rational; 3]) -> Result<CheckReport> {
    let dim = Dimension::new(n)?.require_at_least(5, "check_in1_coefficients")?;
    let ni = i64::from(n);
    let beta = beta_star(dim);
    let b2 = &beta * &beta;
    let c1 = &g[1] * &b2 / &g[0];
    let c2 = &g[2] * &b2 * &b2 / &g[0];
    let shown = in1_displayed(n);
    let lead = &g[0] / (&b2 * &b2);
    let mut failures = Vec::new();
    if c1 != shown[0] {
        failures.push(format!("gamma2 beta^2/gamma1 = {c1}, expected {}", shown[0]));
    }
    if c2 != shown[1] {
        failures.push(format!("gamma3 beta^4/gamma1 = {c2}, expected {}", shown[1]));
    }
    if lead != rat(ni * ni * (ni - 4) * (ni - 4), 16) {
        failures.push(format!("gamma1/beta^4 = {lead}"));
    }
    // q(y) = 1 − c₁y + c₂y² on [0, 1]: convex, q(0) = 1, q(1) ≤ 1
    let q1 = Rational::one() - &c1 + &c2;
    if !c2.is_positive() {
        failures.push("q is not strictly convex".into());
    }
    if q1 > Rational::one() {
        failures.push(format!("q(1) = {q1} > 1"));
    }
    if b2 <= crate::constants::beta_n_sq(dim) {
        failures.push("beta* does not exceed beta_n".into());
    }
    Ok(CheckReport::boolean("in1_coefficients", n, failures.is_empty(), Some(q1), failures.join("; ")))
}

pub fn check_in1_coefficients(n: u32) -> Result<CheckReport> {
    check_in1_coefficients_with(n, &gammas(Dimension::new(n)?))
}

/// Lower bound `K ≥ 4(n−1)(n−4)/n` on `(0, 1)` at `β = n/(2(n−1))`.
pub fn check_in2_k_bound(n: u32) -> Result<CheckReport> {
    let dim = Dimension::new(n)?.require_at_least(5, "check_in2_K_bound")?;
    let ni = i64::from(n);
    let (m1, n4) = (ni - 1, ni - 4);
    let b = beta_star(dim).recip();
    let k = encode(n, Which::K)?.at_b(&b);
    let mut failures = Vec::new();
    // y = X^{(4−2n)/n} ≥ 1; the first two K terms are a quadratic in y
    let a2 = k.coeff(8 - 4 * ni, ni)?.coeff(0);
    let a1 = k.coeff(4 - 2 * ni, ni)?.coeff(0);
    let bound = cube_factor(n) * ri(2 * n4) * b.clone() * b.clone() * b.clone() * b.clone();
    let expected_bound = rat(4 * m1 * n4, ni);
    if bound != expected_bound {
        failures.push(format!("bound {bound} != {expected_bound}"));
    }
    if a2 != ri(m1 * n4) || a1 != rat(-m1 * n4 * n4, ni) {
        failures.push(format!("leading K coefficients {a2}, {a1}"));
    }
    // (n−1)(n−4)(y−1)(y+4/n) expanded
    let lead = ri(m1 * n4);
    let f = [-(&lead * rat(4, ni)), &lead * (rat(4, ni) - ri(1)), lead.clone()];
    let lhs = [-bound.clone(), a1.clone(), a2.clone()];
    if lhs != f {
        failures.push("factorization mismatch".into());
    }
    let at_one = &lhs[0] + &lhs[1] + &lhs[2];
    if !at_one.is_zero() {
        failures.push(format!("value at y = 1 is {at_one}"));
    }
    let d1 = k.coeff(4 - ni, ni)?.coeff(0);
    let d2 = k.coeff(4, ni)?.coeff(0);
    if !(d1.is_positive() && d2.is_positive()) {
        failures.push(format!("dropped coefficients {d1}, {d2} not positive"));
    }
    if d1 != rat((ni - 2) * n4, m1) * &b || d2 != rat(3 * (ni * ni - 4), 4 * ni * m1) {
        failures.push("dropped coefficients differ from their closed forms".into());
    }
    Ok(CheckReport::boolean("in2_K_bound", n, failures.is_empty(), Some(bound), failures.join("; ")))
}

/// Every identity and inequality check for one `n`, sorted by name.
pub fn all_checks(n: u32) -> Result<Vec<CheckReport>> {
    let dim = Dimension::new(n)?.require_at_least(5, "identity checks")?;
    let bs = beta_star(dim);
    let mut v = vec![
        check_completion(n)?,
        check_gol_identity(n)?,
        check_gsharp_form(n)?,
        check_in1_coefficients(n)?,
        check_in2_k_bound(n)?,
    ];
    let mut at_bn = check_gsharp_nonneg(n, &crate::constants::beta_n_sq(dim))?;
    at_bn.name = "gsharp_nonneg_at_beta_n";
    if at_bn.value.as_ref().is_some_and(|v| !v.is_zero()) {
        at_bn.status = Status::Fail;
    }
    let mut at_star = check_gsharp_nonneg(n, &(&bs * &bs))?;
    at_star.name = "gsharp_nonneg_at_beta_star";
    if at_star.value.as_ref().is_some_and(|v| !v.is_positive()) {
        at_star.status = Status::Fail;
    }
    v.push(at_bn);
    v.push(at_star);
    v.sort_by(|a, b| a.name.cmp(b.name));
    Ok(v)
}

/// [`all_checks`] for each `n` in `ns`, dimensions checked in parallel.
pub fn checks_for(ns: &[u32]) -> Result<Vec<CheckReport>> {
    let per_n = crate::par::map(ns, |&n| all_checks(n));
    let mut out = Vec::new();
    for r in per_n {
        out.extend(r?);
    }
    Ok(out)
}

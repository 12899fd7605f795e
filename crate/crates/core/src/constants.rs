//! Dimensions, closed-form constants and the logarithmic weight.
//!
//! Every rational constant is computed in exact big-rational arithmetic.
//! Floating point is used only where a Gamma function or `π` appears
//! (the Sobolev constants).

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Shorthand for an exact rational.
pub type Rational = BigRational;

/// Builds the exact rational `num / den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Builds the exact integer `v` as a rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(q: &Rational) -> f64 {
    // Avoid overflow of the individual parts for very large numerators.
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(a), Some(b)) if a.is_finite() && b.is_finite() => a / b,
        _ => {
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
            let scale = BigInt::one() << shift.max(0) as usize;
            let a = (q.numer() / &scale).to_f64().unwrap_or(f64::NAN);
            let b = (q.denom() / &scale).to_f64().unwrap_or(f64::NAN);
            a / b
        }
    }
}

/// Exact rational parsed from `"p/q"`, `"p"` or a terminating decimal.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parameter(format!("cannot parse rational '{s}'"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let p: BigInt = digits.parse().map_err(|_| bad())?;
        let q = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(p, q));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

/// Spatial dimension `n ≥ 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Dimension(u32);

impl Dimension {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("dimension must be at least 3, got {n}")));
        }
        Ok(Dimension(n))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }

    pub fn as_i64(self) -> i64 {
        i64::from(self.0)
    }

    /// Rejects dimensions below `min` for operations that need them.
    pub fn require_at_least(self, min: u32, what: &str) -> Result<Self> {
        if self.0 < min {
            return Err(Error::Domain(format!("{what} requires n >= {min}, got n = {}", self.0)));
        }
        Ok(self)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The logarithmic weight `X(r) = 1 / (1 - ln r)` on `(0, 1]`.
pub fn x_of_r(r: f64) -> Result<f64> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::Domain(format!("X(r) needs 0 < r <= 1, got {r}")));
    }
    Ok(x_unchecked(r))
}

#[inline]
pub(crate) fn x_unchecked(r: f64) -> f64 {
    1.0 / (1.0 - r.ln())
}

/// Inverse of [`x_of_r`]: the radius with `X(r) = x`.
#[inline]
pub fn r_of_x(x: f64) -> f64 {
    (1.0 - 1.0 / x).exp()
}

/// Best constant `c_n` of the gradient Rellich inequality.
pub fn c_n(n: Dimension) -> Rational {
    match n.get() {
        3 => rat(25, 36),
        4 => int(3),
        m => rat(i64::from(m) * i64::from(m), 4),
    }
}

/// `n²(n−4)²/16`, the Rellich constant for the `u²/|x|⁴` inequality.
pub fn rellich_u(n: Dimension) -> Rational {
    let n = n.as_i64();
    rat(n * n * (n - 4) * (n - 4), 16)
}

/// `β_n² = n²(n²−4n+8)/(4n⁴−24n³+83n²−120n+52)`.
pub fn beta_n_sq(n: Dimension) -> Rational {
    let n = n.as_i64();
    rat(
        n * n * (n * n - 4 * n + 8),
        4 * n.pow(4) - 24 * n.pow(3) + 83 * n * n - 120 * n + 52,
    )
}

/// The three positive constants `γ₁, γ₂, γ₃` of the logarithmic remainder.
pub fn gammas(n: Dimension) -> [Rational; 3] {
    let n = n.as_i64();
    let d = (n - 1).pow(4);
    [
        rat(n.pow(6) * (n - 4) * (n - 4), 256 * d),
        rat(3 * n * n * (n - 2) * (5 * n - 6) * (n * n - 4 * n + 8), 128 * d),
        rat(9 * (n - 2) * (3 * n - 2) * (5 * n - 6) * (7 * n - 6), 256 * d),
    ]
}

/// `A(β) = (2n − 4 − β(n − 4 + β)) / β²`.
pub fn a_coefficient(n: Dimension, beta: &Rational) -> Result<Rational> {
    if !beta.is_positive() {
        return Err(Error::Domain("beta must be positive".into()));
    }
    let n = int(n.as_i64());
    let two = int(2);
    let four = int(4);
    let inner = &two * &n - &four - beta * (&n - &four + beta);
    Ok(inner / (beta * beta))
}

/// The choice `β = n / (2(n−1))` used for the Rellich–Sobolev bound.
pub fn beta_star(n: Dimension) -> Rational {
    let n = n.as_i64();
    rat(n, 2 * (n - 1))
}

/// Sobolev constants: `S_{1,n}` and the two readings of `S_{2,n}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevConstants {
    pub s1n: f64,
    /// `π²(n²−4n)(n²−4)(Γ(n/2)/Γ(n))⁴`, exponent as printed.
    pub s2n_printed: Option<f64>,
    /// Same with exponent `4/n`.
    pub s2n_alternate: Option<f64>,
}

fn gamma_ratio_ln(n: f64) -> f64 {
    ln_gamma(n / 2.0) - ln_gamma(n)
}

/// Closed-form Sobolev constants; `S_{2,n}` only for `n ≥ 5`.
pub fn sobolev_constants(n: Dimension) -> SobolevConstants {
    let nf = n.as_f64();
    let lr = gamma_ratio_ln(nf);
    let s1n = PI * nf * (nf - 2.0) * (2.0 / nf * lr).exp();
    let (printed, alternate) = if n.get() >= 5 {
        let pre = PI * PI * (nf * nf - 4.0 * nf) * (nf * nf - 4.0);
        (Some(pre * (4.0 * lr).exp()), Some(pre * (4.0 / nf * lr).exp()))
    } else {
        (None, None)
    };
    SobolevConstants { s1n, s2n_printed: printed, s2n_alternate: alternate }
}

/// `|S^{n-1}| = 2π^{n/2} / Γ(n/2)`.
pub fn sphere_area(n: u32) -> f64 {
    let nf = f64::from(n);
    2.0 * (nf / 2.0 * PI.ln() - ln_gamma(nf / 2.0)).exp()
}

/// Everything the other modules need for a given `(n, β)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsBundle {
    pub n: Dimension,
    pub c_n: Rational,
    pub rellich_u: Rational,
    /// `β_n²`, populated for `n ≥ 5`.
    pub beta_n_sq: Option<Rational>,
    /// `γ₁, γ₂, γ₃`, populated for `n ≥ 5`.
    pub gammas: Option<[Rational; 3]>,
    pub s1n: f64,
    pub s2n: Option<f64>,
    pub s2n_alternate: Option<f64>,
    pub beta: Rational,
    /// `A(β)`, exact for rational `β`.
    pub a: Rational,
    /// `s = (n−4)/(2β)`.
    pub s: Rational,
}

pub fn constants(n: u32, beta: &Rational) -> Result<ConstantsBundle> {
    let n = Dimension::new(n)?;
    let a = a_coefficient(n, beta)?;
    let sob = sobolev_constants(n);
    let big = n.get() >= 5;
    Ok(ConstantsBundle {
        n,
        c_n: c_n(n),
        rellich_u: rellich_u(n),
        beta_n_sq: big.then(|| beta_n_sq(n)),
        gammas: big.then(|| gammas(n)),
        s1n: sob.s1n,
        s2n: sob.s2n_printed,
        s2n_alternate: sob.s2n_alternate,
        beta: beta.clone(),
        a,
        s: int(n.as_i64() - 4) / (int(2) * beta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_examples() {
        assert_eq!(x_of_r(1.0).unwrap(), 1.0);
        assert!((x_of_r((-1.0f64).exp()).unwrap() - 0.5).abs() < 1e-15);
        assert!((x_of_r((-9.0f64).exp()).unwrap() - 0.1).abs() < 1e-15);
        assert!(x_of_r(0.0).is_err());
        assert!(x_of_r(1.5).is_err());
        assert!(x_of_r(-0.1).is_err());
    }

    #[test]
    fn c_n_table() {
        let d = |n| Dimension::new(n).unwrap();
        assert_eq!(c_n(d(3)), rat(25, 36));
        assert_eq!(c_n(d(4)), int(3));
        assert_eq!(c_n(d(7)), rat(49, 4));
    }

    #[test]
    fn bundle_n5() {
        let b = constants(5, &rat(5, 8)).unwrap();
        assert_eq!(b.rellich_u, rat(25, 16));
        assert_eq!(b.gammas.as_ref().unwrap()[0], rat(15625, 65536));
        assert_eq!(b.a, rat(319, 25));
        assert_eq!(b.beta_n_sq, Some(rat(325, 1027)));
        assert_eq!(b.s, rat(4, 5));
        assert!(constants(2, &rat(1, 1)).is_err());
        assert!(constants(3, &rat(1, 1)).unwrap().gammas.is_none());
    }

    #[test]
    fn gammas_positive_and_beta_below_star() {
        for n in 5..=12 {
            let d = Dimension::new(n).unwrap();
            for g in gammas(d) {
                assert!(g.is_positive());
            }
            let star = beta_star(d);
            assert!(beta_n_sq(d) < &star * &star, "n = {n}");
        }
    }

    #[test]
    fn sobolev_values() {
        let s3 = sobolev_constants(Dimension::new(3).unwrap());
        assert!((s3.s1n - 3.0 * (PI / 2.0).powf(4.0 / 3.0)).abs() < 1e-12);
        assert!((s3.s1n - 5.4779).abs() < 1e-4);
        assert!(s3.s2n_printed.is_none());
        let s5 = sobolev_constants(Dimension::new(5).unwrap());
        assert!((s5.s2n_alternate.unwrap() - 102.36).abs() < 0.03);
        assert!((s5.s2n_printed.unwrap() - 9.754e-3).abs() < 1e-6);
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-12);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn parse() {
        assert_eq!(parse_rational("5/8").unwrap(), rat(5, 8));
        assert_eq!(parse_rational("0.625").unwrap(), rat(5, 8));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = num_traits::pow(BigInt::from(10), 400);
        let q = Rational::new(big.clone() * 3, big);
        assert!((to_f64(&q) - 3.0).abs() < 1e-12);
    }
}

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

use rellich::harmonics::{
    bilap_form, gradhardy_form, hardy4_form, mode, random_corpus, rellich_remainder_thm2, PolyProfile, RadialProfile,
};
use rellich::WeightedQuadrature;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exact polynomial with rational coefficients.
#[derive(Clone)]
struct RPoly(Vec<BigRational>);

impl RPoly {
    fn from_ints(c: &[i64]) -> Self {
        RPoly(c.iter().map(|&x| q(x, 1)).collect())
    }
    fn mul(&self, o: &RPoly) -> RPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return RPoly(vec![]);
        }
        let mut out = vec![BigRational::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RPoly(out)
    }
    fn d(&self) -> RPoly {
        RPoly(self.0.iter().enumerate().skip(1).map(|(i, c)| c * q(i as i64, 1)).collect())
    }
    /// ∫₀¹ r^w p(r)² dr, requiring every power to stay integrable.
    fn weighted_square(&self, w: i64) -> BigRational {
        let sq = self.mul(self);
        let mut acc = BigRational::zero();
        for (i, c) in sq.0.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let m = i as i64 + w;
            assert!(m > -1, "oracle integral diverges");
            acc += c / q(m + 1, 1);
        }
        acc
    }
    fn to_profile(&self) -> PolyProfile {
        PolyProfile::new(self.0.iter().map(|c| c.to_f64().unwrap()).collect())
    }
}

fn exact_bilap(n: i64, mu: i64, f: &RPoly) -> BigRational {
    f.d().d().weighted_square(n - 1)
        + q(n - 1 + 2 * mu, 1) * f.d().weighted_square(n - 3)
        + q(2 * (n - 4) * mu + mu * mu, 1) * f.weighted_square(n - 5)
}

fn exact_gradhardy(n: i64, mu: i64, f: &RPoly) -> BigRational {
    f.d().weighted_square(n - 3) + q(mu, 1) * f.weighted_square(n - 5)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn bilap_matches_exact_polynomial_integral() {
    let quad = WeightedQuadrature::default();
    // r²(1−r)² = r² − 2r³ + r⁴
    let f = RPoly::from_ints(&[0, 0, 1, -2, 1]);
    let exact = exact_bilap(5, 0, &f).to_f64().unwrap();
    let got = bilap_form(&mode(5, 0).unwrap(), &f.to_profile(), &quad).unwrap();
    assert!(close(got, exact, 1e-8), "{got} vs {exact}");
}

#[test]
fn gradhardy_matches_exact_polynomial_integral() {
    let quad = WeightedQuadrature::default();
    // r(1−r)²
    let f = RPoly::from_ints(&[0, 1, -2, 1]);
    let exact = exact_gradhardy(3, 2, &f).to_f64().unwrap();
    let got = gradhardy_form(&mode(3, 1).unwrap(), &f.to_profile(), &quad).unwrap();
    assert!(close(got, exact, 1e-8), "{got} vs {exact}");
}

#[test]
fn hardy4_beta_integral() {
    let quad = WeightedQuadrature::default();
    let f = PolyProfile::bump(2, 2, &[]);
    let got = hardy4_form(&mode(5, 0).unwrap(), &f, &quad).unwrap();
    assert!(close(got, 1.0 / 630.0, 1e-12));
}

#[test]
fn radial_bilap_equals_squared_laplacian() {
    // For k = 0 the form must equal ∫ (f'' + (n−1) f'/r)² r^{n−1} dr.
    let quad = WeightedQuadrature::default();
    let m = mode(5, 0).unwrap();
    for f in random_corpus(0, 20, 11) {
        let direct = quad
            .integrate(
                |r| {
                    if r == 0.0 {
                        return 0.0;
                    }
                    let [_, d1, d2] = f.eval(r);
                    let lap = d2 + 4.0 * d1 / r;
                    lap * lap
                },
                4.0,
                0.0,
            )
            .unwrap();
        let form = bilap_form(&m, &f, &quad).unwrap();
        assert!(close(form, direct, 1e-6), "{form} vs {direct}");
    }
}

#[test]
fn remainder_composes_forms() {
    let quad = WeightedQuadrature::default();
    let f = RPoly::from_ints(&[0, 1, -2, 1]);
    let m = mode(3, 1).unwrap();
    let exact = exact_bilap(3, 2, &f) - q(25, 36) * exact_gradhardy(3, 2, &f);
    let exact = exact.to_f64().unwrap();
    let p = f.to_profile();
    let got = rellich_remainder_thm2(3, &[(m, &p)], &quad).unwrap();
    assert!(exact > 0.0);
    assert!(close(got, exact, 1e-8), "{got} vs {exact}");
}

#[test]
fn remainder_of_zero_and_wrong_dimension() {
    let quad = WeightedQuadrature::default();
    let z = PolyProfile::zero();
    assert_eq!(rellich_remainder_thm2(4, &[(mode(4, 1).unwrap(), &z)], &quad).unwrap(), 0.0);
    assert!(rellich_remainder_thm2(5, &[(mode(5, 1).unwrap(), &z)], &quad).is_err());
}

#[test]
fn remainder_nonnegative_over_corpus() {
    let quad = WeightedQuadrature::default();
    let mut checked = 0;
    for n in [3u32, 4] {
        // 30 single-mode inputs per dimension
        for k in 0..3u32 {
            for f in random_corpus(k, 10, 5 + u64::from(n)) {
                let m = mode(n, i64::from(k)).unwrap();
                let scale = bilap_form(&m, &f, &quad).unwrap();
                let rem = rellich_remainder_thm2(n, &[(m, &f)], &quad).unwrap();
                assert!(rem >= -1e-8 * scale, "n={n} k={k} rem={rem}");
                checked += 1;
            }
        }
        // 20 multi-mode inputs per dimension
        let c0 = random_corpus(0, 20, 100 + u64::from(n));
        let c1 = random_corpus(1, 20, 200 + u64::from(n));
        let c2 = random_corpus(2, 20, 300 + u64::from(n));
        for i in 0..20 {
            let modes: Vec<(_, &dyn RadialProfile)> = vec![
                (mode(n, 0).unwrap(), &c0[i]),
                (mode(n, 1).unwrap(), &c1[i]),
                (mode(n, 2).unwrap(), &c2[i]),
            ];
            let rem = rellich_remainder_thm2(n, &modes, &quad).unwrap();
            assert!(rem >= -1e-8, "n={n} multi rem={rem}");
            checked += 1;
        }
    }
    assert_eq!(checked, 100);
}

#[test]
fn multi_mode_assembly_is_additive() {
    let quad = WeightedQuadrature::default();
    let a = PolyProfile::bump(2, 2, &[0.3]);
    let b = PolyProfile::bump(2, 2, &[-0.2, 0.1]);
    let (m1, m2) = (mode(3, 1).unwrap(), mode(3, 2).unwrap());
    let joint = rellich_remainder_thm2(3, &[(m1.clone(), &a), (m2.clone(), &b)], &quad).unwrap();
    let split = rellich_remainder_thm2(3, &[(m1, &a)], &quad).unwrap() + rellich_remainder_thm2(3, &[(m2, &b)], &quad).unwrap();
    assert!(close(joint, split, 1e-14));
}

proptest! {
    #[test]
    fn forms_are_nonnegative_and_quadratic(
        n in 3u32..9,
        k in 0u32..4,
        extra in proptest::collection::vec(-0.5f64..0.5, 0..4),
        c in 0.1f64..5.0,
    ) {
        let quad = WeightedQuadrature::default();
        let m = mode(n, i64::from(k)).unwrap();
        let f = PolyProfile::bump(k.max(2) as usize, 2, &extra);
        let b = bilap_form(&m, &f, &quad).unwrap();
        let g = gradhardy_form(&m, &f, &quad).unwrap();
        prop_assert!(b >= 0.0 && g >= 0.0);
        let bc = bilap_form(&m, &f.scaled(c), &quad).unwrap();
        prop_assert!(close(bc, c * c * b, 1e-12));
        if k >= 1 {
            let h = hardy4_form(&m, &f, &quad).unwrap();
            prop_assert!(g >= f64::from(n - 1) * h * (1.0 - 1e-12));
        }
    }

    #[test]
    fn profiles_vanish_to_mode_order(k in 0u32..6, seed in 0u64..1000) {
        for f in random_corpus(k, 3, seed) {
            let bound = (f.eval(1e-3)[0] / 1e-3f64.powi(k as i32)).abs();
            let bound2 = (f.eval(1e-5)[0] / 1e-5f64.powi(k as i32)).abs();
            prop_assert!(bound2 <= 2.0 * bound + 1e-9);
            prop_assert!(f.eval(1.0)[0].abs() < 1e-12 && f.eval(1.0)[1].abs() < 1e-12);
        }
    }
}

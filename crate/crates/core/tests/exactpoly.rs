use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rellich::constants::{beta_n_sq, gammas, int, rat};
use rellich::exactpoly::{
    check_completion, check_completion_with, check_gol_identity, check_gol_identity_with, check_gsharp_form,
    check_gsharp_form_with, check_gsharp_nonneg, check_in1_coefficients, check_in1_coefficients_with,
    check_in2_k_bound, checks_for, encode, gsharp_coefficients, r1, r2, tderive, BPoly, ExactLaurentPoly, Status,
    Which,
};
use rellich::{Dimension, Rational};

/// Direct float transcription of the displayed coefficient functions.
fn direct(n: u32, which: Which, x: f64, b: f64) -> f64 {
    let n = f64::from(n);
    let s = (n - 4.0) * b / 2.0;
    let q = n * n - 4.0 * n + 8.0;
    let m1 = n - 1.0;
    let m3 = m1.powi(3);
    let xp = |num: f64, den: f64| x.powf(num / den);
    match which {
        Which::G => {
            n * q / (4.0 * m1) * xp(4.0 - 2.0 * n, n) - n.powi(3) * (2.0 * s * s + 2.0 * s + 1.0) / (8.0 * m3)
                + 5.0 * n * (n - 2.0) * (3.0 * n - 2.0) / (16.0 * m3) * x * x
        }
        Which::H => {
            -s * s * n * q / (4.0 * m1) * xp(4.0 - 2.0 * n, n) + s * (n - 2.0) * q / (2.0 * m1) * xp(4.0 - n, n)
                + s.powi(4) * n.powi(3) / (8.0 * m3)
                + 3.0 * (n * n - 4.0) * q / (16.0 * n * m1) * xp(4.0, n)
                - 5.0 * s * s * n * (n - 2.0) * (3.0 * n - 2.0) / (16.0 * m3) * x.powi(2)
                - 5.0 * s * n * (n - 2.0) * (3.0 * n - 2.0) / (8.0 * m3) * x.powi(3)
                - 9.0 * (3.0 * n - 2.0) * (5.0 * n - 2.0) * (n * n - 4.0) / (128.0 * n * m3) * x.powi(4)
        }
        Which::K => {
            m1 * (n - 4.0) * xp(8.0 - 4.0 * n, n) - n * (n - 4.0).powi(2) * b * b / (4.0 * m1) * xp(4.0 - 2.0 * n, n)
                + (n - 2.0) * (n - 4.0) * b / m1 * xp(4.0 - n, n)
                + 3.0 * (n * n - 4.0) / (4.0 * n * m1) * xp(4.0, n)
        }
        Which::Gsharp => {
            n * q / (4.0 * m1) * xp(4.0 - 2.0 * n, n) - n.powi(3) * q * b * b / (16.0 * m3)
                + 5.0 * n * (n - 2.0) * (3.0 * n - 2.0) / (16.0 * m3) * x * x
        }
        Which::Hsharp | Which::HsharpUnscaled => {
            let n4 = n - 4.0;
            let x4 = 45.0 * (n - 2.0).powi(2) * (3.0 * n - 2.0).powi(2) / (n * m3);
            let x4 = if which == Which::Hsharp { x4 / 64.0 } else { x4 };
            -n * n4 * n4 * q * b * b / (16.0 * m1) * xp(4.0 - 2.0 * n, n)
                + (n - 2.0) * n4 * q * b / (4.0 * m1) * xp(4.0 - n, n)
                + n.powi(3) * n4 * n4 * q * b.powi(4) / (64.0 * m3)
                + 3.0 * (n * n - 4.0) * q / (16.0 * n * m1) * xp(4.0, n)
                - n * (n - 2.0) * (15.0 * n.powi(3) - 104.0 * n * n + 256.0 * n - 152.0) * b * b / (32.0 * m3)
                    * x.powi(2)
                - 5.0 * n * (n - 2.0) * n4 * (3.0 * n - 2.0) * b / (16.0 * m3) * x.powi(3)
                + x4 * x.powi(4)
        }
    }
}

#[test]
fn every_check_passes_for_n_5_to_12() {
    let ns: Vec<u32> = (5..=12).collect();
    let reports = checks_for(&ns).unwrap();
    assert_eq!(reports.len(), 8 * 7);
    for r in &reports {
        assert_eq!(r.status, Status::Pass, "{} n={}: {}", r.name, r.n, r.detail);
        assert_eq!(r.residual_terms, 0);
        if let Some(res) = &r.residual {
            assert!(res.is_zero());
        }
    }
}

#[test]
fn g_spot_value_at_b_eight_fifths() {
    let g = encode(5, Which::G).unwrap();
    for &x in &[0.2, 0.5, 0.9] {
        let exact = g.eval_f64(x, 1.6);
        let d = direct(5, Which::G, x, 1.6);
        assert!((exact - d).abs() <= 1e-12 * d.abs().max(1.0));
    }
}

#[test]
fn float_cross_validation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 5..=12 {
        for which in [Which::G, Which::H, Which::K, Which::Gsharp, Which::Hsharp] {
            let p = encode(n, which).unwrap();
            for _ in 0..20 {
                let x: f64 = rng.gen_range(0.05..1.0);
                let b: f64 = rng.gen_range(0.5..3.0);
                let e = p.eval_f64(x, b);
                let d = direct(n, which, x, b);
                let scale = p.terms().map(|(ex, c)| {
                    c.eval_f64(b).abs() * x.powf(ex as f64 / ExactLaurentPoly::unit(n) as f64)
                });
                let mag = scale.fold(0.0f64, f64::max);
                assert!((e - d).abs() <= 1e-10 * mag, "n={n} {which:?} x={x} b={b}: {e} vs {d}");
            }
        }
    }
}

#[test]
fn negative_controls() {
    let mut p = gsharp_coefficients(5);
    p[1] = &p[1] + &BPoly::constant(int(1));
    assert_eq!(check_gsharp_form_with(5, &p).unwrap().status, Status::Fail);

    let g = gammas(Dimension::new(5).unwrap());
    let flipped = [g[0].clone(), -g[1].clone(), g[2].clone()];
    let rep = check_gol_identity_with(5, &flipped).unwrap();
    assert_eq!(rep.status, Status::Fail);
    assert!(rep.into_result().is_err());

    let hs = encode(5, Which::Hsharp).unwrap();
    let rep = check_completion_with(5, &r1(5), &Rational::zero(), &hs).unwrap();
    assert_eq!(rep.status, Status::Fail);
    assert!(rep.residual_terms > 0);

    let doubled = [g[0].clone(), g[1].clone(), &g[2] * int(2)];
    assert_eq!(check_in1_coefficients_with(5, &doubled).unwrap().status, Status::Fail);
}

#[test]
fn gsharp_minimum_values() {
    let dim = Dimension::new(5).unwrap();
    assert_eq!(beta_n_sq(dim), rat(325, 1027));
    let at_bn = check_gsharp_nonneg(5, &rat(325, 1027)).unwrap();
    assert_eq!(at_bn.value, Some(Rational::zero()));
    assert_eq!(at_bn.status, Status::Pass);
    let above = check_gsharp_nonneg(5, &rat(25, 64)).unwrap();
    assert!(above.value.unwrap().is_positive());
    assert_eq!(above.status, Status::Pass);
    let below = check_gsharp_nonneg(5, &rat(1, 4)).unwrap();
    assert!(below.value.unwrap().is_negative());
    assert_eq!(below.status, Status::Fail);
    assert!(check_gsharp_nonneg(5, &Rational::zero()).is_err());
    assert!(check_gsharp_nonneg(4, &rat(1, 4)).is_err());
}

#[test]
fn named_dimension_examples() {
    assert!(check_gsharp_form(5).unwrap().passed());
    assert!(check_gol_identity(7).unwrap().passed());
    assert!(check_completion(9).unwrap().passed());
    assert!(check_in1_coefficients(12).unwrap().passed());
    let k8 = check_in2_k_bound(8).unwrap();
    assert!(k8.passed());
    assert_eq!(k8.value, Some(rat(4 * 7 * 4, 8)));
    assert!(encode(4, Which::G).is_err());
}

#[test]
fn r_multipliers() {
    assert_eq!(r1(6), BPoly::monomial(int(1), 1));
    assert_eq!(r2(6), rat(-1, 1));
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(a, b)| rat(a, b))
}

fn laurent(n: u32) -> impl Strategy<Value = ExactLaurentPoly> {
    let u = ExactLaurentPoly::unit(n);
    prop::collection::vec((-2 * u..=2 * u, prop::collection::vec(small_rational(), 0..3)), 0..5).prop_map(
        move |terms| {
            terms.into_iter().fold(ExactLaurentPoly::zero(n), |acc, (e, c)| {
                &acc + &ExactLaurentPoly::term(n, BPoly::from_coeffs(c), e, u).unwrap()
            })
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(a in laurent(5), b in laurent(5), c in laurent(5)) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert!(a.terms().all(|(_, c)| !c.is_zero()));
    }

    #[test]
    fn tderive_is_linear(a in laurent(6), b in laurent(6), k in small_rational()) {
        let c = BPoly::monomial(k, 1);
        prop_assert_eq!(tderive(&(&a + &b), &c), &tderive(&a, &c) + &tderive(&b, &c));
    }
}

#![allow(clippy::excessive_precision)]

use dirac_nlcs::specfun::{
    bessel_i, bessel_i_asymptotic_scaled, bessel_i_series, hermite_function,
    hermite_function_derivative, hermite_functions, integrate, QuadratureRule,
};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

/// Physicists' H_n(p/q) as an exact rational (numerator, q^n) via
/// H_{k+1} = 2x H_k − 2k H_{k−1}.
fn hermite_rational(n: usize, p: i64, q: i64) -> (BigInt, BigInt) {
    let p = BigInt::from(p);
    let q = BigInt::from(q);
    // track N_k = H_k · q^k
    let mut prev = BigInt::one();
    if n == 0 {
        return (prev, BigInt::one());
    }
    let mut cur = BigInt::from(2) * &p;
    for k in 1..n {
        let next = BigInt::from(2) * &p * &cur - BigInt::from(2 * k) * &q * &q * &prev;
        prev = cur;
        cur = next;
    }
    (cur, q.pow(n as u32))
}

fn big_to_f64_ratio(num: &BigInt, den: &BigInt) -> f64 {
    // scale to keep both inside f64 range
    let shift = num.bits().max(den.bits()).saturating_sub(900);
    let n = (num >> shift).to_f64().unwrap();
    let d = (den >> shift).to_f64().unwrap();
    n / d
}

#[test]
fn hermite_function_matches_exact_rational_recurrence() {
    let n = 25;
    let (num, den) = hermite_rational(n, 37, 10);
    let h = big_to_f64_ratio(&num, &den);
    let xi: f64 = 3.7;
    let mut fact = BigInt::one();
    for k in 1..=n {
        fact *= k;
    }
    let norm_sq = BigInt::from(2).pow(n as u32) * fact;
    let norm = norm_sq.to_f64().unwrap().sqrt() * std::f64::consts::PI.sqrt().sqrt();
    let expected = h * (-0.5 * xi * xi).exp() / norm;
    let got = hermite_function(n, xi).unwrap();
    assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    assert!(!num.is_zero());
}

#[test]
fn hermite_function_matches_high_precision_values() {
    let table = [
        (25, 3.7, 0.019162904373834813198),
        (150, 7.3, 0.19298390257151086009),
        (1000, 20.5, -0.064594963172961148691),
        (3, -1.25, -0.031022683813618034109),
        (400, -0.3, -0.089141425978481564925),
    ];
    for (n, xi, expected) in table {
        let got = hermite_function(n, xi).unwrap();
        assert!((got - expected).abs() < 1e-12, "n={n}: {got} vs {expected}");
    }
}

#[test]
fn bessel_matches_reference_values() {
    let table = [
        (1, 2.0, 1.5906368546373291),
        (2, 2.0, 0.6889484476987382),
        (1, 1.0, 0.56515910399248502721),
        (1, 2.5, 2.5167162452886984415),
        (2, 4.0, 6.4221893752841055416),
        (1, 14.99, 324962.54824733626455),
        (2, 15.01, 298800.24220633340832),
        (1, 20.0, 42454973.385127770181),
        (2, 30.0, 730436828561.38035642),
        (1, 50.0, 2.9030785901035567968e20),
    ];
    for (nu, x, expected) in table {
        let got = bessel_i(nu, x).unwrap();
        assert!(((got - expected) / expected).abs() < 1e-13, "I_{nu}({x}) = {got}");
    }
}

fn bessel_i0(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for m in 1..200 {
        term *= q / (m as f64 * m as f64);
        sum += term;
    }
    sum
}

#[test]
fn bessel_derivative_identity() {
    // I₁'(x) = I₀(x) − I₁(x)/x
    for x in [0.3, 1.0, 4.0, 9.5] {
        let h = 1e-5;
        let fd = (bessel_i(1, x + h).unwrap() - bessel_i(1, x - h).unwrap()) / (2.0 * h);
        let exact = bessel_i0(x) - bessel_i(1, x).unwrap() / x;
        assert!(((fd - exact) / exact).abs() < 1e-8, "x={x}");
    }
}

#[test]
fn bessel_switchover_is_seamless() {
    for nu in [1, 2] {
        for x in [15.0, 20.0, 30.0, 40.0] {
            let series = bessel_i_series(nu, x) * (-x).exp();
            let asym = bessel_i_asymptotic_scaled(nu, x);
            assert!(((series - asym) / series).abs() < 1e-12);
        }
    }
}

#[test]
fn gaussian_integral() {
    let rule = QuadratureRule::new(-10.0, 10.0).unwrap();
    let v = integrate(|t| (-t * t).exp(), &rule).unwrap();
    assert!((v - 1.7724538509055160273).abs() < 1e-12);
}

#[test]
fn derivative_matches_finite_difference() {
    for n in [0, 1, 7, 30] {
        for xi in [-2.0, 0.4, 3.1] {
            let h = 1e-6;
            let fd = (hermite_function(n, xi + h).unwrap() - hermite_function(n, xi - h).unwrap())
                / (2.0 * h);
            assert!((fd - hermite_function_derivative(n, xi).unwrap()).abs() < 1e-8);
        }
    }
}

proptest! {
    #[test]
    fn parity(n in 0usize..300, xi in -30.0f64..30.0) {
        let a = hermite_function(n, xi).unwrap();
        let b = hermite_function(n, -xi).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((a - sign * b).abs() <= 1e-13 * (1.0 + a.abs()));
    }

    #[test]
    fn batch_equals_single(n in 0usize..200, xi in -25.0f64..25.0) {
        let all = hermite_functions(n, xi).unwrap();
        prop_assert_eq!(all[n], hermite_function(n, xi).unwrap());
    }

    #[test]
    fn bounded_by_cramer(n in 0usize..2000, xi in -60.0f64..60.0) {
        // |φ_n| ≤ π^{-1/4}
        let v = hermite_function(n, xi).unwrap();
        prop_assert!(v.abs() <= std::f64::consts::PI.powf(-0.25) + 1e-12);
    }

    #[test]
    fn bessel_positive_and_increasing(x in 0.01f64..60.0) {
        for nu in [1, 2] {
            let a = bessel_i(nu, x).unwrap();
            let b = bessel_i(nu, x * 1.01).unwrap();
            prop_assert!(a > 0.0 && b > a);
        }
    }
}

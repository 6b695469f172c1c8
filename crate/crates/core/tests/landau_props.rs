use approx::assert_relative_eq;
use dirac_nlcs::landau::{
    density_maxima, eigenfunction, energy, linspace, spinor_state, strain_to_params,
    AnisotropyParams, Branch, StrainDirection,
};
use proptest::prelude::*;

fn residual(p: &AnisotropyParams, n: usize, branch: Branch) -> f64 {
    // -ψ'' + V ψ = ω_ζ n ψ for V⁻, ω_ζ (n+1) ψ for V⁺ evaluated on ψ_n
    let h = 1e-3;
    let level = match branch {
        Branch::Minus => n as f64,
        Branch::Plus => n as f64 + 1.0,
    };
    let half = ((2 * n + 1) as f64).sqrt() + 4.0;
    let xs = linspace(p.x_of_xi(-half), p.x_of_xi(half), 401);
    let f = |x: f64| eigenfunction(p, n, x).unwrap();
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for &x in &xs {
        let lhs = -(f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h) + p.potential(branch, x) * f(x);
        num = num.max((lhs - p.omega_zeta() * level * f(x)).abs());
        den = den.max((p.potential(branch, x) * f(x)).abs());
    }
    num / den
}

#[test]
fn schroedinger_residual_on_both_branches() {
    for zeta in [0.5, 1.0, 1.5] {
        for b0 in [0.5, 2.0] {
            let p = AnisotropyParams::from_zeta(zeta, b0, -0.7, 0.0).unwrap();
            for n in 0..=10 {
                for branch in [Branch::Minus, Branch::Plus] {
                    let r = residual(&p, n, branch);
                    assert!(r < 1e-4, "zeta={zeta} b0={b0} n={n} {branch:?}: {r}");
                }
            }
        }
    }
}

#[test]
fn spinor_density_is_normalized() {
    let p = AnisotropyParams::from_zeta(0.7, 1.3, 0.4, 0.0).unwrap();
    for n in [0, 1, 4, 12] {
        let xs = linspace(p.x0() - 15.0, p.x0() + 15.0, 6001);
        let step = xs[1] - xs[0];
        let profile = spinor_state(&p, n, &xs).unwrap();
        let mass: f64 = profile.density.iter().sum::<f64>() * step;
        assert_relative_eq!(mass, 1.0, epsilon = 1e-9);
    }
}

#[test]
fn peak_density_falls_with_zeta() {
    let peak = |zeta: f64| {
        let p = AnisotropyParams::from_zeta(zeta, 0.5, 1.0, 0.0).unwrap();
        let xs = linspace(p.x0() - 12.0, p.x0() + 12.0, 4001);
        spinor_state(&p, 2, &xs).unwrap().peak().1
    };
    let zetas = linspace(0.5, 1.5, 6);
    for w in zetas.windows(2) {
        assert!(peak(w[1]) < peak(w[0]));
    }
}

#[test]
fn strain_directions_bracket_unity() {
    let x = strain_to_params(StrainDirection::X, 0.21, 0.15, 2.0, 0.5, 1.0, 0.0).unwrap();
    let y = strain_to_params(StrainDirection::Y, 0.21, 0.15, 2.0, 0.5, 1.0, 0.0).unwrap();
    assert!(x.zeta() < 1.0 && y.zeta() > 1.0);
    assert_relative_eq!(x.zeta(), 0.58 / 1.063, max_relative = 1e-12);
    assert_relative_eq!(y.zeta(), 1.42 / 0.7748, max_relative = 1e-3);
}

proptest! {
    #[test]
    fn energy_scales_with_velocity_product(
        vxx in 0.2f64..3.0,
        vyy in 0.2f64..3.0,
        b0 in 0.1f64..4.0,
        n in 1usize..200,
    ) {
        let p = AnisotropyParams::from_velocities(vxx, vyy, b0, 1.0, 0.0).unwrap();
        let q = AnisotropyParams::from_velocities(1.0, 1.0, b0, 1.0, 0.0).unwrap();
        let ratio = energy(&p, n) / energy(&q, n);
        prop_assert!((ratio - (vxx * vyy).sqrt()).abs() < 1e-14 * ratio.max(1.0));
    }

    #[test]
    fn maxima_are_symmetric_about_center(zeta in 0.3f64..3.0, k in -3.0f64..3.0, n in 0usize..40) {
        let p = AnisotropyParams::from_zeta(zeta, 0.5, k, 0.0).unwrap();
        let (lo, hi) = density_maxima(&p, n).unwrap();
        prop_assert!(lo <= hi);
        prop_assert!(((hi - p.x0()) - (p.x0() - lo)).abs() < 1e-9);
    }
}

//! Anisotropic Dirac electron in a uniform perpendicular magnetic field,
//! Landau-like gauge A = B₀x ŷ.
//!
//! After the y-dependence e^{iky} is factored out, both spinor components
//! are shifted oscillator states with frequency ω_ζ = ω_B/ζ centered at
//! x₀ = −2k/ω_B. The y-phase cancels in every density and expectation value
//! computed here and is dropped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{hermite_function, hermite_functions};

/// Physical configuration of the anisotropic sample, natural units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisotropyParams {
    v_xx: f64,
    v_yy: f64,
    zeta: f64,
    b0: f64,
    k: f64,
    delta: f64,
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {v}")))
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

impl AnisotropyParams {
    /// Parameters from the two principal Fermi velocities (units of v_F).
    pub fn from_velocities(v_xx: f64, v_yy: f64, b0: f64, k: f64, delta: f64) -> Result<Self> {
        positive("v_xx", v_xx)?;
        positive("v_yy", v_yy)?;
        positive("B0", b0)?;
        finite("k", k)?;
        finite("delta", delta)?;
        Ok(Self {
            v_xx,
            v_yy,
            zeta: v_xx / v_yy,
            b0,
            k,
            delta,
        })
    }

    /// Parameters from the anisotropy ratio alone, with v_xx·v_yy = 1 so
    /// energies coincide with the pristine ones.
    pub fn from_zeta(zeta: f64, b0: f64, k: f64, delta: f64) -> Result<Self> {
        positive("zeta", zeta)?;
        let mut p = Self::from_velocities(zeta.sqrt(), 1.0 / zeta.sqrt(), b0, k, delta)?;
        debug_assert!(((p.zeta - zeta) / zeta).abs() <= 1e-15);
        p.zeta = zeta;
        Ok(p)
    }

    /// Pristine sample with the figure defaults B₀ = 1/2, k = 1, δ = 0.
    pub fn pristine() -> Self {
        Self::from_zeta(1.0, 0.5, 1.0, 0.0).expect("valid defaults")
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    pub fn v_xx(&self) -> f64 {
        self.v_xx
    }

    pub fn v_yy(&self) -> f64 {
        self.v_yy
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Pristine cyclotron parameter ω_B = 2B₀.
    pub fn omega_b(&self) -> f64 {
        2.0 * self.b0
    }

    /// ω_ζ = ω_B / ζ.
    pub fn omega_zeta(&self) -> f64 {
        self.omega_b() / self.zeta
    }

    /// Orbit center x₀ = −2k/ω_B.
    pub fn x0(&self) -> f64 {
        -2.0 * self.k / self.omega_b()
    }

    /// Dimensionless oscillator coordinate ξ = √(ω_ζ/2)(x − x₀).
    pub fn xi(&self, x: f64) -> f64 {
        (0.5 * self.omega_zeta()).sqrt() * (x - self.x0())
    }

    pub fn x_of_xi(&self, xi: f64) -> f64 {
        self.x0() + xi / (0.5 * self.omega_zeta()).sqrt()
    }

    /// Effective potential V^±_ζ(x) = (k/ζ + B₀x/ζ)² ± B₀/ζ
    /// = (ω_ζ²/4)(x + 2k/ω_B)² ± ω_ζ/2.
    pub fn potential(&self, branch: Branch, x: f64) -> f64 {
        let w = self.omega_zeta();
        let d = x - self.x0();
        let shift = match branch {
            Branch::Plus => 0.5 * w,
            Branch::Minus => -0.5 * w,
        };
        0.25 * w * w * d * d + shift
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

/// One Landau level of the lower-component problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandauLevel {
    pub n: usize,
    /// ε⁻_n = ω_ζ n.
    pub eps: f64,
    /// E_n = √(v_xx v_yy ω_B n).
    pub energy: f64,
}

/// ε⁻_n = ω_ζ n.
pub fn eps_minus(params: &AnisotropyParams, n: usize) -> f64 {
    params.omega_zeta() * n as f64
}

/// ε⁺_n = ω_ζ (n + 1), so that ε⁺_{n−1} = ε⁻_n.
pub fn eps_plus(params: &AnisotropyParams, n: usize) -> f64 {
    params.omega_zeta() * (n + 1) as f64
}

/// E_n = √(v_xx v_yy ω_B n).
pub fn energy(params: &AnisotropyParams, n: usize) -> f64 {
    (params.v_xx * params.v_yy * params.omega_b() * n as f64).sqrt()
}

pub fn landau_level(params: &AnisotropyParams, n: usize) -> LandauLevel {
    LandauLevel {
        n,
        eps: eps_minus(params, n),
        energy: energy(params, n),
    }
}

/// L²(dx)-normalized eigenfunction ψ_n(x) = (ω_ζ/2)^{1/4} φ_n(ξ).
pub fn eigenfunction(params: &AnisotropyParams, n: usize, x: f64) -> Result<f64> {
    let scale = (0.5 * params.omega_zeta()).powf(0.25);
    Ok(scale * hermite_function(n, params.xi(x))?)
}

/// ψ_0(x), …, ψ_{n_max}(x) in one pass.
pub fn eigenfunctions(params: &AnisotropyParams, n_max: usize, x: f64) -> Result<Vec<f64>> {
    let scale = (0.5 * params.omega_zeta()).powf(0.25);
    let mut v = hermite_functions(n_max, params.xi(x))?;
    v.iter_mut().for_each(|p| *p *= scale);
    Ok(v)
}

/// Sampled two-component wavefunction and its density.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorProfile {
    pub x: Vec<f64>,
    pub upper: Vec<Complex64>,
    pub lower: Vec<Complex64>,
    pub density: Vec<f64>,
    pub params: AnisotropyParams,
}

impl SpinorProfile {
    pub(crate) fn from_components(
        params: &AnisotropyParams,
        x: Vec<f64>,
        upper: Vec<Complex64>,
        lower: Vec<Complex64>,
    ) -> Self {
        let density = upper
            .iter()
            .zip(&lower)
            .map(|(u, l)| u.norm_sqr() + l.norm_sqr())
            .collect();
        Self {
            x,
            upper,
            lower,
            density,
            params: *params,
        }
    }

    /// Grid point with the largest density (first one on ties).
    pub fn peak(&self) -> (f64, f64) {
        let mut best = (self.x[0], self.density[0]);
        for (&x, &d) in self.x.iter().zip(&self.density) {
            if d > best.1 {
                best = (x, d);
            }
        }
        best
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("x_grid", "grid is empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid("x_grid", "grid contains non-finite values"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("x_grid", "grid must be strictly increasing"));
    }
    Ok(())
}

/// ρ_n(x) = [|ψ_n|² + (1 − δ₀ₙ)|ψ_{n−1}|²] / 2^{1−δ₀ₙ}.
pub fn spinor_density(params: &AnisotropyParams, n: usize, x: f64) -> Result<f64> {
    let psi = eigenfunctions(params, n, x)?;
    Ok(if n == 0 {
        psi[0] * psi[0]
    } else {
        0.5 * (psi[n] * psi[n] + psi[n - 1] * psi[n - 1])
    })
}

/// Pseudo-spinor Ψ_n = ((1 − δ₀ₙ)ψ_{n−1}, iψ_n) / √(2^{1−δ₀ₙ}) sampled on a grid.
pub fn spinor_state(params: &AnisotropyParams, n: usize, x_grid: &[f64]) -> Result<SpinorProfile> {
    check_grid(x_grid)?;
    let norm = if n == 0 { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
    let mut upper = Vec::with_capacity(x_grid.len());
    let mut lower = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let psi = eigenfunctions(params, n, x)?;
        let up = if n == 0 { 0.0 } else { norm * psi[n - 1] };
        upper.push(Complex64::new(up, 0.0));
        lower.push(Complex64::new(0.0, norm * psi[n]));
    }
    Ok(SpinorProfile::from_components(
        params,
        x_grid.to_vec(),
        upper,
        lower,
    ))
}

/// Half-width W = √(2(2n+1)/ω_ζ) + 6/√(ω_ζ/2) of the default x-window.
pub fn default_half_width(params: &AnisotropyParams, n: usize) -> f64 {
    let w = params.omega_zeta();
    (2.0 * (2.0 * n as f64 + 1.0) / w).sqrt() + 6.0 / (0.5 * w).sqrt()
}

pub const DEFAULT_GRID_POINTS: usize = 2001;

/// 2001 uniform points over [x₀ − W, x₀ + W].
pub fn default_grid(params: &AnisotropyParams, n: usize) -> Vec<f64> {
    let half = default_half_width(params, n);
    linspace(params.x0() - half, params.x0() + half, DEFAULT_GRID_POINTS)
}

pub fn linspace(a: f64, b: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![a],
        _ => {
            let h = (b - a) / (points - 1) as f64;
            (0..points)
                .map(|i| if i + 1 == points { b } else { a + h * i as f64 })
                .collect()
        }
    }
}

/// Which stationarity relation `density_maxima_with` solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MaximaRelation {
    /// g_n(η) + (1 − δ₀ₙ) n g_{n−1}(η) = 0 with g_n = H_n (η H_n − H_{n+1}).
    Printed,
    /// g_n(η) + 2n g_{n−1}(η) = 0, the exact stationarity condition of ρ_n.
    DensityStationary,
}

/// Relation evaluated with normalized functions. With
/// H_m = √(2^m m! √π) e^{η²/2} φ_m the left-hand side equals
/// n · 2^{n−1}(n−1)!√π · e^{η²} times
/// 2φ_n(ηφ_n − √(2(n+1))φ_{n+1}) + w φ_{n−1}(ηφ_{n−1} − √(2n)φ_n),
/// so the roots coincide and nothing overflows.
fn maxima_relation(n: usize, eta: f64, weight: f64) -> f64 {
    let phi = hermite_functions(n + 1, eta).expect("finite eta");
    let nf = n as f64;
    let a_n = eta * phi[n] - (2.0 * (nf + 1.0)).sqrt() * phi[n + 1];
    let a_nm1 = eta * phi[n - 1] - (2.0 * nf).sqrt() * phi[n];
    2.0 * phi[n] * a_n + weight * phi[n - 1] * a_nm1
}

fn density_in_xi(n: usize, eta: f64) -> f64 {
    let phi = hermite_functions(n, eta).expect("finite eta");
    phi[n] * phi[n] + phi[n - 1] * phi[n - 1]
}

/// Positions x_± = x₀ ± √(2/ω_ζ) η* of the density maxima, with η* the
/// root of the printed maxima relation at which ρ_n is largest.
pub fn density_maxima(params: &AnisotropyParams, n: usize) -> Result<(f64, f64)> {
    density_maxima_with(params, n, MaximaRelation::Printed)
}

pub fn density_maxima_with(
    params: &AnisotropyParams,
    n: usize,
    relation: MaximaRelation,
) -> Result<(f64, f64)> {
    let x0 = params.x0();
    if n == 0 {
        return Ok((x0, x0));
    }
    let eta = maxima_eta(n, relation)?;
    let d = (2.0 / params.omega_zeta()).sqrt() * eta;
    Ok((x0 - d, x0 + d))
}

/// All positive roots of the chosen relation on (0, √(2n+3)], bracketed on
/// a uniform scan and bisected to 1e-12.
pub fn maxima_roots(n: usize, relation: MaximaRelation) -> Vec<f64> {
    if n == 0 {
        return vec![];
    }
    let weight = match relation {
        MaximaRelation::Printed => 1.0,
        MaximaRelation::DensityStationary => 2.0,
    };
    let g = |eta: f64| maxima_relation(n, eta, weight);
    let top = (2.0 * n as f64 + 3.0).sqrt();
    let steps = 400 * (n + 1);
    let h = top / steps as f64;
    let mut roots = Vec::new();
    let mut a = h;
    let mut ga = g(a);
    for i in 2..=steps {
        let b = if i == steps { top } else { h * i as f64 };
        let gb = g(b);
        if ga == 0.0 {
            roots.push(a);
        } else if ga.signum() != gb.signum() && gb != 0.0 {
            roots.push(bisect(&g, a, b, ga));
        }
        a = b;
        ga = gb;
    }
    if ga == 0.0 {
        roots.push(a);
    }
    roots
}

fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut ga: f64) -> f64 {
    for _ in 0..200 {
        if b - a <= 1e-12 {
            break;
        }
        let m = 0.5 * (a + b);
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn maxima_eta(n: usize, relation: MaximaRelation) -> Result<f64> {
    let roots = maxima_roots(n, relation);
    let mut best: Option<(f64, f64)> = None;
    for eta in roots {
        let rho = density_in_xi(n, eta);
        match best {
            Some((_, r)) if rho < r => {}
            _ => best = Some((eta, rho)),
        }
    }
    best.map(|(eta, _)| eta).ok_or(Error::NoBracketedRoot { n })
}

/// Axis along which uniaxial strain is applied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrainDirection {
    /// Zigzag direction: v_xx = 1 − βε, v_yy = 1 + βνε.
    X,
    /// Armchair direction: v_xx = 1 + βνε, v_yy = 1 − βε.
    Y,
}

/// Uniaxial strain of strength ε with Poisson ratio ν and coupling β.
///
/// ζ is the exact ratio v_xx/v_yy; its first-order form 1 ∓ β(1+ν)ε is only
/// an approximation.
pub fn strain_to_params(
    direction: StrainDirection,
    epsilon: f64,
    nu: f64,
    beta: f64,
    b0: f64,
    k: f64,
    delta: f64,
) -> Result<AnisotropyParams> {
    positive("beta", beta)?;
    finite("epsilon", epsilon)?;
    if !(0.0..=0.5).contains(&nu) {
        return Err(Error::invalid("nu", format!("Poisson ratio must lie in [0, 0.5], got {nu}")));
    }
    if !(0.0..1.0 / beta).contains(&epsilon) {
        return Err(Error::invalid(
            "epsilon",
            format!(
                "strain must satisfy 0 <= epsilon < 1/beta = {} so that both velocities stay positive, got {epsilon}",
                1.0 / beta
            ),
        ));
    }
    let soft = 1.0 - beta * epsilon;
    let stiff = 1.0 + beta * nu * epsilon;
    let (v_xx, v_yy) = match direction {
        StrainDirection::X => (soft, stiff),
        StrainDirection::Y => (stiff, soft),
    };
    AnisotropyParams::from_velocities(v_xx, v_yy, b0, k, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{integrate, QuadratureRule};
    use approx::assert_relative_eq;

    fn fig_params(zeta: f64) -> AnisotropyParams {
        AnisotropyParams::from_zeta(zeta, 0.5, 1.0, 0.0).unwrap()
    }

    fn integrate_x(params: &AnisotropyParams, f: impl Fn(f64) -> f64) -> f64 {
        let half = default_half_width(params, 20) + 10.0;
        let rule = QuadratureRule::new(params.x0() - half, params.x0() + half).unwrap();
        integrate(f, &rule).unwrap()
    }

    #[test]
    fn derived_parameters() {
        let p = fig_params(1.0);
        assert_eq!(p.omega_b(), 1.0);
        assert_eq!(p.omega_zeta(), 1.0);
        assert_eq!(p.x0(), -2.0);
        for zeta in [0.3, 0.5456, 1.0, 1.8328, 7.0] {
            let p = fig_params(zeta);
            assert!(((p.omega_zeta() * p.zeta() - p.omega_b()) / p.omega_b()).abs() <= 1e-15);
            assert!(((p.v_xx() / p.v_yy() - zeta) / zeta).abs() <= 1e-15);
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(AnisotropyParams::from_velocities(0.0, 1.0, 0.5, 1.0, 0.0).is_err());
        assert!(AnisotropyParams::from_velocities(1.0, -1.0, 0.5, 1.0, 0.0).is_err());
        assert!(AnisotropyParams::from_velocities(1.0, 1.0, 0.0, 1.0, 0.0).is_err());
        assert!(AnisotropyParams::from_zeta(f64::NAN, 0.5, 1.0, 0.0).is_err());
        assert!(AnisotropyParams::from_zeta(1.0, 0.5, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn spectrum_degeneracy_and_ground_state() {
        let p = fig_params(0.73);
        assert_eq!(energy(&p, 0), 0.0);
        for n in 1..=100 {
            assert_eq!(eps_minus(&p, n), eps_plus(&p, n - 1));
            assert!(energy(&p, n) > energy(&p, n - 1));
        }
    }

    #[test]
    fn eigenfunction_examples() {
        let p = fig_params(1.0);
        let v = eigenfunction(&p, 0, -2.0).unwrap();
        assert_relative_eq!(v, (0.5 / std::f64::consts::PI).powf(0.25), epsilon = 1e-15);
        assert_relative_eq!(v, 0.6316187, epsilon = 1e-7);
        for zeta in [0.5, 1.3] {
            let p = AnisotropyParams::from_zeta(zeta, 0.9, -0.4, 0.0).unwrap();
            assert_eq!(eigenfunction(&p, 1, p.x0()).unwrap(), 0.0);
        }
        let p = fig_params(0.8);
        let norm = integrate_x(&p, |x| eigenfunction(&p, 7, x).unwrap().powi(2));
        assert!((norm - 1.0).abs() < 1e-8);
    }

    #[test]
    fn spinor_state_components() {
        let p = fig_params(1.2);
        let grid = linspace(-6.0, 2.0, 41);
        let s0 = spinor_state(&p, 0, &grid).unwrap();
        for (i, &x) in grid.iter().enumerate() {
            let psi0 = eigenfunction(&p, 0, x).unwrap();
            assert_eq!(s0.upper[i], Complex64::new(0.0, 0.0));
            assert_eq!(s0.lower[i], Complex64::new(0.0, psi0));
            assert_relative_eq!(s0.density[i], psi0 * psi0, epsilon = 1e-15);
        }
        let s3 = spinor_state(&p, 3, &grid).unwrap();
        for (i, &x) in grid.iter().enumerate() {
            let a = eigenfunction(&p, 3, x).unwrap();
            let b = eigenfunction(&p, 2, x).unwrap();
            assert_relative_eq!(s3.density[i], 0.5 * (a * a + b * b), epsilon = 1e-15);
        }
    }

    #[test]
    fn spinor_density_normalized() {
        let p = fig_params(0.6);
        for n in [0, 1, 5] {
            let norm = integrate_x(&p, |x| spinor_density(&p, n, x).unwrap());
            assert!((norm - 1.0).abs() < 1e-8, "n={n} norm={norm}");
        }
    }

    #[test]
    fn grid_validation() {
        let p = fig_params(1.0);
        assert!(spinor_state(&p, 1, &[]).is_err());
        assert!(spinor_state(&p, 1, &[0.0, 0.0]).is_err());
        assert!(spinor_state(&p, 1, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn default_grid_shape() {
        let p = fig_params(1.5);
        let g = default_grid(&p, 3);
        assert_eq!(g.len(), DEFAULT_GRID_POINTS);
        assert_relative_eq!(0.5 * (g[0] + g[g.len() - 1]), p.x0(), epsilon = 1e-12);
    }

    #[test]
    fn maxima_ground_state_and_first_level() {
        let p = fig_params(1.0);
        assert_eq!(density_maxima(&p, 0).unwrap(), (p.x0(), p.x0()));
        let (lo, hi) = density_maxima(&p, 1).unwrap();
        let expected = 2f64.sqrt() * 3f64.sqrt() / 2.0;
        assert!((hi - p.x0() - expected).abs() < 1e-10);
        assert!((p.x0() - lo - expected).abs() < 1e-10);
        // the exact stationarity relation lands on the true peak at η = 1/√2
        let (_, hi) = density_maxima_with(&p, 1, MaximaRelation::DensityStationary).unwrap();
        assert!((hi - p.x0() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn maxima_separation_grows_with_zeta() {
        let sep = |zeta: f64| {
            let (lo, hi) = density_maxima(&fig_params(zeta), 3).unwrap();
            hi - lo
        };
        assert!(sep(0.5) < sep(1.0));
        assert!(sep(1.0) < sep(1.5));
    }

    #[test]
    fn strain_examples() {
        let p = strain_to_params(StrainDirection::X, 0.0, 0.15, 2.0, 0.5, 1.0, 0.0).unwrap();
        assert_eq!((p.v_xx(), p.v_yy(), p.zeta()), (1.0, 1.0, 1.0));
        let p = strain_to_params(StrainDirection::X, 0.21, 0.15, 2.0, 0.5, 1.0, 0.0).unwrap();
        assert_relative_eq!(p.v_xx(), 0.58, epsilon = 1e-15);
        assert_relative_eq!(p.v_yy(), 1.063, epsilon = 1e-15);
        assert_relative_eq!(p.zeta(), 0.58 / 1.063, epsilon = 1e-15);
        assert!((p.zeta() - 0.5456).abs() < 1e-4);
        let p = strain_to_params(StrainDirection::Y, 0.21, 0.15, 2.0, 0.5, 1.0, 0.0).unwrap();
        assert!((p.zeta() - 1.8328).abs() < 1e-4);
    }

    #[test]
    fn strain_rejects_out_of_range() {
        let e = strain_to_params(StrainDirection::X, 0.5, 0.15, 2.0, 0.5, 1.0, 0.0).unwrap_err();
        assert!(e.to_string().contains("positive"));
        assert!(strain_to_params(StrainDirection::Y, -0.01, 0.15, 2.0, 0.5, 1.0, 0.0).is_err());
        assert!(strain_to_params(StrainDirection::Y, 0.1, 0.6, 2.0, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn potential_minimum_at_center() {
        let p = fig_params(0.9);
        assert_relative_eq!(p.potential(Branch::Minus, p.x0()), -0.5 * p.omega_zeta());
        assert_relative_eq!(p.potential(Branch::Plus, p.x0()), 0.5 * p.omega_zeta());
    }
}

//! Physical diagnostics of coherent states.
//!
//! Moments of 𝕊_q = s_q ⊗ 𝕀 and mean energies come from the family's
//! closed-form series when one exists, and from the truncated matrix or a
//! direct coefficient sum otherwise. Both routes are public so they can be
//! compared against each other.
//!
//! Positions and momenta are dimensionless (ξ units). The physical position
//! variance is σ_ξ²·2/ω_ζ.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fockalg::{s_operator, DeformationFamily};
use crate::landau::{check_grid, eigenfunctions, energy, AnisotropyParams, SpinorProfile};
use crate::nlcs::CoherentState;
use crate::specfun::ln_bessel_i;

/// Extra levels beyond the truncation used by the matrix route.
pub const MATRIX_PADDING: usize = 10;

const SERIES_CAP: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Matrix,
}

/// Moments, uncertainty product and mean energies of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub mean_xi: f64,
    pub mean_p: f64,
    pub var_xi: f64,
    pub var_p: f64,
    pub hur: f64,
    /// σ_ξ²·2/ω_ζ.
    pub var_x: f64,
    pub mean_energy_pristine: f64,
    pub mean_energy_aniso: f64,
    pub method: Method,
}

/// Growing table of ln n!.
struct LnFact(Vec<f64>);

impl LnFact {
    fn new() -> Self {
        Self(vec![0.0])
    }

    fn get(&mut self, n: usize) -> f64 {
        while self.0.len() <= n {
            let k = self.0.len();
            let prev = self.0[k - 1];
            self.0.push(prev + (k as f64).ln());
        }
        self.0[n]
    }
}

/// Σ_{n≥start} exp(c(n) + n ln x − shift), summed until the terms have
/// passed their peak and dropped below machine precision of the sum.
fn log_series(
    x: f64,
    shift: f64,
    start: usize,
    mut c: impl FnMut(usize, &mut LnFact) -> f64,
) -> f64 {
    let mut lf = LnFact::new();
    if x == 0.0 {
        return if start == 0 { (c(0, &mut lf) - shift).exp() } else { 0.0 };
    }
    let ln_x = x.ln();
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    for n in start..SERIES_CAP {
        let term = (c(n, &mut lf) + n as f64 * ln_x - shift).exp();
        sum += term;
        if n as f64 > x && term <= prev && term <= f64::EPSILON * 1e-2 * sum {
            break;
        }
        prev = term;
    }
    sum
}

fn ln_sqrt(v: f64) -> f64 {
    0.5 * v.ln()
}

/// (α̃ + (−1)^q α̃*)/i^q and (−1)^q (α̃² + α̃*²).
fn prefactors(alpha_tilde: Complex64, q: u8) -> (f64, f64) {
    let a2 = alpha_tilde * alpha_tilde;
    match q {
        0 => (2.0 * alpha_tilde.re, 2.0 * a2.re),
        _ => (2.0 * alpha_tilde.im, -2.0 * a2.re),
    }
}

fn check_q(q: u8) -> Result<()> {
    if q > 1 {
        return Err(Error::invalid("q", format!("must be 0 or 1, got {q}")));
    }
    Ok(())
}

/// ⟨𝕊_q⟩ and ⟨𝕊_q²⟩ from the family's closed-form series; `None` for custom
/// families.
pub fn s_moments_series(state: &CoherentState, q: u8) -> Result<Option<(f64, f64)>> {
    check_q(q)?;
    let at = state.alpha_tilde();
    let x = at.norm_sqr();
    let lz = state.log_norm();
    let (pre, pre2) = prefactors(at, q);
    let sqrt2 = std::f64::consts::SQRT_2;
    let moments = match state.family() {
        DeformationFamily::Identity => {
            let s1 = log_series(x, lz, 1, |n, lf| -0.5 * (lf.get(n - 1) + lf.get(n + 1)));
            let mean = pre / sqrt2 * ((x - lz).exp() + s1);
            let s2 = log_series(x, lz, 1, |n, lf| {
                ln_sqrt((n + 1) as f64) - 0.5 * (lf.get(n - 1) + lf.get(n + 2))
            });
            let second = 0.5 * (-lz).exp()
                + 2.0 * x * (x - lz).exp()
                + 0.5 * pre2 * ((x - lz).exp() + s2);
            (mean, second)
        }
        DeformationFamily::ShiftedOne => {
            let s1 = log_series(x, lz, 0, |n, lf| {
                ln_sqrt((n + 2) as f64) - 0.5 * (lf.get(n) + lf.get(n + 1))
            });
            let mean = pre / (2.0 * sqrt2) * (1.0 + s1);
            let s2 = log_series(x, lz, 0, |n, lf| {
                ln_sqrt((n + 3) as f64) - 0.5 * (lf.get(n) + lf.get(n + 1))
            });
            let second = 1.0 + x + 0.25 * pre2 * (1.0 + s2);
            (mean, second)
        }
        DeformationFamily::ShiftedTwo => {
            let s1a = log_series(x, lz, 0, |n, lf| {
                -0.5 * (lf.get(n) + 3.0 * lf.get(n + 1))
            });
            let s1b = log_series(x, lz, 0, |n, lf| {
                ln_sqrt((n + 3) as f64) - 0.5 * (lf.get(n) + lf.get(n + 2)) - lf.get(n + 1)
            });
            let mean = pre / (2.0 * sqrt2) * (s1a + s1b);
            let s2a = log_series(x, lz, 0, |n, lf| {
                -0.5 * (lf.get(n) + lf.get(n + 2)) - lf.get(n + 1)
            });
            let s2b = log_series(x, lz, 0, |n, lf| {
                ln_sqrt((n + 4) as f64) - 0.5 * (lf.get(n) + lf.get(n + 1)) - lf.get(n + 2)
            });
            let bessel_ratio = if x == 0.0 {
                0.0
            } else {
                let r = x.sqrt();
                r * (ln_bessel_i(2, 2.0 * r)? - ln_bessel_i(1, 2.0 * r)?).exp()
            };
            let second = 2.0 + bessel_ratio + 0.25 * pre2 * (s2a + s2b);
            (mean, second)
        }
        DeformationFamily::Custom(_) => return Ok(None),
    };
    Ok(Some(moments))
}

/// ⟨𝕊_q⟩ and ⟨𝕊_q²⟩ as v†(s_q ⊗ 𝕀)v and v†(s_q ⊗ 𝕀)²v on a truncated space
/// of dimension `dim`.
pub fn s_moments_matrix_at(state: &CoherentState, q: u8, dim: usize) -> Result<(f64, f64)> {
    check_q(q)?;
    if dim < state.truncation() + 2 {
        return Err(Error::invalid(
            "dim",
            format!("need dim >= truncation + 2 = {}", state.truncation() + 2),
        ));
    }
    let s = s_operator(q, dim)?.on_both_components()?;
    let s2 = s.matmul(&s)?;
    let v = state.spinor_vector(dim)?;
    let mean = s.expectation(&v)?;
    let second = s2.expectation(&v)?;
    debug_assert!(mean.im.abs() < 1e-12 && second.im.abs() < 1e-12);
    Ok((mean.re, second.re))
}

/// Matrix route at dimension truncation + 10.
pub fn s_moments_matrix(state: &CoherentState, q: u8) -> Result<(f64, f64)> {
    s_moments_matrix_at(state, q, state.truncation() + MATRIX_PADDING)
}

/// ⟨𝕊_q⟩ and ⟨𝕊_q²⟩ with the method used.
pub fn s_moments_with_method(state: &CoherentState, q: u8) -> Result<((f64, f64), Method)> {
    match s_moments_series(state, q)? {
        Some(m) => Ok((m, Method::Series)),
        None => Ok((s_moments_matrix(state, q)?, Method::Matrix)),
    }
}

pub fn s_moments(state: &CoherentState, q: u8) -> Result<(f64, f64)> {
    Ok(s_moments_with_method(state, q)?.0)
}

/// ⟨H⟩_α for a pristine sample from the closed-form series; `None` for
/// custom families.
pub fn mean_energy_series(state: &CoherentState, params: &AnisotropyParams) -> Option<f64> {
    let x = state.intensity();
    let lz = state.log_norm();
    let root = params.omega_b().sqrt();
    match state.family() {
        DeformationFamily::Identity => {
            Some(2.0 * root * log_series(x, lz, 1, |n, lf| ln_sqrt(n as f64) - lf.get(n)))
        }
        DeformationFamily::ShiftedOne => {
            Some(root * log_series(x, lz, 0, |n, lf| ln_sqrt((n + 1) as f64) - lf.get(n)))
        }
        DeformationFamily::ShiftedTwo => Some(
            root * log_series(x, lz, 0, |n, lf| {
                ln_sqrt((n + 2) as f64) - lf.get(n) - lf.get(n + 1)
            }),
        ),
        DeformationFamily::Custom(_) => None,
    }
}

/// Σ_n |a_n|² E_n(params): the anisotropic mean energy summed directly.
pub fn mean_energy_coefficient_sum(state: &CoherentState, params: &AnisotropyParams) -> f64 {
    state
        .coeffs()
        .iter()
        .enumerate()
        .map(|(n, a)| a.norm_sqr() * energy(params, n))
        .sum()
}

/// (pristine ⟨H⟩_α, anisotropic ⟨H⟩_α^ζ = √(v_xx v_yy)·⟨H⟩_α).
pub fn mean_energy(state: &CoherentState, params: &AnisotropyParams) -> (f64, f64) {
    let scale = (params.v_xx() * params.v_yy()).sqrt();
    let pristine = match mean_energy_series(state, params) {
        Some(e) => e,
        None => mean_energy_coefficient_sum(state, params) / scale,
    };
    (pristine, scale * pristine)
}

/// Moments, variances, uncertainty product and mean energies.
pub fn report(state: &CoherentState, params: &AnisotropyParams) -> Result<ObservableReport> {
    let ((mean_xi, second_xi), method) = s_moments_with_method(state, 0)?;
    let ((mean_p, second_p), _) = s_moments_with_method(state, 1)?;
    let var_xi = (second_xi - mean_xi * mean_xi).max(0.0);
    let var_p = (second_p - mean_p * mean_p).max(0.0);
    let (pristine, aniso) = mean_energy(state, params);
    Ok(ObservableReport {
        mean_xi,
        mean_p,
        var_xi,
        var_p,
        hur: (var_xi * var_p).sqrt(),
        var_x: var_xi * 2.0 / params.omega_zeta(),
        mean_energy_pristine: pristine,
        mean_energy_aniso: aniso,
        method,
    })
}

/// Report for the pristine sample with B₀ = 1/2.
pub fn uncertainty(state: &CoherentState) -> Result<ObservableReport> {
    report(state, &AnisotropyParams::pristine())
}

/// Largest disagreement between the two routes for every moment and energy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub entries: Vec<CrossCheckEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheckEntry {
    pub quantity: &'static str,
    pub series: f64,
    pub oracle: f64,
}

impl CrossCheckEntry {
    pub fn deviation(&self) -> f64 {
        (self.series - self.oracle).abs()
    }
}

impl CrossCheck {
    pub fn max_deviation(&self) -> f64 {
        self.entries.iter().map(|e| e.deviation()).fold(0.0, f64::max)
    }

    /// Entries where the closed form and the oracle differ by more than `tol`.
    pub fn discrepancies(&self, tol: f64) -> Vec<&CrossCheckEntry> {
        self.entries.iter().filter(|e| e.deviation() > tol).collect()
    }
}

/// Compares every closed-form series against its matrix or coefficient-sum
/// counterpart. Empty for custom families.
pub fn cross_check(state: &CoherentState, params: &AnisotropyParams) -> Result<CrossCheck> {
    let mut entries = Vec::new();
    for (q, names) in [(0u8, ["<S0>", "<S0^2>"]), (1, ["<S1>", "<S1^2>"])] {
        if let Some((mean, second)) = s_moments_series(state, q)? {
            let (m_mean, m_second) = s_moments_matrix(state, q)?;
            entries.push(CrossCheckEntry {
                quantity: names[0],
                series: mean,
                oracle: m_mean,
            });
            entries.push(CrossCheckEntry {
                quantity: names[1],
                series: second,
                oracle: m_second,
            });
        }
    }
    if let Some(pristine) = mean_energy_series(state, params) {
        entries.push(CrossCheckEntry {
            quantity: "<H>",
            series: (params.v_xx() * params.v_yy()).sqrt() * pristine,
            oracle: mean_energy_coefficient_sum(state, params),
        });
    }
    Ok(CrossCheck { entries })
}

/// Spinor components of the state at one position.
fn components(
    state: &CoherentState,
    params: &AnisotropyParams,
    x: f64,
) -> Result<(Complex64, Complex64)> {
    let a = state.coeffs();
    let psi = eigenfunctions(params, a.len() - 1, x)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut upper = Complex64::new(0.0, 0.0);
    let mut lower = a[0] * psi[0];
    for n in 1..a.len() {
        upper += a[n] * (r * psi[n - 1]);
        lower += a[n] * (r * psi[n]);
    }
    Ok((upper, Complex64::new(0.0, 1.0) * lower))
}

/// ρ_α(x) = |upper|² + |lower|² at one position.
pub fn density_at(state: &CoherentState, params: &AnisotropyParams, x: f64) -> Result<f64> {
    let (u, l) = components(state, params, x)?;
    Ok(u.norm_sqr() + l.norm_sqr())
}

/// Position-space profile of the state on a grid.
pub fn density(
    state: &CoherentState,
    params: &AnisotropyParams,
    x_grid: &[f64],
) -> Result<SpinorProfile> {
    check_grid(x_grid)?;
    let mut upper = Vec::with_capacity(x_grid.len());
    let mut lower = Vec::with_capacity(x_grid.len());
    for &x in x_grid {
        let (u, l) = components(state, params, x)?;
        upper.push(u);
        lower.push(l);
    }
    Ok(SpinorProfile::from_components(
        params,
        x_grid.to_vec(),
        upper,
        lower,
    ))
}

/// Uniform grid centred on x₀ wide enough for the highest retained level.
pub fn default_state_grid(
    state: &CoherentState,
    params: &AnisotropyParams,
    points: usize,
) -> Vec<f64> {
    let n = state.truncation();
    let half = crate::landau::default_half_width(params, n);
    crate::landau::linspace(params.x0() - half, params.x0() + half, points)
}

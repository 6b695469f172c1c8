//! Nonlinear coherent states: eigenstates Θ_f⁻Ψ = αΨ of the deformed
//! annihilator, expanded as Ψ = Σ a_n Ψ_n.
//!
//! The coefficients obey a_{n+1} f(n+1) √(n+1) = α̃ a_n (with an extra √2 at
//! n = 0), where α̃ = α e^{−iδ}. They are generated as log-magnitudes so the
//! expansion stays finite for |α| of a few tens, and the series is cut once a
//! certified ratio-test bound on the discarded mass drops below tol².

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fockalg::{deformed_annihilator, embed_coefficients, DeformationFamily};
use crate::specfun::ln_bessel_i;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const MAX_LEVELS: usize = 20_000;

/// Normalized coherent state truncated to levels 0..D−1.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentState {
    alpha: Complex64,
    delta: f64,
    alpha_tilde: Complex64,
    family: DeformationFamily,
    coeffs: Vec<Complex64>,
    tail_bound: f64,
    tol: f64,
    lowest: usize,
    log_norm: f64,
    log_norm_recursion: f64,
    log_norm_closed: Option<f64>,
}

impl CoherentState {
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// α̃ = α e^{−iδ}.
    pub fn alpha_tilde(&self) -> Complex64 {
        self.alpha_tilde
    }

    pub fn family(&self) -> &DeformationFamily {
        &self.family
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Upper bound on the discarded probability Σ_{n≥D} |a_n|².
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of retained levels D.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest populated level.
    pub fn lowest_level(&self) -> usize {
        self.lowest
    }

    /// ln Z, where Z = Σ|c_n|² for the unnormalized coefficients with c_L = 1.
    pub fn log_norm(&self) -> f64 {
        self.log_norm
    }

    /// ln Z from the retained terms plus the tail bound.
    pub fn log_norm_recursion(&self) -> f64 {
        self.log_norm_recursion
    }

    /// ln Z from the family's closed form, if there is one.
    pub fn log_norm_closed_form(&self) -> Option<f64> {
        self.log_norm_closed
    }

    /// Normalization constant |a_L| = Z^{−1/2} from the recursion sum.
    pub fn normalization_recursion(&self) -> f64 {
        (-0.5 * self.log_norm_recursion).exp()
    }

    /// Normalization constant from the closed form: 1/√(2e^{|α̃|²} − 1),
    /// e^{−|α̃|²/2} or √(|α̃|/I₁(2|α̃|)).
    pub fn normalization_closed_form(&self) -> Option<f64> {
        self.log_norm_closed.map(|l| (-0.5 * l).exp())
    }

    /// |α̃|².
    pub fn intensity(&self) -> f64 {
        self.alpha_tilde.norm_sqr()
    }

    /// Retained probability Σ_{n<D} |a_n|².
    pub fn retained_mass(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Coefficients embedded in a spinor space of the given dimension.
    pub fn spinor_vector(&self, dim: usize) -> Result<Array1<Complex64>> {
        embed_coefficients(&self.coeffs, dim)
    }
}

/// x·(2 if m = 0)/(f(m+1)²(m+1)): ratio |c_{m+1}|²/|c_m|².
fn step_ratio(family: &DeformationFamily, x: f64, m: usize) -> f64 {
    let f = family.f(m + 1);
    let extra = if m == 0 { 2.0 } else { 1.0 };
    x * extra / (f * f * (m + 1) as f64)
}

/// sup_{j≥m} of the step ratio. Beyond `monotone_from` the ratio decreases.
fn ratio_sup(family: &DeformationFamily, x: f64, m: usize) -> f64 {
    let monotone_from = match family {
        DeformationFamily::Custom(table) => table.len(),
        _ => 0,
    };
    (m..=m.max(monotone_from))
        .map(|j| step_ratio(family, x, j))
        .fold(0.0, f64::max)
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Closed-form ln Z for the built-in families, as a function of x = |α̃|².
pub fn closed_form_log_norm(family: &DeformationFamily, x: f64) -> Option<f64> {
    if x == 0.0 {
        return family.has_closed_form().then_some(0.0);
    }
    match family {
        // 2e^x − 1
        DeformationFamily::Identity => Some(x + (-(-x).exp_m1()).ln_1p()),
        // e^x
        DeformationFamily::ShiftedOne => Some(x),
        // I₁(2r)/r
        DeformationFamily::ShiftedTwo => {
            let r = x.sqrt();
            ln_bessel_i(1, 2.0 * r).ok().map(|l| l - r.ln())
        }
        DeformationFamily::Custom(_) => None,
    }
}

fn validate(alpha: Complex64, delta: f64, tol: f64) -> Result<()> {
    if !(alpha.re.is_finite() && alpha.im.is_finite()) {
        return Err(Error::invalid("alpha", "must be finite"));
    }
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "must be finite"));
    }
    if !(tol > 0.0 && tol <= 1e-4) {
        return Err(Error::invalid("tol", format!("must lie in (0, 1e-4], got {tol}")));
    }
    Ok(())
}

/// Builds the coherent state Θ_f⁻Ψ = αΨ for the given family and phase δ.
pub fn build_state(
    family: DeformationFamily,
    alpha: Complex64,
    delta: f64,
    tol: f64,
) -> Result<CoherentState> {
    family.validate()?;
    validate(alpha, delta, tol)?;
    let alpha_tilde = alpha * Complex64::from_polar(1.0, -delta);
    let x = alpha_tilde.norm_sqr();
    let lowest = family.lowest_level();
    let log_x = x.ln();

    // log |c_m|² for m ≥ L, with c_L = 1
    let mut log_mag = vec![0.0];
    let mut log_sum = 0.0;
    let mut log_tail = f64::NEG_INFINITY;
    if x > 0.0 {
        let tol_log = 2.0 * tol.ln();
        let mut m = lowest;
        loop {
            let last = *log_mag.last().expect("non-empty");
            let sup = ratio_sup(&family, x, m);
            if sup < 1.0 {
                let bound = last + (sup / (1.0 - sup)).ln();
                if bound - log_sum < tol_log {
                    log_tail = bound;
                    break;
                }
            }
            if lowest + log_mag.len() >= MAX_LEVELS {
                return Err(Error::NotSquareSummable {
                    levels: MAX_LEVELS,
                    log_partial_mass: log_sum,
                });
            }
            let f = family.f(m + 1);
            let mut step = log_x - 2.0 * f.ln() - ((m + 1) as f64).ln();
            if m == 0 {
                step += std::f64::consts::LN_2;
            }
            let next = last + step;
            log_mag.push(next);
            log_sum = log_add(log_sum, next);
            m += 1;
        }
    }

    let log_norm_recursion = log_add(log_sum, log_tail);
    let log_norm_closed = closed_form_log_norm(&family, x);
    let log_norm = log_norm_closed.unwrap_or(log_norm_recursion);
    let tail_bound = (log_tail - log_norm).exp();

    let phase = alpha_tilde.arg();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); lowest];
    coeffs.extend(log_mag.iter().enumerate().map(|(j, &lm)| {
        let mag = (0.5 * (lm - log_norm)).exp();
        if j == 0 {
            Complex64::new(mag, 0.0)
        } else {
            Complex64::from_polar(mag, j as f64 * phase)
        }
    }));

    Ok(CoherentState {
        alpha,
        delta,
        alpha_tilde,
        family,
        coeffs,
        tail_bound,
        tol,
        lowest,
        log_norm,
        log_norm_recursion,
        log_norm_closed,
    })
}

/// ‖Θ_f⁻v − αv‖₂ with v the state embedded in a spinor space of dimension
/// `dim` ≥ D + 2.
pub fn eigen_residual(state: &CoherentState, dim: usize) -> Result<f64> {
    let needed = state.truncation() + 2;
    if dim < needed {
        return Err(Error::invalid(
            "dim",
            format!("need dim >= truncation + 2 = {needed}, got {dim}"),
        ));
    }
    let op = deformed_annihilator(state.family(), state.delta(), dim)?;
    let v = state.spinor_vector(dim)?;
    let image = op.apply(&v)?;
    let alpha = state.alpha();
    Ok(image
        .iter()
        .zip(v.iter())
        .map(|(t, s)| (t - alpha * s).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Occupation probability of level n and the Poisson reference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Occupation {
    pub n: usize,
    pub probability: f64,
    pub poisson: f64,
}

/// Poisson pmf e^{−λ} λ^k / k!.
pub fn poisson_pmf(lambda: f64, k: usize) -> f64 {
    if lambda == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let ln_fact: f64 = (2..=k).map(|j| (j as f64).ln()).sum();
    (-lambda + k as f64 * lambda.ln() - ln_fact).exp()
}

/// Last level worth tabulating: covers the retained coefficients and the
/// bulk of the reference Poisson distribution.
fn occupation_extent(state: &CoherentState) -> usize {
    let lambda = state.alpha().norm_sqr();
    let poisson_end = state.lowest_level() + (lambda + 12.0 * lambda.sqrt()).ceil() as usize + 30;
    state.truncation().max(poisson_end)
}

/// P(n) = |a_n|² paired with the Poisson pmf of λ = |α|² shifted to start at
/// the lowest populated level.
pub fn occupation_distribution(state: &CoherentState) -> Vec<Occupation> {
    let lambda = state.alpha().norm_sqr();
    let shift = state.lowest_level();
    let mut out = Vec::new();
    let mut ln_fact = 0.0;
    for n in 0..occupation_extent(state) {
        let probability = state.coeffs().get(n).map_or(0.0, |a| a.norm_sqr());
        let poisson = if n < shift {
            0.0
        } else {
            let k = n - shift;
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            if lambda == 0.0 {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                (-lambda + k as f64 * lambda.ln() - ln_fact).exp()
            }
        };
        out.push(Occupation {
            n,
            probability,
            poisson,
        });
    }
    out
}

/// Total-variation distance ½Σ_{n≥from} |P(n) − Q(n)| between the occupation
/// and its shifted Poisson reference.
pub fn poisson_distance(state: &CoherentState, from_level: usize) -> f64 {
    0.5 * occupation_distribution(state)
        .iter()
        .filter(|o| o.n >= from_level)
        .map(|o| (o.probability - o.poisson).abs())
        .sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn state(family: DeformationFamily, alpha: Complex64, delta: f64) -> CoherentState {
        build_state(family, alpha, delta, DEFAULT_TOL).unwrap()
    }

    #[test]
    fn vacuum_states() {
        let zero = Complex64::new(0.0, 0.0);
        let cases = [
            (DeformationFamily::Identity, 0),
            (DeformationFamily::ShiftedOne, 1),
            (DeformationFamily::ShiftedTwo, 2),
        ];
        for (family, level) in cases {
            let s = state(family, zero, 0.4);
            assert_eq!(s.truncation(), level + 1);
            assert_eq!(s.coeffs()[level], Complex64::new(1.0, 0.0));
            assert_eq!(s.tail_bound(), 0.0);
            assert!(eigen_residual(&s, level + 3).unwrap() < 1e-14);
        }
    }

    #[test]
    fn identity_alpha_two_weights() {
        let s = state(DeformationFamily::Identity, Complex64::new(2.0, 0.0), 0.0);
        let z = 2.0 * 4f64.exp() - 1.0;
        let mut fact = 1.0;
        for n in 1..20 {
            fact *= n as f64;
            let expected = 2.0 * 4f64.powi(n as i32) / fact / z;
            assert!((s.coeffs()[n].norm_sqr() - expected).abs() < 1e-14);
        }
        assert!((s.coeffs()[0].norm_sqr() - 1.0 / z).abs() < 1e-15);
    }

    #[test]
    fn normalization_and_tail() {
        for family in [
            DeformationFamily::Identity,
            DeformationFamily::ShiftedOne,
            DeformationFamily::ShiftedTwo,
        ] {
            let s = state(family, Complex64::from_polar(3.0, 0.7), 0.2);
            let total = s.retained_mass() + s.tail_bound();
            assert!((total - 1.0).abs() < 1e-10, "{total}");
            assert!(s.tail_bound() < 1e-24);
        }
    }

    #[test]
    fn recursion_holds() {
        let family = DeformationFamily::ShiftedTwo;
        let s = state(family.clone(), Complex64::from_polar(2.5, 1.1), PI / 3.0);
        let at = s.alpha_tilde();
        let a = s.coeffs();
        for n in 2..a.len() - 1 {
            let lhs = a[n + 1] * family.f(n + 1) * ((n + 1) as f64).sqrt();
            let rhs = at * a[n];
            assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn delta_covariance_is_exact() {
        let alpha = Complex64::from_polar(1.7, 0.3);
        let delta = 0.9;
        let a = state(DeformationFamily::Identity, alpha, delta);
        let b = state(
            DeformationFamily::Identity,
            alpha * Complex64::from_polar(1.0, -delta),
            0.0,
        );
        assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn custom_matches_builtin() {
        let table: Vec<f64> = (1..=400).map(|n| DeformationFamily::ShiftedOne.f(n)).collect();
        let custom = state(DeformationFamily::Custom(table), Complex64::new(1.5, 0.5), 0.0);
        let builtin = state(DeformationFamily::ShiftedOne, Complex64::new(1.5, 0.5), 0.0);
        assert!(custom.log_norm_closed_form().is_none());
        for (a, b) in custom.coeffs().iter().zip(builtin.coeffs()) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn slow_custom_family_hits_cap() {
        let family = DeformationFamily::Custom(vec![1e-3]);
        let err = build_state(family, Complex64::new(3.0, 0.0), 0.0, DEFAULT_TOL).unwrap_err();
        assert!(matches!(err, Error::NotSquareSummable { .. }));
    }

    #[test]
    fn bad_inputs_rejected() {
        let a = Complex64::new(1.0, 0.0);
        assert!(build_state(DeformationFamily::Identity, a, 0.0, 0.0).is_err());
        assert!(build_state(DeformationFamily::Identity, a, 0.0, 1e-3).is_err());
        assert!(build_state(DeformationFamily::Identity, a, f64::NAN, 1e-12).is_err());
        let s = state(DeformationFamily::Identity, a, 0.0);
        assert!(eigen_residual(&s, s.truncation() + 1).is_err());
    }

    #[test]
    fn large_alpha_stays_finite() {
        let s = state(DeformationFamily::ShiftedTwo, Complex64::new(25.0, 0.0), 0.0);
        assert!(s.coeffs().iter().all(|a| a.norm().is_finite()));
        assert!((s.retained_mass() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn poisson_pmf_sums_to_one() {
        let total: f64 = (0..80).map(|k| poisson_pmf(9.0, k)).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(poisson_pmf(0.0, 0), 1.0);
    }
}

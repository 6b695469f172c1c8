//! Special functions and quadrature shared by the physics modules.
//!
//! Only the *normalized* oscillator function
//! φ_n(ξ) = (2ⁿ n! √π)^(−1/2) e^(−ξ²/2) H_n(ξ) is ever evaluated; raw Hermite
//! polynomials overflow in double precision long before the level counts used
//! by coherent-state sums.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Recurrence values are renormalized once they exceed this magnitude.
const RESCALE_ABOVE: f64 = 1e150;

/// Below this argument `bessel_i` sums the power series, above it uses the
/// exponentially scaled asymptotic expansion.
pub const BESSEL_SWITCHOVER: f64 = 15.0;

/// Default half-width of the ξ-window used to integrate bound states.
pub const DEFAULT_XI_WINDOW: f64 = 25.0;

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite, got {v}")))
    }
}

/// Walks φ_0(ξ), …, φ_{n_max}(ξ) with the three-term recurrence
///
/// φ_{n+1} = ξ √(2/(n+1)) φ_n − √(n/(n+1)) φ_{n−1},
///
/// carrying the Gaussian factor and any renormalization as a separate
/// logarithmic scale so that neither the seed underflows nor the forbidden
/// region overflows.
fn walk_hermite(n_max: usize, xi: f64, mut visit: impl FnMut(usize, f64)) {
    let mut log_scale = -0.5 * xi * xi;
    let mut prev = 0.0_f64;
    let mut cur = PI.powf(-0.25);
    visit(0, unscale(cur, log_scale));
    for n in 0..n_max {
        let nf = n as f64;
        let next = xi * (2.0 / (nf + 1.0)).sqrt() * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE_ABOVE {
            let s = cur.abs();
            cur /= s;
            prev /= s;
            log_scale += s.ln();
        }
        visit(n + 1, unscale(cur, log_scale));
    }
}

#[inline]
fn unscale(v: f64, log_scale: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else if log_scale == 0.0 {
        v
    } else {
        v.signum() * (v.abs().ln() + log_scale).exp()
    }
}

/// Normalized Hermite (oscillator) function φ_n(ξ).
pub fn hermite_function(n: usize, xi: f64) -> Result<f64> {
    check_finite("xi", xi)?;
    let mut out = 0.0;
    walk_hermite(n, xi, |k, v| {
        if k == n {
            out = v;
        }
    });
    Ok(out)
}

/// All of φ_0(ξ), …, φ_{n_max}(ξ) in one recurrence pass.
pub fn hermite_functions(n_max: usize, xi: f64) -> Result<Vec<f64>> {
    check_finite("xi", xi)?;
    let mut out = Vec::with_capacity(n_max + 1);
    walk_hermite(n_max, xi, |_, v| out.push(v));
    Ok(out)
}

/// Derivative dφ_n/dξ = √(n/2) φ_{n−1} − √((n+1)/2) φ_{n+1}.
pub fn hermite_function_derivative(n: usize, xi: f64) -> Result<f64> {
    let phi = hermite_functions(n + 1, xi)?;
    let lower = if n == 0 { 0.0 } else { phi[n - 1] };
    Ok((n as f64 / 2.0).sqrt() * lower - ((n as f64 + 1.0) / 2.0).sqrt() * phi[n + 1])
}

/// Power series Σ_m (x/2)^{2m+ν} / (m! (m+ν)!). Accurate for moderate x;
/// overflows beyond x ≈ 700.
pub fn bessel_i_series(nu: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    let half = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=nu {
        term *= half / k as f64;
    }
    let q = half * half;
    let mut sum = term;
    let mut m = 0.0;
    loop {
        m += 1.0;
        term *= q / (m * (m + nu as f64));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    sum
}

/// Asymptotic expansion of e^(−x) I_ν(x) for large x, truncated at its
/// smallest term.
pub fn bessel_i_asymptotic_scaled(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * (nu as f64).powi(2);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    for k in 1..200 {
        let odd = (2 * k - 1) as f64;
        let next = -term * (mu - odd * odd) / (8.0 * k as f64 * x);
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

fn check_bessel_args(nu: u32, x: f64) -> Result<()> {
    if !(1..=2).contains(&nu) {
        return Err(Error::invalid("nu", format!("order must be 1 or 2, got {nu}")));
    }
    check_finite("x", x)?;
    if x < 0.0 {
        return Err(Error::invalid("x", format!("must be non-negative, got {x}")));
    }
    Ok(())
}

/// Modified Bessel function of the first kind I_ν(x), ν ∈ {1, 2}, x ≥ 0.
pub fn bessel_i(nu: u32, x: f64) -> Result<f64> {
    check_bessel_args(nu, x)?;
    if x < BESSEL_SWITCHOVER {
        Ok(bessel_i_series(nu, x))
    } else {
        Ok(bessel_i_asymptotic_scaled(nu, x) * x.exp())
    }
}

/// Exponentially scaled e^(−x) I_ν(x); finite for every x ≥ 0.
pub fn bessel_i_scaled(nu: u32, x: f64) -> Result<f64> {
    check_bessel_args(nu, x)?;
    if x < BESSEL_SWITCHOVER {
        Ok(bessel_i_series(nu, x) * (-x).exp())
    } else {
        Ok(bessel_i_asymptotic_scaled(nu, x))
    }
}

/// ln I_ν(x) for x > 0, without overflow at large x.
pub fn ln_bessel_i(nu: u32, x: f64) -> Result<f64> {
    check_bessel_args(nu, x)?;
    if x == 0.0 {
        return Err(Error::invalid("x", "ln I_nu(0) is -inf"));
    }
    if x < BESSEL_SWITCHOVER {
        Ok(bessel_i_series(nu, x).ln())
    } else {
        Ok(bessel_i_asymptotic_scaled(nu, x).ln() + x)
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1].
fn gauss_legendre_reference(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(z) and P_{n-1}(z) by upward recurrence
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule on [a, b].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    domain: (f64, f64),
    order: usize,
    panels: usize,
}

impl QuadratureRule {
    pub const DEFAULT_ORDER: usize = 16;

    pub fn composite(order: usize, a: f64, b: f64, panels: usize) -> Result<Self> {
        check_finite("a", a)?;
        check_finite("b", b)?;
        if a >= b {
            return Err(Error::invalid("domain", format!("need a < b, got [{a}, {b}]")));
        }
        if order == 0 || panels == 0 {
            return Err(Error::invalid("order", "order and panel count must be positive"));
        }
        let (ref_nodes, ref_weights) = gauss_legendre_reference(order);
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(order * panels);
        let mut weights = Vec::with_capacity(order * panels);
        for p in 0..panels {
            let lo = a + h * p as f64;
            let mid = lo + 0.5 * h;
            for (t, w) in ref_nodes.iter().zip(&ref_weights) {
                nodes.push(mid + 0.5 * h * t);
                weights.push(0.5 * h * w);
            }
        }
        Ok(Self {
            nodes,
            weights,
            domain: (a, b),
            order,
            panels,
        })
    }

    /// Default-order rule with a single panel.
    pub fn new(a: f64, b: f64) -> Result<Self> {
        Self::composite(Self::DEFAULT_ORDER, a, b, 1)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Same rule with twice as many panels.
    pub fn refined(&self) -> Self {
        Self::composite(self.order, self.domain.0, self.domain.1, self.panels * 2)
            .expect("refining a valid rule")
    }

    /// Single application of the rule, without refinement.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let mut sum = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            let v = f(x);
            if !v.is_finite() {
                return Err(Error::invalid("f", format!("integrand is {v} at x = {x}")));
            }
            sum += w * v;
        }
        Ok(sum)
    }
}

/// Refinement limit used by [`integrate`].
pub const MAX_PANELS: usize = 1 << 14;

/// Integrates `f` with panel doubling, starting from `rule`, until two
/// successive estimates differ by less than 1e-10.
pub fn integrate<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule) -> Result<f64> {
    integrate_to(f, rule, 1e-10)
}

pub fn integrate_to<F: Fn(f64) -> f64>(f: F, rule: &QuadratureRule, abs_tol: f64) -> Result<f64> {
    let mut rule = rule.clone();
    let mut previous = rule.apply(&f)?;
    while rule.panels() < MAX_PANELS {
        rule = rule.refined();
        let last = rule.apply(&f)?;
        if (last - previous).abs() < abs_tol {
            return Ok(last);
        }
        previous = last;
    }
    let last = rule.refined().apply(&f)?;
    Err(Error::QuadratureNotConverged { previous, last })
}

/// Half-width of the ξ-window that captures bound states up to level `n_max`.
pub fn xi_window(n_max: usize) -> f64 {
    if n_max > 250 {
        (2.0 * n_max as f64 + 1.0).sqrt() + 8.0
    } else {
        DEFAULT_XI_WINDOW
    }
}

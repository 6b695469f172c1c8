//! Truncated Fock-space operator algebra.
//!
//! Scalar-sector operators act on the oscillator basis ψ_0 … ψ_{D−1}. Spinor
//! vectors of dimension 2D store the upper component in the first D slots
//! and the lower component in the last D, each expanded in the same scalar
//! basis. Pseudo-spinor basis states Ψ_n are therefore
//! `Ψ_0 = (0, iψ_0)` and `Ψ_n = (ψ_{n−1}, iψ_n)/√2`.

use ndarray::{s, Array1, Array2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sector {
    Scalar,
    Spinor,
}

impl Sector {
    fn multiplicity(self) -> usize {
        match self {
            Sector::Scalar => 1,
            Sector::Spinor => 2,
        }
    }
}

/// Dense truncated operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    sector: Sector,
    entries: Array2<Complex64>,
}

impl FockOperator {
    pub fn from_entries(dim: usize, sector: Sector, entries: Array2<Complex64>) -> Result<Self> {
        let side = dim * sector.multiplicity();
        if entries.dim() != (side, side) {
            return Err(Error::ShapeMismatch(format!(
                "{sector:?} operator of dim {dim} needs a {side}x{side} matrix, got {:?}",
                entries.dim()
            )));
        }
        Ok(Self {
            dim,
            sector,
            entries,
        })
    }

    fn zeros(dim: usize, sector: Sector) -> Self {
        let side = dim * sector.multiplicity();
        Self {
            dim,
            sector,
            entries: Array2::zeros((side, side)),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn entries(&self) -> &Array2<Complex64> {
        &self.entries
    }

    pub fn side(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            dim: self.dim,
            sector: self.sector,
            entries: self.entries.t().mapv(|z| z.conj()),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.sector != other.sector {
            return Err(Error::ShapeMismatch(format!(
                "{:?}/dim {} vs {:?}/dim {}",
                self.sector, self.dim, other.sector, other.dim
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            dim: self.dim,
            sector: self.sector,
            entries: self.entries.dot(&other.entries),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            dim: self.dim,
            sector: self.sector,
            entries: &self.entries - &other.entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        Ok(Self {
            dim: self.dim,
            sector: self.sector,
            entries: &self.entries + &other.entries,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            sector: self.sector,
            entries: self.entries.mapv(|z| z * factor),
        }
    }

    pub fn apply(&self, v: &Array1<Complex64>) -> Result<Array1<Complex64>> {
        if v.len() != self.side() {
            return Err(Error::ShapeMismatch(format!(
                "vector of length {} for operator of side {}",
                v.len(),
                self.side()
            )));
        }
        Ok(self.entries.dot(v))
    }

    /// ⟨v|A|v⟩.
    pub fn expectation(&self, v: &Array1<Complex64>) -> Result<Complex64> {
        let av = self.apply(v)?;
        Ok(v.iter().zip(av.iter()).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        self.entries.diag().to_vec()
    }

    /// Block-diagonal spinor operator A ⊗ 𝕀 acting on both components.
    pub fn on_both_components(&self) -> Result<Self> {
        if self.sector != Sector::Scalar {
            return Err(Error::ShapeMismatch("expected a scalar-sector operator".into()));
        }
        let d = self.dim;
        let mut out = Self::zeros(d, Sector::Spinor);
        out.entries.slice_mut(s![..d, ..d]).assign(&self.entries);
        out.entries.slice_mut(s![d.., d..]).assign(&self.entries);
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ladder {
    Minus,
    Plus,
}

fn check_dim(dim: usize, min: usize) -> Result<()> {
    if dim < min {
        return Err(Error::invalid("dim", format!("need dim >= {min}, got {dim}")));
    }
    Ok(())
}

/// θ⁻ (lowering, θ⁻ψ_n = √n ψ_{n−1}) or θ⁺ = (θ⁻)†.
pub fn ladder(dim: usize, which: Ladder) -> Result<FockOperator> {
    check_dim(dim, 2)?;
    let mut op = FockOperator::zeros(dim, Sector::Scalar);
    for m in 0..dim - 1 {
        op.entries[[m, m + 1]] = Complex64::new(((m + 1) as f64).sqrt(), 0.0);
    }
    Ok(match which {
        Ladder::Minus => op,
        Ladder::Plus => op.adjoint(),
    })
}

/// N = diag(0, 1, …, D−1).
pub fn number(dim: usize) -> Result<FockOperator> {
    diagonal_operator(dim, |n| n as f64)
}

/// Scalar-sector diagonal operator g(N).
pub fn diagonal_operator(dim: usize, g: impl Fn(usize) -> f64) -> Result<FockOperator> {
    check_dim(dim, 1)?;
    let mut op = FockOperator::zeros(dim, Sector::Scalar);
    for n in 0..dim {
        op.entries[[n, n]] = Complex64::new(g(n), 0.0);
    }
    Ok(op)
}

/// [a, b] = ab − ba.
pub fn commutator(a: &FockOperator, b: &FockOperator) -> Result<FockOperator> {
    a.matmul(b)?.sub(&b.matmul(a)?)
}

/// The deformation function f(N) of the annihilation operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeformationFamily {
    /// f(n) = 1.
    Identity,
    /// f(n) = √(n−1)/√n, so f(N+1) = √N/√(N+1) and f(1) = 0.
    #[serde(rename = "shifted1")]
    ShiftedOne,
    /// f(n) = √((n−2)(n−1))/√n, so f(N+2) = √N√(N+1)/√(N+2) and f(1) = f(2) = 0.
    #[serde(rename = "shifted2")]
    ShiftedTwo,
    /// Tabulated f(1), f(2), …; the last entry is held constant beyond the table.
    Custom(Vec<f64>),
}

impl DeformationFamily {
    /// f(n); f(0) is never used by the operator and reported as 0.
    pub fn f(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let nf = n as f64;
        match self {
            DeformationFamily::Identity => 1.0,
            DeformationFamily::ShiftedOne => ((nf - 1.0) / nf).sqrt(),
            DeformationFamily::ShiftedTwo => {
                if n < 2 {
                    0.0
                } else {
                    ((nf - 2.0) * (nf - 1.0) / nf).sqrt()
                }
            }
            DeformationFamily::Custom(table) => {
                let last = table.len().saturating_sub(1);
                table.get(n - 1).copied().unwrap_or_else(|| table[last])
            }
        }
    }

    /// Ω(n) = (n+1) f²(n+1) − n f²(n).
    pub fn omega(&self, n: usize) -> f64 {
        let nf = n as f64;
        (nf + 1.0) * self.f(n + 1).powi(2) - nf * self.f(n).powi(2)
    }

    /// Number of leading zeros f(1) = … = f(L) = 0: the lowest level a
    /// coherent state can populate.
    pub fn lowest_level(&self) -> usize {
        match self {
            DeformationFamily::Identity => 0,
            DeformationFamily::ShiftedOne => 1,
            DeformationFamily::ShiftedTwo => 2,
            DeformationFamily::Custom(t) => t.iter().take_while(|&&v| v == 0.0).count(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let DeformationFamily::Custom(table) = self {
            if table.is_empty() {
                return Err(Error::invalid("family", "custom table is empty"));
            }
            if table.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid("family", "custom f values must be finite and >= 0"));
            }
            let lead = self.lowest_level();
            if lead == table.len() {
                return Err(Error::invalid("family", "custom table is identically zero"));
            }
            if table[lead..].contains(&0.0) {
                return Err(Error::invalid(
                    "family",
                    "custom f may vanish only on a leading run f(1..=L)",
                ));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            DeformationFamily::Identity => "identity",
            DeformationFamily::ShiftedOne => "shifted1",
            DeformationFamily::ShiftedTwo => "shifted2",
            DeformationFamily::Custom(_) => "custom",
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self, DeformationFamily::Custom(_))
    }
}

/// Deformed spinor annihilation operator
///
/// ```text
/// Θ_f⁻ = [ cos δ √(N+2)/√(N+1) f(N+2) θ⁻    sin δ f(N+2)/√(N+1) (θ⁻)² ]
///        [ −sin δ f(N+1) √(N+1)              cos δ f(N+1) θ⁻          ]
/// ```
///
/// Functions of N multiply from the left, i.e. they act after the shift.
/// This ordering gives Θ_f⁻Ψ_n = f(n) e^{iδ} √n Ψ_{n−1} / √(2^{δ₁ₙ}).
pub fn deformed_annihilator(
    family: &DeformationFamily,
    delta: f64,
    dim: usize,
) -> Result<FockOperator> {
    check_dim(dim, 3)?;
    family.validate()?;
    if !delta.is_finite() {
        return Err(Error::invalid("delta", "phase must be finite"));
    }
    let (sin, cos) = delta.sin_cos();
    let f = |n: usize| family.f(n);
    let mut op = FockOperator::zeros(dim, Sector::Spinor);
    let e = &mut op.entries;
    for m in 0..dim {
        let mf = m as f64;
        // upper-left: row m couples to ψ_{m+1}
        if m + 1 < dim {
            let shift = (mf + 1.0).sqrt();
            e[[m, m + 1]] = Complex64::new(cos * ((mf + 2.0) / (mf + 1.0)).sqrt() * f(m + 2) * shift, 0.0);
            e[[dim + m, dim + m + 1]] = Complex64::new(cos * f(m + 1) * shift, 0.0);
        }
        // upper-right: row m couples to lower ψ_{m+2}
        if m + 2 < dim {
            let shift2 = ((mf + 1.0) * (mf + 2.0)).sqrt();
            e[[m, dim + m + 2]] = Complex64::new(sin * f(m + 2) / (mf + 1.0).sqrt() * shift2, 0.0);
        }
        // lower-left: diagonal
        e[[dim + m, m]] = Complex64::new(-sin * f(m + 1) * (mf + 1.0).sqrt(), 0.0);
    }
    Ok(op)
}

/// Θ_f⁺ = (Θ_f⁻)†.
pub fn deformed_creator(family: &DeformationFamily, delta: f64, dim: usize) -> Result<FockOperator> {
    Ok(deformed_annihilator(family, delta, dim)?.adjoint())
}

/// Basis pseudo-spinor Ψ_n embedded in the 2·dim spinor space.
pub fn spinor_basis_vector(n: usize, dim: usize) -> Result<Array1<Complex64>> {
    if n >= dim {
        return Err(Error::invalid("n", format!("level {n} does not fit in dim {dim}")));
    }
    let mut v = Array1::from_elem(2 * dim, ZERO);
    if n == 0 {
        v[dim] = Complex64::new(0.0, 1.0);
    } else {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        v[n - 1] = Complex64::new(r, 0.0);
        v[dim + n] = Complex64::new(0.0, r);
    }
    Ok(v)
}

/// Σ a_n Ψ_n embedded in the 2·dim spinor space.
pub fn embed_coefficients(coeffs: &[Complex64], dim: usize) -> Result<Array1<Complex64>> {
    if coeffs.len() > dim {
        return Err(Error::invalid(
            "dim",
            format!("{} coefficients do not fit in dim {dim}", coeffs.len()),
        ));
    }
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let i = Complex64::new(0.0, 1.0);
    let mut v = Array1::from_elem(2 * dim, ZERO);
    for (n, &a) in coeffs.iter().enumerate() {
        if n == 0 {
            v[dim] += i * a;
        } else {
            v[n - 1] += a * r;
            v[dim + n] += i * a * r;
        }
    }
    Ok(v)
}

/// s_q = (θ⁻ + (−1)^q θ⁺)/(√2 i^q): position (q = 0) or momentum (q = 1).
pub fn s_operator(q: u8, dim: usize) -> Result<FockOperator> {
    let (sign, phase) = match q {
        0 => (1.0, Complex64::new(1.0, 0.0)),
        1 => (-1.0, Complex64::new(0.0, 1.0)),
        _ => return Err(Error::invalid("q", format!("must be 0 or 1, got {q}"))),
    };
    let minus = ladder(dim, Ladder::Minus)?;
    let plus = ladder(dim, Ladder::Plus)?;
    let sum = minus.add(&plus.scale(Complex64::new(sign, 0.0)))?;
    Ok(sum.scale(1.0 / (phase * std::f64::consts::SQRT_2)))
}

/// s_q² = ½[2N + 1 + (−1)^q ((θ⁻)² + (θ⁺)²)] built from its closed form.
pub fn s_squared_operator(q: u8, dim: usize) -> Result<FockOperator> {
    let sign = match q {
        0 => 1.0,
        1 => -1.0,
        _ => return Err(Error::invalid("q", format!("must be 0 or 1, got {q}"))),
    };
    let minus = ladder(dim, Ladder::Minus)?;
    let plus = ladder(dim, Ladder::Plus)?;
    let shifts = minus.matmul(&minus)?.add(&plus.matmul(&plus)?)?;
    let base = diagonal_operator(dim, |n| 2.0 * n as f64 + 1.0)?;
    Ok(base
        .add(&shifts.scale(Complex64::new(sign, 0.0)))?
        .scale(Complex64::new(0.5, 0.0)))
}

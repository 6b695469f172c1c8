//! Landau levels and Barut-Girardello nonlinear coherent states for charge
//! carriers in anisotropic 2D Dirac materials.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: normalized Hermite functions, modified Bessel functions and
//!   composite Gauss-Legendre quadrature.
//! * [`landau`]: anisotropy parameters, the Landau spectrum, eigenfunctions,
//!   spinor densities, density maxima and the strain to anisotropy mapping.
//! * [`fockalg`]: truncated Fock-space ladder operators and the deformed
//!   spinor annihilation operator.
//! * [`nlcs`]: nonlinear coherent states with certified series truncation.
//! * [`observables`]: densities, position/momentum moments, uncertainty
//!   products, mean energies (closed-form series and matrix oracle).
//! * [`cli`]: configuration, sweeps and CSV/JSON artifacts behind the
//!   `dirac-nlcs` binary.
//!
//! Natural units are used throughout: ħ = c = e = 1, v_F = 1 and ω_B = 2·B₀.

pub mod cli;
pub mod error;
pub mod fockalg;
pub mod landau;
pub mod nlcs;
pub mod observables;
pub mod specfun;

pub use error::{Error, Result};
pub use fockalg::{DeformationFamily, FockOperator, Sector};
pub use landau::{AnisotropyParams, LandauLevel, SpinorProfile, StrainDirection};
pub use nlcs::{build_state, CoherentState};
pub use observables::{Method, ObservableReport};

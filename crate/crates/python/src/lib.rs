use dirac_nlcs::fockalg::DeformationFamily;
use dirac_nlcs::landau::{self, AnisotropyParams, StrainDirection};
use dirac_nlcs::nlcs::{self, DEFAULT_TOL};
use dirac_nlcs::{observables, specfun, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument { .. } | Error::ShapeMismatch(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn family_from(name: &str, table: Option<Vec<f64>>) -> PyResult<DeformationFamily> {
    match (name, table) {
        ("identity", None) => Ok(DeformationFamily::Identity),
        ("shifted1", None) => Ok(DeformationFamily::ShiftedOne),
        ("shifted2", None) => Ok(DeformationFamily::ShiftedTwo),
        ("custom", Some(t)) => Ok(DeformationFamily::Custom(t)),
        ("custom", None) => Err(PyValueError::new_err("custom family needs a table of f(1), f(2), ...")),
        (other, _) => Err(PyValueError::new_err(format!(
            "unknown family `{other}` (identity, shifted1, shifted2, custom)"
        ))),
    }
}

/// Anisotropic sample parameters in natural units.
#[pyclass(name = "Params", module = "dirac_nlcs_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: AnisotropyParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (zeta = 1.0, b0 = 0.5, k = 1.0, delta = 0.0))]
    fn new(zeta: f64, b0: f64, k: f64, delta: f64) -> PyResult<Self> {
        let inner = AnisotropyParams::from_zeta(zeta, b0, k, delta).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (v_xx, v_yy, b0 = 0.5, k = 1.0, delta = 0.0))]
    fn from_velocities(v_xx: f64, v_yy: f64, b0: f64, k: f64, delta: f64) -> PyResult<Self> {
        let inner = AnisotropyParams::from_velocities(v_xx, v_yy, b0, k, delta).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (direction, epsilon, nu = 0.15, beta = 2.0, b0 = 0.5, k = 1.0, delta = 0.0))]
    fn from_strain(
        direction: &str,
        epsilon: f64,
        nu: f64,
        beta: f64,
        b0: f64,
        k: f64,
        delta: f64,
    ) -> PyResult<Self> {
        let dir = match direction {
            "x" => StrainDirection::X,
            "y" => StrainDirection::Y,
            other => return Err(PyValueError::new_err(format!("direction must be x or y, got {other}"))),
        };
        let inner = landau::strain_to_params(dir, epsilon, nu, beta, b0, k, delta).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn v_xx(&self) -> f64 {
        self.inner.v_xx()
    }

    #[getter]
    fn v_yy(&self) -> f64 {
        self.inner.v_yy()
    }

    #[getter]
    fn zeta(&self) -> f64 {
        self.inner.zeta()
    }

    #[getter]
    fn b0(&self) -> f64 {
        self.inner.b0()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta()
    }

    #[getter]
    fn omega_b(&self) -> f64 {
        self.inner.omega_b()
    }

    #[getter]
    fn omega_zeta(&self) -> f64 {
        self.inner.omega_zeta()
    }

    #[getter]
    fn x0(&self) -> f64 {
        self.inner.x0()
    }

    fn __repr__(&self) -> String {
        format!(
            "Params(v_xx={}, v_yy={}, zeta={}, b0={}, k={}, delta={})",
            self.inner.v_xx(),
            self.inner.v_yy(),
            self.inner.zeta(),
            self.inner.b0(),
            self.inner.k(),
            self.inner.delta()
        )
    }
}

/// Nonlinear coherent state Θ⁻Ψ = αΨ.
#[pyclass(name = "CoherentState", module = "dirac_nlcs_py", frozen)]
struct PyCoherentState {
    inner: nlcs::CoherentState,
}

#[pymethods]
impl PyCoherentState {
    #[new]
    #[pyo3(signature = (family, alpha, delta = 0.0, tol = DEFAULT_TOL, table = None))]
    fn new(family: &str, alpha: Complex64, delta: f64, tol: f64, table: Option<Vec<f64>>) -> PyResult<Self> {
        let family = family_from(family, table)?;
        let inner = nlcs::build_state(family, alpha, delta, tol).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family().name()
    }

    #[getter]
    fn alpha(&self) -> Complex64 {
        self.inner.alpha()
    }

    #[getter]
    fn alpha_tilde(&self) -> Complex64 {
        self.inner.alpha_tilde()
    }

    #[getter]
    fn tail_bound(&self) -> f64 {
        self.inner.tail_bound()
    }

    #[getter]
    fn truncation(&self) -> usize {
        self.inner.truncation()
    }

    fn coeffs(&self) -> Vec<Complex64> {
        self.inner.coeffs().to_vec()
    }

    /// List of (n, P(n), Poisson reference).
    fn occupation(&self) -> Vec<(usize, f64, f64)> {
        nlcs::occupation_distribution(&self.inner)
            .into_iter()
            .map(|o| (o.n, o.probability, o.poisson))
            .collect()
    }

    #[pyo3(signature = (dim = None))]
    fn eigen_residual(&self, dim: Option<usize>) -> PyResult<f64> {
        let dim = dim.unwrap_or(self.inner.truncation() + 2);
        nlcs::eigen_residual(&self.inner, dim).map_err(to_py)
    }

    #[pyo3(signature = (params = None))]
    fn uncertainty<'py>(&self, py: Python<'py>, params: Option<&PyParams>) -> PyResult<Bound<'py, PyDict>> {
        let params = params.map_or_else(AnisotropyParams::pristine, |p| p.inner);
        let r = observables::report(&self.inner, &params).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("mean_xi", r.mean_xi)?;
        d.set_item("mean_p", r.mean_p)?;
        d.set_item("var_xi", r.var_xi)?;
        d.set_item("var_p", r.var_p)?;
        d.set_item("hur", r.hur)?;
        d.set_item("var_x", r.var_x)?;
        d.set_item("method", format!("{:?}", r.method).to_lowercase())?;
        Ok(d)
    }

    /// (pristine, anisotropic) mean energy.
    fn mean_energy(&self, params: &PyParams) -> (f64, f64) {
        observables::mean_energy(&self.inner, &params.inner)
    }

    fn density(&self, params: &PyParams, x: Vec<f64>) -> PyResult<Vec<f64>> {
        Ok(observables::density(&self.inner, &params.inner, &x)
            .map_err(to_py)?
            .density)
    }

    fn __repr__(&self) -> String {
        format!(
            "CoherentState(family={}, alpha={}, delta={}, levels={})",
            self.inner.family().name(),
            self.inner.alpha(),
            self.inner.delta(),
            self.inner.truncation()
        )
    }
}

#[pyfunction]
fn hermite_function(n: usize, xi: f64) -> PyResult<f64> {
    specfun::hermite_function(n, xi).map_err(to_py)
}

#[pyfunction]
fn bessel_i(nu: u32, x: f64) -> PyResult<f64> {
    specfun::bessel_i(nu, x).map_err(to_py)
}

#[pyfunction]
fn energy(params: &PyParams, n: usize) -> f64 {
    landau::energy(&params.inner, n)
}

#[pyfunction]
fn eigenfunction(params: &PyParams, n: usize, x: f64) -> PyResult<f64> {
    landau::eigenfunction(&params.inner, n, x).map_err(to_py)
}

#[pyfunction]
fn spinor_density(params: &PyParams, n: usize, x: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(landau::spinor_state(&params.inner, n, &x).map_err(to_py)?.density)
}

#[pyfunction]
fn density_maxima(params: &PyParams, n: usize) -> PyResult<(f64, f64)> {
    landau::density_maxima(&params.inner, n).map_err(to_py)
}

#[pymodule]
fn dirac_nlcs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyCoherentState>()?;
    m.add_function(wrap_pyfunction!(hermite_function, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add_function(wrap_pyfunction!(eigenfunction, m)?)?;
    m.add_function(wrap_pyfunction!(spinor_density, m)?)?;
    m.add_function(wrap_pyfunction!(density_maxima, m)?)?;
    Ok(())
}

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use mu_entropy::exact::q_int;
use mu_entropy::exp_integrals::{AffinePiece, PLConvexFunction};
use mu_entropy::geodesic_ray::{conservation_drift, w_along_ray, ToricRay};
use mu_entropy::na_entropy::{self as na, EntropyParams, ToricTestConfig};
use mu_entropy::optimizer;
use mu_entropy::polytope::{self, PolytopeJson};
use mu_entropy::toric_metric::{self as tm, cheb, SymplecticPotential1D};

fn err(e: mu_entropy::Error) -> PyErr {
    if e.is_input_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

/// Lattice polytope. Build from vertices, halfspaces `<n, x> <= c`, or JSON.
#[pyclass(name = "Polytope", frozen)]
struct PyPolytope {
    inner: polytope::Polytope,
}

#[pymethods]
impl PyPolytope {
    #[staticmethod]
    fn interval(a: i64) -> PyResult<Self> {
        Ok(PyPolytope { inner: polytope::Polytope::interval(q_int(a)).map_err(err)? })
    }

    #[staticmethod]
    fn from_vertices(vertices: Vec<Vec<i64>>) -> PyResult<Self> {
        let pts = vertices.into_iter().map(|v| v.into_iter().map(q_int).collect()).collect();
        Ok(PyPolytope { inner: polytope::Polytope::from_vertices(pts).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: PolytopeJson = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyPolytope { inner: j.build().map_err(err)? })
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner.to_json()).expect("polytope json")
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.inner.volume_f64()
    }

    #[getter]
    fn vertices(&self) -> Vec<Vec<f64>> {
        self.inner.vertices_f64()
    }

    fn __repr__(&self) -> String {
        format!("Polytope(dim={}, vertices={:?})", self.inner.dim(), self.inner.vertices_f64())
    }
}

/// Convex piecewise-linear function `max_i (<g_i, x> + c_i)`.
#[pyclass(name = "PLFunction", frozen)]
struct PyPL {
    inner: PLConvexFunction,
}

#[pymethods]
impl PyPL {
    #[new]
    fn new(pieces: Vec<(Vec<f64>, f64)>) -> PyResult<Self> {
        let ps = pieces.into_iter().map(|(gradient, constant)| AffinePiece { gradient, constant }).collect();
        Ok(PyPL { inner: PLConvexFunction::new(ps).map_err(err)? })
    }

    fn __call__(&self, x: Vec<f64>) -> f64 {
        self.inner.eval(&x)
    }

    #[getter]
    fn pieces(&self) -> Vec<(Vec<f64>, f64)> {
        self.inner.pieces.iter().map(|p| (p.gradient.clone(), p.constant)).collect()
    }
}

/// Toric test configuration `(P, q)` with `q <= 0` on `P`.
#[pyclass(name = "TestConfiguration", frozen)]
struct PyTestConfiguration {
    inner: ToricTestConfig,
}

#[pymethods]
impl PyTestConfiguration {
    #[new]
    #[pyo3(signature = (polytope, q, normalize=false))]
    fn new(polytope: &PyPolytope, q: &PyPL, normalize: bool) -> PyResult<Self> {
        let (p, q) = (polytope.inner.clone(), q.inner.clone());
        let inner = if normalize { ToricTestConfig::normalized(p, q) } else { ToricTestConfig::new(p, q) };
        Ok(PyTestConfiguration { inner: inner.map_err(err)? })
    }

    /// `(i0, i1, b0)`.
    fn integrals(&self, tau: f64) -> PyResult<(f64, f64, f64)> {
        let b = self.inner.bundle(tau).map_err(err)?;
        Ok((b.i0, b.i1, b.b0))
    }

    /// `(mu, sigma, mu_lambda)`.
    #[pyo3(signature = (tau, lam=0.0))]
    fn na_entropy(&self, tau: f64, lam: f64) -> PyResult<(f64, f64, f64)> {
        let e = na::na_entropy(&self.inner, EntropyParams { lambda: lam, tau }).map_err(err)?;
        Ok((e.mu, e.sigma, e.mu_lambda))
    }

    fn norm2(&self) -> f64 {
        na::norm_squared(&self.inner)
    }

    /// `(tau_star, value)` for the Donaldson-type quadratic.
    fn max_c_na(&self, m_na: f64) -> PyResult<(f64, f64)> {
        na::max_c_na(&self.inner, m_na).map_err(err)
    }

    fn futaki(&self, xi: Vec<f64>, lam: f64) -> PyResult<f64> {
        na::mu_futaki(self.inner.polytope(), &xi, self.inner.q(), lam).map_err(err)
    }
}

/// Circle-invariant metric on `[0, a]` given by a Chebyshev perturbation of
/// the round symplectic potential.
#[pyclass(name = "ToricMetric", frozen)]
struct PyToricMetric {
    inner: tm::ToricMetric,
}

impl PyToricMetric {
    fn momentum(&self, coeffs: &[f64]) -> tm::Momentum1D {
        let a = self.inner.a();
        self.inner.momentum(|x| cheb::eval(coeffs, 2.0 * x / a - 1.0))
    }
}

#[pymethods]
impl PyToricMetric {
    #[new]
    #[pyo3(signature = (a, coefficients=Vec::new(), nodes=tm::DEFAULT_NODES))]
    fn new(a: f64, coefficients: Vec<f64>, nodes: usize) -> PyResult<Self> {
        let u = SymplecticPotential1D::new(a, coefficients).map_err(err)?;
        Ok(PyToricMetric { inner: tm::ToricMetric::new(&u, nodes).map_err(err)? })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a()
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes().to_vec()
    }

    #[getter]
    fn scalar_curvature(&self) -> Vec<f64> {
        self.inner.scalar_curvature().to_vec()
    }

    /// W-entropy of the momentum with Chebyshev coefficients `f` in `2x/a - 1`.
    fn w_entropy(&self, f: Vec<f64>, lam: f64) -> PyResult<f64> {
        self.inner.w_entropy(&self.momentum(&f), lam).map_err(err)
    }

    /// `(value, node values of the maximizer, residual)`.
    fn critical_momentum(&self, lam: f64) -> PyResult<(f64, Vec<f64>, f64)> {
        let c = self.inner.critical_momentum(lam, 1e-10, 100, None).map_err(err)?;
        Ok((c.value, c.f.values, c.residual))
    }

    fn mu_entropy(&self, lam: f64) -> PyResult<f64> {
        self.inner.mu_entropy(lam).map_err(err)
    }

    fn h_entropy(&self) -> PyResult<f64> {
        self.inner.h_entropy().map_err(err)
    }

    fn calabi(&self) -> f64 {
        self.inner.calabi()
    }

    fn w_kappa(&self, f: Vec<f64>, kappa: f64) -> PyResult<f64> {
        self.inner.w_kappa(&self.momentum(&f), kappa).map_err(err)
    }

    fn w_ext(&self, f: Vec<f64>) -> PyResult<f64> {
        self.inner.w_ext(&self.momentum(&f)).map_err(err)
    }
}

#[pyfunction]
#[pyo3(name = "vector_mu_entropy")]
fn py_vector_mu_entropy(polytope: &PyPolytope, xi: Vec<f64>, lam: f64) -> PyResult<f64> {
    na::vector_mu_entropy(&polytope.inner, &xi, lam).map_err(err)
}

/// `λ*` where the trivial vector stops being a local maximum.
#[pyfunction]
fn transition_point(polytope: &PyPolytope) -> PyResult<Option<f64>> {
    optimizer::transition_point(&polytope.inner).map_err(err)
}

/// `(lambda grid, branch counts, transitions)`.
#[pyfunction]
#[pyo3(signature = (polytope, lo=-40.0, hi=40.0, steps=160, multistart=4, seed=0))]
fn scan_lambda(
    polytope: &PyPolytope,
    lo: f64,
    hi: f64,
    steps: usize,
    multistart: usize,
    seed: u64,
) -> PyResult<(Vec<f64>, Vec<usize>, Vec<f64>)> {
    let s = optimizer::bifurcation_scan(&polytope.inner, lo, hi, steps, multistart, seed).map_err(err)?;
    Ok((s.lambda_grid, s.branch_count, s.transitions))
}

/// `(W values, NA limit, max upward step, max conservation drift)` along the
/// geodesic ray of `q` from the metric with Chebyshev perturbation `coefficients`.
#[pyfunction]
#[pyo3(signature = (a, q, tau, lam, t_grid, coefficients=Vec::new()))]
fn ray_trace(
    a: f64,
    q: &PyPL,
    tau: f64,
    lam: f64,
    t_grid: Vec<f64>,
    coefficients: Vec<f64>,
) -> PyResult<(Vec<f64>, f64, f64, f64)> {
    let u = SymplecticPotential1D::new(a, coefficients).map_err(err)?;
    let ray = ToricRay::with_default_eps(u, q.inner.clone(), tau).map_err(err)?;
    let tr = w_along_ray(&ray, lam, &t_grid).map_err(err)?;
    let d = conservation_drift(&ray, &t_grid, 32).map_err(err)?;
    Ok((tr.w, tr.na_limit, tr.max_upward, d.c0.max(d.c1)))
}

/// `(id, passed, detail)` for each acceptance criterion.
#[pyfunction]
fn run_acceptance(py: Python<'_>) -> Vec<(String, bool, String)> {
    py.detach(|| {
        mu_entropy::verify::run_all().into_iter().map(|r| (r.id.to_string(), r.passed, r.detail)).collect()
    })
}

#[pymodule]
fn mu_entropy_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPolytope>()?;
    m.add_class::<PyPL>()?;
    m.add_class::<PyTestConfiguration>()?;
    m.add_class::<PyToricMetric>()?;
    m.add_function(wrap_pyfunction!(py_vector_mu_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(transition_point, m)?)?;
    m.add_function(wrap_pyfunction!(scan_lambda, m)?)?;
    m.add_function(wrap_pyfunction!(ray_trace, m)?)?;
    m.add_function(wrap_pyfunction!(run_acceptance, m)?)?;
    Ok(())
}

use std::path::PathBuf;

use aluthge_core::experiments::{self, SpectrumSpec, SuiteConfig};
use aluthge_core::linalg::{normality_residual, Tolerances};
use aluthge_core::orbit::{self, DerivativeKit, OrbitContext, TangentDecomposition};
use aluthge_core::transform::{self, LimitOptions};
use aluthge_core::{ComplexMatrix, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

type Rows = Vec<Vec<Complex64>>;

fn to_py(e: Error) -> PyErr {
    if e.is_numerical() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn matrix(rows: Rows) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(to_py)
}

/// Aluthge transform of a square matrix.
#[pyfunction]
fn aluthge(t: Rows) -> PyResult<Rows> {
    Ok(transform::aluthge(&matrix(t)?).map_err(to_py)?.to_rows())
}

/// The first `steps` iterated transforms, starting with the input itself.
#[pyfunction]
fn iterate(t: Rows, steps: usize) -> PyResult<Vec<Rows>> {
    let traj = transform::iterate(&matrix(t)?, steps).map_err(to_py)?;
    Ok(traj.iterates().iter().map(ComplexMatrix::to_rows).collect())
}

/// Normalized commutator residual `‖T*T − TT*‖ / max(1, ‖T‖²)`.
#[pyfunction]
fn normality(t: Rows) -> PyResult<f64> {
    Ok(normality_residual(&matrix(t)?))
}

#[pyclass(get_all, frozen)]
struct LimitReport {
    limit: Rows,
    iterations_used: usize,
    converged: bool,
    final_step: f64,
    final_normality: f64,
}

#[pymethods]
impl LimitReport {
    fn __repr__(&self) -> String {
        format!(
            "LimitReport(converged={}, iterations_used={}, final_step={:e}, final_normality={:e})",
            self.converged, self.iterations_used, self.final_step, self.final_normality
        )
    }
}

/// Iterates the transform until it settles on a normal matrix or `max_iter` is reached.
#[pyfunction]
#[pyo3(signature = (t, tol_conv=1e-11, tol_norm=1e-9, max_iter=10_000))]
fn limit(t: Rows, tol_conv: f64, tol_norm: f64, max_iter: usize) -> PyResult<LimitReport> {
    let opts = LimitOptions { tol_conv, tol_norm, max_iter };
    let r = transform::limit(&matrix(t)?, &opts).map_err(to_py)?;
    Ok(LimitReport {
        limit: r.limit.to_rows(),
        iterations_used: r.iterations_used,
        converged: r.converged,
        final_step: r.final_step,
        final_normality: r.final_normality,
    })
}

/// Algebraic and geometric multiplicity of `mu` as an eigenvalue of `t`.
#[pyfunction]
fn multiplicities(t: Rows, mu: Complex64) -> PyResult<(usize, usize)> {
    let m = transform::multiplicities(&matrix(t)?, mu, &Tolerances::default()).map_err(to_py)?;
    Ok((m.algebraic, m.geometric))
}

/// Contraction constant of the derivative at `diag(d)` on its stable directions.
#[pyfunction]
fn k_d(d: Vec<Complex64>) -> PyResult<f64> {
    Ok(OrbitContext::new(&d).map_err(to_py)?.k_d())
}

/// Whether the transform is a local diffeomorphism at `diag(d)`, with the smallest
/// singular value of its derivative on the tangent space.
#[pyfunction]
fn local_diffeo(d: Vec<Complex64>) -> PyResult<(bool, f64)> {
    let ctx = OrbitContext::new(&d).map_err(to_py)?;
    let r = orbit::local_diffeo_check(&ctx);
    Ok((r.local_diffeo, r.smallest_singular_value))
}

/// Largest relative error between the closed-form derivative and central differences
/// over random tangent directions.
#[pyfunction]
#[pyo3(signature = (d, trials=50, seed=0, step=orbit::DEFAULT_STEP))]
fn derivative_check(d: Vec<Complex64>, trials: usize, seed: u64, step: f64) -> PyResult<(f64, bool)> {
    let r = orbit::derivative_check(&d, trials, seed, step).map_err(to_py)?;
    Ok((r.max_relative_error, r.passed()))
}

/// Tangent-space operators of the transform at a normal diagonal point.
#[pyclass(frozen)]
struct Orbit {
    ctx: OrbitContext,
    kit: DerivativeKit,
    dec: TangentDecomposition,
}

#[pymethods]
impl Orbit {
    #[new]
    fn new(d: Vec<Complex64>) -> PyResult<Self> {
        let ctx = OrbitContext::new(&d).map_err(to_py)?;
        let kit = orbit::build_kit(&ctx);
        let dec = TangentDecomposition::new(&ctx, &kit).map_err(to_py)?;
        Ok(Self { ctx, kit, dec })
    }

    #[getter]
    fn d(&self) -> Vec<Complex64> {
        self.ctx.d().to_vec()
    }

    #[getter]
    fn k_d(&self) -> f64 {
        self.ctx.k_d()
    }

    /// Real dimension of the tangent space of the orbit.
    #[getter]
    fn tangent_dim(&self) -> usize {
        self.dec.real_dim()
    }

    /// Operator norm of the stable block of the derivative.
    #[getter]
    fn stable_norm(&self) -> f64 {
        self.dec.a1_norm
    }

    fn tangent_basis(&self) -> Vec<Rows> {
        self.dec.tangent_basis.iter().map(ComplexMatrix::to_rows).collect()
    }

    fn unitary_tangent_basis(&self) -> Vec<Rows> {
        self.dec.unitary_tangent_basis.iter().map(ComplexMatrix::to_rows).collect()
    }

    fn stable_basis(&self) -> Vec<Rows> {
        self.dec.stable_basis.iter().map(ComplexMatrix::to_rows).collect()
    }

    /// Derivative of the transform at `diag(d)` applied to a tangent vector.
    fn derivative(&self, x: Rows) -> PyResult<Rows> {
        let x = matrix(x)?;
        Ok(orbit::derivative_at_d(&self.ctx, &self.kit, &x).map_err(to_py)?.to_rows())
    }

    /// Projection onto the complement of the unitary tangent directions.
    fn project_q(&self, x: Rows) -> PyResult<Rows> {
        let x = matrix(x)?;
        Ok(orbit::projection_qd(&self.ctx, &self.kit, &x).map_err(to_py)?.to_rows())
    }

    /// Projection onto the invariant stable subspace.
    fn project_p(&self, x: Rows) -> PyResult<Rows> {
        Ok(self.dec.apply(&self.dec.p_op, &matrix(x)?).map_err(to_py)?.to_rows())
    }

    fn __repr__(&self) -> String {
        format!("Orbit(dim={}, k_d={:.6})", self.ctx.dim(), self.ctx.k_d())
    }
}

#[pyclass(get_all, frozen)]
struct Instance {
    matrix: Rows,
    eigenvalues: Vec<Complex64>,
    similarity: Rows,
    condition: f64,
}

/// Random diagonalizable matrix `S diag(λ) S⁻¹` with `cond(S) ≤ cond_bound`.
#[pyfunction]
#[pyo3(signature = (size, cond_bound=100.0, seed=0, eigenvalues=None))]
fn random_diagonalizable(size: usize, cond_bound: f64, seed: u64, eigenvalues: Option<Vec<Complex64>>) -> PyResult<Instance> {
    let spec = match eigenvalues {
        Some(eigenvalues) => SpectrumSpec::Explicit { eigenvalues },
        None => SpectrumSpec::default(),
    };
    let inst = experiments::random_diagonalizable(size, &spec, cond_bound, seed).map_err(to_py)?;
    Ok(Instance {
        matrix: inst.matrix.to_rows(),
        eigenvalues: inst.eigenvalues,
        similarity: inst.similarity.to_rows(),
        condition: inst.condition,
    })
}

/// Single Jordan block of size `size` with eigenvalue `eigenvalue`.
#[pyfunction]
fn jordan_block(size: usize, eigenvalue: Complex64) -> Rows {
    experiments::jordan_block(size, eigenvalue).to_rows()
}

/// Runs a suite from a TOML config, writing outputs under `base`.
/// Returns `(total, converged, asserted, asserted_converged, rate_ok)`.
#[pyfunction]
#[pyo3(signature = (config, base=None))]
fn run_suite(py: Python<'_>, config: PathBuf, base: Option<PathBuf>) -> PyResult<(usize, usize, usize, usize, usize)> {
    let cfg = SuiteConfig::load(&config).map_err(to_py)?;
    let base = base.unwrap_or_else(|| PathBuf::from("."));
    let (s, _) = py.detach(|| experiments::run_suite(&cfg, &base)).map_err(to_py)?;
    Ok((s.total, s.converged, s.asserted, s.asserted_converged, s.rate_ok))
}

#[pymodule(name = "aluthge")]
fn aluthge_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(aluthge, m)?)?;
    m.add_function(wrap_pyfunction!(iterate, m)?)?;
    m.add_function(wrap_pyfunction!(normality, m)?)?;
    m.add_function(wrap_pyfunction!(limit, m)?)?;
    m.add_function(wrap_pyfunction!(multiplicities, m)?)?;
    m.add_function(wrap_pyfunction!(k_d, m)?)?;
    m.add_function(wrap_pyfunction!(local_diffeo, m)?)?;
    m.add_function(wrap_pyfunction!(derivative_check, m)?)?;
    m.add_function(wrap_pyfunction!(random_diagonalizable, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_block, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    m.add_class::<LimitReport>()?;
    m.add_class::<Orbit>()?;
    m.add_class::<Instance>()?;
    Ok(())
}

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::context::OrbitContext;
use super::kit::build_kit;
use super::tangent::derivative_at_d;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::sampling::random_matrix;
use crate::transform::aluthge;

/// Default step for central differences.
pub const DEFAULT_STEP: f64 = 1e-5;

const STEP_RANGE: (f64, f64) = (1e-7, 1e-3);

fn check_step(h: f64) -> Result<()> {
    if !(STEP_RANGE.0..=STEP_RANGE.1).contains(&h) {
        return Err(Error::InvalidArgument(format!(
            "finite-difference step {h:e} outside [{:e}, {:e}]",
            STEP_RANGE.0, STEP_RANGE.1
        )));
    }
    Ok(())
}

fn exp(a: &ComplexMatrix) -> ComplexMatrix {
    ComplexMatrix::wrap(a.as_matrix().clone().exp())
}

/// Central difference of `t ↦ Δ(e^{tA} N e^{−tA})` at `t = 0` for any square `N`.
pub fn finite_difference_at(n: &ComplexMatrix, a: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    check_step(h)?;
    let r = n.dim()?;
    if a.rows() != r || a.cols() != r {
        return Err(Error::DimensionMismatch { expected: format!("{r}x{r}"), got: format!("{}x{}", a.rows(), a.cols()) });
    }
    let moved = |s: f64| -> Result<ComplexMatrix> {
        let g = a.scale(Complex64::new(s, 0.0));
        let fwd = exp(&g);
        let back = exp(&-g);
        aluthge(&(&(&fwd * n) * &back))
    };
    let diff = &moved(h)? - &moved(-h)?;
    Ok(diff.scale(Complex64::new(0.5 / h, 0.0)))
}

/// Central difference at `D = diag(d)` in the direction `[A, D]`.
pub fn finite_difference_derivative(d: &[Complex64], a: &ComplexMatrix, h: f64) -> Result<ComplexMatrix> {
    finite_difference_at(&ComplexMatrix::from_diagonal(d), a, h)
}

/// Richardson combination of central differences at `h` and `h/2`.
#[derive(Debug, Clone)]
pub struct Richardson {
    /// `(4 F(h/2) − F(h)) / 3`.
    pub estimate: ComplexMatrix,
    /// `‖F(h/2) − F(h)‖₂`, the size of the leading discretization term.
    pub error_estimate: f64,
}

pub fn richardson_derivative(n: &ComplexMatrix, a: &ComplexMatrix, h: f64) -> Result<Richardson> {
    check_step(h)?;
    let coarse = finite_difference_at(n, a, h)?;
    let fine = finite_difference_at(n, a, (h / 2.0).max(STEP_RANGE.0))?;
    let error_estimate = (&fine - &coarse).norm();
    let estimate = (&fine.scale(Complex64::new(4.0, 0.0)) - &coarse).scale(Complex64::new(1.0 / 3.0, 0.0));
    Ok(Richardson { estimate, error_estimate })
}

/// Worst relative disagreement between the analytic derivative and central differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeCheck {
    pub trials: usize,
    pub step: f64,
    pub max_relative_error: f64,
    /// `max(1e-5, 10 h²)`.
    pub bound: f64,
}

impl DerivativeCheck {
    pub fn passed(&self) -> bool {
        self.max_relative_error <= self.bound
    }
}

/// Compares `TΔ_D([A, D])` with central differences for `trials` seeded Gaussian `A`.
pub fn derivative_check(d: &[Complex64], trials: usize, seed: u64, h: f64) -> Result<DerivativeCheck> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    check_step(h)?;
    let ctx = OrbitContext::new(d)?;
    let kit = build_kit(&ctx);
    let diag = ctx.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = random_matrix(&mut rng, d.len());
        let x = a.commutator(&diag);
        let exact = derivative_at_d(&ctx, &kit, &x)?;
        let fd = finite_difference_at(&diag, &a, h)?;
        let scale = exact.norm();
        if scale > 0.0 {
            worst = worst.max((&fd - &exact).norm() / scale);
        } else {
            worst = worst.max(fd.norm());
        }
    }
    Ok(DerivativeCheck { trials, step: h, max_relative_error: worst, bound: (10.0 * h * h).max(1e-5) })
}

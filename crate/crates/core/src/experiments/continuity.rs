use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::sampling::random_matrix;
use crate::transform::{limit, LimitOptions};

fn unit_direction(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    let norm = g.norm();
    if norm == 0.0 {
        g
    } else {
        g.scale(Complex64::new(1.0 / norm, 0.0))
    }
}

/// Largest `‖Δ^∞(t') − Δ^∞(t)‖₂` over `trials` perturbations of each kind: within the
/// similarity orbit (`t' = e^{εG} t e^{−εG}`) and additive (`t' = t + εG`), with `‖G‖₂ = 1`.
pub fn perturbation_continuity_check(
    t: &ComplexMatrix,
    epsilon: f64,
    trials: usize,
    seed: u64,
    opts: &LimitOptions,
) -> Result<f64> {
    let n = t.dim()?;
    if !(epsilon >= 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("epsilon must be finite and ≥ 0, got {epsilon}")));
    }
    let converged_limit = |m: &ComplexMatrix| -> Result<ComplexMatrix> {
        let rep = limit(m, opts)?;
        if rep.converged {
            Ok(rep.limit)
        } else {
            Err(Error::NoConvergence("limit of a perturbed matrix"))
        }
    };
    let base = converged_limit(t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps = Complex64::new(epsilon, 0.0);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let g = unit_direction(&mut rng, n).scale(eps);
        let fwd = ComplexMatrix::try_from_matrix(g.as_matrix().clone().exp())?;
        let back = ComplexMatrix::try_from_matrix((-g.as_matrix().clone()).exp())?;
        let in_orbit = &(&fwd * t) * &back;
        worst = worst.max((&converged_limit(&in_orbit)? - &base).norm());
        let shifted = t + &unit_direction(&mut rng, n).scale(eps);
        worst = worst.max((&converged_limit(&shifted)? - &base).norm());
    }
    Ok(worst)
}

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::singular_values;
use crate::matrix::ComplexMatrix;
use crate::sampling::random_unitary;

const POINT_BUDGET: usize = 10_000;
const SIMILARITY_BUDGET: usize = 100;

/// How the eigenvalues of a random instance are chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpectrumSpec {
    /// Exactly these eigenvalues; the size must match.
    Explicit { eigenvalues: Vec<Complex64> },
    /// Points uniform by area in `min_modulus ≤ |z| ≤ max_modulus`, pairwise at least
    /// `separation` apart, followed by `zero_count` zero eigenvalues.
    Annulus { min_modulus: f64, max_modulus: f64, separation: f64, zero_count: usize },
}

impl Default for SpectrumSpec {
    fn default() -> Self {
        SpectrumSpec::Annulus { min_modulus: 0.2, max_modulus: 2.0, separation: 0.05, zero_count: 0 }
    }
}

impl SpectrumSpec {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, r: usize) -> Result<Vec<Complex64>> {
        match self {
            SpectrumSpec::Explicit { eigenvalues } => {
                if eigenvalues.len() != r {
                    return Err(Error::DimensionMismatch {
                        expected: format!("{r} eigenvalues"),
                        got: eigenvalues.len().to_string(),
                    });
                }
                Ok(eigenvalues.clone())
            }
            &SpectrumSpec::Annulus { min_modulus, max_modulus, separation, zero_count } => {
                if !(0.0 < min_modulus && min_modulus <= max_modulus) || separation < 0.0 {
                    return Err(Error::InvalidArgument(format!(
                        "annulus needs 0 < min_modulus ≤ max_modulus and separation ≥ 0, got {min_modulus}, {max_modulus}, {separation}"
                    )));
                }
                if zero_count > r {
                    return Err(Error::InvalidArgument(format!("zero_count {zero_count} exceeds size {r}")));
                }
                let mut points: Vec<Complex64> = Vec::with_capacity(r);
                let (lo, hi) = (min_modulus * min_modulus, max_modulus * max_modulus);
                let mut attempts = 0;
                while points.len() < r - zero_count {
                    attempts += 1;
                    if attempts > POINT_BUDGET {
                        return Err(Error::SamplingBudget);
                    }
                    let radius = if hi > lo { rng.random_range(lo..hi).sqrt() } else { min_modulus };
                    let z = Complex64::from_polar(radius, rng.random_range(0.0..TAU));
                    if points.iter().all(|p| (p - z).norm() >= separation) {
                        points.push(z);
                    }
                }
                points.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), zero_count));
                Ok(points)
            }
        }
    }
}

/// `T = S diag(d) S^{-1}` with its ground truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub matrix: ComplexMatrix,
    pub eigenvalues: Vec<Complex64>,
    pub similarity: ComplexMatrix,
    /// Condition number `σ_max(S) / σ_min(S)`.
    pub condition: f64,
}

/// Seeded random diagonalizable matrix with eigenvector condition number at most `cond_bound`.
pub fn random_diagonalizable(r: usize, spec: &SpectrumSpec, cond_bound: f64, seed: u64) -> Result<Instance> {
    random_diagonalizable_with(&mut ChaCha8Rng::seed_from_u64(seed), r, spec, cond_bound)
}

/// `S = W diag(σ) V*` with Haar `W, V` and `σ_i = cond_bound^{u_i}`, `u_i` uniform in `[0, 1]`;
/// the computed condition number is verified and the draw repeated if it exceeds the bound.
pub fn random_diagonalizable_with<R: Rng + ?Sized>(
    rng: &mut R,
    r: usize,
    spec: &SpectrumSpec,
    cond_bound: f64,
) -> Result<Instance> {
    if !(cond_bound >= 1.0) || !cond_bound.is_finite() {
        return Err(Error::InvalidArgument(format!("cond_bound must be a finite number ≥ 1, got {cond_bound}")));
    }
    let eigenvalues = spec.sample(rng, r)?;
    for _ in 0..SIMILARITY_BUDGET {
        let w = random_unitary(rng, r);
        let v = random_unitary(rng, r);
        let sigma: Vec<f64> = (0..r).map(|_| cond_bound.powf(rng.random_range(0.0..=1.0))).collect();
        let scaled = |p: f64| {
            let diag: Vec<Complex64> = sigma.iter().map(|s| Complex64::new(s.powf(p), 0.0)).collect();
            ComplexMatrix::from_diagonal(&diag)
        };
        let s = &(&w * &scaled(1.0)) * &v.adjoint();
        let s_inv = &(&v * &scaled(-1.0)) * &w.adjoint();
        let sv = singular_values(&s)?;
        let condition = match (sv.first(), sv.last()) {
            (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
            (None, None) => 1.0,
            _ => f64::INFINITY,
        };
        if condition <= cond_bound * (1.0 + 1e-9) {
            let matrix = &(&s * &ComplexMatrix::from_diagonal(&eigenvalues)) * &s_inv;
            return Ok(Instance { matrix, eigenvalues, similarity: s, condition });
        }
    }
    Err(Error::SamplingBudget)
}

/// `r × r` Jordan block with eigenvalue `lambda`.
pub fn jordan_block(r: usize, lambda: Complex64) -> ComplexMatrix {
    let m = DMatrix::from_fn(r, r, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    ComplexMatrix::try_from_matrix(m).expect("finite entries")
}

/// Largest distance in a greedy nearest-neighbour matching of two eigenvalue lists.
///
/// Infinite when the lengths differ.
pub fn spectrum_distance(computed: &[Complex64], truth: &[Complex64]) -> f64 {
    if computed.len() != truth.len() {
        return f64::INFINITY;
    }
    let mut pool: Vec<Complex64> = computed.to_vec();
    let mut worst = 0.0f64;
    for t in truth {
        let (k, dist) = pool
            .iter()
            .enumerate()
            .map(|(k, z)| (k, (z - t).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("pool has one entry per remaining truth value");
        worst = worst.max(dist);
        pool.swap_remove(k);
    }
    worst
}

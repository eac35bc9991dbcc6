use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Relative clustering tolerance for diagonals taken from computed spectra.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

/// A diagonal `D = diag(d₁, …, d_r)` with its moduli, phases, equality pattern and
/// contraction constant `k_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitContext {
    d: Vec<Complex64>,
    moduli: Vec<f64>,
    phases: Vec<f64>,
    cluster: Vec<usize>,
    k_d: f64,
}

impl OrbitContext {
    /// Context with exact equality of diagonal entries.
    pub fn new(d: &[Complex64]) -> Result<Self> {
        Self::build(d, |a, b| a == b)
    }

    /// Context where entries within `rel_tol · max|d_i|` of each other (transitively) are equal.
    pub fn clustered(d: &[Complex64], rel_tol: f64) -> Result<Self> {
        let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let tol = rel_tol * scale;
        Self::build(d, |a, b| (a - b).norm() <= tol)
    }

    /// Context for a computed spectrum, clustered with [`DEFAULT_CLUSTER_TOL`].
    pub fn from_spectrum(d: &[Complex64]) -> Result<Self> {
        Self::clustered(d, DEFAULT_CLUSTER_TOL)
    }

    fn build(d: &[Complex64], same: impl Fn(Complex64, Complex64) -> bool) -> Result<Self> {
        for (index, z) in d.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::InvalidArgument(format!("diagonal entry {index} is not finite")));
            }
            if z.norm() == 0.0 {
                return Err(Error::ZeroDiagonal { index });
            }
        }
        let r = d.len();
        let mut cluster: Vec<usize> = (0..r).collect();
        for i in 0..r {
            for j in 0..i {
                if same(d[i], d[j]) {
                    let (from, to) = (cluster[i].max(cluster[j]), cluster[i].min(cluster[j]));
                    for c in cluster.iter_mut() {
                        if *c == from {
                            *c = to;
                        }
                    }
                }
            }
        }
        let moduli: Vec<f64> = d.iter().map(|z| z.norm()).collect();
        let phases = d.iter().map(|z| principal_phase(*z)).collect();
        let mut k_d = 0.0f64;
        for i in 0..r {
            for j in 0..r {
                if cluster[i] != cluster[j] {
                    k_d = k_d.max(pair_factor(d[i], d[j]));
                }
            }
        }
        Ok(Self { d: d.to_vec(), moduli, phases, cluster, k_d })
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn d(&self) -> &[Complex64] {
        &self.d
    }

    pub fn moduli(&self) -> &[f64] {
        &self.moduli
    }

    /// Principal arguments in `[0, 2π)`.
    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn k_d(&self) -> f64 {
        self.k_d
    }

    pub fn is_equal(&self, i: usize, j: usize) -> bool {
        self.cluster[i] == self.cluster[j]
    }

    /// Ordered pairs `(i, j)` with `d_i ≠ d_j`, in row-major order.
    pub fn unequal_pairs(&self) -> Vec<(usize, usize)> {
        let r = self.dim();
        (0..r).flat_map(|i| (0..r).map(move |j| (i, j))).filter(|&(i, j)| !self.is_equal(i, j)).collect()
    }

    pub fn diagonal(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.d)
    }
}

fn principal_phase(z: Complex64) -> f64 {
    let t = z.arg();
    let t = if t < 0.0 { t + TAU } else { t };
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// `|1 + e^{i(θ_j − θ_i)}| |d_i|^{1/2} |d_j|^{1/2} / (|d_i| + |d_j|)` for nonzero entries.
pub(crate) fn pair_factor(a: Complex64, b: Complex64) -> f64 {
    let (ra, rb) = (a.norm(), b.norm());
    (a / ra + b / rb).norm() * (ra * rb).sqrt() / (ra + rb)
}

/// `k_D` over the nonzero entries of `d` with exact equality; 0 when no pair is unequal.
pub fn contraction_constant(d: &[Complex64]) -> f64 {
    let nonzero: Vec<Complex64> = d.iter().copied().filter(|z| z.norm() > 0.0).collect();
    let mut k = 0.0f64;
    for (i, &a) in nonzero.iter().enumerate() {
        for &b in &nonzero[..i] {
            if a != b {
                k = k.max(pair_factor(a, b));
            }
        }
    }
    k
}

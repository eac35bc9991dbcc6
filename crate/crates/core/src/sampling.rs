//! Seeded random matrices used by the experiments and the test suites.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::matrix::ComplexMatrix;

/// Standard complex Gaussian scalar (independent N(0, 1/2) real and imaginary parts).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::wrap(DMatrix::from_fn(n, n, |_, _| complex_normal(rng)))
}

/// Haar-distributed unitary: QR of a Gaussian matrix with the phases of `R` removed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n).into_matrix();
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    ComplexMatrix::wrap(q)
}

/// Random anti-Hermitian matrix `(G − G*)/2`.
pub fn random_anti_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let g = random_matrix(rng, n);
    (&g - &g.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Uniform random complex scalar in the box `[-1, 1] × [-1, 1]`.
pub fn random_scalar<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

//! Dense complex kernels: inner product, Hermitian square root, polar factors,
//! Sylvester solves and spectra.
//!
//! Norms are Frobenius norms throughout. Factorizations are delegated to `nalgebra`.

use faer::c64;
use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

const MAX_SWEEPS: usize = 10_000;

/// Numerical tolerances shared by the kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Allowed `‖P − P*‖ / max(1, ‖P‖)` for inputs that should be Hermitian.
    pub herm: f64,
    /// Eigenvalues above `−psd · max(1, ‖P‖)` are clipped to zero rather than rejected.
    pub psd: f64,
    /// Reconstruction residual allowed for factorizations.
    pub recon: f64,
    /// Eigenvalues closer than `eig_match · max(1, ‖T‖)` are treated as equal.
    pub eig_match: f64,
    /// Singular values at most `rank · max(1, σ_max)` count as zero.
    pub rank: f64,
    /// Smallest relative singular value accepted for "invertible".
    pub inv: f64,
    /// Smallest relative spectral gap accepted by the Sylvester solver.
    pub gap: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { herm: 1e-10, psd: 1e-10, recon: 1e-10, eig_match: 1e-8, rank: 1e-10, inv: 1e-10, gap: 1e-12 }
    }
}

/// Unitary and positive factors of `T = U |T|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarParts {
    pub unitary: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

/// Eigenvalues with algebraic multiplicity, sorted by (real part, imaginary part).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    eigenvalues: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(mut eigenvalues: Vec<Complex64>) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self { eigenvalues }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest entrywise distance between the two sorted lists.
    ///
    /// Returns infinity when the lengths differ.
    pub fn max_deviation(&self, other: &Spectrum) -> f64 {
        if self.len() != other.len() {
            return f64::INFINITY;
        }
        self.eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Number of eigenvalues within `tol` of `mu`.
    pub fn count_near(&self, mu: Complex64, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|z| (*z - mu).norm() <= tol).count()
    }
}

/// Real inner product `Re tr(b* a)`.
pub fn frobenius_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: format!("{}x{}", a.rows(), a.cols()),
            got: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    Ok(a
        .as_matrix()
        .iter()
        .zip(b.as_matrix().iter())
        .map(|(x, y)| (y.conj() * x).re)
        .sum())
}

fn hermitian_residual(p: &ComplexMatrix) -> f64 {
    (p - &p.adjoint()).norm() / p.norm().max(1.0)
}

/// Eigenvalues (ascending) and unitary eigenvectors of a Hermitian matrix.
pub fn hermitian_eigen(p: &ComplexMatrix, tol: &Tolerances) -> Result<(Vec<f64>, ComplexMatrix)> {
    p.dim()?;
    let residual = hermitian_residual(p);
    if residual > tol.herm {
        return Err(Error::NotHermitian { residual });
    }
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = (p.as_matrix() + p.as_matrix().adjoint()).map(|z| z * 0.5);
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence("Hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, ComplexMatrix::wrap(vectors)))
}

/// Positive square root of a Hermitian positive semidefinite matrix.
///
/// Slightly negative eigenvalues (above `−tol.psd` relative to `‖p‖`) are clipped to zero.
pub fn hermitian_sqrt(p: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    let (values, vectors) = hermitian_eigen(p, tol)?;
    let floor = -tol.psd * p.norm().max(1.0);
    if let Some(&lowest) = values.first() {
        if lowest < floor {
            return Err(Error::NotPositive { eigenvalue: lowest });
        }
    }
    let roots: Vec<f64> = values.iter().map(|&l| l.max(0.0).sqrt()).collect();
    Ok(ComplexMatrix::wrap(scaled_gram(vectors.as_matrix(), &roots)))
}

/// `V diag(s) V*`.
fn scaled_gram(v: &DMatrix<Complex64>, s: &[f64]) -> DMatrix<Complex64> {
    let mut vs = v.clone();
    for (j, &x) in s.iter().enumerate() {
        vs.column_mut(j).scale_mut(x);
    }
    let out = &vs * v.adjoint();
    // Hermitian by construction; remove rounding asymmetry.
    (&out + out.adjoint()).map(|z| z * 0.5)
}

/// Singular value factorization `T = W diag(σ) V*` with σ descending.
#[derive(Debug, Clone)]
pub(crate) struct SvdParts {
    pub w: DMatrix<Complex64>,
    pub sigma: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

pub(crate) fn svd(t: &DMatrix<Complex64>) -> Result<SvdParts> {
    let (rows, cols) = t.shape();
    if rows == 0 || cols == 0 {
        return Ok(SvdParts { w: DMatrix::zeros(rows, 0), sigma: Vec::new(), v: DMatrix::zeros(cols, 0) });
    }
    let m = faer::Mat::<c64>::from_fn(rows, cols, |i, j| c64::new(t[(i, j)].re, t[(i, j)].im));
    let f = m.thin_svd().map_err(|_| Error::NoConvergence("singular value decomposition"))?;
    let (u, s, v) = (f.U(), f.S().column_vector(), f.V());
    let k = s.nrows();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].re.total_cmp(&s[a].re));
    let sigma = order.iter().map(|&j| s[j].re).collect();
    let w = DMatrix::from_fn(rows, k, |i, j| {
        let z = u[(i, order[j])];
        Complex64::new(z.re, z.im)
    });
    let v = DMatrix::from_fn(cols, k, |i, j| {
        let z = v[(i, order[j])];
        Complex64::new(z.re, z.im)
    });
    Ok(SvdParts { w, sigma, v })
}

/// Singular values in descending order.
pub fn singular_values(t: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(svd(t.as_matrix())?.sigma)
}

/// Number of singular values above `rel_tol · max(1, σ_max)`.
pub fn numerical_rank(t: &ComplexMatrix, rel_tol: f64) -> Result<usize> {
    let sigma = singular_values(t)?;
    let threshold = rel_tol * sigma.first().copied().unwrap_or(0.0).max(1.0);
    Ok(sigma.iter().filter(|&&s| s > threshold).count())
}

/// `‖U*U − I‖`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.cols();
    (u.as_matrix().adjoint() * u.as_matrix() - DMatrix::<Complex64>::identity(n, n))
        .iter()
        .map(|z| z.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Polar decomposition `T = U |T|` with `U` a full unitary.
///
/// `U = W V*` from the singular value factorization, which completes the partial
/// isometry of a singular `T` to a unitary. The zero matrix gets `U = I`.
pub fn polar_decompose(t: &ComplexMatrix) -> Result<PolarParts> {
    let n = t.dim()?;
    if t.is_zero() {
        return Ok(PolarParts { unitary: ComplexMatrix::identity(n), modulus: ComplexMatrix::zeros(n) });
    }
    let f = svd(t.as_matrix())?;
    Ok(PolarParts {
        unitary: ComplexMatrix::wrap(&f.w * f.v.adjoint()),
        modulus: ComplexMatrix::wrap(scaled_gram(&f.v, &f.sigma)),
    })
}

/// Complex Schur form `T = Q R Q*` with `R` upper triangular.
pub fn schur(t: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    t.dim()?;
    let s = Schur::try_new(t.as_matrix().clone(), f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence("Schur decomposition"))?;
    let (q, r) = s.unpack();
    Ok((ComplexMatrix::wrap(q), ComplexMatrix::wrap(r)))
}

/// Eigenvalues of `t` with multiplicity, canonically sorted.
pub fn spectrum(t: &ComplexMatrix) -> Result<Spectrum> {
    let (_, r) = schur(t)?;
    Ok(Spectrum::new(r.diagonal()))
}

/// Solves `aX − Xb = y` by reducing both coefficients to Schur form.
pub fn sylvester_solve(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    y: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let m = a.dim()?;
    let n = b.dim()?;
    if y.rows() != m || y.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: format!("{m}x{n}"),
            got: format!("{}x{}", y.rows(), y.cols()),
        });
    }
    let (qa, ra) = schur(a)?;
    let (qb, rb) = schur(b)?;
    let (qa, ra, qb, rb) = (qa.as_matrix(), ra.as_matrix(), qb.as_matrix(), rb.as_matrix());

    let scale = a.norm().max(b.norm()).max(1.0);
    let gap = (0..m)
        .flat_map(|i| (0..n).map(move |k| (ra[(i, i)] - rb[(k, k)]).norm()))
        .fold(f64::INFINITY, f64::min);
    if gap <= tol.gap * scale {
        return Err(Error::SingularSylvester { gap });
    }

    // Ra Z − Z Rb = C, solved column by column since Rb is upper triangular.
    let c = qa.adjoint() * y.as_matrix() * qb;
    let mut z = DMatrix::<Complex64>::zeros(m, n);
    for k in 0..n {
        let mut rhs: DVector<Complex64> = c.column(k).into_owned();
        for j in 0..k {
            rhs += z.column(j) * rb[(j, k)];
        }
        let shift = rb[(k, k)];
        // Back substitution with (Ra − shift I), upper triangular.
        for i in (0..m).rev() {
            let mut s = rhs[i];
            for l in (i + 1)..m {
                s -= ra[(i, l)] * z[(l, k)];
            }
            z[(i, k)] = s / (ra[(i, i)] - shift);
        }
    }
    Ok(ComplexMatrix::wrap(qa * z * qb.adjoint()))
}

/// `‖t*t − t t*‖ / max(1, ‖t‖²)`, zero exactly for normal matrices.
pub fn normality_residual(t: &ComplexMatrix) -> f64 {
    let m = t.as_matrix();
    let comm = m.adjoint() * m - m * m.adjoint();
    let num = comm.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    num / t.norm().powi(2).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_matrix, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn real(rows: &[Vec<f64>]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows).unwrap()
    }

    #[test]
    fn inner_product_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(frobenius_inner(&i2, &i2).unwrap(), 2.0);
        let ii = i2.scale(c(0.0, 1.0));
        assert_eq!(frobenius_inner(&ii, &i2).unwrap(), 0.0);
        assert!(frobenius_inner(&i2, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn inner_product_matches_entrywise_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_matrix(&mut rng, 4);
        let oracle: f64 = a.row_major().iter().map(|z| z.re * z.re + z.im * z.im).sum();
        assert!((frobenius_inner(&a, &a).unwrap() - oracle).abs() < 1e-12 * oracle);
        assert!((a.norm().powi(2) - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn sqrt_examples() {
        let tol = Tolerances::default();
        let s = hermitian_sqrt(&real(&[vec![4.0, 0.0], vec![0.0, 9.0]]), &tol).unwrap();
        assert!((&s - &real(&[vec![2.0, 0.0], vec![0.0, 3.0]])).norm() < 1e-14);
        let s = hermitian_sqrt(&ComplexMatrix::identity(3), &tol).unwrap();
        assert!((&s - &ComplexMatrix::identity(3)).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let g = random_matrix(&mut rng, 5);
        let p = &g.adjoint() * &g;
        let s = hermitian_sqrt(&p, &tol).unwrap();
        assert!((&(&s * &s) - &p).norm() / p.norm() < 1e-10);
        assert!(hermitian_residual(&s) < 1e-14);
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        let tol = Tolerances::default();
        let not_herm = real(&[vec![1.0, 1.0], vec![0.0, 1.0]]);
        assert!(matches!(hermitian_sqrt(&not_herm, &tol), Err(Error::NotHermitian { .. })));
        let negative = real(&[vec![1.0, 0.0], vec![0.0, -1.0]]);
        assert!(matches!(hermitian_sqrt(&negative, &tol), Err(Error::NotPositive { .. })));
        // Within the clipping band.
        let tiny = real(&[vec![1.0, 0.0], vec![0.0, -1e-13]]);
        let s = hermitian_sqrt(&tiny, &tol).unwrap();
        assert_eq!(s.get(1, 1).re.abs() < 1e-12, true);
    }

    #[test]
    fn polar_examples() {
        let p = polar_decompose(&real(&[vec![-3.0]])).unwrap();
        assert!((p.unitary.get(0, 0) - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((p.modulus.get(0, 0) - c(3.0, 0.0)).norm() < 1e-14);

        let t = real(&[vec![0.0, 2.0], vec![1.0, 0.0]]);
        let p = polar_decompose(&t).unwrap();
        assert!((&p.unitary - &real(&[vec![0.0, 1.0], vec![1.0, 0.0]])).norm() < 1e-14);
        assert!((&p.modulus - &real(&[vec![1.0, 0.0], vec![0.0, 2.0]])).norm() < 1e-14);
        assert!((&(&p.unitary * &p.modulus) - &t).norm() < 1e-14);

        let p = polar_decompose(&ComplexMatrix::zeros(2)).unwrap();
        assert_eq!(p.unitary, ComplexMatrix::identity(2));
        assert!(p.modulus.is_zero());
    }

    #[test]
    fn polar_of_singular_matrix_has_unitary_factor() {
        let t = real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let p = polar_decompose(&t).unwrap();
        assert!(unitarity_residual(&p.unitary) < 1e-14);
        assert!((&(&p.unitary * &p.modulus) - &t).norm() < 1e-14);
    }

    #[test]
    fn sylvester_examples() {
        let tol = Tolerances::default();
        let x = sylvester_solve(&real(&[vec![1.0]]), &real(&[vec![-1.0]]), &real(&[vec![1.0]]), &tol).unwrap();
        assert!((x.get(0, 0) - c(0.5, 0.0)).norm() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a_d = [c(1.0, 0.5), c(2.0, 0.0), c(-1.0, 1.0)];
        let b_d = [c(5.0, 0.0), c(0.0, -3.0), c(4.0, 4.0)];
        let y = random_matrix(&mut rng, 3);
        let x = sylvester_solve(&ComplexMatrix::from_diagonal(&a_d), &ComplexMatrix::from_diagonal(&b_d), &y, &tol)
            .unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expected = y.get(i, j) / (a_d[i] - b_d[j]);
                assert!((x.get(i, j) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sylvester_random_residual() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shift = ComplexMatrix::identity(4).scale(c(10.0, 0.0));
        let a = &random_matrix(&mut rng, 4) + &shift;
        let b = &random_matrix(&mut rng, 4) - &shift;
        let y = random_matrix(&mut rng, 4);
        let x = sylvester_solve(&a, &b, &y, &tol).unwrap();
        let residual = (&(&(&a * &x) - &(&x * &b)) - &y).norm();
        assert!(residual < 1e-10 * y.norm(), "residual {residual}");
    }

    #[test]
    fn sylvester_rejects_shared_eigenvalue() {
        let tol = Tolerances::default();
        let a = real(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        let b = real(&[vec![2.0]]);
        let y = real(&[vec![1.0], vec![1.0]]);
        assert!(matches!(sylvester_solve(&a, &b, &y, &tol), Err(Error::SingularSylvester { .. })));
    }

    #[test]
    fn spectrum_examples() {
        let s = spectrum(&real(&[vec![2.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert_eq!(s.eigenvalues(), &[c(1.0, 0.0), c(2.0, 0.0)]);

        let s = spectrum(&real(&[vec![0.0, 2.0], vec![1.0, 0.0]])).unwrap();
        let r2 = 2f64.sqrt();
        assert!(s.max_deviation(&Spectrum::new(vec![c(-r2, 0.0), c(r2, 0.0)])) < 1e-14);

        let s = spectrum(&real(&[vec![1.0, 1.0], vec![0.0, 1.0]])).unwrap();
        assert!(s.max_deviation(&Spectrum::new(vec![c(1.0, 0.0), c(1.0, 0.0)])) < 1e-14);
    }

    #[test]
    fn normality_examples() {
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 2.0), c(-3.0, 0.0), c(0.0, 1.0)]);
        assert_eq!(normality_residual(&d), 0.0);

        // Frobenius norm of the commutator diag(-1, 1).
        let t = real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!((normality_residual(&t) - 2f64.sqrt()).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(&mut rng, 4);
        let n = d.direct_sum(&ComplexMatrix::from_diagonal(&[c(2.0, -1.0)])).conjugate_by(&u);
        assert!(normality_residual(&n) < 1e-12);
    }

    #[test]
    fn rank_thresholds_relative_to_unit_floor() {
        assert_eq!(numerical_rank(&ComplexMatrix::zeros(3), 1e-10).unwrap(), 0);
        let t = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(1e-17, 0.0)]);
        assert_eq!(numerical_rank(&t, 1e-10).unwrap(), 1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn polar_reconstructs(seed in any::<u64>(), n in 1usize..7) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = random_matrix(&mut rng, n);
                let p = polar_decompose(&t).unwrap();
                prop_assert!((&(&p.unitary * &p.modulus) - &t).norm() <= 1e-10 * (1.0 + t.norm()));
                prop_assert!(unitarity_residual(&p.unitary) <= 1e-10);
                prop_assert!(hermitian_residual(&p.modulus) <= 1e-12);
            }

            #[test]
            fn sqrt_eigenvalues_are_roots(seed in any::<u64>(), n in 1usize..7) {
                let tol = Tolerances::default();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let g = random_matrix(&mut rng, n);
                let p = &g.adjoint() * &g;
                let (lp, _) = hermitian_eigen(&p, &tol).unwrap();
                let (ls, _) = hermitian_eigen(&hermitian_sqrt(&p, &tol).unwrap(), &tol).unwrap();
                for (a, b) in lp.iter().zip(&ls) {
                    prop_assert!((a.max(0.0).sqrt() - b).abs() <= 1e-10 * (1.0 + p.norm()));
                }
            }

            #[test]
            fn sylvester_diagonal_matches_closed_form(seed in any::<u64>(), m in 1usize..5, n in 1usize..5) {
                let tol = Tolerances::default();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a_d: Vec<Complex64> = (0..m).map(|k| c(k as f64 + 1.0, 0.3)).collect();
                let b_d: Vec<Complex64> = (0..n).map(|k| c(-(k as f64) - 0.5, -0.7)).collect();
                let y = random_matrix(&mut rng, m.max(n));
                let y = ComplexMatrix::try_from_matrix(y.as_matrix().view((0, 0), (m, n)).into_owned()).unwrap();
                let x = sylvester_solve(&ComplexMatrix::from_diagonal(&a_d), &ComplexMatrix::from_diagonal(&b_d), &y, &tol).unwrap();
                for i in 0..m {
                    for j in 0..n {
                        prop_assert!((x.get(i, j) - y.get(i, j) / (a_d[i] - b_d[j])).norm() <= 1e-12);
                    }
                }
            }

            #[test]
            fn spectrum_is_unitarily_invariant(seed in any::<u64>(), n in 1usize..7) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let t = random_matrix(&mut rng, n);
                let v = random_unitary(&mut rng, n);
                let a = spectrum(&t).unwrap();
                let b = spectrum(&t.conjugate_by(&v)).unwrap();
                prop_assert!(a.max_deviation(&b) <= 1e-9, "deviation {}", a.max_deviation(&b));
            }
        }
    }
}

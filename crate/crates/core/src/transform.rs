//! The Aluthge transform `Δ(T) = |T|^{1/2} U |T|^{1/2}`, its iterates and their limit.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, normality_residual, numerical_rank, spectrum, Tolerances};
use crate::matrix::ComplexMatrix;

/// Aluthge transform of a square matrix.
///
/// With `T = W Σ V*`, the polar factors are `U = W V*` and `|T|^{1/2} = V Σ^{1/2} V*`,
/// so `Δ(T) = V Σ^{1/2} (V* W) Σ^{1/2} V*`.
///
/// Singular values at the rounding floor (`≤ n ε σ_max`) are set to zero before the
/// square root; otherwise a numerically singular `T` picks up `O(√ε)` noise.
pub fn aluthge(t: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = t.dim()?;
    if t.is_zero() {
        return Ok(ComplexMatrix::zeros(n));
    }
    let f = linalg::svd(t.as_matrix())?;
    let floor = n as f64 * f64::EPSILON * f.sigma[0];
    let roots: Vec<f64> = f.sigma.iter().map(|&s| if s <= floor { 0.0 } else { s.sqrt() }).collect();
    let mut core = f.v.adjoint() * &f.w;
    for i in 0..n {
        for j in 0..n {
            core[(i, j)] *= roots[i] * roots[j];
        }
    }
    Ok(ComplexMatrix::wrap(&f.v * core * f.v.adjoint()))
}

/// `|T|^{1/2} T |T|^{-1/2}` for invertible `T`.
pub fn aluthge_invertible(t: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    t.dim()?;
    let f = linalg::svd(t.as_matrix())?;
    let sigma_max = f.sigma.first().copied().unwrap_or(0.0);
    let sigma_min = f.sigma.last().copied().unwrap_or(0.0);
    if sigma_min <= tol.inv * sigma_max.max(1.0) {
        return Err(Error::Singular { sigma_min });
    }
    let gram = |power: f64| {
        let mut vs = f.v.clone();
        for (j, s) in f.sigma.iter().enumerate() {
            vs.column_mut(j).scale_mut(s.powf(power));
        }
        &vs * f.v.adjoint()
    };
    Ok(ComplexMatrix::wrap(gram(0.5) * t.as_matrix() * gram(-0.5)))
}

/// The iterates `Δ⁰(T), …, Δⁿ(T)` together with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    iterates: Vec<ComplexMatrix>,
    distances: Vec<f64>,
    normality: Vec<f64>,
}

impl Trajectory {
    fn from_iterates(iterates: Vec<ComplexMatrix>) -> Self {
        let mut distances: Vec<f64> = iterates.windows(2).map(|w| (&w[1] - &w[0]).norm()).collect();
        // Pad to one entry per iterate by repeating the last step.
        distances.push(distances.last().copied().unwrap_or(0.0));
        let normality = iterates.iter().map(normality_residual).collect();
        Self { iterates, distances, normality }
    }

    pub fn start(&self) -> &ComplexMatrix {
        &self.iterates[0]
    }

    pub fn iterates(&self) -> &[ComplexMatrix] {
        &self.iterates
    }

    pub fn last(&self) -> &ComplexMatrix {
        self.iterates.last().expect("trajectory always holds its start")
    }

    /// Number of transform applications, `iterates().len() - 1`.
    pub fn steps(&self) -> usize {
        self.iterates.len() - 1
    }

    /// `distances[k] = ‖Δ^{k+1} − Δ^k‖` for `k < n`; the final entry repeats the last step.
    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    /// The `n` genuine step lengths, without padding.
    pub fn step_norms(&self) -> &[f64] {
        &self.distances[..self.steps()]
    }

    pub fn normality(&self) -> &[f64] {
        &self.normality
    }

    pub fn norms(&self) -> Vec<f64> {
        self.iterates.iter().map(ComplexMatrix::norm).collect()
    }

    /// Writes `iter, step_norm, normality_residual, frobenius_norm`, one row per iterate.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["iter", "step_norm", "normality_residual", "frobenius_norm"])?;
        for (k, m) in self.iterates.iter().enumerate() {
            w.write_record([
                k.to_string(),
                format!("{:e}", self.distances[k]),
                format!("{:e}", self.normality[k]),
                format!("{:e}", m.norm()),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes every iterate as `iter_<k>.json` into `dir`.
    pub fn dump_iterates(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        for (k, m) in self.iterates.iter().enumerate() {
            m.write_json(dir.join(format!("iter_{k}.json")))?;
        }
        Ok(())
    }
}

/// `n` applications of the transform starting at `t`.
pub fn iterate(t: &ComplexMatrix, n: usize) -> Result<Trajectory> {
    t.dim()?;
    let mut iterates = Vec::with_capacity(n + 1);
    iterates.push(t.clone());
    for _ in 0..n {
        let next = aluthge(iterates.last().unwrap())?;
        iterates.push(next);
    }
    Ok(Trajectory::from_iterates(iterates))
}

/// Stopping rule for [`limit`]: both the step and the normality residual must be small.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LimitOptions {
    pub tol_conv: f64,
    pub tol_norm: f64,
    pub max_iter: usize,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self { tol_conv: 1e-11, tol_norm: 1e-9, max_iter: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub limit: ComplexMatrix,
    pub iterations_used: usize,
    pub converged: bool,
    pub final_step: f64,
    pub final_normality: f64,
}

/// Iterates until `‖Δ^{k+1} − Δ^k‖ < tol_conv` and the normality residual of `Δ^k` is
/// below `tol_norm`, or `max_iter` transforms have been applied.
///
/// Non-convergence is reported through `converged = false`, not as an error.
pub fn limit(t: &ComplexMatrix, opts: &LimitOptions) -> Result<LimitReport> {
    run_to_limit(t, opts, |_| {})
}

/// Like [`limit`], also returning every iterate visited.
pub fn limit_with_trajectory(t: &ComplexMatrix, opts: &LimitOptions) -> Result<(LimitReport, Trajectory)> {
    let mut iterates = vec![t.clone()];
    let report = run_to_limit(t, opts, |m| iterates.push(m.clone()))?;
    iterates.truncate(report.iterations_used + 1);
    Ok((report, Trajectory::from_iterates(iterates)))
}

fn run_to_limit(
    t: &ComplexMatrix,
    opts: &LimitOptions,
    mut visit: impl FnMut(&ComplexMatrix),
) -> Result<LimitReport> {
    t.dim()?;
    if opts.max_iter == 0 {
        return Err(Error::InvalidArgument("max_iter must be at least 1".into()));
    }
    let mut current = t.clone();
    let mut final_step = f64::INFINITY;
    for k in 0..=opts.max_iter {
        let normality = normality_residual(&current);
        if k == opts.max_iter {
            return Ok(LimitReport {
                limit: current,
                iterations_used: k,
                converged: false,
                final_step,
                final_normality: normality,
            });
        }
        let next = aluthge(&current)?;
        let step = (&next - &current).norm();
        if step < opts.tol_conv && normality < opts.tol_norm {
            return Ok(LimitReport {
                limit: current,
                iterations_used: k,
                converged: true,
                final_step: step,
                final_normality: normality,
            });
        }
        final_step = step;
        visit(&next);
        current = next;
    }
    unreachable!("loop returns at k == max_iter")
}

/// Unitary reduction `W Δ(T) W* = S ⊕ 0` with `S` invertible.
#[derive(Debug, Clone)]
pub struct SingularSplit {
    pub unitary: ComplexMatrix,
    /// `None` when `Δ(T)` is zero.
    pub invertible_block: Option<ComplexMatrix>,
    pub zero_dim: usize,
}

/// Largest cosine of the principal angles between range and kernel treated as orthogonal.
pub const RANGE_KERNEL_COSINE: f64 = 1e-8;

/// Splits `Δ(t)` into an invertible block and a zero block by a unitary change of basis.
///
/// Requires `range(Δ(t)) ⊥ ker(Δ(t))`, which holds once the kernel of the iterates has
/// stabilized; it is checked through the principal angles between the two subspaces.
pub fn split_singular(t: &ComplexMatrix, tol: &Tolerances) -> Result<SingularSplit> {
    let n = t.dim()?;
    let a = aluthge(t)?;
    let f = linalg::svd(a.as_matrix())?;
    let threshold = tol.rank * f.sigma[0].max(1.0);
    let rank = f.sigma.iter().filter(|&&s| s > threshold).count();
    let zero_dim = n - rank;

    if zero_dim == 0 {
        return Ok(SingularSplit { unitary: ComplexMatrix::identity(n), invertible_block: Some(a), zero_dim });
    }
    if rank == 0 {
        return Ok(SingularSplit { unitary: ComplexMatrix::identity(n), invertible_block: None, zero_dim });
    }

    let range = f.w.columns(0, rank).into_owned();
    let kernel = f.v.columns(rank, zero_dim).into_owned();
    let cross = range.adjoint() * &kernel;
    let cosine = linalg::svd(&cross)?.sigma.first().copied().unwrap_or(0.0);
    if cosine > RANGE_KERNEL_COSINE {
        return Err(Error::RangeKernelNotOrthogonal { cosine });
    }

    // Columns of W*: range basis followed by kernel basis, re-orthonormalized.
    let mut basis = DMatrix::<Complex64>::zeros(n, n);
    basis.columns_mut(0, rank).copy_from(&range);
    basis.columns_mut(rank, zero_dim).copy_from(&kernel);
    let q = basis.qr().q();
    let w = q.adjoint();
    let reduced = &w * a.as_matrix() * &q;
    let block = reduced.view((0, 0), (rank, rank)).into_owned();
    let sigma_min = linalg::svd(&block)?.sigma.last().copied().unwrap_or(0.0);
    if sigma_min <= tol.inv * f.sigma[0].max(1.0) {
        return Err(Error::Singular { sigma_min });
    }
    Ok(SingularSplit {
        unitary: ComplexMatrix::wrap(w),
        invertible_block: Some(ComplexMatrix::wrap(block)),
        zero_dim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicities {
    pub algebraic: usize,
    pub geometric: usize,
}

/// Algebraic and geometric multiplicity of `mu` as an eigenvalue of `t`.
///
/// Both are zero when `mu` is not within the matching tolerance of the spectrum.
pub fn multiplicities(t: &ComplexMatrix, mu: Complex64, tol: &Tolerances) -> Result<Multiplicities> {
    let n = t.dim()?;
    let scale = t.norm().max(1.0);
    let algebraic = spectrum(t)?.count_near(mu, tol.eig_match * scale);
    if algebraic == 0 {
        return Ok(Multiplicities { algebraic: 0, geometric: 0 });
    }
    let shifted = t - &ComplexMatrix::identity(n).scale(mu);
    let sigma = linalg::singular_values(&shifted)?;
    let threshold = tol.rank * scale;
    let rank = sigma.iter().filter(|&&s| s > threshold).count();
    Ok(Multiplicities { algebraic, geometric: n - rank })
}

/// Distinct eigenvalues, clustering those within the matching tolerance.
pub fn distinct_eigenvalues(t: &ComplexMatrix, tol: &Tolerances) -> Result<Vec<Complex64>> {
    let spec = spectrum(t)?;
    let radius = tol.eig_match * t.norm().max(1.0);
    let mut reps: Vec<Complex64> = Vec::new();
    for &z in spec.eigenvalues() {
        if reps.iter().all(|r| (r - z).norm() > radius) {
            reps.push(z);
        }
    }
    Ok(reps)
}

/// True when every eigenvalue has equal algebraic and geometric multiplicity.
pub fn is_diagonalizable(t: &ComplexMatrix, tol: &Tolerances) -> Result<bool> {
    for mu in distinct_eigenvalues(t, tol)? {
        let m = multiplicities(t, mu, tol)?;
        if m.algebraic != m.geometric {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Dimension of the numerical kernel.
pub fn kernel_dim(t: &ComplexMatrix, tol: &Tolerances) -> Result<usize> {
    Ok(t.dim()? - numerical_rank(t, tol.rank)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_sqrt, polar_decompose};
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
    fn normal_matrices_are_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let u = random_unitary(&mut rng, 3);
        let n = ComplexMatrix::from_diagonal(&[c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 0.5)]).conjugate_by(&u);
        assert!((&aluthge(&n).unwrap() - &n).norm() < 1e-13);
    }

    #[test]
    fn nilpotent_block_collapses() {
        let t = real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(aluthge(&t).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hand_computed_transform() {
        let t = real(&[vec![0.0, 2.0], vec![1.0, 0.0]]);
        let r2 = 2f64.sqrt();
        let expected = real(&[vec![0.0, r2], vec![r2, 0.0]]);
        let got = aluthge(&t).unwrap();
        assert!((&got - &expected).norm() < 1e-14);
        assert!(normality_residual(&got) < 1e-14);
    }

    #[test]
    fn matches_literal_polar_route() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..6 {
            let t = random_matrix(&mut rng, n);
            let p = polar_decompose(&t).unwrap();
            let root = hermitian_sqrt(&p.modulus, &tol).unwrap();
            let literal = &(&root * &p.unitary) * &root;
            assert!((&aluthge(&t).unwrap() - &literal).norm() < 1e-12 * (1.0 + t.norm()));
        }
    }

    #[test]
    fn invertible_formula_agrees() {
        let tol = Tolerances::default();
        let d = real(&[vec![1.0, 0.0], vec![0.0, 2.0]]);
        assert!((&aluthge_invertible(&d, &tol).unwrap() - &d).norm() < 1e-14);

        let t = real(&[vec![1.0, 1.0], vec![0.0, 2.0]]);
        let a = aluthge(&t).unwrap();
        let b = aluthge_invertible(&t, &tol).unwrap();
        assert!((&a - &b).norm() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let t = random_matrix(&mut rng, 3);
        let b = aluthge_invertible(&t, &tol).unwrap();
        assert!((&aluthge(&t).unwrap() - &b).norm() < 1e-9 * t.norm());
        assert!(spectrum(&t).unwrap().max_deviation(&spectrum(&b).unwrap()) < 1e-9);

        let singular = real(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        assert!(matches!(aluthge_invertible(&singular, &tol), Err(Error::Singular { .. })));
    }

    #[test]
    fn iterate_examples() {
        let n = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let traj = iterate(&n, 4).unwrap();
        assert_eq!(traj.iterates().len(), 5);
        assert!(traj.iterates().iter().all(|m| (m - &n).norm() < 1e-14));

        let t = real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let traj = iterate(&t, 2).unwrap();
        assert_eq!(traj.start(), &t);
        assert!(traj.iterates()[1].norm() < 1e-15 && traj.iterates()[2].norm() < 1e-15);
        assert_eq!(traj.distances().len(), 3);
        assert!((traj.distances()[0] - 1.0).abs() < 1e-15);
        assert_eq!(traj.distances()[2], traj.distances()[1]);
    }

    #[test]
    fn iterate_zero_steps() {
        let t = real(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let traj = iterate(&t, 0).unwrap();
        assert_eq!(traj.steps(), 0);
        assert_eq!(traj.distances(), &[0.0]);
        assert!(traj.step_norms().is_empty());
    }

    #[test]
    fn geometric_decay_for_upper_triangular() {
        let t = real(&[vec![1.0, 1.0], vec![0.0, 2.0]]);
        let traj = iterate(&t, 50).unwrap();
        let steps = traj.step_norms();
        let k_d = 2.0 * 2f64.sqrt() / 3.0;
        // Ratio over the tail of the run.
        let ratio = (steps[49] / steps[29]).powf(1.0 / 20.0);
        assert!(ratio <= k_d + 0.02, "ratio {ratio}");
    }

    #[test]
    fn limit_examples() {
        let opts = LimitOptions::default();
        let t = real(&[vec![1.0, 1.0], vec![0.0, 2.0]]);
        let r = limit(&t, &opts).unwrap();
        assert!(r.converged);
        assert!(r.final_normality < opts.tol_norm && r.final_step < opts.tol_conv);
        let spec = spectrum(&r.limit).unwrap();
        assert!(spec.max_deviation(&linalg::Spectrum::new(vec![c(1.0, 0.0), c(2.0, 0.0)])) < 1e-9);

        let n = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 2.0)]);
        let r = limit(&n, &opts).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations_used, 0);
        assert_eq!(r.limit, n);
    }

    #[test]
    fn jordan_block_approaches_scalar_slowly() {
        // The only normal matrix with spectrum {λ, λ} is λI, but the approach is
        // sublinear: the distance to λI shrinks roughly like n^{-1/2}.
        let opts = LimitOptions { max_iter: 2000, ..LimitOptions::default() };
        for lambda in [c(1.0, 0.0), c(0.0, 1.0), c(-2.0, 0.0)] {
            let t = ComplexMatrix::from_rows(&[vec![lambda, c(1.0, 0.0)], vec![c(0.0, 0.0), lambda]]).unwrap();
            let (r, traj) = limit_with_trajectory(&t, &opts).unwrap();
            assert!(!r.converged, "lambda {lambda}");
            let target = ComplexMatrix::identity(2).scale(lambda);
            let dist: Vec<f64> = traj.iterates().iter().map(|m| (m - &target).norm()).collect();
            assert!(dist.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            let slope = (dist[2000] / dist[200]).ln() / 10f64.ln();
            assert!((slope + 0.5).abs() < 0.05, "lambda {lambda}: slope {slope}");
            let spec = spectrum(&r.limit).unwrap();
            assert!(spec.eigenvalues().iter().all(|z| (z - lambda).norm() < 1e-6));
        }
    }

    #[test]
    fn limit_reports_non_convergence() {
        let opts = LimitOptions { max_iter: 1, ..LimitOptions::default() };
        let t = real(&[vec![1.0, 5.0], vec![0.0, 2.0]]);
        let r = limit(&t, &opts).unwrap();
        assert!(!r.converged);
        assert_eq!(r.iterations_used, 1);
        let opts = LimitOptions { max_iter: 0, ..LimitOptions::default() };
        assert!(limit(&t, &opts).is_err());
    }

    #[test]
    fn limit_trajectory_matches_report() {
        let t = real(&[vec![1.0, 1.0], vec![0.0, 2.0]]);
        let (r, traj) = limit_with_trajectory(&t, &LimitOptions::default()).unwrap();
        assert_eq!(traj.steps(), r.iterations_used);
        assert_eq!(traj.last(), &r.limit);
    }

    #[test]
    fn split_examples() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = random_matrix(&mut rng, 3);
        let s = split_singular(&t, &tol).unwrap();
        assert_eq!(s.zero_dim, 0);
        assert_eq!(s.invertible_block.unwrap(), aluthge(&t).unwrap());

        let s = split_singular(&ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 0.0)]), &tol).unwrap();
        assert_eq!(s.zero_dim, 1);
        let block = s.invertible_block.unwrap();
        assert_eq!(block.rows(), 1);
        assert!((block.get(0, 0) - c(1.0, 0.0)).norm() < 1e-14);

        let s = split_singular(&real(&[vec![0.0, 1.0], vec![0.0, 0.0]]), &tol).unwrap();
        assert_eq!(s.zero_dim, 2);
        assert!(s.invertible_block.is_none());
    }

    #[test]
    fn split_reconstructs_after_kernel_stabilizes() {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        // Diagonalizable with a two-dimensional kernel.
        let s = random_matrix(&mut rng, 4);
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 2.0)]);
        let inv = ComplexMatrix::wrap(s.as_matrix().clone().try_inverse().unwrap());
        let t = &(&s * &d) * &inv;
        let split = split_singular(&t, &tol).unwrap();
        assert_eq!(split.zero_dim, 2);
        let block = split.invertible_block.unwrap();
        let embedded = block.direct_sum(&ComplexMatrix::zeros(2));
        let a = aluthge(&t).unwrap();
        let w = &split.unitary;
        assert!((&embedded.conjugate_by(&w.adjoint()) - &a).norm() < 1e-9 * a.norm());
        assert!(linalg::unitarity_residual(w) < 1e-12);
    }

    #[test]
    fn split_rejects_non_orthogonal_range_kernel() {
        let tol = Tolerances::default();
        // Δ of a 3x3 nilpotent Jordan block is still non-normal with range not ⊥ kernel.
        let t = real(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0]]);
        let err = split_singular(&t, &tol).unwrap_err();
        assert!(matches!(err, Error::RangeKernelNotOrthogonal { .. }), "{err}");
    }

    #[test]
    fn multiplicity_examples() {
        let tol = Tolerances::default();
        let j = real(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert_eq!(multiplicities(&j, c(0.0, 0.0), &tol).unwrap(), Multiplicities { algebraic: 2, geometric: 1 });
        let dj = aluthge(&j).unwrap();
        assert_eq!(multiplicities(&dj, c(0.0, 0.0), &tol).unwrap(), Multiplicities { algebraic: 2, geometric: 2 });
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        assert_eq!(multiplicities(&d, c(1.0, 0.0), &tol).unwrap(), Multiplicities { algebraic: 2, geometric: 2 });
        assert_eq!(multiplicities(&d, c(5.0, 0.0), &tol).unwrap(), Multiplicities { algebraic: 0, geometric: 0 });
    }

    #[test]
    fn diagonalizability_detection() {
        let tol = Tolerances::default();
        assert!(!is_diagonalizable(&real(&[vec![1.0, 1.0], vec![0.0, 1.0]]), &tol).unwrap());
        assert!(is_diagonalizable(&real(&[vec![1.0, 1.0], vec![0.0, 2.0]]), &tol).unwrap());
    }

    #[test]
    fn trajectory_csv_and_dump() {
        let dir = tempfile::tempdir().unwrap();
        let t = real(&[vec![1.0, 1.0], vec![0.0, 2.0]]);
        let traj = iterate(&t, 3).unwrap();
        traj.write_csv(dir.path().join("t.csv")).unwrap();
        let text = fs::read_to_string(dir.path().join("t.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "iter,step_norm,normality_residual,frobenius_norm");
        assert_eq!(lines.count(), 4);
        traj.dump_iterates(dir.path().join("dump")).unwrap();
        let back = ComplexMatrix::read_json(dir.path().join("dump/iter_3.json")).unwrap();
        assert_eq!(&back, traj.last());
    }
}

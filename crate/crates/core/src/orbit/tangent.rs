use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::context::OrbitContext;
use super::kit::DerivativeKit;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Absolute floor (relative to `max(1, ‖x‖)`) for entries that must vanish in a tangent vector.
const TANGENT_TOL: f64 = 1e-12;

/// Real coordinates on `T_D O(D)`: the entries at unequal pairs, stacked as
/// `(Re x_p …, Im x_p …)`. The coordinate basis `{E_ij, iE_ij}` is orthonormal for
/// `Re tr(B*A)`, so operator norms are spectral norms of the coordinate matrices.
#[derive(Debug, Clone)]
pub struct TangentCoords {
    r: usize,
    pairs: Vec<(usize, usize)>,
    equal: Vec<bool>,
}

impl TangentCoords {
    pub fn new(ctx: &OrbitContext) -> Self {
        let r = ctx.dim();
        let equal = (0..r * r).map(|k| ctx.is_equal(k / r, k % r)).collect();
        Self { r, pairs: ctx.unequal_pairs(), equal }
    }

    pub fn matrix_dim(&self) -> usize {
        self.r
    }

    /// Real dimension of `T_D O(D)`.
    pub fn real_dim(&self) -> usize {
        2 * self.pairs.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Checks that `x` vanishes on equal pairs.
    pub fn check(&self, x: &ComplexMatrix) -> Result<()> {
        let r = self.r;
        if x.rows() != r || x.cols() != r {
            return Err(Error::DimensionMismatch {
                expected: format!("{r}x{r}"),
                got: format!("{}x{}", x.rows(), x.cols()),
            });
        }
        let tol = TANGENT_TOL * x.norm().max(1.0);
        for i in 0..r {
            for j in 0..r {
                let v = x.get(i, j).norm();
                if self.equal[i * r + j] && v > tol {
                    return Err(Error::NotTangent { row: i, col: j, value: v });
                }
            }
        }
        Ok(())
    }

    pub fn to_coords(&self, x: &ComplexMatrix) -> Result<DVector<f64>> {
        self.check(x)?;
        Ok(self.coords_unchecked(x))
    }

    pub(crate) fn coords_unchecked(&self, x: &ComplexMatrix) -> DVector<f64> {
        let m = self.pairs.len();
        let mut v = DVector::zeros(2 * m);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            let z = x.get(i, j);
            v[p] = z.re;
            v[m + p] = z.im;
        }
        v
    }

    pub fn from_coords(&self, v: &DVector<f64>) -> ComplexMatrix {
        let m = self.pairs.len();
        assert_eq!(v.len(), 2 * m, "coordinate vector length");
        let mut x = DMatrix::zeros(self.r, self.r);
        for (p, &(i, j)) in self.pairs.iter().enumerate() {
            x[(i, j)] = Complex64::new(v[p], v[m + p]);
        }
        ComplexMatrix::wrap(x)
    }

    /// The orthonormal coordinate basis `E_ij` then `iE_ij`.
    pub fn basis(&self) -> Vec<ComplexMatrix> {
        let n = self.real_dim();
        (0..n)
            .map(|k| {
                let mut e = DVector::zeros(n);
                e[k] = 1.0;
                self.from_coords(&e)
            })
            .collect()
    }

    /// Coordinate matrix of a real-linear map of the tangent space into itself.
    pub fn operator_matrix(&self, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> DMatrix<f64> {
        let n = self.real_dim();
        let mut out = DMatrix::zeros(n, n);
        for (k, e) in self.basis().iter().enumerate() {
            out.set_column(k, &self.coords_unchecked(&f(e)));
        }
        out
    }
}

/// Real bases of `T_D O(D)` and `T_D O_U(D)`.
#[derive(Debug, Clone)]
pub struct TangentBases {
    pub tangent: Vec<ComplexMatrix>,
    /// `[A, D]` for the anti-Hermitian generators `E_ij − E_ji` and `i(E_ij + E_ji)`, `i < j`.
    pub unitary: Vec<ComplexMatrix>,
}

pub fn tangent_basis(ctx: &OrbitContext) -> TangentBases {
    let coords = TangentCoords::new(ctx);
    let d = ctx.diagonal();
    let r = ctx.dim();
    let mut unitary = Vec::new();
    for &(i, j) in coords.pairs().iter().filter(|&&(i, j)| i < j) {
        let mut a = DMatrix::zeros(r, r);
        a[(i, j)] = Complex64::new(1.0, 0.0);
        a[(j, i)] = Complex64::new(-1.0, 0.0);
        unitary.push(ComplexMatrix::wrap(a).commutator(&d));
        let mut b = DMatrix::zeros(r, r);
        b[(i, j)] = Complex64::new(0.0, 1.0);
        b[(j, i)] = Complex64::new(0.0, 1.0);
        unitary.push(ComplexMatrix::wrap(b).commutator(&d));
    }
    TangentBases { tangent: coords.basis(), unitary }
}

/// Anti-Hermitian part `(B − B*)/2`.
fn anti_hermitian_part(b: &ComplexMatrix) -> ComplexMatrix {
    (b - &b.adjoint()).scale(Complex64::new(0.5, 0.0))
}

/// Orthogonal projection of `T_D O(D)` onto the complement of `T_D O_U(D)`:
/// `Q_D(x) = J ∘ P(J̄ ∘ x)` with `P` the anti-Hermitian part.
pub fn projection_qd(ctx: &OrbitContext, kit: &DerivativeKit, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    TangentCoords::new(ctx).check(x)?;
    Ok(qd_unchecked(kit, x))
}

pub(crate) fn qd_unchecked(kit: &DerivativeKit, x: &ComplexMatrix) -> ComplexMatrix {
    let j_conj = ComplexMatrix::wrap(kit.J.as_matrix().map(|z| z.conj()));
    kit.J.hadamard(&anti_hermitian_part(&j_conj.hadamard(x)))
}

/// Analytic derivative of `Δ` at `D`: `H ∘ Q_D(x) + (x − Q_D(x))`.
pub fn derivative_at_d(ctx: &OrbitContext, kit: &DerivativeKit, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    TangentCoords::new(ctx).check(x)?;
    Ok(derivative_unchecked(kit, x))
}

pub(crate) fn derivative_unchecked(kit: &DerivativeKit, x: &ComplexMatrix) -> ComplexMatrix {
    let q = qd_unchecked(kit, x);
    &kit.H.hadamard(&q) + &(x - &q)
}

use nalgebra::DMatrix;

use super::context::OrbitContext;
use super::decomposition::TangentDecomposition;
use crate::error::{Error, Result};
use crate::linalg::unitarity_residual;
use crate::matrix::ComplexMatrix;

const UNITARY_TOL: f64 = 1e-10;

/// The decomposition at `N = U D U*`, obtained by transporting with `Ad_U : X ↦ U X U*`.
///
/// `Ad_U` is an isometry of tangent spaces, so the coordinate matrices of all operators are
/// those at `D` when the basis at `N` is the transported coordinate basis.
#[derive(Debug, Clone)]
pub struct TransportedDecomposition {
    u: ComplexMatrix,
    point: ComplexMatrix,
    base: TangentDecomposition,
}

pub fn conjugate_to_n(ctx: &OrbitContext, dec: &TangentDecomposition, u: &ComplexMatrix) -> Result<TransportedDecomposition> {
    let r = ctx.dim();
    if u.rows() != r || u.cols() != r {
        return Err(Error::DimensionMismatch { expected: format!("{r}x{r}"), got: format!("{}x{}", u.rows(), u.cols()) });
    }
    let residual = unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    Ok(TransportedDecomposition { u: u.clone(), point: ctx.diagonal().conjugate_by(u), base: dec.clone() })
}

impl TransportedDecomposition {
    /// `N = U D U*`.
    pub fn point(&self) -> &ComplexMatrix {
        &self.point
    }

    pub fn unitary(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `Ad_U^{-1}(X) = U* X U`.
    pub fn pull_back(&self, x: &ComplexMatrix) -> ComplexMatrix {
        x.conjugate_by(&self.u.adjoint())
    }

    /// `Ad_U(Y) = U Y U*`.
    pub fn push_forward(&self, y: &ComplexMatrix) -> ComplexMatrix {
        y.conjugate_by(&self.u)
    }

    fn transport_all(&self, xs: &[ComplexMatrix]) -> Vec<ComplexMatrix> {
        xs.iter().map(|x| self.push_forward(x)).collect()
    }

    pub fn tangent_basis(&self) -> Vec<ComplexMatrix> {
        self.transport_all(&self.base.tangent_basis)
    }

    pub fn unitary_tangent_basis(&self) -> Vec<ComplexMatrix> {
        self.transport_all(&self.base.unitary_tangent_basis)
    }

    pub fn stable_basis(&self) -> Vec<ComplexMatrix> {
        self.transport_all(&self.base.stable_basis)
    }

    /// `Ad_U ∘ op ∘ Ad_U^{-1}` applied to `x ∈ T_N O(D)`.
    pub fn apply(&self, op: &DMatrix<f64>, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(self.push_forward(&self.base.apply(op, &self.pull_back(x))?))
    }

    pub fn project_q(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(&self.base.q_op, x)
    }

    pub fn project_p(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(&self.base.p_op, x)
    }

    pub fn derivative(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.apply(&self.base.derivative_op, x)
    }

    /// Coordinate matrix of `P_N` in the transported basis.
    pub fn p_op(&self) -> &DMatrix<f64> {
        &self.base.p_op
    }

    pub fn a1_norm(&self) -> f64 {
        self.base.a1_norm
    }
}

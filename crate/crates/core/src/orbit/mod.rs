//! Geometry of the similarity orbit of a diagonal matrix `D` near its unitary orbit:
//! tangent spaces, the derivative of `Δ` at `D`, its block structure and the stable
//! subspace on which it contracts.

mod context;
mod decomposition;
mod finite_diff;
mod kit;
mod tangent;
mod transport;

pub use context::{contraction_constant, OrbitContext, DEFAULT_CLUSTER_TOL};
pub use decomposition::{
    block_operators, hadamard_operator, kit_dump, local_diffeo_check, operator_norm, stable_projection,
    BlockOperators, KitSummary, LocalDiffeo, StableSplit, TangentDecomposition,
};
pub use finite_diff::{
    derivative_check, finite_difference_at, finite_difference_derivative, richardson_derivative, DerivativeCheck, Richardson,
    DEFAULT_STEP,
};
pub use kit::{build_kit, DerivativeKit};
pub use tangent::{derivative_at_d, projection_qd, tangent_basis, TangentBases, TangentCoords};
pub use transport::{conjugate_to_n, TransportedDecomposition};

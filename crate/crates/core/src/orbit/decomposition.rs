use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use super::context::OrbitContext;
use super::kit::{build_kit, DerivativeKit};
use super::tangent::{derivative_unchecked, qd_unchecked, tangent_basis, TangentCoords};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Below this `|e^{iθ_i} + e^{iθ_j}|` a pair counts as opposite (`d̄_i d_j < 0`).
const OPPOSITE_TOL: f64 = 1e-10;
/// Smallest admissible singular value of `I − A₁`.
const INVERT_TOL: f64 = 1e-12;
/// Threshold separating the unit-or-larger singular values of `P` from zero.
const RANK_TOL: f64 = 1e-8;

/// Largest singular value of a real matrix; 0 when empty.
pub fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

fn smallest_singular_value(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return f64::INFINITY;
    }
    m.clone().svd(false, false).singular_values.min()
}

/// Coordinate matrix of the Hadamard multiplier `X ↦ A ∘ X` on `T_D O(D)`.
pub fn hadamard_operator(coords: &TangentCoords, a: &ComplexMatrix) -> DMatrix<f64> {
    coords.operator_matrix(|x| a.hadamard(x))
}

/// `Q_D`, `TΔ_D` and the blocks `A₁ = Q TΔ Q`, `A₂ = (I − Q) TΔ Q` in tangent coordinates.
#[derive(Debug, Clone)]
pub struct BlockOperators {
    pub q: DMatrix<f64>,
    pub derivative: DMatrix<f64>,
    pub a1: DMatrix<f64>,
    pub a2: DMatrix<f64>,
    pub a1_norm: f64,
}

pub fn block_operators(ctx: &OrbitContext, kit: &DerivativeKit) -> BlockOperators {
    let coords = TangentCoords::new(ctx);
    blocks_in(&coords, kit)
}

fn blocks_in(coords: &TangentCoords, kit: &DerivativeKit) -> BlockOperators {
    let q = coords.operator_matrix(|x| qd_unchecked(kit, x));
    let derivative = coords.operator_matrix(|x| derivative_unchecked(kit, x));
    let n = coords.real_dim();
    let a1 = &q * &derivative * &q;
    let a2 = (DMatrix::identity(n, n) - &q) * &derivative * &q;
    let a1_norm = operator_norm(&a1);
    BlockOperators { q, derivative, a1, a2, a1_norm }
}

/// The projection `P = Q − A₂ (I − A₁)^{-1} Q` onto the stable subspace along `T_D O_U(D)`.
#[derive(Debug, Clone)]
pub struct StableSplit {
    pub p: DMatrix<f64>,
    /// Orthonormal coordinate columns spanning `range(P)`.
    pub stable_coords: DMatrix<f64>,
    pub stable_basis: Vec<ComplexMatrix>,
}

pub fn stable_projection(ctx: &OrbitContext, kit: &DerivativeKit) -> Result<StableSplit> {
    let coords = TangentCoords::new(ctx);
    stable_from_blocks(&coords, &blocks_in(&coords, kit))
}

fn stable_from_blocks(coords: &TangentCoords, blocks: &BlockOperators) -> Result<StableSplit> {
    let n = coords.real_dim();
    if n == 0 {
        return Ok(StableSplit { p: DMatrix::zeros(0, 0), stable_coords: DMatrix::zeros(0, 0), stable_basis: Vec::new() });
    }
    let shifted = DMatrix::identity(n, n) - &blocks.a1;
    let sigma_min = smallest_singular_value(&shifted);
    if sigma_min <= INVERT_TOL {
        return Err(Error::Singular { sigma_min });
    }
    let solved = shifted.lu().solve(&blocks.q).ok_or(Error::Singular { sigma_min })?;
    let p = &blocks.q - &blocks.a2 * solved;
    let svd = p.clone().svd(true, false);
    let u = svd.u.ok_or(Error::NoConvergence("singular value decomposition"))?;
    let cols: Vec<DVector<f64>> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL)
        .map(|(k, _)| u.column(k).into_owned())
        .collect();
    let stable_coords = if cols.is_empty() { DMatrix::zeros(n, 0) } else { DMatrix::from_columns(&cols) };
    let stable_basis = cols.iter().map(|v| coords.from_coords(v)).collect();
    Ok(StableSplit { p, stable_coords, stable_basis })
}

/// Everything about `T_D O(D)` at once.
#[derive(Debug, Clone)]
pub struct TangentDecomposition {
    pub coords: TangentCoords,
    pub tangent_basis: Vec<ComplexMatrix>,
    pub unitary_tangent_basis: Vec<ComplexMatrix>,
    pub q_op: DMatrix<f64>,
    pub derivative_op: DMatrix<f64>,
    pub a1_op: DMatrix<f64>,
    pub a2_op: DMatrix<f64>,
    pub a1_norm: f64,
    pub p_op: DMatrix<f64>,
    pub stable_coords: DMatrix<f64>,
    pub stable_basis: Vec<ComplexMatrix>,
}

impl TangentDecomposition {
    pub fn new(ctx: &OrbitContext, kit: &DerivativeKit) -> Result<Self> {
        let coords = TangentCoords::new(ctx);
        let bases = tangent_basis(ctx);
        let blocks = blocks_in(&coords, kit);
        let stable = stable_from_blocks(&coords, &blocks)?;
        Ok(Self {
            coords,
            tangent_basis: bases.tangent,
            unitary_tangent_basis: bases.unitary,
            q_op: blocks.q,
            derivative_op: blocks.derivative,
            a1_op: blocks.a1,
            a2_op: blocks.a2,
            a1_norm: blocks.a1_norm,
            p_op: stable.p,
            stable_coords: stable.stable_coords,
            stable_basis: stable.stable_basis,
        })
    }

    pub fn real_dim(&self) -> usize {
        self.coords.real_dim()
    }

    /// Applies a coordinate operator to a tangent matrix.
    pub fn apply(&self, op: &DMatrix<f64>, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        let v = self.coords.to_coords(x)?;
        Ok(self.coords.from_coords(&(op * v)))
    }

    /// `‖Q TΔ − TΔ Q‖`.
    pub fn q_commutator_residual(&self) -> f64 {
        operator_norm(&(&self.q_op * &self.derivative_op - &self.derivative_op * &self.q_op))
    }

    /// `‖P TΔ − TΔ P‖`.
    pub fn p_commutator_residual(&self) -> f64 {
        operator_norm(&(&self.p_op * &self.derivative_op - &self.derivative_op * &self.p_op))
    }

    /// `‖P² − P‖`.
    pub fn p_idempotence_residual(&self) -> f64 {
        operator_norm(&(&self.p_op * &self.p_op - &self.p_op))
    }

    /// Norm of `TΔ` restricted to the stable subspace.
    pub fn stable_contraction(&self) -> f64 {
        operator_norm(&(&self.derivative_op * &self.stable_coords))
    }

    /// Rank of `Q_D` by singular-value thresholding.
    pub fn q_rank(&self) -> usize {
        if self.q_op.is_empty() {
            return 0;
        }
        self.q_op.clone().svd(false, false).singular_values.iter().filter(|&&s| s > 0.5).count()
    }
}

/// Local-diffeomorphism criterion at `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalDiffeo {
    /// No pair with `d̄_i d_j` real and negative.
    pub local_diffeo: bool,
    /// Smallest singular value of `TΔ_D` on `T_D O(D)`; infinite when the space is trivial.
    pub smallest_singular_value: f64,
}

pub fn local_diffeo_check(ctx: &OrbitContext) -> LocalDiffeo {
    let d = ctx.d();
    let opposite = ctx.unequal_pairs().iter().any(|&(i, j)| (d[i] / d[i].norm() + d[j] / d[j].norm()).norm() <= OPPOSITE_TOL);
    let coords = TangentCoords::new(ctx);
    let kit = build_kit(ctx);
    let derivative = coords.operator_matrix(|x| derivative_unchecked(&kit, x));
    LocalDiffeo { local_diffeo: !opposite, smallest_singular_value: smallest_singular_value(&derivative) }
}

/// Summary record of a kit dump.
#[derive(Debug, Clone, Serialize)]
pub struct KitSummary {
    pub r: usize,
    pub d: Vec<[f64; 2]>,
    pub k_d: f64,
    pub a1_norm: f64,
    pub local_diffeo: bool,
}

#[derive(Debug, Clone, Serialize)]
struct KitDump {
    summary: KitSummary,
    matrices: BTreeMap<&'static str, ComplexMatrix>,
}

/// All kit matrices plus the summary, as one JSON object.
pub fn kit_dump(ctx: &OrbitContext) -> Result<String> {
    let kit = build_kit(ctx);
    let blocks = block_operators(ctx, &kit);
    let summary = KitSummary {
        r: ctx.dim(),
        d: ctx.d().iter().map(|z: &Complex64| [z.re, z.im]).collect(),
        k_d: ctx.k_d(),
        a1_norm: blocks.a1_norm,
        local_diffeo: local_diffeo_check(ctx).local_diffeo,
    };
    let matrices = kit.named().into_iter().map(|(k, m)| (k, m.clone())).collect();
    Ok(serde_json::to_string_pretty(&KitDump { summary, matrices })?)
}

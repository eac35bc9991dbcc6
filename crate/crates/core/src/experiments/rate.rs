use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::transform::{aluthge, Trajectory};

/// Default allowance added to `k_D` when judging a measured rate.
pub const DEFAULT_RATE_SLACK: f64 = 0.02;

/// Successive distance ratios of a trajectory against its limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    /// `‖Δ^{k+1} − L‖ / ‖Δ^k − L‖` over the usable prefix.
    pub ratios: Vec<f64>,
    /// Geometric mean of the last `window` ratios; 0 when there are none.
    pub asymptotic_rate: f64,
    pub window: usize,
    pub k_d_bound: f64,
    pub slack: f64,
    pub satisfied: bool,
    /// Index of the first ratio after which every ratio is within `k_d_bound + slack`.
    pub transient_steps: usize,
}

/// Measures the asymptotic contraction rate of `trajectory` towards `limit`.
///
/// Distances at or below `100 ε ‖L‖` are noise; the trajectory is used up to and including the
/// first such distance. A trajectory that starts at its limit yields no ratios and is satisfied;
/// one that never reaches the floor needs at least three distances.
pub fn rate_estimate(trajectory: &Trajectory, limit: &ComplexMatrix, k_d_bound: f64, slack: f64) -> Result<RateReport> {
    let floor = 100.0 * f64::EPSILON * limit.norm();
    let all: Vec<f64> = trajectory.iterates().iter().map(|m| (m - limit).norm()).collect();
    let bound = k_d_bound + slack;
    let distances = match all.iter().position(|&e| e <= floor) {
        Some(0) => {
            return Ok(RateReport {
                ratios: Vec::new(),
                asymptotic_rate: 0.0,
                window: 0,
                k_d_bound,
                slack,
                satisfied: true,
                transient_steps: 0,
            })
        }
        // The step that lands on the floor is kept: it measures finite-step convergence.
        Some(k) => &all[..=k],
        None if all.len() < 3 => return Err(Error::TooFewSteps(all.len())),
        None => &all[..],
    };
    let ratios: Vec<f64> = distances.windows(2).map(|w| w[1] / w[0]).collect();
    let n = ratios.len();
    let window = n.min((n / 4).max(5));
    let tail = &ratios[n - window..];
    let asymptotic_rate = (tail.iter().map(|r| r.ln()).sum::<f64>() / window as f64).exp();
    let transient_steps = ratios.iter().rposition(|&r| r > bound).map_or(0, |k| k + 1);
    Ok(RateReport {
        ratios,
        asymptotic_rate,
        window,
        k_d_bound,
        slack,
        satisfied: asymptotic_rate <= bound,
        transient_steps,
    })
}

/// Continues iterating from a converged limit until the step stops shrinking or reaches the
/// rounding floor, sharpening the limit used as reference for rate estimates.
pub fn polish_limit(limit: &ComplexMatrix, max_extra: usize) -> Result<ComplexMatrix> {
    let mut current = limit.clone();
    let mut best_step = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..max_extra {
        let next = aluthge(&current)?;
        let step = (&next - &current).norm();
        current = next;
        if step <= 10.0 * f64::EPSILON * current.norm() {
            break;
        }
        if step < 0.999 * best_step {
            best_step = step;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 10 {
                break;
            }
        }
    }
    Ok(current)
}

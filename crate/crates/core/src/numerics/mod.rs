//! Self-contained numerical kernels with no domain knowledge.

mod bessel;
mod compensated;
mod lu;
mod matrix;
mod min_norm;

pub use bessel::{bessel_j1, J1_ARG_LIMIT};
pub use compensated::{dot2, residual_inf_norm};
pub use lu::{solve_square, LuFactors};
pub use matrix::DenseMatrix;
pub use min_norm::solve_min_norm;

use serde::Serialize;

/// Accuracy and conditioning information attached to every linear solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveDiagnostics {
    /// `max_i |(A x - b)_i|`, evaluated with compensated arithmetic.
    pub residual_inf_norm: f64,
    /// 1-norm condition estimate, always `>= 1`.
    pub condition_estimate: f64,
}

/// Maximum number of iterative-refinement sweeps after the direct solve.
const MAX_REFINEMENT_STEPS: usize = 6;

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

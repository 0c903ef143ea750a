//! Progress measures for each problem family.

use baxg_core::linalg;
use baxg_core::potentials::SmoothedL1;
use baxg_core::problem::BlockPotential;
use baxg_core::{BilinearMinimaxProblem, PrimalDualPoint};

/// `lambda |R(w) - R(w*)| + ||A^T w - b||` for the equality-constrained
/// smoothed-l1 instance. Nonnegative; zero at the planted solution.
pub fn merit_smoothed_l1(
    problem: &BilinearMinimaxProblem,
    surrogate: &SmoothedL1,
    w: &[f64],
    w_star: &[f64],
    b: &[f64],
) -> f64 {
    let objective_gap = (surrogate.value(w) - surrogate.value(w_star)).abs();
    let n = problem.dual_dim();
    let mut residual = vec![0.0; n];
    problem.coupling.apply_at(w, &mut residual);
    linalg::axpy(-1.0, b, &mut residual);
    objective_gap + linalg::norm(&residual)
}

/// Raw LAD objective `lambda R(w) + ||A^T w - b||_1`.
pub fn lad_objective(
    problem: &BilinearMinimaxProblem,
    surrogate: &SmoothedL1,
    w: &[f64],
    b: &[f64],
) -> f64 {
    let n = problem.dual_dim();
    let mut residual = vec![0.0; n];
    problem.coupling.apply_at(w, &mut residual);
    linalg::axpy(-1.0, b, &mut residual);
    let l1: f64 = residual.iter().map(|x| x.abs()).sum();
    surrogate.value(w) + l1
}

/// Objective gap against a reference solution, floored at `-1e-8`: the
/// reference comes from a long run and can in principle be edged out by a
/// hair.
pub fn merit_lad(
    problem: &BilinearMinimaxProblem,
    surrogate: &SmoothedL1,
    w: &[f64],
    w_ref: &[f64],
    b: &[f64],
) -> f64 {
    let gap = lad_objective(problem, surrogate, w, b) - lad_objective(problem, surrogate, w_ref, b);
    clamp_gap(gap)
}

/// Floor slightly negative gaps (iterate beating the reference) and warn.
pub fn clamp_gap(gap: f64) -> f64 {
    if gap < -1e-8 {
        eprintln!("warning: objective gap {gap:.3e} below reference; clamping");
        -1e-8
    } else {
        gap
    }
}

/// Distance to the known saddle point, for instances with exact ground
/// truth.
pub fn merit_saddle_distance(x: &PrimalDualPoint, saddle: &PrimalDualPoint) -> f64 {
    x.dist(saddle)
}

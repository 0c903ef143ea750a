//! The per-iteration subproblem and its solvers.
//!
//! Each outer step must produce an approximate resolvent `zhat` satisfying
//! a variational condition over the whole stacked space. Because the primal
//! block is unconstrained, `zhat`'s primal part has a closed form in terms
//! of its dual part, and the condition reduces to approximately minimizing
//! a strongly convex quadratic `l(v)` over the feasible set:
//!
//! ```text
//! l(v) = 1/2 (v - v1)^T (A^T A + (4/c^2) I) (v - v1)
//!        + ((2/c) v0 + A^T w0)^T (v - v1)
//! ```
//!
//! anchored at `v1` so that `l(v1) = 0`. Three solvers are provided:
//!
//! * [`pagd_solve`] — projected accelerated gradient descent with
//!   residual-norm selection and a certificate-based early exit; works for
//!   any feasible set.
//! * [`direct_solve`] — exact solve through the cached eigendecomposition
//!   of the Gram matrix (free space only, O(n^2) per call).
//! * [`cg_solve`] — conjugate gradients on the shifted SPD system (free
//!   space only).

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg;
use crate::math;
use crate::problem::{Oracle, PrimalDualPoint};

/// Reduced inner problem handed to the subsolvers.
///
/// `weight` is the outer step weight `c`; `shift = grad g(xhat) + Q z_prev`
/// stacked as `(w0, v0)`; `anchor = z_prev` stacked as `(w1, v1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemSpec {
    pub weight: f64,
    pub shift: PrimalDualPoint,
    pub anchor: PrimalDualPoint,
}

impl SubproblemSpec {
    pub fn new(weight: f64, shift: PrimalDualPoint, anchor: PrimalDualPoint) -> Self {
        assert!(weight > 0.0, "subproblem weight must be positive");
        assert_eq!(
            shift.dims(),
            anchor.dims(),
            "shift/anchor dimension mismatch"
        );
        Self {
            weight,
            shift,
            anchor,
        }
    }
}

/// The strongly convex quadratic `l(v)` in explicit form. The Hessian
/// `A^T A + hessian_shift * I` is only ever applied through the cached
/// Gram matrix, one extended-oracle access per application.
#[derive(Debug, Clone)]
pub struct ReducedQuadratic {
    /// `4 / c^2`.
    pub hessian_shift: f64,
    /// `(2/c) v0 + A^T w0`.
    pub linear: Vec<f64>,
    /// `v1`; `l` is anchored here and `l(v1) = 0`.
    pub anchor: Vec<f64>,
    /// `L_l = sigma_max^2 + 4/c^2`.
    pub smoothness: f64,
    /// `sigma_l = sigma_min^2 + 4/c^2`.
    pub strong_convexity: f64,
}

impl ReducedQuadratic {
    /// `out = grad l(v) = (A^T A + shift I)(v - v1) + linear`; one tallied
    /// Gram access.
    pub fn gradient(&self, oracle: &mut Oracle<'_>, v: &[f64], out: &mut [f64]) {
        let diff = self.displacement(v);
        oracle.apply_gram(&diff, out);
        linalg::axpy(self.hessian_shift, &diff, out);
        linalg::axpy(1.0, &self.linear, out);
    }

    /// Untallied gradient, for instrumentation and tests.
    pub fn gradient_raw(
        &self,
        coupling: &crate::problem::CouplingOperator,
        v: &[f64],
        out: &mut [f64],
    ) {
        let diff = self.displacement(v);
        coupling.apply_gram(&diff, out);
        linalg::axpy(self.hessian_shift, &diff, out);
        linalg::axpy(1.0, &self.linear, out);
    }

    /// Untallied objective value `l(v)`.
    pub fn value_raw(&self, coupling: &crate::problem::CouplingOperator, v: &[f64]) -> f64 {
        let diff = self.displacement(v);
        let mut hdiff = vec![0.0; diff.len()];
        coupling.apply_gram(&diff, &mut hdiff);
        linalg::axpy(self.hessian_shift, &diff, &mut hdiff);
        0.5 * linalg::dot(&diff, &hdiff) + linalg::dot(&self.linear, &diff)
    }

    fn displacement(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(
            v.len(),
            self.anchor.len(),
            "reduced quadratic dimension mismatch"
        );
        let mut diff = v.to_vec();
        linalg::axpy(-1.0, &self.anchor, &mut diff);
        diff
    }
}

/// Build the reduced quadratic from a subproblem spec. Costs one coupling
/// access (`A^T w0`).
pub fn reduce(spec: &SubproblemSpec, oracle: &mut Oracle<'_>) -> ReducedQuadratic {
    let c = spec.weight;
    let shift = 4.0 / (c * c);
    let n = spec.anchor.v.len();
    let mut linear = vec![0.0; n];
    oracle.apply_at(&spec.shift.w, &mut linear);
    linalg::axpy(2.0 / c, &spec.shift.v, &mut linear);
    let sigma_max = oracle.problem.coupling.sigma_max();
    let sigma_min = oracle.problem.coupling.sigma_min();
    ReducedQuadratic {
        hessian_shift: shift,
        linear,
        anchor: spec.anchor.v.clone(),
        smoothness: sigma_max * sigma_max + shift,
        strong_convexity: sigma_min * sigma_min + shift,
    }
}

/// Closed-form primal recovery `w = w1 - (c/2)(w0 + A(v - v1))`; one
/// coupling access. The recovered block satisfies the primal stationarity
/// identity exactly (up to roundoff).
pub fn recover_w(spec: &SubproblemSpec, oracle: &mut Oracle<'_>, v_tilde: &[f64]) -> Vec<f64> {
    let mut diff = v_tilde.to_vec();
    linalg::axpy(-1.0, &spec.anchor.v, &mut diff);
    let mut a_diff = vec![0.0; spec.anchor.w.len()];
    oracle.apply_a(&diff, &mut a_diff);
    let mut out = spec.anchor.w.clone();
    let half_c = 0.5 * spec.weight;
    linalg::axpy(-half_c, &spec.shift.w, &mut out);
    linalg::axpy(-half_c, &a_diff, &mut out);
    out
}

/// Geometric schedule of the inner accelerated method:
/// `B_0 = 0`, `B_1 = 1/(2 L_l)`, `B_t = B_1 (1 + sqrt(sigma_l/(2 L_l)))^{t-1}`.
#[derive(Debug, Clone)]
pub struct InnerSchedule {
    smoothness: f64,
    growth: f64,
    iteration: u64,
    weight: f64,
    total_weight: f64,
    prev_total_weight: f64,
}

impl InnerSchedule {
    pub fn new(smoothness: f64, strong_convexity: f64) -> Self {
        assert!(smoothness > 0.0 && strong_convexity > 0.0);
        Self {
            smoothness,
            growth: 1.0 + math::sqrt(strong_convexity / (2.0 * smoothness)),
            iteration: 0,
            weight: 0.0,
            total_weight: 0.0,
            prev_total_weight: 0.0,
        }
    }

    pub fn advance(&mut self) {
        self.iteration += 1;
        self.prev_total_weight = self.total_weight;
        self.total_weight = if self.iteration == 1 {
            1.0 / (2.0 * self.smoothness)
        } else {
            self.total_weight * self.growth
        };
        self.weight = self.total_weight - self.prev_total_weight;
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// `b_t`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `B_t`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// `B_{t-1}`.
    pub fn prev_total_weight(&self) -> f64 {
        self.prev_total_weight
    }

    pub fn growth(&self) -> f64 {
        self.growth
    }
}

/// Worst-case inner iteration count that guarantees the residual
/// certificate fires:
/// `ceil(log(1 + 9 sqrt(2) L_l^{3/2} sigma_l^{-3/2} (sigma_l c^2 + 1)^2)
///  / log(1 + sqrt(sigma_l / (2 L_l))))`.
pub fn certificate_cap(smoothness: f64, strong_convexity: f64, weight: f64) -> u64 {
    let ratio = smoothness / strong_convexity;
    let c2 = weight * weight;
    let numerator = math::ln_1p(
        9.0 * math::sqrt(2.0)
            * ratio
            * math::sqrt(ratio)
            * (strong_convexity * c2 + 1.0)
            * (strong_convexity * c2 + 1.0),
    );
    let denominator = math::ln_1p(math::sqrt(strong_convexity / (2.0 * smoothness)));
    (math::ceil(numerator / denominator) as u64).max(1)
}

/// Residual certificate: `3 L_l ||v_t - vhat|| <= (2/c^2) ||v_t - v1||`
/// makes `v_t` an acceptable approximate solution for any probe. When the
/// iterate sits on the anchor itself the right side degenerates; then the
/// test asks for a residual at the same absolute floor.
pub fn early_exit_test(
    smoothness: f64,
    weight: f64,
    v_t: &[f64],
    v_hat_prev: &[f64],
    anchor: &[f64],
) -> bool {
    let residual = linalg::dist(v_t, v_hat_prev);
    let from_anchor = linalg::dist(v_t, anchor);
    let floor = 1e-14 * (1.0 + linalg::norm(anchor));
    if from_anchor <= floor {
        residual <= floor
    } else {
        3.0 * smoothness * residual <= (2.0 / (weight * weight)) * from_anchor
    }
}

/// Per-iteration record of a PAGD run, for certified-bound checks.
#[derive(Debug, Clone, Default)]
pub struct PagdHistory {
    /// `B_t` per iteration.
    pub total_weights: Vec<f64>,
    /// `l(v_t)` per iteration (untallied evaluations).
    pub objective_values: Vec<f64>,
    /// `||v_t - vhat_{t-1}||` per iteration.
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PagdOptions {
    /// Record `B_t`, `l(v_t)` and residuals per iteration.
    pub record_history: bool,
    /// Run the full worst-case iteration count even if the certificate
    /// fires earlier (used for cross-solver comparisons).
    pub ignore_early_exit: bool,
}

#[derive(Debug, Clone)]
pub struct PagdOutcome {
    /// Selected dual iterate (minimum residual norm).
    pub dual: Vec<f64>,
    /// Recovered primal block.
    pub primal: Vec<f64>,
    pub iterations: u64,
    /// Worst-case cap for this subproblem.
    pub cap: u64,
    /// Whether the residual certificate held for the returned iterate.
    pub certified: bool,
    pub history: Option<PagdHistory>,
}

/// Projected accelerated gradient descent on the reduced quadratic.
///
/// Starts from `v_0 = u_0 = v1`. Each iteration combines the previous
/// iterate with the dual-averaging point, takes a projected gradient step
/// of length `1/(2 L_l)` (the proximal coefficient in the step
/// subproblem is `L_l`, not `L_l/2`), and updates the dual-averaging
/// minimizer through running sums, O(n) per iteration. The returned
/// iterate is the one with minimal residual norm; iteration stops as soon
/// as that iterate passes the certificate, or at the worst-case cap.
pub fn pagd_solve(
    spec: &SubproblemSpec,
    oracle: &mut Oracle<'_>,
    options: PagdOptions,
) -> PagdOutcome {
    let rq = reduce(spec, oracle);
    let n = rq.anchor.len();
    let smoothness = rq.smoothness;
    let sigma = rq.strong_convexity;
    let cap = certificate_cap(smoothness, sigma, spec.weight);

    let mut schedule = InnerSchedule::new(smoothness, sigma);
    let mut v_prev = rq.anchor.clone();
    let mut u_prev = rq.anchor.clone();
    // Running sum of b_i (sigma_l vhat_{i-1} - grad l(vhat_{i-1})).
    let mut averaged = vec![0.0; n];

    let mut v_hat = vec![0.0; n];
    let mut grad = vec![0.0; n];

    let mut best_residual = f64::INFINITY;
    let mut best_v = rq.anchor.clone();
    let mut best_v_hat = rq.anchor.clone();

    let mut history = if options.record_history {
        Some(PagdHistory::default())
    } else {
        None
    };

    let mut iterations = 0;
    let mut certified = false;

    while iterations < cap {
        schedule.advance();
        iterations += 1;
        let total = schedule.total_weight();
        let theta = schedule.prev_total_weight() / total;

        for i in 0..n {
            v_hat[i] = theta * v_prev[i] + (1.0 - theta) * u_prev[i];
        }
        rq.gradient(oracle, &v_hat, &mut grad);

        // Projected gradient step, step length 1/(2 L_l).
        let mut v_t = v_hat.clone();
        linalg::axpy(-1.0 / (2.0 * smoothness), &grad, &mut v_t);
        oracle.project_dual(&mut v_t);

        // Dual-averaging step via the running sum.
        let b_t = schedule.weight();
        for i in 0..n {
            averaged[i] += b_t * (sigma * v_hat[i] - grad[i]);
        }
        let mut u_t = rq.anchor.clone();
        linalg::axpy(1.0, &averaged, &mut u_t);
        linalg::scale(&mut u_t, 1.0 / (1.0 + sigma * total));
        oracle.project_dual(&mut u_t);

        let residual = linalg::dist(&v_t, &v_hat);
        if residual < best_residual {
            best_residual = residual;
            best_v.copy_from_slice(&v_t);
            best_v_hat.copy_from_slice(&v_hat);
        }

        if let Some(h) = history.as_mut() {
            h.total_weights.push(total);
            h.objective_values
                .push(rq.value_raw(&oracle.problem.coupling, &v_t));
            h.residuals.push(residual);
        }

        if !options.ignore_early_exit
            && early_exit_test(smoothness, spec.weight, &best_v, &best_v_hat, &rq.anchor)
        {
            certified = true;
            break;
        }

        v_prev = v_t;
        u_prev = u_t;
    }

    if !certified {
        certified = early_exit_test(smoothness, spec.weight, &best_v, &best_v_hat, &rq.anchor);
    }

    let primal = recover_w(spec, oracle, &best_v);
    PagdOutcome {
        dual: best_v,
        primal,
        iterations,
        cap,
        certified,
        history,
    }
}

/// Exact solve of the free-space subproblem through the cached Gram
/// eigendecomposition: the shifted system
/// `(A^T A + (4/c^2) I) s = -linear` costs two dense O(n^2) products per
/// call, tallied as one Gram access (the amortized cost argument for the
/// precomputed decomposition).
///
/// Panics if the feasible set is constrained.
pub fn direct_solve(spec: &SubproblemSpec, oracle: &mut Oracle<'_>) -> (Vec<f64>, Vec<f64>) {
    assert!(
        oracle.problem.set.is_free(),
        "direct_solve requires an unconstrained dual block"
    );
    let rq = reduce(spec, oracle);
    oracle.tally.gram += 1;
    let eigen = oracle.problem.coupling.gram_eigen();
    let n = rq.anchor.len();
    let mut spectral = vec![0.0; n];
    eigen.to_eigenbasis(&rq.linear, &mut spectral);
    for (coeff, lambda) in spectral.iter_mut().zip(&eigen.values) {
        *coeff = -*coeff / (lambda + rq.hessian_shift);
    }
    let mut step = vec![0.0; n];
    eigen.from_eigenbasis(&spectral, &mut step);
    let mut dual = rq.anchor.clone();
    linalg::axpy(1.0, &step, &mut dual);
    let primal = recover_w(spec, oracle, &dual);
    (dual, primal)
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub dual: Vec<f64>,
    pub primal: Vec<f64>,
    pub iterations: u64,
    /// False when the relative-residual target was not met within `5n`
    /// iterations (soft failure).
    pub converged: bool,
}

/// Conjugate gradients on the shifted SPD system
/// `(A^T A + (4/c^2) I) s = -linear`, to relative residual `tol`.
/// Each Hessian application is one tallied Gram access.
///
/// Panics if the feasible set is constrained.
pub fn cg_solve(spec: &SubproblemSpec, oracle: &mut Oracle<'_>, tol: f64) -> CgOutcome {
    assert!(
        oracle.problem.set.is_free(),
        "cg_solve requires an unconstrained dual block"
    );
    let rq = reduce(spec, oracle);
    let n = rq.anchor.len();
    let max_iterations = 5 * n as u64;

    let mut rhs = rq.linear.clone();
    linalg::scale(&mut rhs, -1.0);
    let rhs_norm = linalg::norm(&rhs);

    let mut step = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = rhs_norm == 0.0;

    if !converged {
        let mut residual = rhs.clone();
        let mut direction = residual.clone();
        let mut h_dir = vec![0.0; n];
        let mut rho = linalg::dot(&residual, &residual);

        while iterations < max_iterations {
            iterations += 1;
            oracle.apply_gram(&direction, &mut h_dir);
            linalg::axpy(rq.hessian_shift, &direction, &mut h_dir);
            let alpha = rho / linalg::dot(&direction, &h_dir);
            linalg::axpy(alpha, &direction, &mut step);
            linalg::axpy(-alpha, &h_dir, &mut residual);
            let rho_next = linalg::dot(&residual, &residual);
            if math::sqrt(rho_next) <= tol * rhs_norm {
                converged = true;
                break;
            }
            let beta = rho_next / rho;
            rho = rho_next;
            for i in 0..n {
                direction[i] = residual[i] + beta * direction[i];
            }
        }
    }

    let mut dual = rq.anchor.clone();
    linalg::axpy(1.0, &step, &mut dual);
    let primal = recover_w(spec, oracle, &dual);
    CgOutcome {
        dual,
        primal,
        iterations,
        converged,
    }
}

/// Subsolver selection for the outer loop.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SubsolverChoice {
    /// Direct for free space, PAGD otherwise.
    #[default]
    Auto,
    Pagd,
    Direct,
    Cg {
        tol: f64,
    },
}

pub(crate) struct DispatchResult {
    pub accepted: PrimalDualPoint,
    pub inner_iterations: u64,
    pub soft_failure: bool,
}

pub(crate) fn dispatch(
    choice: SubsolverChoice,
    spec: &SubproblemSpec,
    oracle: &mut Oracle<'_>,
) -> DispatchResult {
    let effective = match choice {
        SubsolverChoice::Auto => {
            if oracle.problem.set.is_free() {
                SubsolverChoice::Direct
            } else {
                SubsolverChoice::Pagd
            }
        }
        other => other,
    };
    match effective {
        SubsolverChoice::Pagd => {
            let outcome = pagd_solve(spec, oracle, PagdOptions::default());
            DispatchResult {
                accepted: PrimalDualPoint::new(outcome.primal, outcome.dual),
                inner_iterations: outcome.iterations,
                soft_failure: !outcome.certified,
            }
        }
        SubsolverChoice::Direct => {
            let (dual, primal) = direct_solve(spec, oracle);
            DispatchResult {
                accepted: PrimalDualPoint::new(primal, dual),
                inner_iterations: 1,
                soft_failure: false,
            }
        }
        SubsolverChoice::Cg { tol } => {
            let outcome = cg_solve(spec, oracle, tol);
            DispatchResult {
                accepted: PrimalDualPoint::new(outcome.primal, outcome.dual),
                inner_iterations: outcome.iterations,
                soft_failure: !outcome.converged,
            }
        }
        SubsolverChoice::Auto => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::potentials::{SeparablePotential, ZeroPotential};
    use crate::problem::{BilinearMinimaxProblem, CouplingOperator, FeasibleSet};
    use alloc::boxed::Box;

    fn toy_problem(a: DenseMatrix, set: FeasibleSet) -> BilinearMinimaxProblem {
        let d = a.rows();
        let n = a.cols();
        let potential = SeparablePotential::new(
            Box::new(ZeroPotential::new(d)),
            Box::new(ZeroPotential::new(n)),
        );
        BilinearMinimaxProblem::new(Box::new(potential), CouplingOperator::new(a).unwrap(), set)
            .unwrap()
    }

    #[test]
    fn reduce_identity_gram() {
        // A = I2, c = 2: Hessian = 2I, L_l = sigma_l = 2.
        let problem = toy_problem(DenseMatrix::identity(2), FeasibleSet::free(2));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            2.0,
            PrimalDualPoint::zeros(2, 2),
            PrimalDualPoint::zeros(2, 2),
        );
        let rq = reduce(&spec, &mut oracle);
        assert!((rq.hessian_shift - 1.0).abs() < 1e-15);
        assert!((rq.smoothness - 2.0).abs() < 1e-12);
        assert!((rq.strong_convexity - 2.0).abs() < 1e-12);
        assert_eq!(oracle.tally.coupling, 1);
    }

    #[test]
    fn reduce_diagonal_constants() {
        // A = diag(2, 0.5), c = 1: L_l = 8, sigma_l = 4.25.
        let a = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]).unwrap();
        let problem = toy_problem(a, FeasibleSet::free(2));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            1.0,
            PrimalDualPoint::zeros(2, 2),
            PrimalDualPoint::zeros(2, 2),
        );
        let rq = reduce(&spec, &mut oracle);
        assert!((rq.smoothness - 8.0).abs() < 1e-12);
        assert!((rq.strong_convexity - 4.25).abs() < 1e-12);
    }

    #[test]
    fn recover_w_hand_case() {
        // A = I, c = 2, w1 = 0, w0 = 1, v - v1 = 1 => w = -(1+1) = -2.
        let problem = toy_problem(DenseMatrix::identity(1), FeasibleSet::free(1));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            2.0,
            PrimalDualPoint::new(vec![1.0], vec![0.0]),
            PrimalDualPoint::zeros(1, 1),
        );
        let w = recover_w(&spec, &mut oracle, &[1.0]);
        assert!((w[0] + 2.0).abs() < 1e-15);
    }

    #[test]
    fn recover_w_no_displacement() {
        let problem = toy_problem(DenseMatrix::identity(2), FeasibleSet::free(2));
        let mut oracle = Oracle::new(&problem);
        let anchor = PrimalDualPoint::new(vec![0.4, -0.2], vec![1.0, 2.0]);
        let spec = SubproblemSpec::new(1.5, PrimalDualPoint::zeros(2, 2), anchor.clone());
        let w = recover_w(&spec, &mut oracle, &anchor.v);
        assert_eq!(w, anchor.w);
    }

    #[test]
    fn inner_schedule_known_values() {
        // L_l = 2, sigma_l = 1: B1 = 0.25, growth 1.5, B2 = 0.375, b2 = 0.125.
        let mut s = InnerSchedule::new(2.0, 1.0);
        s.advance();
        assert!((s.total_weight() - 0.25).abs() < 1e-15);
        assert!((s.growth() - 1.5).abs() < 1e-15);
        s.advance();
        assert!((s.total_weight() - 0.375).abs() < 1e-15);
        assert!((s.weight() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn early_exit_arithmetic() {
        // L_l = 2, c = 1, residual 0.1, anchor distance 0.2: 0.6 <= 0.4 fails.
        assert!(!early_exit_test(2.0, 1.0, &[0.2], &[0.1], &[0.0]));
        // Zero residual with positive anchor distance passes.
        assert!(early_exit_test(2.0, 1.0, &[0.2], &[0.2], &[0.0]));
        // Fully degenerate case passes through the floor branch.
        assert!(early_exit_test(2.0, 1.0, &[0.0], &[0.0], &[0.0]));
    }

    #[test]
    fn pagd_trivial_subproblem_exits_immediately() {
        let problem = toy_problem(DenseMatrix::identity(2), FeasibleSet::free(2));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            2.0,
            PrimalDualPoint::zeros(2, 2),
            PrimalDualPoint::new(vec![0.0, 0.0], vec![0.3, -0.7]),
        );
        let out = pagd_solve(&spec, &mut oracle, PagdOptions::default());
        assert!(out.certified);
        assert_eq!(out.iterations, 1);
        assert_eq!(out.dual, vec![0.3, -0.7]);
    }

    #[test]
    fn direct_solve_scalar_shift() {
        // A = I2, c = 2 => (2I)s = -rhs, s = -rhs/2.
        let problem = toy_problem(DenseMatrix::identity(2), FeasibleSet::free(2));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            2.0,
            PrimalDualPoint::new(vec![0.0, 0.0], vec![2.0, -4.0]),
            PrimalDualPoint::zeros(2, 2),
        );
        // linear = (2/c) v0 = (2, -4) / ... with c = 2: linear = v0.
        let (dual, _) = direct_solve(&spec, &mut oracle);
        assert!((dual[0] + 1.0).abs() < 1e-14);
        assert!((dual[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn direct_solve_zero_rhs_returns_anchor() {
        let problem = toy_problem(DenseMatrix::identity(2), FeasibleSet::free(2));
        let mut oracle = Oracle::new(&problem);
        let anchor = PrimalDualPoint::new(vec![0.0, 0.0], vec![1.5, -2.5]);
        let spec = SubproblemSpec::new(1.0, PrimalDualPoint::zeros(2, 2), anchor.clone());
        let (dual, _) = direct_solve(&spec, &mut oracle);
        assert_eq!(dual, anchor.v);
    }

    #[test]
    #[should_panic(expected = "unconstrained")]
    fn direct_solve_rejects_box() {
        let problem = toy_problem(DenseMatrix::identity(2), FeasibleSet::linf_ball(2, 1.0));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            1.0,
            PrimalDualPoint::zeros(2, 2),
            PrimalDualPoint::zeros(2, 2),
        );
        let _ = direct_solve(&spec, &mut oracle);
    }

    #[test]
    fn cg_identity_system_one_iteration() {
        // Gram + shift = 2I with c = 2: a single CG step solves it.
        let problem = toy_problem(DenseMatrix::identity(3), FeasibleSet::free(3));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            2.0,
            PrimalDualPoint::new(vec![0.0; 3], vec![1.0, 2.0, 3.0]),
            PrimalDualPoint::zeros(3, 3),
        );
        let out = cg_solve(&spec, &mut oracle, 1e-10);
        assert!(out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn cg_two_eigenvalues_two_iterations() {
        // A = diag(2, 2, 1, 1): the shifted system has two distinct
        // eigenvalues, so CG terminates in at most two steps.
        let a = DenseMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                if i < 2 {
                    2.0
                } else {
                    1.0
                }
            } else {
                0.0
            }
        });
        let problem = toy_problem(a, FeasibleSet::free(4));
        let mut oracle = Oracle::new(&problem);
        let spec = SubproblemSpec::new(
            1.0,
            PrimalDualPoint::new(vec![0.0; 4], vec![1.0, -1.0, 2.0, 0.5]),
            PrimalDualPoint::zeros(4, 4),
        );
        let out = cg_solve(&spec, &mut oracle, 1e-10);
        assert!(out.converged);
        assert!(out.iterations <= 2);
    }

    #[test]
    fn certificate_cap_is_finite_and_positive() {
        assert!(certificate_cap(2.0, 1.0, 1.0) >= 1);
        assert!(certificate_cap(1e4, 1.0, 100.0) < 100_000);
    }
}

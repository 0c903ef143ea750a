//! The accelerated outer loop.
//!
//! Each iteration forms a lookahead point by convex combination, asks a
//! subsolver for an approximate resolvent `zhat_k` certified by the
//! variational condition, advances the iterate, and refreshes the
//! dual-averaging point `z_k` as the minimizer of a running estimation
//! sequence. With the quadratic weight schedule `A_k = k^2/(4L)` the merit
//! gap against any probe point decays at the accelerated `O(1/k^2)` rate,
//! and optional instrumentation records the inequalities that proof rides
//! on (error terms `E_k`, the estimation-sequence upper bound, and the
//! accepted-iterate condition) so they can be checked after the fact.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::problem::{BilinearMinimaxProblem, Oracle, PrimalDualPoint, ProblemError};
use crate::subproblem::{self, SubproblemSpec, SubsolverChoice};
use crate::trace::{ConvergenceTrace, InstrumentationLog, StopReason, TraceRow};

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    InvalidConfig(String),
    Problem(ProblemError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            SolverError::Problem(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for SolverError {}

impl From<ProblemError> for SolverError {
    fn from(e: ProblemError) -> Self {
        SolverError::Problem(e)
    }
}

/// Outer weight schedule: `A_k = k^2 / (4L)`, `a_k = A_k - A_{k-1}`,
/// `A_0 = 0`. This choice makes `a_k^2 L / A_k = (2k-1)^2 / (4k^2) <= 1`
/// for every `k >= 1`, which is exactly what drives the error terms
/// nonpositive.
#[derive(Debug, Clone)]
pub struct OuterSchedule {
    lipschitz: f64,
    iteration: u64,
    weight: f64,
    total_weight: f64,
    prev_total_weight: f64,
}

impl OuterSchedule {
    pub fn new(lipschitz: f64) -> Self {
        assert!(lipschitz > 0.0, "smoothness constant must be positive");
        Self {
            lipschitz,
            iteration: 0,
            weight: 0.0,
            total_weight: 0.0,
            prev_total_weight: 0.0,
        }
    }

    pub fn advance(&mut self) {
        self.iteration += 1;
        let k = self.iteration as f64;
        self.prev_total_weight = self.total_weight;
        self.total_weight = k * k / (4.0 * self.lipschitz);
        self.weight = self.total_weight - self.prev_total_weight;
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    /// `a_k`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// `A_k`.
    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    /// `A_{k-1}`.
    pub fn prev_total_weight(&self) -> f64 {
        self.prev_total_weight
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// The quantity `a_k^2 L / A_k`, at most one by construction.
    pub fn contraction_ratio(&self) -> f64 {
        self.weight * self.weight * self.lipschitz / self.total_weight
    }
}

/// Which constant the subproblem is handed as its prox weight `c`.
///
/// The schedule forces `c = a_k = (2k-1)/(4L)`; the alternative constant
/// `(2k-1)/L` that appears in one place in the source derivation violates
/// the schedule law and is exposed for study only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CkVariant {
    #[default]
    ScheduleWeight,
    LooseConstant,
}

impl CkVariant {
    pub fn subproblem_weight(self, schedule_weight: f64) -> f64 {
        match self {
            CkVariant::ScheduleWeight => schedule_weight,
            CkVariant::LooseConstant => 4.0 * schedule_weight,
        }
    }
}

/// Mutable state of one outer run.
#[derive(Debug, Clone)]
pub struct OuterState {
    /// `x_k`.
    pub current: PrimalDualPoint,
    /// `z_k`, the estimation-sequence minimizer.
    pub dual_avg: PrimalDualPoint,
    /// `x_0` (also `z_0`).
    pub start: PrimalDualPoint,
    /// Running sum of `a_i grad g(x_i)`.
    pub gradient_sum: PrimalDualPoint,
    /// Running sum of `a_i Q zhat_i`.
    pub coupling_sum: PrimalDualPoint,
    /// Running sum of `a_i (g(x_i) - <grad g(x_i), x_i>)`, the constant
    /// part of the estimation sequence.
    pub linear_constant: f64,
}

impl OuterState {
    pub fn new(start: PrimalDualPoint) -> Self {
        let (d, n) = start.dims();
        Self {
            current: start.clone(),
            dual_avg: start.clone(),
            start,
            gradient_sum: PrimalDualPoint::zeros(d, n),
            coupling_sum: PrimalDualPoint::zeros(d, n),
            linear_constant: 0.0,
        }
    }

    /// Lookahead point `xhat_{k-1} = (A_{k-1}/A_k) x_{k-1} + (a_k/A_k) z_{k-1}`.
    pub fn compute_x_hat(&self, schedule: &OuterSchedule) -> PrimalDualPoint {
        let theta = schedule.prev_total_weight() / schedule.total_weight();
        PrimalDualPoint::combine(theta, &self.current, 1.0 - theta, &self.dual_avg)
    }

    /// Assemble the subproblem at the lookahead point:
    /// `shift = grad g(xhat) + Q z_{k-1}`, anchored at `z_{k-1}`.
    /// One gradient and one full coupling application.
    pub fn build_subproblem(
        &self,
        weight: f64,
        x_hat: &PrimalDualPoint,
        oracle: &mut Oracle<'_>,
    ) -> SubproblemSpec {
        let (_, grad) = oracle.value_grad_g(x_hat);
        let mut shift = oracle.apply_q(&self.dual_avg);
        shift.add_scaled(1.0, &grad);
        SubproblemSpec::new(weight, shift, self.dual_avg.clone())
    }

    /// Iterate update `x_k = xhat + (a_k/A_k)(zhat_k - z_{k-1})`. The
    /// equivalent convex-combination form
    /// `(A_{k-1} x_{k-1} + a_k zhat_k) / A_k` agrees to roundoff.
    pub fn update_x(
        &mut self,
        schedule: &OuterSchedule,
        x_hat: &PrimalDualPoint,
        z_hat: &PrimalDualPoint,
    ) {
        let ratio = schedule.weight() / schedule.total_weight();
        let mut next = x_hat.clone();
        next.add_scaled(ratio, z_hat);
        next.add_scaled(-ratio, &self.dual_avg);
        #[cfg(debug_assertions)]
        {
            let alt = PrimalDualPoint::combine(
                schedule.prev_total_weight() / schedule.total_weight(),
                &self.current,
                ratio,
                z_hat,
            );
            // Roundoff scales with the combined terms, not the (possibly
            // cancelled) result. Non-finite iterates are the caller's
            // divergence guard's business.
            let scale = 1.0 + x_hat.norm() + ratio * (z_hat.norm() + self.dual_avg.norm());
            let gap = next.dist(&alt);
            debug_assert!(
                !gap.is_finite() || gap <= 1e-12 * scale,
                "iterate update forms disagree: {gap} vs scale {scale}"
            );
        }
        self.current = next;
    }

    /// Fold this iteration's gradient and coupling terms into the
    /// estimation-sequence accumulators.
    pub fn accumulate(
        &mut self,
        weight: f64,
        g_value: f64,
        grad_at_x: &PrimalDualPoint,
        q_z_hat: &PrimalDualPoint,
    ) {
        self.linear_constant += weight * (g_value - grad_at_x.dot(&self.current));
        self.gradient_sum.add_scaled(weight, grad_at_x);
        self.coupling_sum.add_scaled(weight, q_z_hat);
    }

    /// Estimation-sequence minimizer in closed form:
    /// `z_k = Proj_X(x_0 - s/2)` with `s` the accumulated linear term.
    /// The projection splits across the product structure of `X` (identity
    /// on the free primal block).
    pub fn update_z(&mut self, oracle: &mut Oracle<'_>) {
        let mut z = self.start.clone();
        z.add_scaled(-0.5, &self.gradient_sum);
        z.add_scaled(-0.5, &self.coupling_sum);
        oracle.project_stacked(&mut z);
        self.dual_avg = z;
    }

    /// Estimation-sequence value at `x` against probe `y`:
    /// the running model of `A_k g` plus the proximity term.
    pub fn estimation_value(&self, x: &PrimalDualPoint, probe: &PrimalDualPoint) -> f64 {
        let diff = x.sub(&self.start);
        self.linear_constant + self.gradient_sum.dot(x) + self.coupling_sum.dot(x)
            - self.coupling_sum.dot(probe)
            + diff.dot(&diff)
    }
}

/// Configuration of one BAXG run.
#[derive(Debug, Clone)]
pub struct BaxgConfig {
    pub start: PrimalDualPoint,
    pub max_iterations: u64,
    /// Stop once the extended-oracle total reaches this budget.
    pub max_oracle: Option<u64>,
    pub merit_target: Option<f64>,
    pub subsolver: SubsolverChoice,
    pub ck_variant: CkVariant,
    /// Schedule smoothness constant; defaults to the potential's.
    pub lipschitz_override: Option<f64>,
    /// Log every iteration up to here, then every `log_stride`-th.
    pub dense_log_until: u64,
    pub log_stride: u64,
    /// Probe points for instrumentation (dual parts are projected).
    pub probes: Vec<PrimalDualPoint>,
    pub instrument: bool,
}

impl BaxgConfig {
    pub fn new(start: PrimalDualPoint) -> Self {
        Self {
            start,
            max_iterations: 1000,
            max_oracle: None,
            merit_target: None,
            subsolver: SubsolverChoice::Auto,
            ck_variant: CkVariant::ScheduleWeight,
            lipschitz_override: None,
            dense_log_until: 100,
            log_stride: 10,
            probes: Vec::new(),
            instrument: false,
        }
    }
}

struct ProbeData {
    point: PrimalDualPoint,
    g_value: f64,
    dist0_sq: f64,
}

/// Run the accelerated outer loop. Returns the final iterate `x_K` and the
/// full convergence trace. Subsolver cap misses are soft failures: they are
/// counted in the trace and the run continues with the best iterate the
/// subsolver produced.
pub fn baxg_solve(
    problem: &BilinearMinimaxProblem,
    config: &BaxgConfig,
    merit: &dyn Fn(&PrimalDualPoint) -> f64,
    clock: &dyn Fn() -> f64,
) -> Result<(PrimalDualPoint, ConvergenceTrace), SolverError> {
    problem.check_point(&config.start, "start point")?;
    let lipschitz = config
        .lipschitz_override
        .unwrap_or_else(|| problem.potential.smoothness_constant());
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(SolverError::InvalidConfig(alloc::format!(
            "smoothness constant must be positive and finite, got {lipschitz}"
        )));
    }
    if !problem.set.is_free()
        && matches!(
            config.subsolver,
            SubsolverChoice::Direct | SubsolverChoice::Cg { .. }
        )
    {
        return Err(SolverError::InvalidConfig(String::from(
            "direct and cg subsolvers require an unconstrained dual block",
        )));
    }
    if config.log_stride == 0 {
        return Err(SolverError::InvalidConfig(String::from(
            "log stride must be nonzero",
        )));
    }

    let mut start = config.start.clone();
    problem.set.project(&mut start.v);

    let mut oracle = Oracle::new(problem);
    let mut schedule = OuterSchedule::new(lipschitz);
    let mut state = OuterState::new(start.clone());

    let mut instrumentation = if config.instrument {
        let probes = config
            .probes
            .iter()
            .map(|probe| {
                let mut p = probe.clone();
                problem.set.project(&mut p.v);
                p
            })
            .collect();
        Some(InstrumentationLog {
            start: Some(start.clone()),
            probes,
            ..Default::default()
        })
    } else {
        None
    };
    let probe_data: Vec<ProbeData> = instrumentation
        .as_ref()
        .map(|log| {
            log.probes
                .iter()
                .map(|p| ProbeData {
                    point: p.clone(),
                    g_value: problem.potential.value(p),
                    dist0_sq: {
                        let d = p.sub(&start);
                        d.dot(&d)
                    },
                })
                .collect()
        })
        .unwrap_or_default();

    let mut rows: Vec<TraceRow> = Vec::new();
    let mut soft_failures = 0u64;
    let mut stop_reason = StopReason::IterationLimit;

    for k in 1..=config.max_iterations {
        schedule.advance();
        let weight = schedule.weight();
        let x_hat = state.compute_x_hat(&schedule);

        let c = config.ck_variant.subproblem_weight(weight);
        let spec = state.build_subproblem(c, &x_hat, &mut oracle);
        let inner = subproblem::dispatch(config.subsolver, &spec, &mut oracle);
        if inner.soft_failure {
            soft_failures += 1;
        }
        let z_hat = inner.accepted;
        let z_prev = state.dual_avg.clone();

        state.update_x(&schedule, &x_hat, &z_hat);
        if !state.current.norm().is_finite() {
            stop_reason = StopReason::Diverged;
            break;
        }
        let (g_value, grad_x) = oracle.value_grad_g(&state.current);
        let q_z_hat = oracle.apply_q(&z_hat);
        state.accumulate(weight, g_value, &grad_x, &q_z_hat);
        state.update_z(&mut oracle);

        if let Some(log) = instrumentation.as_mut() {
            record_instrumentation(
                log,
                problem,
                &state,
                &schedule,
                &spec,
                &z_hat,
                &z_prev,
                &grad_x,
                &q_z_hat,
                &probe_data,
            );
        }

        let merit_value = merit(&state.current);
        let mut stopping = k == config.max_iterations;
        if let Some(target) = config.merit_target {
            if merit_value <= target {
                stop_reason = StopReason::MeritTarget;
                stopping = true;
            }
        }
        if let Some(budget) = config.max_oracle {
            if !stopping && oracle.tally.total_extended() >= budget {
                stop_reason = StopReason::OracleBudget;
                stopping = true;
            }
        }

        if stopping || k <= config.dense_log_until || k % config.log_stride == 0 {
            rows.push(TraceRow {
                iteration: k,
                oracle_total: oracle.tally.total_extended(),
                merit: merit_value,
                inner_iterations: inner.inner_iterations,
                wall_ms: clock(),
            });
        }
        if stopping {
            break;
        }
    }

    let trace = ConvergenceTrace {
        rows,
        tally: oracle.tally,
        stop_reason,
        soft_failures,
        instrumentation,
    };
    Ok((state.current, trace))
}

#[allow(clippy::too_many_arguments)]
fn record_instrumentation(
    log: &mut InstrumentationLog,
    problem: &BilinearMinimaxProblem,
    state: &OuterState,
    schedule: &OuterSchedule,
    spec: &SubproblemSpec,
    z_hat: &PrimalDualPoint,
    z_prev: &PrimalDualPoint,
    grad_x: &PrimalDualPoint,
    q_z_hat: &PrimalDualPoint,
    probes: &[ProbeData],
) {
    let weight = schedule.weight();
    let z_new = &state.dual_avg;

    // Backward-Euler error term E_k.
    let mut field = grad_x.clone();
    field.add_scaled(1.0, q_z_hat);
    let z_hat_minus_z = z_hat.sub(z_new);
    let z_step = z_new.sub(z_prev);
    let error_term = weight * field.dot(&z_hat_minus_z) - z_step.dot(&z_step);
    let displacement = z_hat.sub(z_prev);
    let error_scale = displacement.dot(&displacement);

    // Estimation-sequence upper bound against each probe.
    let mut estimation_bound_margin = f64::NEG_INFINITY;
    let mut estimation_bound_scale = 0.0f64;
    for probe in probes {
        let lhs = state.estimation_value(z_new, &probe.point);
        let rhs = schedule.total_weight() * probe.g_value + probe.dist0_sq;
        estimation_bound_margin = estimation_bound_margin.max(lhs - rhs);
        estimation_bound_scale = estimation_bound_scale.max(crate::math::abs(rhs));
    }

    // Accepted-iterate condition at each probe.
    let c = spec.weight;
    let mut moved = problem.coupling.apply_q(&displacement);
    moved.add_scaled(2.0 / c, &displacement);
    moved.add_scaled(1.0, &spec.shift);
    let disp_sq = displacement.dot(&displacement);
    let mut cond_margin = f64::NEG_INFINITY;
    let mut cond_scale = 0.0f64;
    for probe in probes {
        let to_probe = z_hat.sub(&probe.point);
        let quad = 0.5 * (disp_sq + to_probe.dot(&to_probe));
        let lhs = c * moved.dot(&to_probe) - quad;
        cond_margin = cond_margin.max(lhs);
        cond_scale = cond_scale.max(quad);
    }

    let psi_base =
        state.linear_constant + state.gradient_sum.dot(z_new) + state.coupling_sum.dot(z_new) + {
            let diff = z_new.sub(&state.start);
            diff.dot(&diff)
        };

    log.iterates.push(state.current.clone());
    log.schedule_totals.push(schedule.total_weight());
    log.error_terms.push(error_term);
    log.error_scales.push(error_scale);
    log.estimation_values.push(psi_base);
    log.estimation_bound_margins.push(estimation_bound_margin);
    log.estimation_bound_scales.push(estimation_bound_scale);
    log.cond_margins.push(cond_margin);
    log.cond_scales.push(cond_scale);
    log.subproblems.push(spec.clone());
    log.accepted.push(z_hat.clone());
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::potentials::{
        LinearPotential, QuadraticPotential, SeparablePotential, ZeroPotential,
    };
    use crate::problem::{CouplingOperator, FeasibleSet};
    use alloc::boxed::Box;
    use alloc::vec;

    fn lagrangian_problem(
        b: DenseMatrix,
        c: Vec<f64>,
        a: DenseMatrix,
        rhs: Vec<f64>,
    ) -> BilinearMinimaxProblem {
        let n = a.cols();
        let f = QuadraticPotential::new(b, c).unwrap();
        let h = LinearPotential::new(rhs);
        let potential = SeparablePotential::new(Box::new(f), Box::new(h));
        BilinearMinimaxProblem::new(
            Box::new(potential),
            CouplingOperator::new(a).unwrap(),
            FeasibleSet::free(n),
        )
        .unwrap()
    }

    #[test]
    fn schedule_first_steps() {
        let mut s = OuterSchedule::new(1.0);
        s.advance();
        assert!((s.total_weight() - 0.25).abs() < 1e-15);
        assert!((s.weight() - 0.25).abs() < 1e-15);
        s.advance();
        assert!((s.total_weight() - 1.0).abs() < 1e-15);
        assert!((s.weight() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn schedule_law_holds() {
        for lipschitz in [0.01, 1.0, 250.0] {
            let mut s = OuterSchedule::new(lipschitz);
            for _ in 0..10_000 {
                s.advance();
                assert!(s.contraction_ratio() <= 1.0 + 1e-15);
            }
        }
    }

    #[test]
    fn x_hat_first_iteration_is_start() {
        let mut s = OuterSchedule::new(1.0);
        s.advance();
        let start = PrimalDualPoint::new(vec![1.0, -2.0], vec![0.5]);
        let state = OuterState::new(start.clone());
        let x_hat = state.compute_x_hat(&s);
        assert!(x_hat.dist(&start) < 1e-15);
    }

    #[test]
    fn x_hat_equal_points_is_fixed() {
        let mut s = OuterSchedule::new(1.0);
        s.advance();
        s.advance();
        let p = PrimalDualPoint::new(vec![0.3], vec![-0.1]);
        let state = OuterState::new(p.clone());
        assert!(state.compute_x_hat(&s).dist(&p) < 1e-15);
    }

    #[test]
    fn build_subproblem_hand_case() {
        // f quadratic B=I, c=0; h=0; A=I2; xhat=((1,1),(0,0)), z=((0,0),(1,1)).
        let problem = lagrangian_problem(
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
        );
        let mut oracle = Oracle::new(&problem);
        let mut state = OuterState::new(PrimalDualPoint::zeros(2, 2));
        state.dual_avg = PrimalDualPoint::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        let x_hat = PrimalDualPoint::new(vec![1.0, 1.0], vec![0.0, 0.0]);
        let spec = state.build_subproblem(0.25, &x_hat, &mut oracle);
        // shift_w = grad f(xhat_w) + A z_v = (1,1) + (1,1) = (2,2)
        assert_eq!(spec.shift.w, vec![2.0, 2.0]);
        // shift_v = grad h + (-A^T z_w) = 0 - 0 = 0
        assert_eq!(spec.shift.v, vec![0.0, 0.0]);
        assert_eq!(oracle.tally.grad_g, 1);
        assert_eq!(oracle.tally.coupling, 2);
    }

    #[test]
    fn update_z_closed_form() {
        // s = (2, 4) over a free space with x0 = 0 gives z = (-1, -2).
        let problem = lagrangian_problem(
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
        );
        let mut oracle = Oracle::new(&problem);
        let mut state = OuterState::new(PrimalDualPoint::zeros(2, 2));
        state.gradient_sum = PrimalDualPoint::new(vec![2.0, 4.0], vec![0.0, 0.0]);
        state.update_z(&mut oracle);
        assert_eq!(state.dual_avg.w, vec![-1.0, -2.0]);
        // Zero accumulators leave z at the start.
        let mut fresh = OuterState::new(PrimalDualPoint::new(vec![0.7, 0.1], vec![0.2, 0.2]));
        fresh.update_z(&mut oracle);
        assert!(fresh.dual_avg.dist(&fresh.start) < 1e-15);
    }

    #[test]
    fn fixed_point_stays_put() {
        // f = 1/2 ||w||^2, h = 0, b = 0, start at the saddle (0, 0).
        let problem = lagrangian_problem(
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
        );
        let config = BaxgConfig {
            max_iterations: 25,
            ..BaxgConfig::new(PrimalDualPoint::zeros(2, 2))
        };
        let (solution, trace) = baxg_solve(&problem, &config, &|_| 0.0, &|| 0.0).unwrap();
        assert!(solution.norm() < 1e-12);
        assert_eq!(trace.soft_failures, 0);
    }

    #[test]
    fn lagrangian_instance_reaches_kkt_point() {
        // B = I2, c = (1,1), A = I2, b = 0: the saddle is w* = 0, v* = (1,1).
        let problem = lagrangian_problem(
            DenseMatrix::identity(2),
            vec![1.0, 1.0],
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
        );
        let config = BaxgConfig {
            max_iterations: 3000,
            ..BaxgConfig::new(PrimalDualPoint::zeros(2, 2))
        };
        let (solution, _) = baxg_solve(&problem, &config, &|_| 0.0, &|| 0.0).unwrap();
        let target = PrimalDualPoint::new(vec![0.0, 0.0], vec![1.0, 1.0]);
        assert!(
            solution.dist(&target) <= 1e-4,
            "distance to saddle {}",
            solution.dist(&target)
        );
    }

    #[test]
    fn rejects_direct_subsolver_on_box() {
        let f = ZeroPotential::new(2);
        let h = ZeroPotential::new(2);
        let potential =
            SeparablePotential::new(Box::new(f), Box::new(h)).with_smoothness_override(1.0);
        let problem = BilinearMinimaxProblem::new(
            Box::new(potential),
            CouplingOperator::new(DenseMatrix::identity(2)).unwrap(),
            FeasibleSet::linf_ball(2, 1.0),
        )
        .unwrap();
        let config = BaxgConfig {
            subsolver: SubsolverChoice::Direct,
            ..BaxgConfig::new(PrimalDualPoint::zeros(2, 2))
        };
        assert!(matches!(
            baxg_solve(&problem, &config, &|_| 0.0, &|| 0.0),
            Err(SolverError::InvalidConfig(_))
        ));
    }

    #[test]
    fn oracle_budget_stops_run() {
        let problem = lagrangian_problem(
            DenseMatrix::identity(2),
            vec![1.0, 1.0],
            DenseMatrix::identity(2),
            vec![0.0, 0.0],
        );
        let config = BaxgConfig {
            max_iterations: 10_000,
            max_oracle: Some(100),
            ..BaxgConfig::new(PrimalDualPoint::zeros(2, 2))
        };
        let (_, trace) = baxg_solve(&problem, &config, &|_| 0.0, &|| 0.0).unwrap();
        assert_eq!(trace.stop_reason, StopReason::OracleBudget);
        assert!(trace.tally.total_extended() >= 100);
        assert!(trace.rows.last().unwrap().iteration < 10_000);
    }
}

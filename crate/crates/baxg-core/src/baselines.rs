//! The extragradient baseline: two projected half-steps along the monotone
//! field `F(x) = grad g(x) + Q x` with a fixed step size.

use alloc::vec::Vec;

use crate::outer::SolverError;
use crate::problem::{BilinearMinimaxProblem, Oracle, PrimalDualPoint};
use crate::trace::{ConvergenceTrace, StopReason, TraceRow};

/// Step-size choice for extragradient. The default `1/(L + sigma_max)`
/// matches the constant in the unaccelerated complexity bound.
#[derive(Debug, Clone, Copy)]
pub struct EgConfig {
    pub step: f64,
}

impl EgConfig {
    pub fn new(step: f64) -> Self {
        assert!(step > 0.0, "extragradient step must be positive");
        Self { step }
    }

    pub fn default_for(problem: &BilinearMinimaxProblem) -> Self {
        let l = problem.potential.smoothness_constant();
        Self {
            step: 1.0 / (l + problem.coupling.sigma_max()),
        }
    }
}

fn field(oracle: &mut Oracle<'_>, x: &PrimalDualPoint) -> PrimalDualPoint {
    let (_, grad) = oracle.value_grad_g(x);
    let mut f = oracle.apply_q(x);
    f.add_scaled(1.0, &grad);
    f
}

/// One extragradient step:
/// `x_half = Proj_X(x - eta F(x))`, `x_next = Proj_X(x - eta F(x_half))`.
/// Costs two gradients and two coupling applications.
pub fn eg_step(oracle: &mut Oracle<'_>, x: &PrimalDualPoint, config: EgConfig) -> PrimalDualPoint {
    let eta = config.step;
    let f_x = field(oracle, x);
    let mut half = x.clone();
    half.add_scaled(-eta, &f_x);
    oracle.project_stacked(&mut half);

    let f_half = field(oracle, &half);
    let mut next = x.clone();
    next.add_scaled(-eta, &f_half);
    oracle.project_stacked(&mut next);
    next
}

/// Configuration of one extragradient run.
#[derive(Debug, Clone)]
pub struct EgRunConfig {
    pub start: PrimalDualPoint,
    /// Step size; `None` uses the default rule.
    pub step: Option<f64>,
    pub max_iterations: u64,
    pub max_oracle: Option<u64>,
    pub merit_target: Option<f64>,
    pub dense_log_until: u64,
    pub log_stride: u64,
}

impl EgRunConfig {
    pub fn new(start: PrimalDualPoint) -> Self {
        Self {
            start,
            step: None,
            max_iterations: 1000,
            max_oracle: None,
            merit_target: None,
            dense_log_until: 100,
            log_stride: 10,
        }
    }
}

/// Run extragradient with the same budget/stopping/logging conventions as
/// the accelerated solver, so traces are directly comparable.
pub fn eg_solve(
    problem: &BilinearMinimaxProblem,
    config: &EgRunConfig,
    merit: &dyn Fn(&PrimalDualPoint) -> f64,
    clock: &dyn Fn() -> f64,
) -> Result<(PrimalDualPoint, ConvergenceTrace), SolverError> {
    problem.check_point(&config.start, "start point")?;
    if config.log_stride == 0 {
        return Err(SolverError::InvalidConfig(alloc::string::String::from(
            "log stride must be nonzero",
        )));
    }
    let step = match config.step {
        Some(s) if s > 0.0 && s.is_finite() => EgConfig::new(s),
        Some(s) => {
            return Err(SolverError::InvalidConfig(alloc::format!(
                "extragradient step must be positive and finite, got {s}"
            )))
        }
        None => EgConfig::default_for(problem),
    };

    let mut x = config.start.clone();
    problem.set.project(&mut x.v);

    let mut oracle = Oracle::new(problem);
    let mut rows: Vec<TraceRow> = Vec::new();
    let mut stop_reason = StopReason::IterationLimit;

    for k in 1..=config.max_iterations {
        x = eg_step(&mut oracle, &x, step);
        if !x.norm().is_finite() {
            stop_reason = StopReason::Diverged;
            break;
        }
        let merit_value = merit(&x);

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
                inner_iterations: 0,
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
        soft_failures: 0,
        instrumentation: None,
    };
    Ok((x, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::potentials::{SeparablePotential, ZeroPotential};
    use crate::problem::{CouplingOperator, FeasibleSet};
    use alloc::boxed::Box;
    use alloc::vec;

    fn bilinear_toy() -> BilinearMinimaxProblem {
        // min_w max_v w*v with A = [1], no potential, free dual.
        let potential = SeparablePotential::new(
            Box::new(ZeroPotential::new(1)),
            Box::new(ZeroPotential::new(1)),
        );
        BilinearMinimaxProblem::new(
            Box::new(potential),
            CouplingOperator::new(DenseMatrix::identity(1)).unwrap(),
            FeasibleSet::free(1),
        )
        .unwrap()
    }

    #[test]
    fn eg_step_hand_evaluation() {
        let problem = bilinear_toy();
        let mut oracle = Oracle::new(&problem);
        let x = PrimalDualPoint::new(vec![1.0], vec![1.0]);
        let next = eg_step(&mut oracle, &x, EgConfig::new(0.5));
        assert!((next.w[0] - 0.25).abs() < 1e-15);
        assert!((next.v[0] - 1.25).abs() < 1e-15);
        assert_eq!(oracle.tally.grad_g, 2);
        assert_eq!(oracle.tally.coupling, 4);
    }

    #[test]
    fn eg_fixed_point() {
        let problem = bilinear_toy();
        let mut oracle = Oracle::new(&problem);
        let x = PrimalDualPoint::zeros(1, 1);
        let next = eg_step(&mut oracle, &x, EgConfig::new(0.5));
        assert!(next.norm() < 1e-15);
    }

    #[test]
    fn eg_contracts_on_bilinear_toy() {
        // One step contracts the norm by sqrt(1 - eta^2 (1 - eta^2)) < 1.
        let problem = bilinear_toy();
        let mut oracle = Oracle::new(&problem);
        for eta in [0.1, 0.5, 0.9] {
            let x = PrimalDualPoint::new(vec![0.6], vec![-0.8]);
            let next = eg_step(&mut oracle, &x, EgConfig::new(eta));
            assert!(next.norm() < x.norm(), "no contraction at eta={eta}");
        }
    }

    #[test]
    fn eg_norm_decay_rate() {
        // At eta = 0.5 the contraction factor is sqrt(0.8125) < 0.95.
        let problem = bilinear_toy();
        let mut oracle = Oracle::new(&problem);
        let mut x = PrimalDualPoint::new(vec![1.0], vec![1.0]);
        let x0_norm = x.norm();
        for k in 1..=200u32 {
            x = eg_step(&mut oracle, &x, EgConfig::new(0.5));
            assert!(x.norm() <= 0.95f64.powi(k as i32) * x0_norm * (1.0 + 1e-12));
        }
    }
}

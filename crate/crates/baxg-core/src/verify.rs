//! Cross-cutting checkers: the finite-difference gradient oracle, post-hoc
//! evaluation of the instrumented inequalities, and small numeric helpers
//! used by the verification suite.
//!
//! Everything here is measurement. No routine tallies oracle accesses or
//! influences a run.

use alloc::vec::Vec;

use crate::math;
use crate::outer::OuterSchedule;
use crate::problem::{BilinearMinimaxProblem, PrimalDualPoint};
use crate::subproblem::SubproblemSpec;
use crate::trace::ConvergenceTrace;

/// Central finite differences of a scalar function, coordinate by
/// coordinate.
pub fn finite_diff_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    assert!(h > 0.0, "finite-difference step must be positive");
    let mut grad = Vec::with_capacity(x.len());
    let mut probe = x.to_vec();
    for i in 0..x.len() {
        let xi = x[i];
        probe[i] = xi + h;
        let plus = f(&probe);
        probe[i] = xi - h;
        let minus = f(&probe);
        probe[i] = xi;
        grad.push((plus - minus) / (2.0 * h));
    }
    grad
}

/// One iteration's worth of gap checks against every probe.
#[derive(Debug, Clone)]
pub struct GapEntry {
    pub iteration: u64,
    /// Max over probes of `g(x_k) - g(y) + <Q y, x_k - y>`.
    pub max_gap: f64,
    /// Max over probes of gap minus its bound minus slack; pass when <= 0.
    pub max_violation: f64,
    /// Largest bound value among the probes (for slack statistics).
    pub max_bound: f64,
}

#[derive(Debug, Clone)]
pub struct GapReport {
    pub entries: Vec<GapEntry>,
    pub slack_rel: f64,
}

impl GapReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.max_violation <= 0.0)
    }

    pub fn worst_violation(&self) -> f64 {
        self.entries
            .iter()
            .fold(f64::NEG_INFINITY, |acc, e| acc.max(e.max_violation))
    }

    pub fn failures(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.max_violation > 0.0)
            .count()
    }
}

/// Evaluate the accelerated-rate inequality
/// `g(x_k) - g(y) + <Q y, x_k - y> <= ||y - x_0||^2 / A_k`
/// for every instrumented iterate and probe, with relative slack
/// `slack_rel * (1 + bound)`. With the standard schedule the bound equals
/// `4 L ||y - x_0||^2 / k^2`.
///
/// Requires an instrumented trace; probes' dual parts are projected.
pub fn check_gap_inequality(
    trace: &ConvergenceTrace,
    problem: &BilinearMinimaxProblem,
    probes: &[PrimalDualPoint],
    slack_rel: f64,
) -> GapReport {
    let log = trace
        .instrumentation
        .as_ref()
        .expect("check_gap_inequality needs an instrumented trace");
    let start = log
        .start
        .as_ref()
        .expect("instrumented trace records its start point");

    struct Probe {
        point: PrimalDualPoint,
        g_value: f64,
        q_point: PrimalDualPoint,
        dist0_sq: f64,
    }
    let probes: Vec<Probe> = probes
        .iter()
        .map(|p| {
            let mut point = p.clone();
            problem.set.project(&mut point.v);
            let g_value = problem.potential.value(&point);
            let q_point = problem.coupling.apply_q(&point);
            let diff = point.sub(start);
            let dist0_sq = diff.dot(&diff);
            Probe {
                point,
                g_value,
                q_point,
                dist0_sq,
            }
        })
        .collect();

    let mut entries = Vec::with_capacity(log.iterates.len());
    for (idx, x_k) in log.iterates.iter().enumerate() {
        let total_weight = log.schedule_totals[idx];
        let g_x = problem.potential.value(x_k);
        let mut max_gap = f64::NEG_INFINITY;
        let mut max_violation = f64::NEG_INFINITY;
        let mut max_bound = 0.0f64;
        for probe in &probes {
            let moved = x_k.sub(&probe.point);
            let gap = g_x - probe.g_value + probe.q_point.dot(&moved);
            let bound = probe.dist0_sq / total_weight;
            let violation = gap - bound - slack_rel * (1.0 + math::abs(bound));
            max_gap = max_gap.max(gap);
            max_violation = max_violation.max(violation);
            max_bound = max_bound.max(bound);
        }
        entries.push(GapEntry {
            iteration: (idx + 1) as u64,
            max_gap,
            max_violation,
            max_bound,
        });
    }
    GapReport { entries, slack_rel }
}

/// Per-probe evaluation of the accepted-iterate condition.
#[derive(Debug, Clone)]
pub struct CondEntry {
    /// Left side of the condition at this probe; pass when it is below
    /// `tol_rel * (1 + scale)`.
    pub lhs: f64,
    pub scale: f64,
    pub pass: bool,
}

#[derive(Debug, Clone)]
pub struct CondReport {
    pub entries: Vec<CondEntry>,
    pub tol_rel: f64,
}

impl CondReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn worst_excess(&self) -> f64 {
        self.entries.iter().fold(f64::NEG_INFINITY, |acc, e| {
            acc.max(e.lhs - self.tol_rel * (1.0 + e.scale))
        })
    }
}

/// Evaluate the full left side of the accepted-iterate condition
/// `c <shift + (Q + (2/c) I)(zhat - anchor), zhat - z>
///  - 1/2 (||zhat - anchor||^2 + ||zhat - z||^2) <= 0`
/// at each probe `z` (dual parts projected into the feasible set).
pub fn check_subproblem_condition(
    problem: &BilinearMinimaxProblem,
    spec: &SubproblemSpec,
    z_hat: &PrimalDualPoint,
    probes: &[PrimalDualPoint],
    tol_rel: f64,
) -> CondReport {
    let c = spec.weight;
    let displacement = z_hat.sub(&spec.anchor);
    let mut moved = problem.coupling.apply_q(&displacement);
    moved.add_scaled(2.0 / c, &displacement);
    moved.add_scaled(1.0, &spec.shift);
    let disp_sq = displacement.dot(&displacement);

    let entries = probes
        .iter()
        .map(|probe| {
            let mut z = probe.clone();
            problem.set.project(&mut z.v);
            let to_probe = z_hat.sub(&z);
            let scale = 0.5 * (disp_sq + to_probe.dot(&to_probe));
            let lhs = c * moved.dot(&to_probe) - scale;
            CondEntry {
                lhs,
                scale,
                pass: lhs <= tol_rel * (1.0 + scale),
            }
        })
        .collect();
    CondReport { entries, tol_rel }
}

/// Largest `a_k^2 L / A_k` over `k = 1..=k_max`; the schedule law says
/// this never exceeds one.
pub fn schedule_law_max_ratio(lipschitz: f64, k_max: u64) -> f64 {
    let mut schedule = OuterSchedule::new(lipschitz);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..k_max {
        schedule.advance();
        worst = worst.max(schedule.contraction_ratio());
    }
    worst
}

/// Least-squares slope of `ln y` against `ln x`. Returns `None` when fewer
/// than two points are given or any coordinate is nonpositive.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let n = points.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for &(x, y) in points {
        let lx = math::ln(x);
        let ly = math::ln(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let denom = n * sxx - sx * sx;
    if denom == 0.0 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finite_diff_on_quadratic() {
        let f = |x: &[f64]| 0.5 * (x[0] * x[0] + x[1] * x[1]);
        let grad = finite_diff_gradient(&f, &[1.0, 2.0], 1e-6);
        assert!((grad[0] - 1.0).abs() < 1e-8);
        assert!((grad[1] - 2.0).abs() < 1e-8);
    }

    #[test]
    fn finite_diff_on_constant_is_zero() {
        let f = |_: &[f64]| 3.25;
        let grad = finite_diff_gradient(&f, &[0.3, -0.7, 1.1], 1e-6);
        assert!(grad.iter().all(|g| g.abs() < 1e-9));
    }

    #[test]
    fn schedule_law_tight() {
        let worst = schedule_law_max_ratio(1.0, 1000);
        assert!(worst <= 1.0 + 1e-15);
        // Approaches 1 from below as k grows.
        assert!(worst > 0.99);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let points: Vec<(f64, f64)> = (1..50)
            .map(|k| (k as f64, 3.0 / (k as f64 * k as f64)))
            .collect();
        let slope = log_log_slope(&points).unwrap();
        assert!((slope + 2.0).abs() < 1e-10);
    }

    #[test]
    fn slope_rejects_nonpositive() {
        assert!(log_log_slope(&[(1.0, 1.0), (2.0, 0.0)]).is_none());
        assert!(log_log_slope(&[(1.0, 1.0)]).is_none());
    }
}

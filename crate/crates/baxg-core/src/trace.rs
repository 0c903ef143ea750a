//! Per-run convergence records shared by all solvers.

use alloc::vec::Vec;

use crate::problem::{OracleTally, PrimalDualPoint};
use crate::subproblem::SubproblemSpec;

/// One logged iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: u64,
    /// Cumulative extended-oracle accesses (grad + coupling + Gram).
    pub oracle_total: u64,
    pub merit: f64,
    /// Inner iterations spent by the subsolver this outer step (0 for EG).
    pub inner_iterations: u64,
    pub wall_ms: f64,
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    IterationLimit,
    OracleBudget,
    MeritTarget,
    /// Iterates left the representable range (wildly misconfigured step
    /// or smoothness constant); the trace ends at the last finite row.
    Diverged,
}

/// Full record of one solver run: the logged rows, the final tally, and
/// (when enabled) the per-iteration inequality instrumentation.
#[derive(Debug, Clone)]
pub struct ConvergenceTrace {
    pub rows: Vec<TraceRow>,
    pub tally: OracleTally,
    pub stop_reason: StopReason,
    /// Inner solves that hit their iteration cap without certifying.
    pub soft_failures: u64,
    pub instrumentation: Option<InstrumentationLog>,
}

impl ConvergenceTrace {
    pub fn final_merit(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.merit)
    }

    pub fn final_oracle_total(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.oracle_total)
    }
}

/// Per-iteration data recorded when instrumentation is on. Everything here
/// is measurement: it is computed with raw (untallied) oracle calls and
/// never influences the run itself.
#[derive(Debug, Clone, Default)]
pub struct InstrumentationLog {
    /// Probe points used for the estimation-sequence and gap checks.
    pub probes: Vec<PrimalDualPoint>,
    pub start: Option<PrimalDualPoint>,
    /// `x_k` for k = 1, 2, ...
    pub iterates: Vec<PrimalDualPoint>,
    /// Cumulative schedule weight `A_k` per iteration.
    pub schedule_totals: Vec<f64>,
    /// Backward-Euler error terms `E_k`.
    pub error_terms: Vec<f64>,
    /// `||zhat_k - z_{k-1}||^2`, the scale the `E_k` bound is relative to.
    pub error_scales: Vec<f64>,
    /// Probe-independent part of the estimation-sequence value at `z_k`;
    /// the value against a probe `y` subtracts `coupling_sum . y`.
    pub estimation_values: Vec<f64>,
    /// Max over probes of (estimation-sequence value at `z_k`) minus its
    /// proven upper bound; nonpositive up to float slack.
    pub estimation_bound_margins: Vec<f64>,
    /// Largest bound magnitude among probes, the scale for the margin.
    pub estimation_bound_scales: Vec<f64>,
    /// Max over probes of the accepted-iterate condition's left side.
    pub cond_margins: Vec<f64>,
    /// Scale `(||zhat-z_prev||^2 + ||zhat-z||^2)/2` paired with each margin.
    pub cond_scales: Vec<f64>,
    /// The subproblem dispatched at each iteration.
    pub subproblems: Vec<SubproblemSpec>,
    /// The accepted approximate solution `zhat_k` of each subproblem.
    pub accepted: Vec<PrimalDualPoint>,
}

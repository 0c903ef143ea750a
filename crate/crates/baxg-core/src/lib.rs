//! Solvers for bilinear convex-concave minimax problems
//! `min_w max_{v in V} f(w) + <w, A v> - h(v)` with smooth convex `f`, `h`
//! and a full-column-rank coupling matrix `A`.
//!
//! The centerpiece is the bilinear accelerated extragradient method
//! ([`outer::baxg_solve`]): an estimation-sequence outer loop whose
//! per-iteration subproblem reduces, thanks to the unconstrained primal
//! block, to a strongly convex quadratic over the dual feasible set. That
//! inner problem is handled by projected accelerated gradient descent with
//! a residual-norm certificate ([`subproblem::pagd_solve`]), or — when the
//! dual block is unconstrained — exactly, through a cached
//! eigendecomposition of the Gram matrix ([`subproblem::direct_solve`]) or
//! conjugate gradients ([`subproblem::cg_solve`]). An extragradient
//! baseline ([`baselines::eg_solve`]) shares the trace format so runs are
//! directly comparable on the extended-oracle axis.
//!
//! The crate is `no_std`-compatible (`alloc` required): disable default
//! features and enable `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;
#[cfg(feature = "std")]
extern crate std;

pub mod baselines;
pub mod linalg;
pub mod math;
pub mod outer;
pub mod potentials;
pub mod problem;
pub mod subproblem;
pub mod trace;
pub mod verify;

pub use baselines::{eg_solve, eg_step, EgConfig, EgRunConfig};
pub use outer::{baxg_solve, BaxgConfig, CkVariant, OuterSchedule, OuterState, SolverError};
pub use problem::{
    singular_bounds, BilinearMinimaxProblem, BlockPotential, CouplingOperator, FeasibleSet, Oracle,
    OracleTally, PrimalDualPoint, ProblemError, SmoothPotential,
};
pub use subproblem::{
    cg_solve, direct_solve, early_exit_test, pagd_solve, recover_w, reduce, certificate_cap,
    InnerSchedule, PagdOptions, PagdOutcome, ReducedQuadratic, SubproblemSpec, SubsolverChoice,
};
pub use trace::{ConvergenceTrace, InstrumentationLog, StopReason, TraceRow};

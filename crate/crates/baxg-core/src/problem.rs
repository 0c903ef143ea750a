//! Domain types shared by every solver: stacked primal-dual points, the
//! skew-symmetric coupling operator, feasible sets for the dual block, the
//! smooth potential interface, and oracle-access accounting.
//!
//! The saddle problem is `min_w max_{v in V} f(w) + <w, A v> - h(v)` with a
//! full-column-rank `A`. Stacking `x = [w; v]` turns it into the monotone
//! inclusion driven by `grad g(x) + Q x`, where `g(x) = f(w) + h(v)` and
//! `Q = [0 A; -A^T 0]`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{self, DenseMatrix, SymmetricEigen};
use crate::math;

/// Relative tolerance for the full-column-rank test on `A`.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    /// `A` is not full column rank (or has more columns than rows).
    NotFullColumnRank {
        sigma_min: f64,
        sigma_max: f64,
    },
    /// Dual dimension exceeds primal dimension.
    TooManyColumns {
        rows: usize,
        cols: usize,
    },
    NotSymmetric {
        defect: f64,
    },
    NotPositiveSemidefinite {
        min_eigenvalue: f64,
    },
    EmptyMatrix,
    Eigen(linalg::LinalgError),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::DimensionMismatch { what, expected, got } => {
                write!(f, "{what}: expected length {expected}, got {got}")
            }
            ProblemError::NotFullColumnRank { sigma_min, sigma_max } => write!(
                f,
                "coupling matrix is not full column rank (sigma_min {sigma_min:.3e}, sigma_max {sigma_max:.3e})"
            ),
            ProblemError::TooManyColumns { rows, cols } => {
                write!(f, "coupling matrix must be tall ({rows} rows < {cols} cols)")
            }
            ProblemError::NotSymmetric { defect } => {
                write!(f, "matrix is not symmetric (relative defect {defect:.3e})")
            }
            ProblemError::NotPositiveSemidefinite { min_eigenvalue } => {
                write!(f, "matrix is not PSD (min eigenvalue {min_eigenvalue:.3e})")
            }
            ProblemError::EmptyMatrix => write!(f, "matrix must have at least one row and column"),
            ProblemError::Eigen(e) => write!(f, "eigendecomposition failed: {e}"),
        }
    }
}

impl core::error::Error for ProblemError {}

impl From<linalg::LinalgError> for ProblemError {
    fn from(e: linalg::LinalgError) -> Self {
        ProblemError::Eigen(e)
    }
}

/// Stacked iterate `x = [w; v]` with `w` free and `v` constrained to the
/// problem's feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalDualPoint {
    pub w: Vec<f64>,
    pub v: Vec<f64>,
}

impl PrimalDualPoint {
    pub fn new(w: Vec<f64>, v: Vec<f64>) -> Self {
        Self { w, v }
    }

    pub fn zeros(primal_dim: usize, dual_dim: usize) -> Self {
        Self {
            w: vec![0.0; primal_dim],
            v: vec![0.0; dual_dim],
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.w.len(), self.v.len())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        linalg::dot(&self.w, &other.w) + linalg::dot(&self.v, &other.v)
    }

    pub fn norm(&self) -> f64 {
        math::sqrt(self.dot(self))
    }

    pub fn dist(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        for (a, b) in self.w.iter().zip(&other.w) {
            let d = a - b;
            acc += d * d;
        }
        for (a, b) in self.v.iter().zip(&other.v) {
            let d = a - b;
            acc += d * d;
        }
        math::sqrt(acc)
    }

    /// `self += alpha * other`.
    pub fn add_scaled(&mut self, alpha: f64, other: &Self) {
        linalg::axpy(alpha, &other.w, &mut self.w);
        linalg::axpy(alpha, &other.v, &mut self.v);
    }

    pub fn scale(&mut self, alpha: f64) {
        linalg::scale(&mut self.w, alpha);
        linalg::scale(&mut self.v, alpha);
    }

    /// `alpha * a + beta * b` as a new point.
    pub fn combine(alpha: f64, a: &Self, beta: f64, b: &Self) -> Self {
        let mut out = a.clone();
        out.scale(alpha);
        out.add_scaled(beta, b);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(-1.0, other);
        out
    }
}

/// Feasible set for the dual block `v`. These two are the only sets the
/// solvers need: the free space (equality-constrained problems) and the
/// l-infinity ball (l1-penalized dual of LAD-type objectives).
#[derive(Debug, Clone, PartialEq)]
pub enum FeasibleSet {
    FreeSpace { dim: usize },
    LinfBall { dim: usize, radius: f64 },
}

impl FeasibleSet {
    pub fn free(dim: usize) -> Self {
        FeasibleSet::FreeSpace { dim }
    }

    pub fn linf_ball(dim: usize, radius: f64) -> Self {
        assert!(radius > 0.0, "ball radius must be positive");
        FeasibleSet::LinfBall { dim, radius }
    }

    pub fn dim(&self) -> usize {
        match self {
            FeasibleSet::FreeSpace { dim } | FeasibleSet::LinfBall { dim, .. } => *dim,
        }
    }

    pub fn is_free(&self) -> bool {
        matches!(self, FeasibleSet::FreeSpace { .. })
    }

    /// Euclidean projection onto the set, in place. For the l-infinity ball
    /// this is a componentwise clamp.
    pub fn project(&self, v: &mut [f64]) {
        assert_eq!(v.len(), self.dim(), "project: dimension mismatch");
        match self {
            FeasibleSet::FreeSpace { .. } => {}
            FeasibleSet::LinfBall { radius, .. } => {
                for x in v {
                    *x = x.clamp(-radius, *radius);
                }
            }
        }
    }

    pub fn projected(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        self.project(&mut out);
        out
    }

    pub fn contains(&self, v: &[f64], tol: f64) -> bool {
        match self {
            FeasibleSet::FreeSpace { dim } => v.len() == *dim,
            FeasibleSet::LinfBall { dim, radius } => {
                v.len() == *dim && v.iter().all(|x| math::abs(*x) <= radius + tol)
            }
        }
    }
}

/// The coupling matrix `A` together with its cached Gram matrix `A^T A`,
/// the Gram eigendecomposition, and the extreme singular values.
///
/// The Gram matrix is what the extended first-order oracle exposes; its
/// eigendecomposition is computed once and shared by every shifted
/// subproblem solve (they differ only by a scaled identity and the
/// right-hand side).
#[derive(Debug, Clone)]
pub struct CouplingOperator {
    matrix: DenseMatrix,
    gram: DenseMatrix,
    gram_eigen: SymmetricEigen,
    sigma_min: f64,
    sigma_max: f64,
}

impl CouplingOperator {
    pub fn new(matrix: DenseMatrix) -> Result<Self, ProblemError> {
        if matrix.rows() == 0 || matrix.cols() == 0 {
            return Err(ProblemError::EmptyMatrix);
        }
        if matrix.cols() > matrix.rows() {
            return Err(ProblemError::TooManyColumns {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let gram = matrix.gram();
        let gram_eigen = linalg::symmetric_eigen(&gram)?;
        let lambda_min = gram_eigen.values.first().copied().unwrap_or(0.0).max(0.0);
        let lambda_max = gram_eigen.values.last().copied().unwrap_or(0.0).max(0.0);
        let sigma_min = math::sqrt(lambda_min);
        let sigma_max = math::sqrt(lambda_max);
        if sigma_min <= RANK_TOL * sigma_max || sigma_max == 0.0 {
            return Err(ProblemError::NotFullColumnRank {
                sigma_min,
                sigma_max,
            });
        }
        Ok(Self {
            matrix,
            gram,
            gram_eigen,
            sigma_min,
            sigma_max,
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn dual_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn gram(&self) -> &DenseMatrix {
        &self.gram
    }

    pub fn gram_eigen(&self) -> &SymmetricEigen {
        &self.gram_eigen
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma_max
    }

    /// `out = A v`.
    pub fn apply_a(&self, v: &[f64], out: &mut [f64]) {
        self.matrix.matvec(v, out);
    }

    /// `out = A^T w`.
    pub fn apply_at(&self, w: &[f64], out: &mut [f64]) {
        self.matrix.matvec_transpose(w, out);
    }

    /// `out = A^T A v` through the cached Gram matrix.
    pub fn apply_gram(&self, v: &[f64], out: &mut [f64]) {
        self.gram.matvec(v, out);
    }

    /// `Q x = [A v; -A^T w]`, untallied. Solvers go through [`Oracle`].
    pub fn apply_q(&self, x: &PrimalDualPoint) -> PrimalDualPoint {
        let mut out = PrimalDualPoint::zeros(self.primal_dim(), self.dual_dim());
        self.apply_a(&x.v, &mut out.w);
        self.apply_at(&x.w, &mut out.v);
        linalg::scale(&mut out.v, -1.0);
        out
    }
}

/// Extreme singular values of `A`, via the eigenvalues of `A^T A`.
/// Fails when `A` is rank deficient relative to [`RANK_TOL`].
pub fn singular_bounds(a: &DenseMatrix) -> Result<(f64, f64), ProblemError> {
    let op = CouplingOperator::new(a.clone())?;
    Ok((op.sigma_min, op.sigma_max))
}

/// Counts of oracle accesses for one solver run. The x-axis of every
/// benchmark curve is `total_extended()`; projections are tracked but do
/// not enter that total.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OracleTally {
    /// Evaluations of `grad g`.
    pub grad_g: u64,
    /// Applications of `A` or `A^T` (a full `Q x` costs two).
    pub coupling: u64,
    /// Applications of the Gram matrix `A^T A`.
    pub gram: u64,
    /// Projections onto the feasible set.
    pub projection: u64,
}

impl OracleTally {
    pub fn total_extended(&self) -> u64 {
        self.grad_g + self.coupling + self.gram
    }
}

/// Smooth convex potential `g(x) = f(w) + h(v)` over stacked points.
pub trait SmoothPotential: Send + Sync {
    fn primal_dim(&self) -> usize;
    fn dual_dim(&self) -> usize;
    fn value(&self, x: &PrimalDualPoint) -> f64;
    fn gradient(&self, x: &PrimalDualPoint, out: &mut PrimalDualPoint);
    /// Smoothness constant used by schedules. Either the analytic bound or
    /// a user-supplied override (the Lipschitz sweep of the harness).
    fn smoothness_constant(&self) -> f64;

    fn value_grad(&self, x: &PrimalDualPoint, out: &mut PrimalDualPoint) -> f64 {
        self.gradient(x, out);
        self.value(x)
    }
}

/// A convex potential on a single block (`w` or `v`) of the stacked point.
pub trait BlockPotential: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    /// Analytic gradient-Lipschitz bound.
    fn smoothness_bound(&self) -> f64;
}

/// One bilinear minimax problem instance: the separable potential, the
/// coupling operator, and the dual feasible set. Immutable once built, so
/// concurrent runs may share it; each run owns its [`OracleTally`].
pub struct BilinearMinimaxProblem {
    pub potential: Box<dyn SmoothPotential>,
    pub coupling: CouplingOperator,
    pub set: FeasibleSet,
}

impl BilinearMinimaxProblem {
    pub fn new(
        potential: Box<dyn SmoothPotential>,
        coupling: CouplingOperator,
        set: FeasibleSet,
    ) -> Result<Self, ProblemError> {
        if potential.primal_dim() != coupling.primal_dim() {
            return Err(ProblemError::DimensionMismatch {
                what: "potential primal block",
                expected: coupling.primal_dim(),
                got: potential.primal_dim(),
            });
        }
        if potential.dual_dim() != coupling.dual_dim() {
            return Err(ProblemError::DimensionMismatch {
                what: "potential dual block",
                expected: coupling.dual_dim(),
                got: potential.dual_dim(),
            });
        }
        if set.dim() != coupling.dual_dim() {
            return Err(ProblemError::DimensionMismatch {
                what: "feasible set",
                expected: coupling.dual_dim(),
                got: set.dim(),
            });
        }
        Ok(Self {
            potential,
            coupling,
            set,
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.coupling.primal_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.coupling.dual_dim()
    }

    pub fn check_point(&self, x: &PrimalDualPoint, what: &'static str) -> Result<(), ProblemError> {
        if x.w.len() != self.primal_dim() {
            return Err(ProblemError::DimensionMismatch {
                what,
                expected: self.primal_dim(),
                got: x.w.len(),
            });
        }
        if x.v.len() != self.dual_dim() {
            return Err(ProblemError::DimensionMismatch {
                what,
                expected: self.dual_dim(),
                got: x.v.len(),
            });
        }
        Ok(())
    }

    /// Untallied `g` evaluation for instrumentation and tests.
    pub fn potential_value(&self, x: &PrimalDualPoint) -> f64 {
        self.potential.value(x)
    }
}

/// Tallied access to a problem's oracles. One per solver run.
pub struct Oracle<'a> {
    pub problem: &'a BilinearMinimaxProblem,
    pub tally: OracleTally,
}

impl<'a> Oracle<'a> {
    pub fn new(problem: &'a BilinearMinimaxProblem) -> Self {
        Self {
            problem,
            tally: OracleTally::default(),
        }
    }

    /// `(g(x), grad g(x))`; one `grad_g` access.
    pub fn value_grad_g(&mut self, x: &PrimalDualPoint) -> (f64, PrimalDualPoint) {
        self.tally.grad_g += 1;
        let mut grad = PrimalDualPoint::zeros(self.problem.primal_dim(), self.problem.dual_dim());
        let value = self.problem.potential.value_grad(x, &mut grad);
        (value, grad)
    }

    /// `Q x = [A v; -A^T w]`; two coupling accesses.
    pub fn apply_q(&mut self, x: &PrimalDualPoint) -> PrimalDualPoint {
        self.tally.coupling += 2;
        self.problem.coupling.apply_q(x)
    }

    /// `out = A v`; one coupling access.
    pub fn apply_a(&mut self, v: &[f64], out: &mut [f64]) {
        self.tally.coupling += 1;
        self.problem.coupling.apply_a(v, out);
    }

    /// `out = A^T w`; one coupling access.
    pub fn apply_at(&mut self, w: &[f64], out: &mut [f64]) {
        self.tally.coupling += 1;
        self.problem.coupling.apply_at(w, out);
    }

    /// `out = A^T A v`; one extended-oracle (Gram) access.
    pub fn apply_gram(&mut self, v: &[f64], out: &mut [f64]) {
        self.tally.gram += 1;
        self.problem.coupling.apply_gram(v, out);
    }

    /// Project the dual block of `x` onto the feasible set.
    pub fn project_dual(&mut self, v: &mut [f64]) {
        self.tally.projection += 1;
        self.problem.set.project(v);
    }

    /// Project a stacked point onto `X = R^d x V` (identity on `w`).
    pub fn project_stacked(&mut self, x: &mut PrimalDualPoint) {
        self.tally.projection += 1;
        self.problem.set.project(&mut x.v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coupling_identity_swaps_blocks() {
        let op = CouplingOperator::new(DenseMatrix::identity(2)).unwrap();
        let x = PrimalDualPoint::new(vec![1.0, 2.0], vec![3.0, 4.0]);
        let qx = op.apply_q(&x);
        assert_eq!(qx.w, vec![3.0, 4.0]);
        assert_eq!(qx.v, vec![-1.0, -2.0]);
    }

    #[test]
    fn coupling_hand_product() {
        // A = [[1],[1]] (d=2, n=1): Q x = (A v, -A^T w).
        let a = DenseMatrix::from_rows(&[&[1.0], &[1.0]]).unwrap();
        let op = CouplingOperator::new(a).unwrap();
        let x = PrimalDualPoint::new(vec![1.0, 0.0], vec![2.0]);
        let qx = op.apply_q(&x);
        assert_eq!(qx.w, vec![2.0, 2.0]);
        assert_eq!(qx.v, vec![-1.0]);
    }

    #[test]
    fn coupling_is_skew() {
        let a = DenseMatrix::from_fn(4, 3, |i, j| 1.0 / (1.0 + (i + 2 * j) as f64));
        let op = CouplingOperator::new(a).unwrap();
        let x = PrimalDualPoint::new(vec![0.3, -1.2, 0.7, 2.0], vec![1.0, -0.5, 0.25]);
        let qx = op.apply_q(&x);
        assert!(math::abs(x.dot(&qx)) <= 1e-12 * x.norm() * x.norm());
    }

    #[test]
    fn singular_bounds_identity() {
        let (lo, hi) = singular_bounds(&DenseMatrix::identity(3)).unwrap();
        assert!((lo - 1.0).abs() < 1e-12);
        assert!((hi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_bounds_padded_diagonal() {
        // diag(2, 0.5) padded to 4x2 with zero rows: eigenvalues of the Gram
        // matrix are 4 and 0.25.
        let a =
            DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5], &[0.0, 0.0], &[0.0, 0.0]]).unwrap();
        let (lo, hi) = singular_bounds(&a).unwrap();
        assert!((lo - 0.5).abs() < 1e-12);
        assert!((hi - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_bounds_rejects_duplicated_column() {
        let a = DenseMatrix::from_rows(&[&[1.0, 1.0], &[2.0, 2.0], &[-1.0, -1.0]]).unwrap();
        assert!(matches!(
            singular_bounds(&a),
            Err(ProblemError::NotFullColumnRank { .. })
        ));
    }

    #[test]
    fn wide_matrix_rejected() {
        let a = DenseMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(
            CouplingOperator::new(a),
            Err(ProblemError::TooManyColumns { .. })
        ));
    }

    #[test]
    fn projection_clamps_linf_ball() {
        let set = FeasibleSet::linf_ball(3, 1.0);
        assert_eq!(set.projected(&[2.0, -0.5, 1.0]), vec![1.0, -0.5, 1.0]);
        let clamped = FeasibleSet::linf_ball(1, 1.0).projected(&[-1.0001]);
        assert_eq!(clamped, vec![-1.0]);
    }

    #[test]
    fn projection_identity_on_free_space() {
        let set = FeasibleSet::free(2);
        assert_eq!(set.projected(&[7.0, -3.0]), vec![7.0, -3.0]);
    }

    #[test]
    fn tally_total_excludes_projections() {
        let tally = OracleTally {
            grad_g: 3,
            coupling: 5,
            gram: 2,
            projection: 100,
        };
        assert_eq!(tally.total_extended(), 10);
    }

    #[test]
    fn problem_is_shareable_across_threads() {
        fn assert_share<T: Send + Sync>() {}
        assert_share::<BilinearMinimaxProblem>();
        assert_share::<CouplingOperator>();
        assert_share::<FeasibleSet>();
    }
}

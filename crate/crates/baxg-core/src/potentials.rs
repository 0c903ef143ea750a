//! Concrete smooth potentials: the smoothed l1 surrogate, quadratic and
//! linear pieces, and the separable stacked potential `g(x) = f(w) + h(v)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{self, DenseMatrix};
use crate::math;
use crate::problem::{BlockPotential, PrimalDualPoint, ProblemError, SmoothPotential};

/// Smoothed l1 surrogate
/// `R(w) = sum_i (1/a) [ln(1 + e^{a w_i}) + ln(1 + e^{-a w_i})]`,
/// scaled by `lambda`. Approaches `lambda * ||w||_1` as the sharpness `a`
/// grows.
///
/// Evaluation goes through the identity
/// `(1/a)[ln(1+e^{aw}) + ln(1+e^{-aw})] = |w| + (2/a) ln(1 + e^{-a|w|})`,
/// which never overflows, and the gradient is the closed form
/// `lambda * tanh(a w / 2)`.
#[derive(Debug, Clone)]
pub struct SmoothedL1 {
    dim: usize,
    sharpness: f64,
    scale: f64,
}

impl SmoothedL1 {
    pub fn new(dim: usize, sharpness: f64, scale: f64) -> Self {
        assert!(sharpness > 0.0, "sharpness must be positive");
        assert!(scale >= 0.0, "scale must be nonnegative");
        Self {
            dim,
            sharpness,
            scale,
        }
    }

    pub fn sharpness(&self) -> f64 {
        self.sharpness
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Global Lipschitz constant `lambda * a` of the gradient, the loose
    /// bound quoted in the literature for this surrogate. The tanh form
    /// gives the tighter `lambda * a / 2` used by [`BlockPotential`].
    pub fn loose_smoothness_bound(&self) -> f64 {
        self.scale * self.sharpness
    }
}

impl BlockPotential for SmoothedL1 {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.dim);
        let a = self.sharpness;
        let mut acc = 0.0;
        for &xi in x {
            let m = math::abs(xi);
            acc += m + (2.0 / a) * math::ln_1p(math::exp(-a * m));
        }
        self.scale * acc
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(out.len(), self.dim);
        let a = self.sharpness;
        for (o, &xi) in out.iter_mut().zip(x) {
            *o = self.scale * math::tanh(0.5 * a * xi);
        }
    }

    fn smoothness_bound(&self) -> f64 {
        // tanh(a w / 2) has derivative at most a/2.
        0.5 * self.scale * self.sharpness
    }
}

/// Quadratic potential `f(w) = 1/2 w^T B w - c^T w` with symmetric PSD `B`.
#[derive(Debug, Clone)]
pub struct QuadraticPotential {
    hessian: DenseMatrix,
    linear: Vec<f64>,
    smoothness: f64,
}

impl QuadraticPotential {
    /// Validates symmetry (relative defect at most 1e-12) and positive
    /// semidefiniteness (eigenvalue floor `-1e-10 * ||B||`).
    pub fn new(hessian: DenseMatrix, linear: Vec<f64>) -> Result<Self, ProblemError> {
        if hessian.rows() != hessian.cols() || hessian.rows() != linear.len() {
            return Err(ProblemError::DimensionMismatch {
                what: "quadratic potential",
                expected: hessian.rows(),
                got: linear.len(),
            });
        }
        let defect = hessian.symmetry_defect();
        if defect > 1e-12 {
            return Err(ProblemError::NotSymmetric { defect });
        }
        let eigen = linalg::symmetric_eigen(&hessian)?;
        let min = eigen.values.first().copied().unwrap_or(0.0);
        let max = eigen.values.last().copied().unwrap_or(0.0);
        let norm = math::abs(min).max(math::abs(max));
        if min < -1e-10 * norm {
            return Err(ProblemError::NotPositiveSemidefinite {
                min_eigenvalue: min,
            });
        }
        Ok(Self {
            hessian,
            linear,
            smoothness: max.max(0.0),
        })
    }

    pub fn hessian(&self) -> &DenseMatrix {
        &self.hessian
    }
}

impl BlockPotential for QuadraticPotential {
    fn dim(&self) -> usize {
        self.linear.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut bx = vec![0.0; x.len()];
        self.hessian.matvec(x, &mut bx);
        0.5 * linalg::dot(x, &bx) - linalg::dot(&self.linear, x)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.hessian.matvec(x, out);
        linalg::axpy(-1.0, &self.linear, out);
    }

    fn smoothness_bound(&self) -> f64 {
        self.smoothness
    }
}

/// Linear potential `h(v) = b^T v`, the dual-side term of Lagrangian
/// reformulations. Its gradient is the constant `b`.
#[derive(Debug, Clone)]
pub struct LinearPotential {
    coefficients: Vec<f64>,
}

impl LinearPotential {
    pub fn new(coefficients: Vec<f64>) -> Self {
        Self { coefficients }
    }
}

impl BlockPotential for LinearPotential {
    fn dim(&self) -> usize {
        self.coefficients.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.coefficients, x)
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.coefficients);
    }

    fn smoothness_bound(&self) -> f64 {
        0.0
    }
}

/// The identically-zero potential, handy for pure bilinear toys.
#[derive(Debug, Clone)]
pub struct ZeroPotential {
    dim: usize,
}

impl ZeroPotential {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl BlockPotential for ZeroPotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, _x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
    }

    fn smoothness_bound(&self) -> f64 {
        0.0
    }
}

/// Stacked potential `g(x) = f(w) + h(v)`.
///
/// `smoothness_constant` is the analytic bound `max(L_f, L_h)` (the Hessian
/// is block diagonal) unless an override is set; the harness's Lipschitz
/// sweep works by overriding it.
pub struct SeparablePotential {
    primal: Box<dyn BlockPotential>,
    dual: Box<dyn BlockPotential>,
    override_smoothness: Option<f64>,
}

impl SeparablePotential {
    pub fn new(primal: Box<dyn BlockPotential>, dual: Box<dyn BlockPotential>) -> Self {
        Self {
            primal,
            dual,
            override_smoothness: None,
        }
    }

    pub fn with_smoothness_override(mut self, value: f64) -> Self {
        assert!(value > 0.0, "smoothness override must be positive");
        self.override_smoothness = Some(value);
        self
    }

    pub fn set_smoothness_override(&mut self, value: Option<f64>) {
        self.override_smoothness = value;
    }

    pub fn analytic_smoothness(&self) -> f64 {
        self.primal
            .smoothness_bound()
            .max(self.dual.smoothness_bound())
    }

    pub fn primal_part(&self) -> &dyn BlockPotential {
        self.primal.as_ref()
    }

    pub fn dual_part(&self) -> &dyn BlockPotential {
        self.dual.as_ref()
    }
}

impl SmoothPotential for SeparablePotential {
    fn primal_dim(&self) -> usize {
        self.primal.dim()
    }

    fn dual_dim(&self) -> usize {
        self.dual.dim()
    }

    fn value(&self, x: &PrimalDualPoint) -> f64 {
        self.primal.value(&x.w) + self.dual.value(&x.v)
    }

    fn gradient(&self, x: &PrimalDualPoint, out: &mut PrimalDualPoint) {
        self.primal.gradient(&x.w, &mut out.w);
        self.dual.gradient(&x.v, &mut out.v);
    }

    fn smoothness_constant(&self) -> f64 {
        self.override_smoothness
            .unwrap_or_else(|| self.analytic_smoothness())
    }
}

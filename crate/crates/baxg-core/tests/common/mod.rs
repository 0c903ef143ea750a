//! Shared fixtures for the integration tests: seeded random instances and
//! probe generators.

#![allow(dead_code)]

use baxg_core::linalg::{self, DenseMatrix};
use baxg_core::potentials::{LinearPotential, QuadraticPotential, SeparablePotential};
use baxg_core::{BilinearMinimaxProblem, CouplingOperator, FeasibleSet, PrimalDualPoint};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize, std: f64) -> Vec<f64> {
    (0..len)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * std)
        .collect()
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, std: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| {
        rng.sample::<f64, _>(StandardNormal) * std
    })
}

/// Tall Gaussian coupling matrix with the scaling used by the experiment
/// instances (entry std `1/sqrt(n)`).
pub fn random_coupling(rng: &mut ChaCha8Rng, d: usize, n: usize) -> CouplingOperator {
    let std = 1.0 / (n as f64).sqrt();
    CouplingOperator::new(gaussian_matrix(rng, d, n, std)).expect("random matrix is full rank")
}

/// Uniform point in the ball of the given radius around a center, with the
/// dual block projected into the feasible set afterwards by the caller.
pub fn point_in_ball(
    rng: &mut ChaCha8Rng,
    center: &PrimalDualPoint,
    radius: f64,
) -> PrimalDualPoint {
    let (d, n) = center.dims();
    let dim = d + n;
    let mut direction: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = linalg::norm(&direction);
    let u: f64 = rng.gen::<f64>();
    let r = radius * u.powf(1.0 / dim as f64) / norm.max(1e-300);
    linalg::scale(&mut direction, r);
    let mut out = center.clone();
    linalg::axpy(1.0, &direction[..d], &mut out.w);
    linalg::axpy(1.0, &direction[d..], &mut out.v);
    out
}

pub fn probes_in_ball(
    rng: &mut ChaCha8Rng,
    center: &PrimalDualPoint,
    radius: f64,
    count: usize,
    set: &FeasibleSet,
) -> Vec<PrimalDualPoint> {
    (0..count)
        .map(|_| {
            let mut p = point_in_ball(rng, center, radius);
            set.project(&mut p.v);
            p
        })
        .collect()
}

/// Random equality-constrained quadratic saddle instance:
/// `f(w) = 1/2 w^T B w - c^T w` with `B = M^T M` normalized to unit
/// spectral norm, `h(v) = 0`, free dual block. Returns the problem and the
/// saddle point from the KKT system.
pub fn quadratic_lagrangian(
    rng: &mut ChaCha8Rng,
    d: usize,
    n: usize,
    c_scale: f64,
) -> (BilinearMinimaxProblem, PrimalDualPoint) {
    let m = gaussian_matrix(rng, d, d, 1.0);
    let mut b = m.gram();
    let eig = linalg::symmetric_eigen(&b).unwrap();
    let top = eig.values.last().copied().unwrap();
    let data: Vec<f64> = b.data().iter().map(|x| x / top).collect();
    b = DenseMatrix::from_fn(d, d, |i, j| data[i * d + j]);

    let c = gaussian_vec(rng, d, c_scale);
    let coupling = random_coupling(rng, d, n);

    // KKT system: [B A; A^T 0] [w; v] = [c; 0].
    let mut kkt = DenseMatrix::zeros(d + n, d + n);
    for i in 0..d {
        for j in 0..d {
            kkt.set(i, j, b.get(i, j));
        }
        for j in 0..n {
            kkt.set(i, d + j, coupling.matrix().get(i, j));
            kkt.set(d + j, i, coupling.matrix().get(i, j));
        }
    }
    let mut rhs = vec![0.0; d + n];
    rhs[..d].copy_from_slice(&c);
    let solution = linalg::lu_solve(&kkt, &rhs).expect("KKT system is nonsingular");
    let saddle = PrimalDualPoint::new(solution[..d].to_vec(), solution[d..].to_vec());

    let f = QuadraticPotential::new(b, c).unwrap();
    let h = LinearPotential::new(vec![0.0; n]);
    let potential = SeparablePotential::new(Box::new(f), Box::new(h));
    let problem =
        BilinearMinimaxProblem::new(Box::new(potential), coupling, FeasibleSet::free(n)).unwrap();
    (problem, saddle)
}

/// Residual of the stacked optimality system at a candidate saddle point;
/// zero exactly at the solution.
pub fn saddle_residual(problem: &BilinearMinimaxProblem, x: &PrimalDualPoint) -> f64 {
    let mut grad = PrimalDualPoint::zeros(problem.primal_dim(), problem.dual_dim());
    problem.potential.gradient(x, &mut grad);
    let q = problem.coupling.apply_q(x);
    grad.add_scaled(1.0, &q);
    grad.norm()
}

//! Seeded construction of the benchmark problem instances.

use baxg_core::linalg::{self, DenseMatrix};
use baxg_core::potentials::{LinearPotential, QuadraticPotential, SeparablePotential, SmoothedL1};
use baxg_core::CkVariant;
use baxg_core::{
    BilinearMinimaxProblem, CouplingOperator, FeasibleSet, PrimalDualPoint, SubsolverChoice,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Equality-constrained smoothed-l1 minimization: free dual block,
    /// `b = A^T w*` for a sparse sign vector `w*`.
    SmoothedL1Eq,
    /// Least absolute deviation: dual block in the unit l-infinity ball,
    /// `b` a random sign vector.
    Lad,
    /// Quadratic Lagrangian saddle instance with a known KKT solution.
    QuadraticLagrangian,
}

impl ProblemKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProblemKind::SmoothedL1Eq => "smoothed-l1-eq",
            ProblemKind::Lad => "lad",
            ProblemKind::QuadraticLagrangian => "quadratic-lagrangian",
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "smoothed-l1-eq" => Ok(ProblemKind::SmoothedL1Eq),
            "lad" => Ok(ProblemKind::Lad),
            "quadratic-lagrangian" => Ok(ProblemKind::QuadraticLagrangian),
            other => Err(format!(
                "unknown problem kind '{other}' (expected smoothed-l1-eq, lad, or quadratic-lagrangian)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgoKind {
    Baxg,
    Eg,
}

impl AlgoKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlgoKind::Baxg => "baxg",
            AlgoKind::Eg => "eg",
        }
    }
}

impl fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlgoKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baxg" => Ok(AlgoKind::Baxg),
            "eg" => Ok(AlgoKind::Eg),
            other => Err(format!("unknown algorithm '{other}' (expected baxg or eg)")),
        }
    }
}

/// One experiment's full configuration. Defaults mirror the benchmark
/// protocol: sharpness `1e6`, ten-percent support density, the standard
/// Lipschitz search grid, and budget-driven stopping.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub d: usize,
    pub n: usize,
    pub lambda: f64,
    pub sharpness: f64,
    pub seed: u64,
    pub algo: AlgoKind,
    pub subsolver: SubsolverChoice,
    pub max_oracle: u64,
    pub max_iterations: u64,
    pub lipschitz: Option<f64>,
    pub lipschitz_grid: Vec<f64>,
    pub density: f64,
    pub ck_variant: CkVariant,
    pub instrument: bool,
    /// Relative-residual tolerance of the CG subsolver.
    pub cg_tol: f64,
}

/// The standard Lipschitz search grid `{1e-5, ..., 1e3}`.
pub fn default_lipschitz_grid() -> Vec<f64> {
    (-5..=3).map(|e| 10f64.powi(e)).collect()
}

impl ExperimentConfig {
    pub fn new(problem: ProblemKind, d: usize, n: usize, seed: u64) -> Self {
        Self {
            problem,
            d,
            n,
            lambda: 1e-4,
            sharpness: 1e6,
            seed,
            algo: AlgoKind::Baxg,
            subsolver: SubsolverChoice::Auto,
            max_oracle: 20_000,
            max_iterations: u64::MAX,
            lipschitz: None,
            lipschitz_grid: default_lipschitz_grid(),
            density: 0.1,
            ck_variant: CkVariant::ScheduleWeight,
            instrument: false,
            cg_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n < 1 || self.d < self.n {
            return Err(format!("need d >= n >= 1, got d={} n={}", self.d, self.n));
        }
        if self.lambda < 0.0 {
            return Err("lambda must be nonnegative".into());
        }
        if self.sharpness <= 0.0 {
            return Err("sharpness must be positive".into());
        }
        if self.max_oracle < 1 {
            return Err("oracle budget must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.density) || self.density <= 0.0 {
            return Err("density must lie in (0, 1]".into());
        }
        if self.lipschitz_grid.is_empty() {
            return Err("lipschitz grid empty".into());
        }
        if self
            .lipschitz_grid
            .iter()
            .any(|l| *l <= 0.0 || !l.is_finite())
        {
            return Err("lipschitz grid entries must be positive and finite".into());
        }
        if let Some(l) = self.lipschitz {
            if l <= 0.0 || !l.is_finite() {
                return Err("lipschitz override must be positive and finite".into());
            }
        }
        Ok(())
    }
}

/// Exact optimum data recorded at generation time.
#[derive(Debug, Clone)]
pub enum GroundTruth {
    SmoothedL1Eq { w_star: Vec<f64>, b: Vec<f64> },
    Lad { b: Vec<f64> },
    QuadraticLagrangian { saddle: PrimalDualPoint },
}

pub struct GeneratedProblem {
    pub problem: BilinearMinimaxProblem,
    pub ground_truth: GroundTruth,
    /// Times the coupling matrix had to be redrawn for rank reasons.
    pub regenerated: u32,
}

fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize, std: f64) -> Vec<f64> {
    (0..len)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * std)
        .collect()
}

fn sign_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// Draw the Gaussian coupling matrix (entry std `1/sqrt(n)`); on the
/// measure-zero rank-deficient draw, redraw with the next seed.
fn draw_coupling(seed: u64, d: usize, n: usize) -> (CouplingOperator, ChaCha8Rng, u32) {
    let mut attempts = 0;
    let mut current = seed;
    loop {
        let mut rng = ChaCha8Rng::seed_from_u64(current);
        let std = 1.0 / (n as f64).sqrt();
        let a = DenseMatrix::from_fn(d, n, |_, _| rng.sample::<f64, _>(StandardNormal) * std);
        match CouplingOperator::new(a) {
            Ok(op) => return (op, rng, attempts),
            Err(err) => {
                attempts += 1;
                eprintln!("warning: redrawing coupling matrix (seed {current}): {err}");
                current = current.wrapping_add(1);
                assert!(attempts < 16, "could not draw a full-rank coupling matrix");
            }
        }
    }
}

/// Build the problem instance for a configuration. Deterministic in the
/// seed: identical configurations produce identical instances.
pub fn generate_problem(cfg: &ExperimentConfig) -> GeneratedProblem {
    let (d, n) = (cfg.d, cfg.n);
    let (coupling, mut rng, regenerated) = draw_coupling(cfg.seed, d, n);

    match cfg.problem {
        ProblemKind::SmoothedL1Eq => {
            let nnz = ((cfg.density * d as f64).ceil() as usize).clamp(1, d);
            let mut w_star = vec![0.0; d];
            let support = rand::seq::index::sample(&mut rng, d, nnz);
            for idx in support {
                w_star[idx] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            }
            let mut b = vec![0.0; n];
            coupling.apply_at(&w_star, &mut b);

            let f = SmoothedL1::new(d, cfg.sharpness, cfg.lambda);
            let h = LinearPotential::new(b.clone());
            let potential = SeparablePotential::new(Box::new(f), Box::new(h));
            let problem =
                BilinearMinimaxProblem::new(Box::new(potential), coupling, FeasibleSet::free(n))
                    .expect("dimensions consistent by construction");
            GeneratedProblem {
                problem,
                ground_truth: GroundTruth::SmoothedL1Eq { w_star, b },
                regenerated,
            }
        }
        ProblemKind::Lad => {
            let b = sign_vec(&mut rng, n);
            let f = SmoothedL1::new(d, cfg.sharpness, cfg.lambda);
            let h = LinearPotential::new(b.clone());
            let potential = SeparablePotential::new(Box::new(f), Box::new(h));
            let problem = BilinearMinimaxProblem::new(
                Box::new(potential),
                coupling,
                FeasibleSet::linf_ball(n, 1.0),
            )
            .expect("dimensions consistent by construction");
            GeneratedProblem {
                problem,
                ground_truth: GroundTruth::Lad { b },
                regenerated,
            }
        }
        ProblemKind::QuadraticLagrangian => {
            let m = DenseMatrix::from_fn(d, d, |_, _| rng.sample::<f64, _>(StandardNormal));
            let gram = m.gram();
            let eig = linalg::symmetric_eigen(&gram).expect("Gram eigendecomposition");
            let top = eig
                .values
                .last()
                .copied()
                .expect("nonempty spectrum")
                .max(f64::MIN_POSITIVE);
            let data: Vec<f64> = gram.data().iter().map(|x| x / top).collect();
            let b_matrix = DenseMatrix::from_fn(d, d, |i, j| data[i * d + j]);
            let c = gaussian_vec(&mut rng, d, 1.0);

            // KKT system [B A; A^T 0] [w; v] = [c; 0] pins the saddle.
            let mut kkt = DenseMatrix::zeros(d + n, d + n);
            for i in 0..d {
                for j in 0..d {
                    kkt.set(i, j, b_matrix.get(i, j));
                }
                for j in 0..n {
                    kkt.set(i, d + j, coupling.matrix().get(i, j));
                    kkt.set(d + j, i, coupling.matrix().get(i, j));
                }
            }
            let mut rhs = vec![0.0; d + n];
            rhs[..d].copy_from_slice(&c);
            let solution = linalg::lu_solve(&kkt, &rhs).expect("KKT system nonsingular");
            let saddle = PrimalDualPoint::new(solution[..d].to_vec(), solution[d..].to_vec());

            let f = QuadraticPotential::new(b_matrix, c).expect("normalized Gram is PSD");
            let h = LinearPotential::new(vec![0.0; n]);
            let potential = SeparablePotential::new(Box::new(f), Box::new(h));
            let problem =
                BilinearMinimaxProblem::new(Box::new(potential), coupling, FeasibleSet::free(n))
                    .expect("dimensions consistent by construction");
            GeneratedProblem {
                problem,
                ground_truth: GroundTruth::QuadraticLagrangian { saddle },
                regenerated,
            }
        }
    }
}

/// Probe points for instrumented runs: uniform in a ball around the start,
/// dual parts projected. When the instance has a known saddle it is
/// appended as the last probe, which keeps the restricted gap positive.
pub fn instrumentation_probes(
    generated: &GeneratedProblem,
    start: &PrimalDualPoint,
    radius: f64,
    count: usize,
    seed: u64,
) -> Vec<PrimalDualPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let (d, n) = start.dims();
    let dim = d + n;
    let mut probes = Vec::with_capacity(count + 1);
    for _ in 0..count {
        let mut direction: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let norm = linalg::norm(&direction).max(1e-300);
        let u: f64 = rng.gen();
        let r = radius * u.powf(1.0 / dim as f64) / norm;
        linalg::scale(&mut direction, r);
        let mut p = start.clone();
        linalg::axpy(1.0, &direction[..d], &mut p.w);
        linalg::axpy(1.0, &direction[d..], &mut p.v);
        generated.problem.set.project(&mut p.v);
        probes.push(p);
    }
    if let GroundTruth::QuadraticLagrangian { saddle } = &generated.ground_truth {
        probes.push(saddle.clone());
    }
    probes
}

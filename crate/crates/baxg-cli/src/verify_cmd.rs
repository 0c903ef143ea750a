//! The `verify` subcommand: every hand-derived value and inequality the
//! library's correctness rests on, evaluated against independent oracles,
//! printed as a pass/fail table.

use crate::csvio::{render_csv, strip_wall_ms, RunLabel};
use crate::generate::{
    generate_problem, instrumentation_probes, ExperimentConfig, GroundTruth, ProblemKind,
};
use crate::run::{run_on_instance, PROBE_COUNT, PROBE_RADIUS};
use baxg_core::linalg::{self, DenseMatrix};
use baxg_core::potentials::{SeparablePotential, SmoothedL1, ZeroPotential};
use baxg_core::problem::BlockPotential;
use baxg_core::verify::{check_gap_inequality, finite_diff_gradient, schedule_law_max_ratio};
use baxg_core::{
    baxg_solve, cg_solve, direct_solve, eg_step, pagd_solve, reduce, BaxgConfig,
    BilinearMinimaxProblem, CouplingOperator, EgConfig, FeasibleSet, Oracle, PagdOptions,
    PrimalDualPoint, SubproblemSpec, SubsolverChoice,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

struct CheckResult {
    name: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

fn run_check(
    name: &'static str,
    results: &mut Vec<CheckResult>,
    body: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let seconds = start.elapsed().as_secs_f64();
    let (pass, detail) = match outcome {
        Ok(Ok(detail)) => (true, detail),
        Ok(Err(detail)) => (false, detail),
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panicked".into());
            (false, format!("panic: {msg}"))
        }
    };
    results.push(CheckResult {
        name,
        pass,
        detail,
        seconds,
    });
}

fn gaussian_vec(rng: &mut ChaCha8Rng, len: usize, std: f64) -> Vec<f64> {
    (0..len)
        .map(|_| rng.sample::<f64, _>(StandardNormal) * std)
        .collect()
}

fn random_coupling(rng: &mut ChaCha8Rng, d: usize, n: usize) -> CouplingOperator {
    let std = 1.0 / (n as f64).sqrt();
    CouplingOperator::new(DenseMatrix::from_fn(d, n, |_, _| {
        rng.sample::<f64, _>(StandardNormal) * std
    }))
    .expect("random Gaussian matrix is full column rank")
}

fn zero_problem(coupling: CouplingOperator, set: FeasibleSet) -> BilinearMinimaxProblem {
    let d = coupling.primal_dim();
    let n = coupling.dual_dim();
    let potential = SeparablePotential::new(
        Box::new(ZeroPotential::new(d)),
        Box::new(ZeroPotential::new(n)),
    );
    BilinearMinimaxProblem::new(Box::new(potential), coupling, set).unwrap()
}

fn check<C: Fn() -> bool>(cond: C, msg: &str) -> Result<(), String> {
    if cond() {
        Ok(())
    } else {
        Err(msg.to_string())
    }
}

/// Run the whole verification table. Returns `true` when every check
/// passed.
pub fn run_verification(seed: u64) -> bool {
    let mut results = Vec::new();

    run_check("schedule-law", &mut results, || {
        let t0 = Instant::now();
        let worst = schedule_law_max_ratio(1.0, 1_000_000);
        let elapsed = t0.elapsed().as_secs_f64();
        if worst > 1.0 {
            return Err(format!("ratio {worst} exceeds 1"));
        }
        if elapsed >= 1.0 {
            return Err(format!("took {elapsed:.2} s (budget 1 s)"));
        }
        Ok(format!(
            "max ratio {worst:.12} over 1e6 iterations in {elapsed:.2} s"
        ))
    });

    run_check("coupling-structure", &mut results, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let op = random_coupling(&mut rng, 40, 20);
        let mut worst_skew = 0.0f64;
        let mut worst_mono = 0.0f64;
        for _ in 0..1000 {
            let x = PrimalDualPoint::new(
                gaussian_vec(&mut rng, 40, 1.0),
                gaussian_vec(&mut rng, 20, 1.0),
            );
            let y = PrimalDualPoint::new(
                gaussian_vec(&mut rng, 40, 1.0),
                gaussian_vec(&mut rng, 20, 1.0),
            );
            let qx = op.apply_q(&x);
            worst_skew = worst_skew.max(x.dot(&qx).abs() / (x.norm() * x.norm()));
            let qy = op.apply_q(&y);
            let diff = x.sub(&y);
            let qdiff = qx.sub(&qy);
            worst_mono = worst_mono.max(qdiff.dot(&diff).abs() / (diff.norm() * diff.norm()));
        }
        check(
            || worst_skew <= 1e-10,
            &format!("skew defect {worst_skew:.3e}"),
        )?;
        check(
            || worst_mono <= 1e-10,
            &format!("monotonicity defect {worst_mono:.3e}"),
        )?;
        // Gram spectrum within the squared singular bounds.
        let eig = op.gram_eigen();
        let lo = op.sigma_min() * op.sigma_min();
        let hi = op.sigma_max() * op.sigma_max();
        let eps = 1e-8 * (1.0 + hi);
        let inside = eig.values.iter().all(|l| *l >= lo - eps && *l <= hi + eps);
        check(|| inside, "Gram eigenvalue escaped the singular bounds")?;
        Ok(format!(
            "skew {worst_skew:.1e}, monotone {worst_mono:.1e}, spectrum in [{lo:.3}, {hi:.3}]"
        ))
    });

    run_check("projection-laws", &mut results, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let set = FeasibleSet::linf_ball(8, 1.0);
        for _ in 0..500 {
            let u = gaussian_vec(&mut rng, 8, 3.0);
            let v = gaussian_vec(&mut rng, 8, 3.0);
            let pu = set.projected(&u);
            let ppu = set.projected(&pu);
            check(
                || linalg::dist(&pu, &ppu) == 0.0,
                "projection not idempotent",
            )?;
            let pv = set.projected(&v);
            check(
                || linalg::dist(&pu, &pv) <= linalg::dist(&u, &v) + 1e-12,
                "projection expanded distances",
            )?;
        }
        check(
            || FeasibleSet::linf_ball(3, 1.0).projected(&[2.0, -0.5, 1.0]) == vec![1.0, -0.5, 1.0],
            "clamp mismatch",
        )?;
        check(
            || FeasibleSet::free(2).projected(&[7.0, -3.0]) == vec![7.0, -3.0],
            "free-space projection not the identity",
        )?;
        Ok("idempotent, non-expansive, clamp cases exact".into())
    });

    run_check("smoothed-l1-values", &mut results, || {
        let tight = SmoothedL1::new(1, 1e6, 1.0);
        let at_zero = tight.value(&[0.0]);
        let expected = 2.0 * std::f64::consts::LN_2 / 1e6;
        check(|| (at_zero - expected).abs() < 1e-18, "value at zero")?;
        check(|| tight.value(&[1.0]) == 1.0, "large-sharpness limit")?;
        let mut g = [0.0];
        tight.gradient(&[10.0], &mut g);
        check(|| g[0] == 1.0, "gradient saturation")?;
        let moderate = SmoothedL1::new(2, 2.0, 1.0);
        let v = moderate.value(&[0.5, -0.5]);
        check(
            || (v - 1.6265233750364456).abs() < 1e-12,
            &format!("moderate value {v}"),
        )?;
        let mut g2 = [0.0];
        SmoothedL1::new(1, 2.0, 1.0).gradient(&[0.1], &mut g2);
        check(|| (g2[0] - 0.1f64.tanh()).abs() < 1e-15, "tanh gradient")?;
        Ok(format!(
            "value(0; a=1e6) = {at_zero:.6e}, value(±0.5; a=2) = {v:.7}"
        ))
    });

    run_check("finite-difference-gradients", &mut results, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 2);
        let mut worst = 0.0f64;
        for &sharpness in &[1.0, 10.0, 100.0] {
            let pot = SmoothedL1::new(6, sharpness, 1.0);
            for _ in 0..100 {
                let w = gaussian_vec(&mut rng, 6, 1.0);
                let mut analytic = vec![0.0; 6];
                pot.gradient(&w, &mut analytic);
                let fd = finite_diff_gradient(&|x| pot.value(x), &w, 1e-6);
                let diff: Vec<f64> = fd.iter().zip(&analytic).map(|(a, b)| a - b).collect();
                worst = worst.max(linalg::norm(&diff) / (1.0 + linalg::norm(&analytic)));
            }
        }
        check(|| worst <= 1e-5, &format!("relative FD error {worst:.3e}"))?;
        Ok(format!("worst relative error {worst:.3e} over 300 points"))
    });

    run_check("subproblem-reduction", &mut results, || {
        let problem = zero_problem(
            CouplingOperator::new(DenseMatrix::identity(2)).unwrap(),
            FeasibleSet::free(2),
        );
        let spec = SubproblemSpec::new(
            2.0,
            PrimalDualPoint::zeros(2, 2),
            PrimalDualPoint::zeros(2, 2),
        );
        let rq = reduce(&spec, &mut Oracle::new(&problem));
        check(|| (rq.smoothness - 2.0).abs() < 1e-12, "identity constants")?;
        let a = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]).unwrap();
        let problem2 = zero_problem(CouplingOperator::new(a).unwrap(), FeasibleSet::free(2));
        let spec2 = SubproblemSpec::new(
            1.0,
            PrimalDualPoint::zeros(2, 2),
            PrimalDualPoint::zeros(2, 2),
        );
        let rq2 = reduce(&spec2, &mut Oracle::new(&problem2));
        check(
            || (rq2.smoothness - 8.0).abs() < 1e-12 && (rq2.strong_convexity - 4.25).abs() < 1e-12,
            "diagonal constants",
        )?;
        // Primal-recovery stationarity on random data.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 3);
        let op = random_coupling(&mut rng, 10, 5);
        let problem3 = zero_problem(op, FeasibleSet::free(5));
        let spec3 = SubproblemSpec::new(
            1.7,
            PrimalDualPoint::new(
                gaussian_vec(&mut rng, 10, 1.0),
                gaussian_vec(&mut rng, 5, 1.0),
            ),
            PrimalDualPoint::new(
                gaussian_vec(&mut rng, 10, 1.0),
                gaussian_vec(&mut rng, 5, 1.0),
            ),
        );
        let v_tilde = gaussian_vec(&mut rng, 5, 1.0);
        let w_tilde = baxg_core::recover_w(&spec3, &mut Oracle::new(&problem3), &v_tilde);
        let mut diff = v_tilde.clone();
        linalg::axpy(-1.0, &spec3.anchor.v, &mut diff);
        let mut residual = vec![0.0; 10];
        problem3.coupling.apply_a(&diff, &mut residual);
        linalg::axpy(1.0, &spec3.shift.w, &mut residual);
        let mut w_step = w_tilde;
        linalg::axpy(-1.0, &spec3.anchor.w, &mut w_step);
        linalg::axpy(2.0 / 1.7, &w_step, &mut residual);
        let r = linalg::norm(&residual);
        check(
            || r <= 1e-12 * 10.0,
            &format!("stationarity residual {r:.3e}"),
        )?;
        Ok(format!("hand constants exact; recovery residual {r:.1e}"))
    });

    run_check("inner-schedule-and-cap", &mut results, || {
        let mut s = baxg_core::InnerSchedule::new(2.0, 1.0);
        s.advance();
        check(|| (s.total_weight() - 0.25).abs() < 1e-15, "B1")?;
        s.advance();
        check(
            || (s.total_weight() - 0.375).abs() < 1e-15 && (s.weight() - 0.125).abs() < 1e-15,
            "B2/b2",
        )?;
        let cap = baxg_core::certificate_cap(2.0, 1.0, 1.0);
        check(|| (1..100_000).contains(&cap), "cap out of range")?;
        check(
            || !baxg_core::early_exit_test(2.0, 1.0, &[0.2], &[0.1], &[0.0]),
            "certificate fired on the counterexample",
        )?;
        Ok(format!(
            "B1 = 0.25, growth 1.5, worst-case cap(2,1,1) = {cap}"
        ))
    });

    run_check("pagd-certified-bound", &mut results, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 4);
        let mut max_iters = 0;
        for trial in 0..10 {
            let boxed = trial % 2 == 1;
            let set = if boxed {
                FeasibleSet::linf_ball(12, 0.4)
            } else {
                FeasibleSet::free(12)
            };
            let problem = zero_problem(random_coupling(&mut rng, 24, 12), set.clone());
            let spec = SubproblemSpec::new(
                rng.gen_range(0.5..4.0),
                PrimalDualPoint::new(
                    gaussian_vec(&mut rng, 24, 1.0),
                    gaussian_vec(&mut rng, 12, 1.0),
                ),
                PrimalDualPoint::new(
                    gaussian_vec(&mut rng, 24, 1.0),
                    set.projected(&gaussian_vec(&mut rng, 12, 0.2)),
                ),
            );
            let rq = reduce(&spec, &mut Oracle::new(&problem));
            let v_star = if boxed {
                let mut v = rq.anchor.clone();
                let mut grad = vec![0.0; 12];
                for _ in 0..100_000 {
                    rq.gradient_raw(&problem.coupling, &v, &mut grad);
                    linalg::axpy(-1.0 / rq.smoothness, &grad, &mut v);
                    set.project(&mut v);
                }
                v
            } else {
                direct_solve(&spec, &mut Oracle::new(&problem)).0
            };
            let l_star = rq.value_raw(&problem.coupling, &v_star);
            let mut diff = v_star.clone();
            linalg::axpy(-1.0, &rq.anchor, &mut diff);
            let dist0_sq = linalg::dot(&diff, &diff);
            let out = pagd_solve(
                &spec,
                &mut Oracle::new(&problem),
                PagdOptions {
                    record_history: true,
                    ..Default::default()
                },
            );
            let history = out.history.unwrap();
            for (l_t, total) in history.objective_values.iter().zip(&history.total_weights) {
                let bound = dist0_sq / (2.0 * total);
                check(
                    || l_t - l_star <= bound + 1e-8 * (1.0 + bound.abs()),
                    &format!("trial {trial}: certified bound violated"),
                )?;
            }
            check(
                || out.certified,
                &format!("trial {trial}: certificate never fired"),
            )?;
            check(|| out.iterations <= out.cap, "exceeded worst-case cap")?;
            max_iters = max_iters.max(out.iterations);
        }
        Ok(format!(
            "10 instances certified; max inner iterations {max_iters}"
        ))
    });

    run_check("subsolver-agreement", &mut results, || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 5);
        let mut worst = 0.0f64;
        for _ in 0..5 {
            let problem = zero_problem(random_coupling(&mut rng, 40, 20), FeasibleSet::free(20));
            let spec = SubproblemSpec::new(
                rng.gen_range(2000.0..8000.0),
                PrimalDualPoint::new(
                    gaussian_vec(&mut rng, 40, 1.0),
                    gaussian_vec(&mut rng, 20, 1.0),
                ),
                PrimalDualPoint::new(
                    gaussian_vec(&mut rng, 40, 1.0),
                    gaussian_vec(&mut rng, 20, 1.0),
                ),
            );
            let (direct_v, _) = direct_solve(&spec, &mut Oracle::new(&problem));
            let cg = cg_solve(&spec, &mut Oracle::new(&problem), 1e-10);
            check(|| cg.converged, "cg missed its tolerance")?;
            let pagd = pagd_solve(
                &spec,
                &mut Oracle::new(&problem),
                PagdOptions {
                    ignore_early_exit: true,
                    ..Default::default()
                },
            );
            let scale = 1.0 + linalg::norm(&direct_v);
            worst = worst.max(linalg::dist(&cg.dual, &direct_v) / scale);
            worst = worst.max(linalg::dist(&pagd.dual, &direct_v) / scale);
        }
        check(|| worst <= 1e-6, &format!("max disagreement {worst:.3e}"))?;
        Ok(format!("direct/cg/pagd-at-cap within {worst:.2e}"))
    });

    run_check("gap-inequality-suite", &mut results, || {
        let cfg = ExperimentConfig::new(ProblemKind::QuadraticLagrangian, 8, 4, seed ^ 6);
        let generated = generate_problem(&cfg);
        let start = PrimalDualPoint::zeros(8, 4);
        let probes =
            instrumentation_probes(&generated, &start, PROBE_RADIUS, PROBE_COUNT, cfg.seed);
        let config = BaxgConfig {
            max_iterations: 100,
            subsolver: SubsolverChoice::Direct,
            instrument: true,
            probes: probes.clone(),
            ..BaxgConfig::new(start)
        };
        let (_, trace) = baxg_solve(&generated.problem, &config, &|_| 0.0, &|| 0.0)
            .map_err(|e| e.to_string())?;
        let log = trace.instrumentation.as_ref().unwrap();
        for (e, scale) in log.error_terms.iter().zip(&log.error_scales) {
            check(
                || *e <= 1e-8 * (1.0 + scale),
                &format!("error term {e:.3e}"),
            )?;
        }
        for (m, scale) in log.estimation_bound_margins.iter().zip(&log.estimation_bound_scales) {
            check(
                || *m <= 1e-8 * (1.0 + scale),
                &format!("estimation bound margin {m:.3e}"),
            )?;
        }
        for (m, scale) in log.cond_margins.iter().zip(&log.cond_scales) {
            check(
                || *m <= 1e-8 * (1.0 + scale),
                &format!("condition margin {m:.3e}"),
            )?;
        }
        let report = check_gap_inequality(&trace, &generated.problem, &probes, 1e-6);
        check(
            || report.pass(),
            &format!("gap violation {:.3e}", report.worst_violation()),
        )?;
        Ok("error terms, estimation bound, condition, and gap inequality all hold".into())
    });

    run_check("corrupted-schedule-control", &mut results, || {
        let cfg = ExperimentConfig::new(ProblemKind::QuadraticLagrangian, 8, 4, seed ^ 6);
        let generated = generate_problem(&cfg);
        let start = PrimalDualPoint::zeros(8, 4);
        let probes =
            instrumentation_probes(&generated, &start, PROBE_RADIUS, PROBE_COUNT, cfg.seed);
        let lipschitz = generated.problem.potential.smoothness_constant();
        let config = BaxgConfig {
            max_iterations: 100,
            subsolver: SubsolverChoice::Direct,
            instrument: true,
            probes: probes.clone(),
            lipschitz_override: Some(lipschitz / 4.0),
            ..BaxgConfig::new(start)
        };
        let (_, trace) = baxg_solve(&generated.problem, &config, &|_| 0.0, &|| 0.0)
            .map_err(|e| e.to_string())?;
        let report = check_gap_inequality(&trace, &generated.problem, &probes, 1e-6);
        check(|| !report.pass(), "negative control passed the gap check")?;
        Ok(format!(
            "{} of {} iterations violate, as expected",
            report.failures(),
            report.entries.len()
        ))
    });

    run_check("extragradient-toy", &mut results, || {
        let problem = zero_problem(
            CouplingOperator::new(DenseMatrix::identity(1)).unwrap(),
            FeasibleSet::free(1),
        );
        let mut oracle = Oracle::new(&problem);
        let next = eg_step(
            &mut oracle,
            &PrimalDualPoint::new(vec![1.0], vec![1.0]),
            EgConfig::new(0.5),
        );
        check(
            || (next.w[0] - 0.25).abs() < 1e-15 && (next.v[0] - 1.25).abs() < 1e-15,
            "hand evaluation mismatch",
        )?;
        let mut x = PrimalDualPoint::new(vec![1.0], vec![1.0]);
        for k in 1..=200u32 {
            x = eg_step(&mut oracle, &x, EgConfig::new(0.5));
            let bound = 0.95f64.powi(k as i32) * 2f64.sqrt();
            check(
                || x.norm() <= bound * (1.0 + 1e-12),
                &format!("norm decay at step {k}"),
            )?;
        }
        Ok(format!(
            "hand step exact; 200-step contraction ends at norm {:.3e}",
            x.norm()
        ))
    });

    run_check("generator-statistics", &mut results, || {
        let cfg = ExperimentConfig::new(ProblemKind::SmoothedL1Eq, 400, 200, seed ^ 7);
        let g1 = generate_problem(&cfg);
        let g2 = generate_problem(&cfg);
        check(
            || g1.problem.coupling.matrix().data() == g2.problem.coupling.matrix().data(),
            "generation not deterministic",
        )?;
        let a = g1.problem.coupling.matrix();
        let mut total = 0.0;
        for j in 0..a.cols() {
            for i in 0..a.rows() {
                total += a.get(i, j) * a.get(i, j);
            }
        }
        let mean_sq = total / a.cols() as f64;
        let expected = cfg.d as f64 / cfg.n as f64;
        check(
            || (mean_sq - expected).abs() <= 0.1 * expected,
            &format!("mean squared column norm {mean_sq:.3} vs {expected:.3}"),
        )?;
        let GroundTruth::SmoothedL1Eq { w_star, b } = &g1.ground_truth else {
            unreachable!()
        };
        let mut atw = vec![0.0; cfg.n];
        g1.problem.coupling.apply_at(w_star, &mut atw);
        check(|| atw == *b, "rhs differs from A^T w*")?;
        Ok(format!(
            "deterministic; mean squared column norm {mean_sq:.3} vs d/n = {expected}"
        ))
    });

    run_check("trace-determinism", &mut results, || {
        let mut cfg = ExperimentConfig::new(ProblemKind::Lad, 16, 8, seed ^ 8);
        cfg.max_oracle = 500;
        let generated = generate_problem(&cfg);
        let label = RunLabel {
            algorithm: "baxg".into(),
            problem: "lad".into(),
            seed: cfg.seed,
            lambda: cfg.lambda,
        };
        let a = run_on_instance(&cfg, &generated, 0.5).map_err(|e| e.to_string())?;
        let b = run_on_instance(&cfg, &generated, 0.5).map_err(|e| e.to_string())?;
        let csv_a = strip_wall_ms(&render_csv(&label, &a.trace.rows));
        let csv_b = strip_wall_ms(&render_csv(&label, &b.trace.rows));
        check(
            || csv_a == csv_b,
            "identical runs produced different traces",
        )?;
        Ok(format!(
            "{} rows byte-identical modulo wall time",
            a.trace.rows.len()
        ))
    });

    // Report.
    let mut all_pass = true;
    println!("{:-<78}", "");
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        all_pass &= r.pass;
        println!(
            "{status}  {:<28} ({:>6.2} s)  {}",
            r.name, r.seconds, r.detail
        );
    }
    println!("{:-<78}", "");
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed == 0 {
        println!("all {} checks passed", results.len());
    } else {
        println!("{failed} of {} checks FAILED", results.len());
    }
    all_pass
}

mod common;

use common::*;
use phaseret::measurement::{make_fourier_operator, simulate_poisson_intensity};
use phaseret::objective::LossContext;
use phaseret::optimize::*;
use phaseret::Image;
use rand::Rng;

/// `f = ½ xᵀ diag(d) x − cᵀx`, with known minimizer `c/d` and `L = max d`.
struct Quadratic {
    d: Vec<f64>,
    c: Vec<f64>,
}

impl Quadratic {
    fn random(seed: u64, n: usize) -> Self {
        let mut r = rng(seed);
        Self {
            d: (0..n).map(|i| if i == 0 { 1e-3 } else { r.random_range(1e-3..10.0) }).collect(),
            c: (0..n).map(|_| r.random_range(-5.0..5.0)).collect(),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.d).zip(&self.c).map(|((x, d), c)| 0.5 * d * x * x - c * x).sum()
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.d).zip(&self.c).map(|((x, d), c)| d * x - c).collect()
    }

    fn minimizer(&self) -> Vec<f64> {
        self.c.iter().zip(&self.d).map(|(c, d)| c / d).collect()
    }

    fn lipschitz(&self) -> f64 {
        self.d.iter().cloned().fold(0.0, f64::max)
    }

    fn composite(&self) -> impl Composite + '_ {
        FnComposite {
            f: move |x: &[f64]| self.value(x),
            grad: move |x: &[f64]| self.grad(x),
            prox: |z: &[f64], _| z.to_vec(),
            g: |_: &[f64]| 0.0,
        }
    }
}

fn plain(tau: f64, max_iter: usize) -> SolverConfig {
    SolverConfig {
        tau,
        max_iter,
        enable_restart: false,
        tol: 0.0,
        ..SolverConfig::default()
    }
}

#[test]
fn fista_rate_on_convex_quadratic() {
    let q = Quadratic::random(1, 100);
    let l = q.lipschitz();
    let x0 = vec![0.0; 100];
    let star = q.minimizer();
    let f_star = q.value(&star);
    let dist_sq: f64 = star.iter().map(|v| v * v).sum();
    let res = fista_solve(&q.composite(), &x0, &plain(1.0 / l, 100)).unwrap();
    assert_eq!(res.trace.len(), res.iterations_run);
    for k in [10usize, 50, 100] {
        let gap = res.trace[k - 1].objective - f_star;
        let bound = 2.0 * l * dist_sq / ((k + 1) * (k + 1)) as f64;
        assert!(gap <= bound, "k={k}: gap {gap} > {bound}");
    }
}

#[test]
fn restart_flag_only_with_restart_enabled() {
    let q = Quadratic::random(2, 50);
    let tau = 1.0 / q.lipschitz();
    let off = fista_solve(&q.composite(), &vec![0.0; 50], &plain(tau, 600)).unwrap();
    assert!(off.trace.iter().all(|t| !t.restarted));
    let on = SolverConfig { enable_restart: true, ..plain(tau, 600) };
    let with = fista_solve(&q.composite(), &vec![0.0; 50], &on).unwrap();
    // an ill-conditioned quadratic oscillates under momentum
    assert!(with.trace.iter().any(|t| t.restarted));
    for w in with.trace.windows(2) {
        if w[1].restarted {
            assert!(w[1].objective > w[0].objective);
        }
    }
}

#[test]
fn linesearch_steps_satisfy_acceptance_test() {
    let q = Quadratic::random(3, 40);
    let shrink = 0.5;
    let problem = FnComposite {
        f: |x: &[f64]| q.value(x),
        grad: |x: &[f64]| q.grad(x),
        prox: move |z: &[f64], t: f64| z.iter().map(|v| v.signum() * (v.abs() - shrink * t).max(0.0)).collect(),
        g: move |x: &[f64]| shrink * x.iter().map(|v| v.abs()).sum::<f64>(),
    };
    let config = SolverConfig {
        tau: 40.0 / q.lipschitz(),
        max_iter: 80,
        enable_linesearch: true,
        tol: 0.0,
        ..SolverConfig::default()
    };
    for solve in [fbs_solve, fista_solve] {
        let res = solve(&problem, &vec![1.0; 40], &config).unwrap();
        assert!(res.trace.iter().any(|t| t.tau < config.tau));
        for t in &res.trace {
            let rec = t.linesearch.expect("line search record");
            assert!(rec.dist_sq == 0.0 || rec.holds(t.tau));
            assert!(t.tau <= config.tau);
        }
    }
}

#[test]
fn solvers_are_deterministic() {
    let q = Quadratic::random(4, 30);
    let config = SolverConfig {
        tau: 3.0 / q.lipschitz(),
        enable_linesearch: true,
        ..SolverConfig::default()
    };
    let a = fista_solve(&q.composite(), &vec![2.0; 30], &config).unwrap();
    let b = fista_solve(&q.composite(), &vec![2.0; 30], &config).unwrap();
    assert_eq!(a, b);
    assert_eq!(trace_to_csv(&a.trace), trace_to_csv(&b.trace));
}

#[test]
fn dca_scalar_phase_retrieval() {
    for (x0, expected) in [(0.5, 1.0), (-0.5, -1.0), (3.0, 1.0)] {
        let out = dca_solve(
            // argmin x² + 1 − u·x
            |u: &[f64]| Ok(vec![u[0] / 2.0]),
            |x: &[f64]| Ok(vec![2.0 * if x[0] >= 0.0 { 1.0 } else { -1.0 }]),
            &[x0],
            20,
        )
        .unwrap();
        assert!(out.converged);
        assert_eq!(out.x, vec![expected]);
    }
}

#[test]
fn dca_on_fourier_instance_is_monotone() {
    let mut r = rng(5);
    let op = make_fourier_operator(8, 8, 4.0).unwrap();
    let truth = random_image(&mut r, 8, 8, 0.0, 255.0);
    let obs = simulate_poisson_intensity(&op, &truth, 0.0, 1).unwrap();
    let ctx = LossContext::new(op.clone(), obs.amplitudes.clone(), 1.0).unwrap();
    let c = op.measurement_count() as f64;
    let x0 = random_image(&mut r, 8, 8, 0.0, 255.0);
    let out = dca_solve(
        // argmin ½F1 − ⟨u, x⟩ with ∇½F1 = c·x
        |u: &[f64]| Ok(u.iter().map(|v| v / c).collect()),
        |x: &[f64]| Ok(ctx.subgrad_f2(&Image::new(8, 8, x.to_vec())?)?.into_data()),
        x0.data(),
        100,
    )
    .unwrap();
    let losses: Vec<f64> = out.path.iter().map(|x| ctx.loss_f(&Image::new(8, 8, x.clone()).unwrap()).unwrap()).collect();
    for w in losses.windows(2) {
        assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-9, "{} > {}", w[1], w[0]);
    }
}

#[test]
fn dca_oracle_failure_propagates() {
    let err = dca_solve(
        |_: &[f64]| Err(phaseret::Error::NonFinite(0)),
        |x: &[f64]| Ok(x.to_vec()),
        &[1.0],
        5,
    );
    assert!(err.is_err());
}

#[test]
fn dca_inner_solve_matches_closed_form() {
    let mut r = rng(6);
    let op = make_fourier_operator(16, 16, 4.0).unwrap();
    let truth = random_image(&mut r, 16, 16, 0.0, 255.0);
    let obs = simulate_poisson_intensity(&op, &truth, 2.0, 9).unwrap();
    let ctx = LossContext::from_observation(op.clone(), &obs).unwrap();
    let y_k = random_image(&mut r, 16, 16, 0.0, 255.0);
    let c = op.measurement_count() as f64;
    let sigma_sq = ctx.sigma() * ctx.sigma();
    let closed: Vec<f64> = ctx.subgrad_f2(&y_k).unwrap().data().iter().map(|v| sigma_sq / c * v).collect();
    for iters in [1, 10] {
        let got = dca_inner_solve(&ctx, &y_k, iters).unwrap();
        assert!(max_abs_diff(got.data(), &closed) <= 1e-8 * norm(&closed));
    }
}

#[test]
fn dca_inner_solve_zero_amplitudes() {
    let op = make_fourier_operator(6, 6, 4.0).unwrap();
    let ctx = LossContext::new(op, vec![0.0; 144], 2.0).unwrap();
    let y_k = Image::from_fn(6, 6, |r, c| (r * 6 + c) as f64).unwrap();
    let out = dca_inner_solve(&ctx, &y_k, 10).unwrap();
    assert!(out.data().iter().all(|v| v.abs() < 1e-12));
}

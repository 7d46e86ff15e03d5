//! Forward-backward splitting and its accelerated (FISTA) variant with
//! function-value restart.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::image::norm_sq;
use crate::optimize::linesearch::{acceptance_record, backtrack};
use crate::optimize::{axpy_diff, Composite, DcaRecord, ForwardStep, LineSearchRecord, SolverConfig, SolverResult, TraceEntry};

/// Acceleration state carried between FISTA iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumState {
    pub alpha: f64,
    /// Extrapolated point where the next gradient is taken.
    pub y: Vec<f64>,
    pub x_prev: Vec<f64>,
}

impl MomentumState {
    pub fn new(x0: &[f64]) -> Self {
        Self {
            alpha: 1.0,
            y: x0.to_vec(),
            x_prev: x0.to_vec(),
        }
    }
}

/// Advances the momentum after computing `x_k`:
/// `α' = (1 + √(1 + 4α²))/2`, `y = x_k + ((α − 1)/α')(x_k − x_{k−1})`.
/// With `restart`, resets to `α = 1` and `y = x_k`.
pub fn fista_step(state: MomentumState, x_k: &[f64], restart: bool) -> MomentumState {
    if restart {
        return MomentumState::new(x_k);
    }
    let alpha = state.alpha;
    let next = (1.0 + (1.0 + 4.0 * alpha * alpha).sqrt()) / 2.0;
    let beta = (alpha - 1.0) / next;
    let y = x_k
        .iter()
        .zip(&state.x_prev)
        .map(|(x, xp)| x + beta * (x - xp))
        .collect();
    MomentumState {
        alpha: next,
        y,
        x_prev: x_k.to_vec(),
    }
}

/// Plain forward-backward splitting `x_k = prox(x_{k−1} − τ∇f(x_{k−1}), τ)`.
pub fn fbs_solve(problem: &impl Composite, x0: &[f64], config: &SolverConfig) -> Result<SolverResult> {
    run(problem, x0, config, false)
}

/// FISTA on `problem`, with optional restart and non-monotone line search.
pub fn fista_solve(problem: &impl Composite, x0: &[f64], config: &SolverConfig) -> Result<SolverResult> {
    run(problem, x0, config, true)
}

fn run(problem: &impl Composite, x0: &[f64], config: &SolverConfig, accelerate: bool) -> Result<SolverResult> {
    config.validate()?;
    let mut trace = Vec::with_capacity(config.max_iter);
    let abort = |iteration: usize, source: Error, trace: Vec<TraceEntry>| Error::Aborted {
        iteration,
        source: Box::new(source),
        trace,
    };

    let mut state = MomentumState::new(x0);
    let mut x = x0.to_vec();
    let mut prev_objective = match problem.smooth_value(x0).and_then(|f| Ok(f + problem.regularizer_value(x0)?)) {
        Ok(v) => v,
        Err(e) => return Err(abort(0, e, trace)),
    };
    // Smooth values at the points where gradients were taken.
    let mut history: VecDeque<f64> = VecDeque::with_capacity(config.linesearch_window + 1);
    let mut tau = config.tau;

    for k in 1..=config.max_iter {
        let base = if accelerate { state.y.clone() } else { x.clone() };
        let step = iterate(problem, &base, k, tau, config, &mut history);
        let (x_new, f_new, tau_used, linesearch, dca) = match step {
            Ok(s) => s,
            Err(e) => return Err(abort(k, e, trace)),
        };
        let objective = match problem.regularizer_value(&x_new) {
            Ok(g) => f_new + g,
            Err(e) => return Err(abort(k, e, trace)),
        };
        if !objective.is_finite() {
            return Err(abort(k, Error::Diverged { iteration: k }, trace));
        }
        tau = tau_used;

        let restarted = accelerate && config.enable_restart && objective > prev_objective;
        trace.push(TraceEntry {
            objective,
            tau,
            restarted,
            linesearch,
            dca,
        });

        let change = norm_sq(&axpy_diff(&x_new, &x)).sqrt();
        let scale = norm_sq(&x).sqrt();
        if accelerate {
            state = fista_step(state, &x_new, restarted);
        }
        x = x_new;
        prev_objective = objective;
        if config.tol > 0.0 && change <= config.tol * scale {
            break;
        }
    }
    let iterations_run = trace.len();
    Ok(SolverResult {
        x,
        trace,
        iterations_run,
    })
}

type StepOutcome = (Vec<f64>, f64, f64, Option<LineSearchRecord>, Option<DcaRecord>);

fn iterate(
    problem: &impl Composite,
    base: &[f64],
    k: usize,
    tau: f64,
    config: &SolverConfig,
    history: &mut VecDeque<f64>,
) -> Result<StepOutcome> {
    let (f_base, grad) = problem.smooth_value_and_grad(base)?;
    history.push_back(f_base);
    while history.len() > config.linesearch_window {
        history.pop_front();
    }
    let mut dca = None;
    let mut take_step = |t: f64| -> Result<Vec<f64>> {
        let ForwardStep { point, dca: record } = problem.forward_step(base, &grad, t, k)?;
        dca = record;
        problem.prox(&point, t, k)
    };
    if !config.enable_linesearch {
        let x_new = take_step(tau)?;
        let f_new = problem.smooth_value(&x_new)?;
        return Ok((x_new, f_new, tau, None, dca));
    }

    let history: Vec<f64> = history.iter().copied().collect();
    let mut last = None;
    let (x_new, tau) = backtrack(
        &mut take_step,
        |x: &Vec<f64>, t| {
            let f_new = problem.smooth_value(x)?;
            let record = acceptance_record(&history, f_new, x, base, &grad);
            last = Some(record);
            // A null step means `base` is already stationary.
            Ok(record.dist_sq == 0.0 || record.holds(t))
        },
        tau,
    )?;
    let record = last.expect("acceptance evaluated at least once");
    Ok((x_new, record.f_new, tau, Some(record), dca))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimize::FnComposite;

    fn no_reg(_: &[f64]) -> f64 {
        0.0
    }

    #[test]
    fn alpha_recurrence_first_step() {
        let s = fista_step(MomentumState::new(&[0.0]), &[1.0], false);
        assert!((s.alpha - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn no_motion_means_no_extrapolation() {
        let state = MomentumState {
            alpha: 3.0,
            y: vec![9.0, 9.0],
            x_prev: vec![1.0, 2.0],
        };
        let s = fista_step(state, &[1.0, 2.0], false);
        assert_eq!(s.y, vec![1.0, 2.0]);
    }

    #[test]
    fn restart_resets_momentum() {
        let state = MomentumState {
            alpha: 7.5,
            y: vec![0.0],
            x_prev: vec![-1.0],
        };
        let s = fista_step(state, &[4.0], true);
        assert_eq!(s.alpha, 1.0);
        assert_eq!(s.y, vec![4.0]);
    }

    #[test]
    fn fbs_converges_to_quadratic_minimizer() {
        let c = [3.0, -1.0, 0.5, 8.0];
        let problem = FnComposite {
            f: |x: &[f64]| 0.5 * x.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>(),
            grad: |x: &[f64]| x.iter().zip(&c).map(|(a, b)| a - b).collect(),
            prox: |z: &[f64], _| z.to_vec(),
            g: no_reg,
        };
        let config = SolverConfig {
            tau: 0.5,
            max_iter: 60,
            tol: 0.0,
            ..Default::default()
        };
        let res = fbs_solve(&problem, &[0.0; 4], &config).unwrap();
        assert!(res.final_objective().unwrap() < 1e-10);
        assert_eq!(res.iterations_run, 60);
    }

    #[test]
    fn fbs_with_null_step_returns_start() {
        let problem = FnComposite {
            f: |_: &[f64]| 0.0,
            grad: |x: &[f64]| vec![0.0; x.len()],
            prox: |z: &[f64], _| z.to_vec(),
            g: no_reg,
        };
        let x0 = [1.5, -2.5];
        let res = fbs_solve(&problem, &x0, &SolverConfig::default()).unwrap();
        assert_eq!(res.x, x0.to_vec());
        assert_eq!(res.iterations_run, 1);
    }

    #[test]
    fn fbs_lasso_soft_threshold_fixed_point() {
        // f = ½(x−3)², g = |x|, minimizer 2.
        let problem = FnComposite {
            f: |x: &[f64]| 0.5 * (x[0] - 3.0).powi(2),
            grad: |x: &[f64]| vec![x[0] - 3.0],
            prox: |z: &[f64], t: f64| vec![z[0].signum() * (z[0].abs() - t).max(0.0)],
            g: |x: &[f64]| x[0].abs(),
        };
        let config = SolverConfig {
            tau: 0.9,
            max_iter: 200,
            tol: 0.0,
            ..Default::default()
        };
        let res = fbs_solve(&problem, &[0.0], &config).unwrap();
        assert!((res.x[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_finite_objective_aborts_with_trace() {
        let problem = FnComposite {
            f: |x: &[f64]| if x[0] > 2.5 { f64::INFINITY } else { -x[0] },
            grad: |_: &[f64]| vec![-1.0],
            prox: |z: &[f64], _| z.to_vec(),
            g: no_reg,
        };
        let config = SolverConfig {
            tau: 1.0,
            tol: 0.0,
            ..Default::default()
        };
        let err = fbs_solve(&problem, &[0.0], &config).unwrap_err();
        match &err {
            Error::Aborted { iteration, source, trace } => {
                assert_eq!(*iteration, 3);
                assert_eq!(trace.len(), 2);
                assert!(matches!(**source, Error::Diverged { iteration: 3 }));
            }
            other => panic!("unexpected {other}"),
        }
        assert_eq!(err.trace().unwrap().len(), 2);
    }

    #[test]
    fn invalid_config_rejected() {
        let problem = FnComposite {
            f: |_: &[f64]| 0.0,
            grad: |x: &[f64]| vec![0.0; x.len()],
            prox: |z: &[f64], _| z.to_vec(),
            g: no_reg,
        };
        for config in [
            SolverConfig { tau: 0.0, ..Default::default() },
            SolverConfig { max_iter: 0, ..Default::default() },
            SolverConfig { linesearch_window: 0, ..Default::default() },
        ] {
            assert!(fista_solve(&problem, &[0.0], &config).is_err());
        }
    }
}

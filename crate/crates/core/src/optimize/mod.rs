//! Proximal-gradient machinery shared by the reconstruction pipelines.
//!
//! Everything here works on flat `f64` vectors through the [`Composite`]
//! trait, so the same loop drives both toy test problems and images.

mod dca;
mod fista;
mod linesearch;

pub use dca::{dca_inner_solve, dca_solve, DcaOutcome, DCA_FIXED_POINT_TOL};
pub use fista::{fbs_solve, fista_solve, fista_step, MomentumState};
pub use linesearch::{backtrack, nonmonotone_accept, MAX_HALVINGS};

use std::fmt::Write;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub tau: f64,
    pub max_iter: usize,
    /// Window `M` of past objective values for the non-monotone test.
    pub linesearch_window: usize,
    pub enable_linesearch: bool,
    pub enable_restart: bool,
    /// Relative-change stopping threshold; 0 disables early stopping.
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau: 1.0,
            max_iter: 200,
            linesearch_window: 10,
            enable_linesearch: false,
            enable_restart: true,
            tol: 1e-6,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(Error::invalid("tau", format!("{} is not > 0", self.tau)));
        }
        if self.max_iter == 0 {
            return Err(Error::invalid("max_iter", "must be ≥ 1"));
        }
        if self.linesearch_window == 0 {
            return Err(Error::invalid("linesearch_window", "must be ≥ 1"));
        }
        if self.tol.is_nan() || self.tol < 0.0 {
            return Err(Error::invalid("tol", format!("{} is not ≥ 0", self.tol)));
        }
        Ok(())
    }
}

/// Quantities of the non-monotone acceptance test at an accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineSearchRecord {
    pub f_new: f64,
    pub reference: f64,
    pub inner: f64,
    pub dist_sq: f64,
}

impl LineSearchRecord {
    /// Re-evaluates the acceptance inequality for step size `tau`.
    pub fn holds(&self, tau: f64) -> bool {
        self.f_new < self.reference + self.inner + self.dist_sq / (2.0 * tau)
    }
}

/// Data loss before and after a DCA subproblem solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcaRecord {
    pub before: f64,
    pub after: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub objective: f64,
    pub tau: f64,
    pub restarted: bool,
    pub linesearch: Option<LineSearchRecord>,
    pub dca: Option<DcaRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult<X = Vec<f64>> {
    pub x: X,
    pub trace: Vec<TraceEntry>,
    pub iterations_run: usize,
}

impl<X> SolverResult<X> {
    pub fn map<Y>(self, f: impl FnOnce(X) -> Y) -> SolverResult<Y> {
        SolverResult {
            x: f(self.x),
            trace: self.trace,
            iterations_run: self.iterations_run,
        }
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.trace.last().map(|t| t.objective)
    }
}

/// CSV with columns `iteration,objective,tau,restart`.
pub fn trace_to_csv(trace: &[TraceEntry]) -> String {
    let mut out = String::from("iteration,objective,tau,restart\n");
    for (i, t) in trace.iter().enumerate() {
        writeln!(out, "{},{:e},{:e},{}", i + 1, t.objective, t.tau, t.restarted as u8).unwrap();
    }
    out
}

/// Result of the forward (smooth) half of a proximal-gradient iteration.
#[derive(Debug, Clone)]
pub struct ForwardStep {
    pub point: Vec<f64>,
    pub dca: Option<DcaRecord>,
}

/// `min f(x) + g(x)` with `f` smooth (or subdifferentiable) and `g` handled
/// through its proximal map.
pub trait Composite {
    /// Smooth part `f(x)`.
    fn smooth_value(&self, x: &[f64]) -> Result<f64>;

    fn smooth_value_and_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)>;

    /// Nonsmooth part `g(x)`; only used for traces and restarts.
    fn regularizer_value(&self, _x: &[f64]) -> Result<f64> {
        Ok(0.0)
    }

    /// `prox_g(z, τ)`. `iteration` counts from 1.
    fn prox(&self, z: &[f64], tau: f64, iteration: usize) -> Result<Vec<f64>>;

    /// Forward step from `y`; plain gradient descent unless overridden.
    fn forward_step(&self, y: &[f64], grad: &[f64], tau: f64, _iteration: usize) -> Result<ForwardStep> {
        Ok(ForwardStep {
            point: y.iter().zip(grad).map(|(a, g)| a - tau * g).collect(),
            dca: None,
        })
    }
}

/// [`Composite`] assembled from closures, mainly for small problems.
pub struct FnComposite<F, G, P, R> {
    pub f: F,
    pub grad: G,
    pub prox: P,
    pub g: R,
}

impl<F, G, P, R> Composite for FnComposite<F, G, P, R>
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> Vec<f64>,
    P: Fn(&[f64], f64) -> Vec<f64>,
    R: Fn(&[f64]) -> f64,
{
    fn smooth_value(&self, x: &[f64]) -> Result<f64> {
        Ok((self.f)(x))
    }

    fn smooth_value_and_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(((self.f)(x), (self.grad)(x)))
    }

    fn regularizer_value(&self, x: &[f64]) -> Result<f64> {
        Ok((self.g)(x))
    }

    fn prox(&self, z: &[f64], tau: f64, _iteration: usize) -> Result<Vec<f64>> {
        Ok((self.prox)(z, tau))
    }
}

pub(crate) fn axpy_diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

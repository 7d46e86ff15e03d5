//! End-to-end reconstructions: HIO initialization followed by one of the
//! denoiser-regularized FISTA pipelines.

mod hio;
mod prdeep;

use std::sync::Arc;

pub use hio::{hio_from, hio_init};
pub use prdeep::{pr_deep, pr_deep_dc, pr_deep_l2, solve_from};

use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::measurement::{MeasurementOperator, Observation};
use crate::objective::LossContext;
use crate::optimize::SolverConfig;

/// The three regularized pipelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pipeline {
    /// Gradient step on the data term, RED proximal step.
    PrDeep,
    /// DCA subproblem in place of the gradient step, RED proximal step.
    PrDeepDc,
    /// Gradient step, proximal step for `(λ/2)‖x − D(x)‖²`.
    PrDeepL2,
}

#[derive(Debug, Clone)]
pub struct ReconstructionProblem {
    pub observation: Observation,
    pub op: MeasurementOperator,
    pub denoiser: Arc<dyn Denoiser>,
    /// Regularization weight at the 0–255 pixel scale.
    pub lambda: f64,
    /// Step size in `solver.tau` is absolute; see [`Self::set_step_scale`].
    pub solver: SolverConfig,
    pub init_iters: usize,
    pub init_beta: f64,
    /// Seed of the random HIO starting point.
    pub init_seed: u64,
    /// Noise scale in the fidelity weight `1/(2σ²)`; `∞` disables the data term.
    pub sigma: f64,
    /// Fixed-point iterations inside each proximal step.
    pub prox_iters: usize,
    /// Gradient-descent steps inside each DCA subproblem.
    pub dca_inner_iters: usize,
    /// Use the RED proximal step on the first L2 iteration as a predictor.
    pub l2_predictor: bool,
}

/// Only `λτ = λσ²/c` reaches the proximal step, which is about 1e-4 at the
/// default step for 64×64 images and α between 2 and 4.
pub const DEFAULT_LAMBDA: f64 = 1e-8;
pub const DEFAULT_INIT_ITERS: usize = 400;
pub const DEFAULT_INIT_BETA: f64 = 0.9;

impl ReconstructionProblem {
    /// Problem with default parameters and step size `1/L`.
    pub fn new(observation: Observation, denoiser: Arc<dyn Denoiser>) -> Result<Self> {
        let (h, w) = observation.image_dims;
        let (ch, cw) = observation.canvas_dims;
        let op = MeasurementOperator::with_canvas(h, w, ch, cw)?;
        let mut problem = Self {
            init_seed: observation.seed,
            sigma: observation.sigma_w,
            observation,
            op,
            denoiser,
            lambda: DEFAULT_LAMBDA,
            solver: SolverConfig::default(),
            init_iters: DEFAULT_INIT_ITERS,
            init_beta: DEFAULT_INIT_BETA,
            prox_iters: 1,
            dca_inner_iters: 10,
            l2_predictor: true,
        };
        problem.set_step_scale(1.0);
        Ok(problem)
    }

    /// Lipschitz bound `c/σ²` of the weighted data-term gradient.
    pub fn lipschitz(&self) -> f64 {
        self.op.operator_norm_sq() / (self.sigma * self.sigma)
    }

    /// Sets `tau = scale / L`, or `tau = scale` when the data term is off.
    pub fn set_step_scale(&mut self, scale: f64) {
        let l = self.lipschitz();
        self.solver.tau = if l > 0.0 { scale / l } else { scale };
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", format!("{} is not ≥ 0", self.lambda)));
        }
        if !(self.init_beta > 0.0 && self.init_beta <= 1.0) {
            return Err(Error::invalid("init_beta", format!("{} is not in (0, 1]", self.init_beta)));
        }
        if self.init_iters == 0 {
            return Err(Error::invalid("init_iters", "must be ≥ 1"));
        }
        if self.prox_iters == 0 {
            return Err(Error::invalid("prox_iters", "must be ≥ 1"));
        }
        if self.dca_inner_iters == 0 {
            return Err(Error::invalid("dca_inner_iters", "must be ≥ 1"));
        }
        self.observation.check_operator(&self.op)?;
        self.solver.validate()
    }

    pub fn loss_context(&self) -> Result<LossContext> {
        self.observation.check_operator(&self.op)?;
        LossContext::new(self.op.clone(), self.observation.amplitudes.clone(), self.sigma)
    }
}

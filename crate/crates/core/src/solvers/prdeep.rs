use crate::denoise::{l2_value, prox_l2, prox_red, red_value, Denoiser};
use crate::error::Result;
use crate::image::Image;
use crate::objective::LossContext;
use crate::optimize::{dca_inner_solve, fista_solve, Composite, DcaRecord, ForwardStep, SolverResult};
use crate::solvers::{hio_init, Pipeline, ReconstructionProblem};

/// HIO initialization followed by FISTA with a gradient step on the data
/// term and the RED proximal step.
pub fn pr_deep(problem: &ReconstructionProblem) -> Result<SolverResult<Image>> {
    solve_from(problem, Pipeline::PrDeep, &hio_init(problem)?)
}

/// As [`pr_deep`], with the gradient step replaced by the DCA subproblem.
pub fn pr_deep_dc(problem: &ReconstructionProblem) -> Result<SolverResult<Image>> {
    solve_from(problem, Pipeline::PrDeepDc, &hio_init(problem)?)
}

/// As [`pr_deep`], regularized by `(λ/2)‖x − D(x)‖²`.
pub fn pr_deep_l2(problem: &ReconstructionProblem) -> Result<SolverResult<Image>> {
    solve_from(problem, Pipeline::PrDeepL2, &hio_init(problem)?)
}

/// Runs `pipeline` from `init`; the returned image is clamped to `[0, 255]`.
pub fn solve_from(problem: &ReconstructionProblem, pipeline: Pipeline, init: &Image) -> Result<SolverResult<Image>> {
    problem.validate()?;
    problem.op.image_dims_match(init)?;
    let composite = PipelineComposite {
        ctx: problem.loss_context()?,
        denoiser: problem.denoiser.as_ref(),
        lambda: problem.lambda,
        dims: init.dims(),
        pipeline,
        prox_iters: problem.prox_iters,
        dca_inner_iters: problem.dca_inner_iters,
        l2_predictor: problem.l2_predictor,
    };
    let result = fista_solve(&composite, init.data(), &problem.solver)?;
    let (h, w) = init.dims();
    let x = Image::new(h, w, result.x)?.clamp_to_range();
    Ok(SolverResult {
        x,
        trace: result.trace,
        iterations_run: result.iterations_run,
    })
}

struct PipelineComposite<'a> {
    ctx: LossContext,
    denoiser: &'a dyn Denoiser,
    lambda: f64,
    dims: (usize, usize),
    pipeline: Pipeline,
    prox_iters: usize,
    dca_inner_iters: usize,
    l2_predictor: bool,
}

impl PipelineComposite<'_> {
    fn image(&self, x: &[f64]) -> Result<Image> {
        Image::new(self.dims.0, self.dims.1, x.to_vec())
    }
}

impl Composite for PipelineComposite<'_> {
    fn smooth_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self.ctx.data_value(x))
    }

    fn smooth_value_and_grad(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(self.ctx.data_value_and_grad(x))
    }

    fn regularizer_value(&self, x: &[f64]) -> Result<f64> {
        let x = self.image(x)?;
        match self.pipeline {
            Pipeline::PrDeep | Pipeline::PrDeepDc => red_value(&x, self.denoiser, self.lambda),
            Pipeline::PrDeepL2 => l2_value(&x, self.denoiser, self.lambda),
        }
    }

    fn prox(&self, z: &[f64], tau: f64, iteration: usize) -> Result<Vec<f64>> {
        let z = self.image(z)?;
        let out = match self.pipeline {
            Pipeline::PrDeepL2 if !(self.l2_predictor && iteration == 1) => {
                prox_l2(&z, self.denoiser, self.lambda, tau, self.prox_iters)?
            }
            _ => prox_red(&z, self.denoiser, self.lambda, tau, self.prox_iters)?,
        };
        Ok(out.into_data())
    }

    fn forward_step(&self, y: &[f64], grad: &[f64], tau: f64, _iteration: usize) -> Result<ForwardStep> {
        if self.pipeline != Pipeline::PrDeepDc {
            return Ok(ForwardStep {
                point: y.iter().zip(grad).map(|(a, g)| a - tau * g).collect(),
                dca: None,
            });
        }
        let x_hat = dca_inner_solve(&self.ctx, &self.image(y)?, self.dca_inner_iters)?;
        let record = DcaRecord {
            before: self.ctx.loss_f_data(y),
            after: self.ctx.loss_f_data(x_hat.data()),
        };
        Ok(ForwardStep {
            point: x_hat.into_data(),
            dca: Some(record),
        })
    }
}

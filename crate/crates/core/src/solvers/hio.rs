use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::image::{norm_sq, Image};
use crate::measurement::Complex64;
use crate::objective::phase;
use crate::solvers::ReconstructionProblem;

/// Keeps the HIO start independent of the noise stream drawn from the same seed.
const INIT_STREAM: u64 = 0x4849_4f5f_494e_4954;

/// Hybrid input-output from a seeded random nonnegative start whose
/// measurement energy matches `‖b‖²`.
pub fn hio_init(problem: &ReconstructionProblem) -> Result<Image> {
    let (h, w) = problem.op.image_dims();
    let b_norm = norm_sq(&problem.observation.amplitudes).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(problem.init_seed ^ INIT_STREAM);
    let raw: Vec<f64> = (0..h * w).map(|_| rng.random::<f64>()).collect();
    let raw_norm = norm_sq(&raw).sqrt();
    let scale = if raw_norm > 0.0 {
        b_norm / (problem.op.operator_norm_sq().sqrt() * raw_norm)
    } else {
        0.0
    };
    let start = Image::new(h, w, raw.into_iter().map(|v| v * scale).collect())?;
    hio_from(problem, &start)
}

/// Runs `init_iters` HIO iterations on the canvas starting from `start`
/// (zero outside the image region) and returns the clamped image-region
/// estimate with the smallest amplitude residual.
pub fn hio_from(problem: &ReconstructionProblem, start: &Image) -> Result<Image> {
    problem.validate()?;
    let op = &problem.op;
    op.image_dims_match(start)?;
    let ctx = problem.loss_context()?;
    let b = &problem.observation.amplitudes;
    let (h, w) = op.image_dims();
    let (ch, cw) = op.canvas_dims();
    let c = op.operator_norm_sq();
    let beta = problem.init_beta;
    let in_support = |i: usize| i / cw < h && i % cw < w;

    let mut g = vec![0.0; ch * cw];
    for r in 0..h {
        g[r * cw..r * cw + w].copy_from_slice(&start.data()[r * w..(r + 1) * w]);
    }

    let project = |x: &[f64]| -> Vec<f64> { x.iter().map(|v| v.max(0.0)).collect() };
    let mut best = project(start.data());
    let mut best_residual = ctx.loss_f_data(&best);

    let mut buf = vec![Complex64::new(0.0, 0.0); ch * cw];
    for _ in 0..problem.init_iters {
        for (z, v) in buf.iter_mut().zip(&g) {
            *z = Complex64::new(*v, 0.0);
        }
        op.forward_canvas(&mut buf);
        for (z, &amp) in buf.iter_mut().zip(b) {
            *z = phase(*z) * amp;
        }
        op.inverse_canvas(&mut buf);

        for (i, (gv, z)) in g.iter_mut().zip(&buf).enumerate() {
            let gp = z.re / c;
            if in_support(i) && gp >= 0.0 {
                *gv = gp;
            } else {
                *gv -= beta * gp;
            }
        }

        let candidate = project(&op.crop_real(&buf).into_iter().map(|v| v / c).collect::<Vec<_>>());
        let residual = ctx.loss_f_data(&candidate);
        if residual < best_residual {
            best_residual = residual;
            best = candidate;
        }
    }
    Ok(Image::new(h, w, best)?.clamp_to_range())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::IdentityDenoiser;
    use crate::measurement::{make_fourier_operator, simulate_poisson_intensity};
    use std::sync::Arc;

    fn problem(x: &Image) -> ReconstructionProblem {
        let op = make_fourier_operator(x.height(), x.width(), 4.0).unwrap();
        let obs = simulate_poisson_intensity(&op, x, 0.0, 3).unwrap();
        ReconstructionProblem::new(obs, Arc::new(IdentityDenoiser)).unwrap()
    }

    #[test]
    fn truth_is_a_fixed_point() {
        let x = Image::from_fn(8, 8, |r, c| ((r * 31 + c * 17) % 200) as f64 + 5.0).unwrap();
        let p = problem(&x);
        let out = hio_from(&p, &x).unwrap();
        for (a, b) in out.data().iter().zip(x.data()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_measurements_give_zero_image() {
        let x = Image::zeros(8, 8);
        let out = hio_init(&problem(&x)).unwrap();
        assert!(out.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn output_is_clamped_and_deterministic() {
        let x = Image::from_fn(8, 8, |r, c| if (r + c) % 3 == 0 { 255.0 } else { 0.0 }).unwrap();
        let p = problem(&x);
        let a = hio_init(&p).unwrap();
        assert!(a.data().iter().all(|v| (0.0..=255.0).contains(v)));
        assert_eq!(a, hio_init(&p).unwrap());
    }
}

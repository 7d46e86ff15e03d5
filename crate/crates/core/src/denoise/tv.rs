//! Isotropic total-variation denoising by projected gradient on the dual.
//!
//! Solves `min_u ½‖u − f‖² + weight·TV(u)` through the dual field `p` with
//! `|p_ij| ≤ 1`, recovering `u = f − weight·div p`.

use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::image::Image;

/// Dual step size; `‖∇‖² ≤ 8` for forward differences in 2-D.
const DUAL_STEP: f64 = 0.125;

/// Isotropic TV with forward differences and Neumann boundary.
pub fn total_variation(x: &Image) -> f64 {
    let (gx, gy) = gradient(x.data(), x.height(), x.width());
    gx.iter().zip(&gy).map(|(a, b)| a.hypot(*b)).sum()
}

/// `½‖u − f‖² + weight·TV(u)`.
pub fn tv_energy(u: &Image, f: &Image, weight: f64) -> f64 {
    let fit: f64 = u.data().iter().zip(f.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    0.5 * fit + weight * total_variation(u)
}

pub fn tv_denoise(x: &Image, weight: f64, iters: usize) -> Result<Image> {
    if !(weight > 0.0 && weight.is_finite()) {
        return Err(Error::invalid("weight", format!("{weight} is not > 0")));
    }
    if iters == 0 {
        return Err(Error::invalid("iters", "must be ≥ 1"));
    }
    let (h, w) = x.dims();
    let f = x.data();
    let mut px = vec![0.0; h * w];
    let mut py = vec![0.0; h * w];
    let mut u = f.to_vec();
    for _ in 0..iters {
        // ∇(div p − f/weight) = −∇u / weight
        let (gx, gy) = gradient(&u, h, w);
        for i in 0..h * w {
            let qx = px[i] - DUAL_STEP * gx[i] / weight;
            let qy = py[i] - DUAL_STEP * gy[i] / weight;
            let scale = qx.hypot(qy).max(1.0);
            px[i] = qx / scale;
            py[i] = qy / scale;
        }
        let div = divergence(&px, &py, h, w);
        for i in 0..h * w {
            u[i] = f[i] - weight * div[i];
        }
    }
    x.with_data(u)
}

fn gradient(u: &[f64], h: usize, w: usize) -> (Vec<f64>, Vec<f64>) {
    let mut gx = vec![0.0; h * w];
    let mut gy = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            if c + 1 < w {
                gx[i] = u[i + 1] - u[i];
            }
            if r + 1 < h {
                gy[i] = u[i + w] - u[i];
            }
        }
    }
    (gx, gy)
}

/// Negative adjoint of [`gradient`].
fn divergence(px: &[f64], py: &[f64], h: usize, w: usize) -> Vec<f64> {
    let mut div = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let mut d = 0.0;
            if c + 1 < w {
                d += px[i];
            }
            if c > 0 {
                d -= px[i - 1];
            }
            if r + 1 < h {
                d += py[i];
            }
            if r > 0 {
                d -= py[i - w];
            }
            div[i] = d;
        }
    }
    div
}

#[derive(Debug, Clone, Copy)]
pub struct TvDenoiser {
    pub weight: f64,
    pub iters: usize,
}

impl Denoiser for TvDenoiser {
    fn denoise(&self, x: &Image) -> Result<Image> {
        tv_denoise(x, self.weight, self.iters)
    }

    fn noise_level(&self) -> f64 {
        self.weight
    }

    fn name(&self) -> &str {
        "tv"
    }
}

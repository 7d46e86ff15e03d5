//! PSNR and SSIM on the 8-bit scale.

use std::fmt;

use crate::error::{Error, Result};
use crate::image::{Image, PEAK};

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_C1: f64 = (0.01 * PEAK) * (0.01 * PEAK);
const SSIM_C2: f64 = (0.03 * PEAK) * (0.03 * PEAK);

/// Peak signal-to-noise ratio in dB with peak 255.
///
/// Identical images yield `f64::INFINITY`, the "perfect" sentinel.
pub fn psnr(reference: &Image, candidate: &Image) -> Result<f64> {
    reference.ensure_same_dims(candidate)?;
    let mse = reference
        .data()
        .iter()
        .zip(candidate.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / reference.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (PEAK * PEAK / mse).log10())
}

/// Mean structural similarity over all valid 11×11 Gaussian windows.
pub fn ssim(reference: &Image, candidate: &Image) -> Result<f64> {
    reference.ensure_same_dims(candidate)?;
    let (h, w) = reference.dims();
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::invalid(
            "image",
            format!("SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {h}x{w}"),
        ));
    }
    let kernel = gaussian_window();
    let x = reference.data();
    let y = candidate.data();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();

    let mu_x = filter_valid(x, h, w, &kernel);
    let mu_y = filter_valid(y, h, w, &kernel);
    let e_xx = filter_valid(&xx, h, w, &kernel);
    let e_yy = filter_valid(&yy, h, w, &kernel);
    let e_xy = filter_valid(&xy, h, w, &kernel);

    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let var_x = e_xx[i] - mx * mx;
        let var_y = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2);
        let den = (mx * mx + my * my + SSIM_C1) * (var_x + var_y + SSIM_C2);
        total += num / den;
    }
    Ok(total / mu_x.len() as f64)
}

fn gaussian_window() -> Vec<f64> {
    let half = (SSIM_WINDOW / 2) as f64;
    let raw: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - half;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / sum).collect()
}

/// Separable 2-D correlation keeping only fully-overlapping positions.
fn filter_valid(data: &[f64], h: usize, w: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let (oh, ow) = (h - k + 1, w - k + 1);
    let mut rows = vec![0.0; h * ow];
    for r in 0..h {
        for c in 0..ow {
            rows[r * ow + c] = (0..k).map(|t| kernel[t] * data[r * w + c + t]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for r in 0..oh {
        for c in 0..ow {
            out[r * ow + c] = (0..k).map(|t| kernel[t] * rows[(r + t) * ow + c]).sum();
        }
    }
    out
}

/// PSNR/SSIM pair as reported by the benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub psnr: f64,
    pub ssim: f64,
}

impl QualityReport {
    pub fn compute(reference: &Image, candidate: &Image) -> Result<Self> {
        Ok(Self {
            psnr: psnr(reference, candidate)?,
            ssim: ssim(reference, candidate)?,
        })
    }

    pub fn is_perfect(&self) -> bool {
        self.psnr == f64::INFINITY
    }
}

impl fmt::Display for QualityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_perfect() {
            write!(f, "perfect/{:.3}", self.ssim)
        } else {
            write!(f, "{:.2}/{:.3}", self.psnr, self.ssim)
        }
    }
}

//! Denoisers and the denoiser-driven regularizers built on them.

mod cnn;
mod filters;
mod red;
mod tv;

use std::fmt;

use crate::error::Result;
use crate::image::Image;

pub use cnn::{load_cnn_denoiser, CnnDenoiser, CnnWeights, ConvLayer};
pub use filters::{gaussian_denoise, median_denoise, GaussianDenoiser, MedianDenoiser};
pub use red::{l2_value, prox_l2, prox_red, red_value, DIVISION_GUARD};
pub use tv::{tv_denoise, tv_energy, total_variation, TvDenoiser};

/// An image-to-image map `D` used as an implicit prior.
///
/// Implementations must return an image of the same size with finite
/// values and must be safe to call concurrently.
pub trait Denoiser: Send + Sync {
    fn denoise(&self, x: &Image) -> Result<Image>;

    /// Noise standard deviation the denoiser is tuned for, in pixel units.
    fn noise_level(&self) -> f64;

    fn name(&self) -> &str;
}

impl fmt::Debug for dyn Denoiser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Denoiser({})", self.name())
    }
}

/// `D(x) = x`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityDenoiser;

impl Denoiser for IdentityDenoiser {
    fn denoise(&self, x: &Image) -> Result<Image> {
        Ok(x.clone())
    }

    fn noise_level(&self) -> f64 {
        0.0
    }

    fn name(&self) -> &str {
        "identity"
    }
}

/// `D(x) = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDenoiser;

impl Denoiser for ZeroDenoiser {
    fn denoise(&self, x: &Image) -> Result<Image> {
        Ok(Image::zeros(x.height(), x.width()))
    }

    fn noise_level(&self) -> f64 {
        0.0
    }

    fn name(&self) -> &str {
        "zero"
    }
}

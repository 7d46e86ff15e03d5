//! Phase retrieval from noisy Fourier magnitudes.
//!
//! The crate reconstructs real-valued images `x` from amplitude measurements
//! `b ≈ |A x|`, where `A` is an oversampled two-dimensional DFT. Three
//! reconstruction pipelines are provided on top of a shared accelerated
//! proximal-gradient scaffold:
//!
//! * [`solvers::pr_deep`]: gradient step on the amplitude loss followed by a
//!   regularization-by-denoising (RED) proximal step.
//! * [`solvers::pr_deep_dc`]: the gradient step is replaced by a
//!   difference-of-convex (DCA) subproblem solve.
//! * [`solvers::pr_deep_l2`]: RED is replaced by the squared residual
//!   `‖x − D(x)‖²` with its own fixed-point proximal update.
//!
//! All pixel math happens on the 8-bit scale `[0, 255]`.

pub mod align;
pub mod denoise;
mod error;
mod fft;
pub mod image;
pub mod io;
pub mod measurement;
pub mod metrics;
pub mod objective;
pub mod optimize;
pub mod solvers;

pub use error::{Error, Result};
pub use image::Image;

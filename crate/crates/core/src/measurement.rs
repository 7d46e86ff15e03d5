//! Oversampled Fourier measurement operator and the intensity-noise model.
//!
//! The operator zero-pads an `h × w` image into the top-left corner of a
//! larger canvas and applies the unnormalized 2-D DFT, so `AᴴA = c·I` with
//! `c = canvas_h · canvas_w`.

use std::fmt;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
pub use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::image::Image;

#[derive(Clone)]
pub struct MeasurementOperator {
    image_h: usize,
    image_w: usize,
    canvas_h: usize,
    canvas_w: usize,
    fft: Arc<Fft2>,
}

impl fmt::Debug for MeasurementOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeasurementOperator")
            .field("image", &(self.image_h, self.image_w))
            .field("canvas", &(self.canvas_h, self.canvas_w))
            .finish()
    }
}

/// Builds the operator for an `image_h × image_w` image with the given
/// area oversampling rate. The per-axis factor `√oversampling` must map both
/// dimensions to integers; rate 4 doubles each side.
pub fn make_fourier_operator(image_h: usize, image_w: usize, oversampling: f64) -> Result<MeasurementOperator> {
    if !(oversampling.is_finite() && oversampling >= 1.0) {
        return Err(Error::invalid("oversampling", format!("{oversampling} is not ≥ 1")));
    }
    let factor = oversampling.sqrt();
    let side = |n: usize| -> Result<usize> {
        let exact = n as f64 * factor;
        let rounded = exact.round();
        if (exact - rounded).abs() > 1e-9 {
            return Err(Error::invalid(
                "oversampling",
                format!("rate {oversampling} gives non-integer canvas side {exact} for {n} pixels"),
            ));
        }
        Ok(rounded as usize)
    };
    MeasurementOperator::with_canvas(image_h, image_w, side(image_h)?, side(image_w)?)
}

impl MeasurementOperator {
    pub fn with_canvas(image_h: usize, image_w: usize, canvas_h: usize, canvas_w: usize) -> Result<Self> {
        if image_h == 0 || image_w == 0 {
            return Err(Error::invalid("image", "empty image dimensions"));
        }
        if canvas_h < image_h || canvas_w < image_w {
            return Err(Error::invalid(
                "canvas",
                format!("{canvas_h}x{canvas_w} smaller than image {image_h}x{image_w}"),
            ));
        }
        Ok(Self {
            image_h,
            image_w,
            canvas_h,
            canvas_w,
            fft: Arc::new(Fft2::new(canvas_h, canvas_w)),
        })
    }

    pub fn image_dims(&self) -> (usize, usize) {
        (self.image_h, self.image_w)
    }

    pub fn canvas_dims(&self) -> (usize, usize) {
        (self.canvas_h, self.canvas_w)
    }

    /// Number of measurements, `canvas_h · canvas_w`.
    pub fn measurement_count(&self) -> usize {
        self.canvas_h * self.canvas_w
    }

    pub fn image_len(&self) -> usize {
        self.image_h * self.image_w
    }

    pub fn oversampling_rate(&self) -> f64 {
        self.measurement_count() as f64 / self.image_len() as f64
    }

    /// `‖A‖²`, exactly the canvas area for this operator.
    pub fn operator_norm_sq(&self) -> f64 {
        self.measurement_count() as f64
    }

    pub fn forward(&self, x: &Image) -> Result<Vec<Complex64>> {
        self.image_dims_match(x)?;
        Ok(self.forward_data(x.data()))
    }

    pub(crate) fn image_dims_match(&self, x: &Image) -> Result<()> {
        if x.dims() != self.image_dims() {
            return Err(Error::dims(
                format!("{}x{}", self.image_h, self.image_w),
                format!("{}x{}", x.height(), x.width()),
            ));
        }
        Ok(())
    }

    pub fn adjoint(&self, z: &[Complex64]) -> Result<Image> {
        if z.len() != self.measurement_count() {
            return Err(Error::dims(
                format!("{} measurements", self.measurement_count()),
                format!("{}", z.len()),
            ));
        }
        Image::new(self.image_h, self.image_w, self.adjoint_data(z))
    }

    pub(crate) fn forward_data(&self, x: &[f64]) -> Vec<Complex64> {
        debug_assert_eq!(x.len(), self.image_len());
        let mut buf = vec![Complex64::default(); self.measurement_count()];
        for r in 0..self.image_h {
            let src = &x[r * self.image_w..(r + 1) * self.image_w];
            let dst = &mut buf[r * self.canvas_w..r * self.canvas_w + self.image_w];
            for (d, &s) in dst.iter_mut().zip(src) {
                d.re = s;
            }
        }
        self.fft.forward(&mut buf);
        buf
    }

    /// Real part of `Aᴴz` restricted to the image support.
    pub(crate) fn adjoint_data(&self, z: &[Complex64]) -> Vec<f64> {
        debug_assert_eq!(z.len(), self.measurement_count());
        let mut buf = z.to_vec();
        self.fft.inverse(&mut buf);
        self.crop_real(&buf)
    }

    /// `Aᴴz` without cropping, used by canvas-domain iterations.
    pub(crate) fn inverse_canvas(&self, z: &mut [Complex64]) {
        self.fft.inverse(z);
    }

    pub(crate) fn forward_canvas(&self, z: &mut [Complex64]) {
        self.fft.forward(z);
    }

    pub(crate) fn crop_real(&self, canvas: &[Complex64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.image_len());
        for r in 0..self.image_h {
            out.extend(canvas[r * self.canvas_w..r * self.canvas_w + self.image_w].iter().map(|c| c.re));
        }
        out
    }
}

/// Noisy amplitude measurements together with the noise metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub image_dims: (usize, usize),
    pub canvas_dims: (usize, usize),
    pub amplitudes: Vec<f64>,
    pub alpha: f64,
    pub sigma_w: f64,
    pub seed: u64,
}

/// Draws the noisy intensities `y² = |Ax|² + ω` with `ω_i ~ N(0, α²·|Ax|²_i)`.
/// Entries may be negative.
pub fn noisy_intensities(op: &MeasurementOperator, x: &Image, alpha: f64, seed: u64) -> Result<Vec<f64>> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid("alpha", format!("{alpha} is not ≥ 0")));
    }
    let ax = op.forward(x)?;
    if alpha == 0.0 {
        return Ok(ax.iter().map(|z| z.norm_sqr()).collect());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(ax
        .iter()
        .map(|z| {
            let intensity = z.norm_sqr();
            let xi: f64 = StandardNormal.sample(&mut rng);
            intensity + alpha * intensity.sqrt() * xi
        })
        .collect())
}

/// Simulates `y²` as in [`noisy_intensities`] and stores `b = √max(y², 0)`.
pub fn simulate_poisson_intensity(op: &MeasurementOperator, x: &Image, alpha: f64, seed: u64) -> Result<Observation> {
    let y2 = noisy_intensities(op, x, alpha, seed)?;
    let amplitudes = if alpha == 0.0 {
        op.forward(x)?.iter().map(|z| z.norm()).collect()
    } else {
        y2.iter().map(|v| v.max(0.0).sqrt()).collect()
    };
    Ok(Observation {
        image_dims: op.image_dims(),
        canvas_dims: op.canvas_dims(),
        sigma_w: noise_sigma_estimate(&y2, alpha),
        amplitudes,
        alpha,
        seed,
    })
}

/// Plug-in noise scale `α·√mean(max(y², 0))`.
///
/// Degenerate inputs (`α = 0` or all-zero intensities) give 1 so the
/// fidelity weight stays finite.
pub fn noise_sigma_estimate(y2: &[f64], alpha: f64) -> f64 {
    if alpha <= 0.0 || y2.is_empty() {
        return 1.0;
    }
    let mean = y2.iter().map(|v| v.max(0.0)).sum::<f64>() / y2.len() as f64;
    let sigma = alpha * mean.sqrt();
    if sigma > 0.0 {
        sigma
    } else {
        1.0
    }
}

const OBSERVATION_MAGIC: &[u8; 4] = b"PRB1";

impl Observation {
    pub fn measurement_count(&self) -> usize {
        self.amplitudes.len()
    }

    /// Checks that this observation was produced for `op`.
    pub fn check_operator(&self, op: &MeasurementOperator) -> Result<()> {
        if self.image_dims != op.image_dims() || self.canvas_dims != op.canvas_dims() {
            return Err(Error::dims(
                format!("image {:?} canvas {:?}", op.image_dims(), op.canvas_dims()),
                format!("image {:?} canvas {:?}", self.image_dims, self.canvas_dims),
            ));
        }
        if self.amplitudes.len() != op.measurement_count() {
            return Err(Error::dims(op.measurement_count(), self.amplitudes.len()));
        }
        Ok(())
    }

    /// Binary layout: `"PRB1"`, image h/w and canvas h/w as `u32`, `alpha`
    /// as `f64`, `seed` as `u64`, then the amplitudes as `f64`, all
    /// little-endian.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(36 + 8 * self.amplitudes.len());
        out.extend_from_slice(OBSERVATION_MAGIC);
        for d in [self.image_dims.0, self.image_dims.1, self.canvas_dims.0, self.canvas_dims.1] {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        out.extend_from_slice(&self.alpha.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        for b in &self.amplitudes {
            out.extend_from_slice(&b.to_le_bytes());
        }
        out
    }

    /// Parses [`Observation::to_bytes`] output. `sigma_w` is recomputed from
    /// the stored amplitudes.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let malformed = |reason: String| Error::Malformed {
            kind: "observation",
            reason,
        };
        if bytes.len() < 36 || &bytes[..4] != OBSERVATION_MAGIC {
            return Err(malformed("missing PRB1 header".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let image_dims = (u32_at(4), u32_at(8));
        let canvas_dims = (u32_at(12), u32_at(16));
        let alpha = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
        let seed = u64::from_le_bytes(bytes[28..36].try_into().unwrap());
        let count = canvas_dims.0 * canvas_dims.1;
        let body = &bytes[36..];
        if body.len() != 8 * count {
            return Err(malformed(format!("expected {count} amplitudes, found {} bytes", body.len())));
        }
        let amplitudes: Vec<f64> = body
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if amplitudes.iter().any(|b| !(b.is_finite() && *b >= 0.0)) {
            return Err(malformed("amplitudes must be finite and nonnegative".into()));
        }
        let y2: Vec<f64> = amplitudes.iter().map(|b| b * b).collect();
        Ok(Self {
            image_dims,
            canvas_dims,
            sigma_w: noise_sigma_estimate(&y2, alpha),
            amplitudes,
            alpha,
            seed,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_bytes(&bytes)
    }
}

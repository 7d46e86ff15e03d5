//! Inference for small residual convolutional denoisers.
//!
//! Every layer is a 3×3 convolution with zero "same" padding; all but the
//! last are followed by ReLU. Batch normalization is expected to be folded
//! into the convolution weights. With the residual flag set, the network
//! predicts the noise and the output is `x − net(x)`.
//!
//! File layout (little-endian): `"CNN1"`, depth as `u32`, then per layer
//! `out_ch: u32`, `in_ch: u32`, kernels as `f64` in `(out, in, ky, kx)`
//! order, biases as `f64`; finally one residual-flag byte.

use std::fs;
use std::path::Path;

use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::image::Image;

const MAGIC: &[u8; 4] = b"CNN1";
const K: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayer {
    pub out_channels: usize,
    pub in_channels: usize,
    /// `out × in × 3 × 3`, row-major.
    pub kernels: Vec<f64>,
    pub biases: Vec<f64>,
}

impl ConvLayer {
    pub fn kernel(&self, out: usize, input: usize, ky: usize, kx: usize) -> f64 {
        self.kernels[((out * self.in_channels + input) * K + ky) * K + kx]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnnWeights {
    pub layers: Vec<ConvLayer>,
    pub residual: bool,
    /// Noise level the network was trained for. Not stored in the file.
    pub noise_level: Option<f64>,
}

impl CnnWeights {
    pub fn new(layers: Vec<ConvLayer>, residual: bool) -> Result<Self> {
        let weights = Self {
            layers,
            residual,
            noise_level: None,
        };
        weights.validate()?;
        Ok(weights)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    fn validate(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::CnnLayer {
                layer: 0,
                reason: "network has no layers".into(),
            });
        }
        let last = self.layers.len() - 1;
        let mut expected_in = 1;
        for (i, l) in self.layers.iter().enumerate() {
            let fail = |reason: String| Err(Error::CnnLayer { layer: i, reason });
            if l.in_channels != expected_in {
                return fail(format!("expects {} input channels, previous layer gives {expected_in}", l.in_channels));
            }
            if l.out_channels == 0 {
                return fail("zero output channels".into());
            }
            if i == last && l.out_channels != 1 {
                return fail(format!("last layer must output 1 channel, has {}", l.out_channels));
            }
            if l.kernels.len() != l.out_channels * l.in_channels * K * K {
                return fail(format!("kernel buffer has {} values", l.kernels.len()));
            }
            if l.biases.len() != l.out_channels {
                return fail(format!("bias buffer has {} values", l.biases.len()));
            }
            if l.kernels.iter().chain(&l.biases).any(|v| !v.is_finite()) {
                return fail("non-finite parameter".into());
            }
            expected_in = l.out_channels;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = MAGIC.to_vec();
        out.extend_from_slice(&(self.layers.len() as u32).to_le_bytes());
        for l in &self.layers {
            out.extend_from_slice(&(l.out_channels as u32).to_le_bytes());
            out.extend_from_slice(&(l.in_channels as u32).to_le_bytes());
            for v in l.kernels.iter().chain(&l.biases) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out.push(self.residual as u8);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut reader = Reader { bytes, pos: 0 };
        if reader.take(4, 0)? != MAGIC {
            return Err(Error::Malformed {
                kind: "CNN weights",
                reason: "missing CNN1 magic".into(),
            });
        }
        let depth = reader.u32(0)? as usize;
        let mut layers = Vec::with_capacity(depth.min(1024));
        for layer in 0..depth {
            let out_channels = reader.u32(layer)? as usize;
            let in_channels = reader.u32(layer)? as usize;
            let kernels = reader.f64s(out_channels * in_channels * K * K, layer)?;
            let biases = reader.f64s(out_channels, layer)?;
            layers.push(ConvLayer {
                out_channels,
                in_channels,
                kernels,
                biases,
            });
        }
        let flag = reader.take(1, depth)?[0];
        if reader.pos != bytes.len() {
            return Err(Error::Malformed {
                kind: "CNN weights",
                reason: format!("{} trailing bytes", bytes.len() - reader.pos),
            });
        }
        let residual = match flag {
            0 => false,
            1 => true,
            other => {
                return Err(Error::Malformed {
                    kind: "CNN weights",
                    reason: format!("residual flag byte {other}"),
                })
            }
        };
        Self::new(layers, residual)
    }

    /// Applies the network to a single-channel image.
    pub fn forward(&self, x: &Image) -> Result<Image> {
        let (h, w) = x.dims();
        let mut act = x.data().to_vec();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            act = conv3x3(layer, &act, h, w);
            if i != last {
                act.iter_mut().for_each(|v| *v = v.max(0.0));
            }
        }
        if self.residual {
            for (a, v) in act.iter_mut().zip(x.data()) {
                *a = v - *a;
            }
        }
        x.with_data(act)
    }
}

fn conv3x3(layer: &ConvLayer, input: &[f64], h: usize, w: usize) -> Vec<f64> {
    let plane = h * w;
    let mut out = vec![0.0; layer.out_channels * plane];
    for o in 0..layer.out_channels {
        let dst = &mut out[o * plane..(o + 1) * plane];
        dst.iter_mut().for_each(|v| *v = layer.biases[o]);
        for ci in 0..layer.in_channels {
            let src = &input[ci * plane..(ci + 1) * plane];
            for ky in 0..K {
                for kx in 0..K {
                    let k = layer.kernel(o, ci, ky, kx);
                    if k == 0.0 {
                        continue;
                    }
                    // output(r, c) += k · input(r + ky − 1, c + kx − 1)
                    let r0 = 1usize.saturating_sub(ky);
                    let r1 = (h + 1 - ky).min(h);
                    let c0 = 1usize.saturating_sub(kx);
                    let c1 = (w + 1 - kx).min(w);
                    for r in r0..r1 {
                        let sr = r + ky - 1;
                        let drow = &mut dst[r * w..(r + 1) * w];
                        let srow = &src[sr * w..(sr + 1) * w];
                        for c in c0..c1 {
                            drow[c] += k * srow[c + kx - 1];
                        }
                    }
                }
            }
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, layer: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::CnnLayer {
                layer,
                reason: "file truncated".into(),
            }),
        }
    }

    fn u32(&mut self, layer: usize) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, layer)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, layer: usize) -> Result<Vec<f64>> {
        let bytes = self.take(n.saturating_mul(8), layer)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

/// Convolutional denoiser. `input_scale` maps pixels into the range the
/// network was trained on, e.g. `1/255` for unit-range training data.
#[derive(Debug, Clone)]
pub struct CnnDenoiser {
    pub weights: CnnWeights,
    pub input_scale: f64,
}

impl CnnDenoiser {
    pub fn new(weights: CnnWeights) -> Self {
        Self {
            weights,
            input_scale: 1.0,
        }
    }
}

impl Denoiser for CnnDenoiser {
    fn denoise(&self, x: &Image) -> Result<Image> {
        if self.input_scale == 1.0 {
            return self.weights.forward(x);
        }
        let scaled = x.map(|v| v * self.input_scale)?;
        self.weights.forward(&scaled)?.map(|v| v / self.input_scale)
    }

    fn noise_level(&self) -> f64 {
        self.weights.noise_level.unwrap_or(0.0)
    }

    fn name(&self) -> &str {
        "cnn"
    }
}

pub fn load_cnn_denoiser(path: impl AsRef<Path>) -> Result<CnnDenoiser> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(CnnDenoiser::new(CnnWeights::from_bytes(&bytes)?))
}

use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::image::Image;

/// Median filter over a `window × window` neighbourhood with edge
/// replication.
pub fn median_denoise(x: &Image, window: usize) -> Result<Image> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(Error::invalid("window", format!("{window} is not an odd size ≥ 3")));
    }
    let (h, w) = x.dims();
    let r = (window / 2) as isize;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    let mut neighbourhood = Vec::with_capacity(window * window);
    let mut out = Vec::with_capacity(h * w);
    for row in 0..h as isize {
        for col in 0..w as isize {
            neighbourhood.clear();
            for dr in -r..=r {
                for dc in -r..=r {
                    neighbourhood.push(x.get(clamp(row + dr, h), clamp(col + dc, w)));
                }
            }
            let mid = neighbourhood.len() / 2;
            let (_, median, _) = neighbourhood.select_nth_unstable_by(mid, f64::total_cmp);
            out.push(*median);
        }
    }
    x.with_data(out)
}

/// Separable Gaussian blur, kernel radius `⌈3·std⌉`, half-sample symmetric
/// boundary. The symmetric extension makes the filter preserve the image
/// mean exactly.
pub fn gaussian_denoise(x: &Image, std: f64) -> Result<Image> {
    if !(std > 0.0 && std.is_finite()) {
        return Err(Error::invalid("std", format!("{std} is not > 0")));
    }
    let radius = (3.0 * std).ceil() as isize;
    let raw: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * std * std)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    let kernel: Vec<f64> = raw.into_iter().map(|v| v / sum).collect();

    let (h, w) = x.dims();
    let mut tmp = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            tmp[r * w + c] = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * x.get(r, reflect(c as isize + k as isize - radius, w)))
                .sum();
        }
    }
    let mut out = vec![0.0; h * w];
    for r in 0..h {
        for c in 0..w {
            out[r * w + c] = kernel
                .iter()
                .enumerate()
                .map(|(k, wt)| wt * tmp[reflect(r as isize + k as isize - radius, h) * w + c])
                .sum();
        }
    }
    x.with_data(out)
}

/// Half-sample symmetric index: `… b a | a b c … z | z y …`.
fn reflect(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    let period = 2 * n;
    i = i.rem_euclid(period);
    if i >= n {
        i = period - 1 - i;
    }
    i as usize
}

#[derive(Debug, Clone, Copy)]
pub struct MedianDenoiser {
    pub window: usize,
}

impl Denoiser for MedianDenoiser {
    fn denoise(&self, x: &Image) -> Result<Image> {
        median_denoise(x, self.window)
    }

    fn noise_level(&self) -> f64 {
        self.window as f64
    }

    fn name(&self) -> &str {
        "median"
    }
}

#[derive(Debug, Clone, Copy)]
pub struct GaussianDenoiser {
    pub std: f64,
}

impl Denoiser for GaussianDenoiser {
    fn denoise(&self, x: &Image) -> Result<Image> {
        gaussian_denoise(x, self.std)
    }

    fn noise_level(&self) -> f64 {
        self.std
    }

    fn name(&self) -> &str {
        "gaussian"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constants_are_preserved() {
        let x = Image::filled(7, 9, 42.0);
        assert_eq!(median_denoise(&x, 3).unwrap(), x);
        let g = gaussian_denoise(&x, 1.3).unwrap();
        assert!(g.data().iter().all(|v| (v - 42.0).abs() < 1e-12));
    }

    #[test]
    fn median_removes_salt() {
        let mut data = vec![0.0; 81];
        data[40] = 255.0;
        let x = Image::new(9, 9, data).unwrap();
        assert!(median_denoise(&x, 3).unwrap().data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn median_rejects_even_or_small_windows() {
        let x = Image::zeros(5, 5);
        assert!(median_denoise(&x, 4).is_err());
        assert!(median_denoise(&x, 1).is_err());
    }

    #[test]
    fn gaussian_rejects_nonpositive_std() {
        assert!(gaussian_denoise(&Image::zeros(3, 3), 0.0).is_err());
    }

    #[test]
    fn gaussian_preserves_mean() {
        let x = Image::from_fn(13, 10, |r, c| ((r * 97 + c * 31) % 255) as f64).unwrap();
        // A kernel wider than the image exercises repeated reflection.
        for std in [0.7, 2.0, 5.0] {
            let y = gaussian_denoise(&x, std).unwrap();
            assert!((y.mean() - x.mean()).abs() < 1e-6, "std {std}");
        }
    }

    #[test]
    fn reflect_indices() {
        let got: Vec<usize> = (-3..7).map(|i| reflect(i, 4)).collect();
        assert_eq!(got, vec![2, 1, 0, 0, 1, 2, 3, 3, 2, 1]);
    }
}

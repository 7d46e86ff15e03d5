#![allow(dead_code)]

use phaseret::measurement::Complex64;
use phaseret::Image;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_image(rng: &mut impl Rng, h: usize, w: usize, lo: f64, hi: f64) -> Image {
    Image::from_fn(h, w, |_, _| rng.random_range(lo..hi)).unwrap()
}

pub fn random_complex(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Direct evaluation of `Σ_n x[n]·e^{−2πi(k·r/H + l·c/W)}` for every canvas bin.
pub fn naive_forward(x: &Image, canvas: (usize, usize)) -> Vec<Complex64> {
    let (ch, cw) = canvas;
    let mut out = vec![Complex64::new(0.0, 0.0); ch * cw];
    for k in 0..ch {
        for l in 0..cw {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..x.height() {
                for c in 0..x.width() {
                    let angle = -2.0 * std::f64::consts::PI * ((k * r) as f64 / ch as f64 + (l * c) as f64 / cw as f64);
                    acc += Complex64::from_polar(x.get(r, c), angle);
                }
            }
            out[k * cw + l] = acc;
        }
    }
    out
}

/// The 64×64 desk image `name`, box-downsampled to 32×32.
pub fn desk_32(name: &str) -> Image {
    let path = format!("{}/../../data/desk/{name}.pgm", env!("CARGO_MANIFEST_DIR"));
    let x = phaseret::io::load_image(path).unwrap();
    Image::from_fn(x.height() / 2, x.width() / 2, |r, c| {
        (x.get(2 * r, 2 * c) + x.get(2 * r + 1, 2 * c) + x.get(2 * r, 2 * c + 1) + x.get(2 * r + 1, 2 * c + 1)) / 4.0
    })
    .unwrap()
}

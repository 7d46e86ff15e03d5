//! Removal of the trivial ambiguities of Fourier magnitudes.
//!
//! `|DFT(x)|` is unchanged by circular shifts of `x` and by the point
//! reflection `x(n) → x(−n)`. Reconstructions are mapped back onto the
//! reference frame before scoring.

use rustfft::num_complex::Complex64;

use crate::error::Result;
use crate::fft::Fft2;
use crate::image::Image;

/// Transform applied to a candidate: optional point reflection, then a
/// circular shift by `(rows, cols)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Alignment {
    pub flipped: bool,
    pub shift: (usize, usize),
}

impl Alignment {
    pub fn apply(&self, img: &Image) -> Image {
        let (h, w) = img.dims();
        let (sr, sc) = self.shift;
        let mut data = vec![0.0; h * w];
        for r in 0..h {
            for c in 0..w {
                // out(n) = src(n − s), src = flip ? img(−m) : img(m)
                let mr = (r + h - sr % h) % h;
                let mc = (c + w - sc % w) % w;
                let (ir, ic) = if self.flipped {
                    ((h - mr) % h, (w - mc) % w)
                } else {
                    (mr, mc)
                };
                data[r * w + c] = img.get(ir, ic);
            }
        }
        img.with_data(data).expect("permutation of finite values")
    }
}

/// Best alignment of `candidate` against `reference` under circular shifts
/// and point reflection, by maximal cross-correlation.
pub fn find_alignment(candidate: &Image, reference: &Image) -> Result<Alignment> {
    reference.ensure_same_dims(candidate)?;
    let (h, w) = reference.dims();
    let fft = Fft2::new(h, w);
    let spectrum = |img: &Image| {
        let mut buf: Vec<Complex64> = img.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.forward(&mut buf);
        buf
    };
    let ref_hat = spectrum(reference);

    let identity = Alignment::default();
    let mut best = identity;
    let mut best_score = f64::NEG_INFINITY;
    for flipped in [false, true] {
        let base = Alignment { flipped, shift: (0, 0) }.apply(candidate);
        let cand_hat = spectrum(&base);
        let mut corr: Vec<Complex64> = ref_hat
            .iter()
            .zip(&cand_hat)
            .map(|(r, c)| r * c.conj())
            .collect();
        fft.inverse(&mut corr);
        for (i, v) in corr.iter().enumerate() {
            if v.re > best_score {
                best_score = v.re;
                best = Alignment {
                    flipped,
                    shift: (i / w, i % w),
                };
            }
        }
    }

    // The FFT scores only rank; the final choice is made on exact inner
    // products so the identity is kept on ties.
    let exact = |a: &Alignment| reference.dot(&a.apply(candidate));
    if best != identity && exact(&best) > exact(&identity) {
        Ok(best)
    } else {
        Ok(identity)
    }
}

/// Returns `candidate` mapped onto the frame of `reference`.
pub fn align_to_reference(candidate: &Image, reference: &Image) -> Result<Image> {
    Ok(find_alignment(candidate, reference)?.apply(candidate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pattern(h: usize, w: usize) -> Image {
        Image::from_fn(h, w, |r, c| ((r * 37 + c * c * 11 + r * c * 5) % 251) as f64).unwrap()
    }

    #[test]
    fn identity_is_kept() {
        let x = pattern(12, 10);
        assert_eq!(align_to_reference(&x, &x).unwrap(), x);
    }

    #[test]
    fn undoes_circular_shift() {
        let x = pattern(16, 16);
        let shifted = Alignment { flipped: false, shift: (3, 5) }.apply(&x);
        assert_ne!(shifted, x);
        assert_eq!(align_to_reference(&shifted, &x).unwrap(), x);
    }

    #[test]
    fn undoes_rotation_by_180_degrees() {
        let x = pattern(9, 14);
        let (h, w) = x.dims();
        let rotated = Image::from_fn(h, w, |r, c| x.get(h - 1 - r, w - 1 - c)).unwrap();
        assert_eq!(align_to_reference(&rotated, &x).unwrap(), x);
    }

    #[test]
    fn constant_candidate_is_left_alone() {
        let x = pattern(8, 8);
        let flat = Image::filled(8, 8, 3.0);
        assert_eq!(align_to_reference(&flat, &x).unwrap(), flat);
    }
}

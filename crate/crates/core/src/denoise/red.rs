//! Regularization by denoising and its proximal maps.

use crate::denoise::Denoiser;
use crate::error::{Error, Result};
use crate::image::Image;

/// `|u|` below which the quotient `D(u)²/u` in [`prox_l2`] is replaced by
/// `D(u)`.
pub const DIVISION_GUARD: f64 = 0.5;

/// RED regularizer `(λ/2)·⟨x, x − D(x)⟩`.
pub fn red_value(x: &Image, denoiser: &dyn Denoiser, lambda: f64) -> Result<f64> {
    let d = denoiser.denoise(x)?;
    let inner: f64 = x.data().iter().zip(d.data()).map(|(a, b)| a * (a - b)).sum();
    Ok(0.5 * lambda * inner)
}

/// Squared-residual regularizer `(λ/2)·‖x − D(x)‖²`.
pub fn l2_value(x: &Image, denoiser: &dyn Denoiser, lambda: f64) -> Result<f64> {
    let d = denoiser.denoise(x)?;
    let sq: f64 = x.data().iter().zip(d.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(0.5 * lambda * sq)
}

fn check(lambda: f64, tau: f64, iters: usize) -> Result<()> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::invalid("lambda", format!("{lambda} is not ≥ 0")));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau", format!("{tau} is not > 0")));
    }
    if iters == 0 {
        return Err(Error::invalid("iters", "must be ≥ 1"));
    }
    Ok(())
}

/// Fixed-point proximal step for the RED term:
/// `x_0 = x̂`, `x_j = (x̂ + λτ·D(x_{j−1})) / (1 + λτ)`, returning `x_T`.
pub fn prox_red(x_hat: &Image, denoiser: &dyn Denoiser, lambda: f64, tau: f64, iters: usize) -> Result<Image> {
    check(lambda, tau, iters)?;
    let lt = lambda * tau;
    let mut x = x_hat.clone();
    for _ in 0..iters {
        let d = denoiser.denoise(&x)?;
        let next = x_hat
            .data()
            .iter()
            .zip(d.data())
            .map(|(xh, dv)| (xh + lt * dv) / (1.0 + lt))
            .collect();
        x = x_hat.with_data(next)?;
    }
    Ok(x)
}

/// Fixed-point proximal step for `(λ/2)‖x − D(x)‖²`, valid for denoisers
/// with `∇D(x)·x = D(x)`:
/// `u_j = (x̂ + λτ·(2D(u) − D(u)⊙D(u)⊘u)) / (λτ + 1)` applied `iters` times
/// from `u = x̂`.
pub fn prox_l2(x_hat: &Image, denoiser: &dyn Denoiser, lambda: f64, tau: f64, iters: usize) -> Result<Image> {
    check(lambda, tau, iters)?;
    let lt = lambda * tau;
    let mut u = x_hat.clone();
    for _ in 0..iters {
        let d = denoiser.denoise(&u)?;
        let next = x_hat
            .data()
            .iter()
            .zip(d.data())
            .zip(u.data())
            .map(|((xh, dv), uv)| {
                let quotient = if uv.abs() < DIVISION_GUARD { *dv } else { dv * dv / uv };
                (xh + lt * (2.0 * dv - quotient)) / (lt + 1.0)
            })
            .collect();
        u = x_hat.with_data(next)?;
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::denoise::{IdentityDenoiser, ZeroDenoiser};

    fn sample() -> Image {
        Image::from_fn(6, 5, |r, c| 10.0 + (r * 5 + c) as f64 * 3.5).unwrap()
    }

    #[test]
    fn red_value_special_denoisers() {
        let x = sample();
        assert_eq!(red_value(&x, &IdentityDenoiser, 0.7).unwrap(), 0.0);
        let expected = 0.35 * x.dot(&x);
        assert!((red_value(&x, &ZeroDenoiser, 0.7).unwrap() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn zero_denoiser_closed_forms() {
        let x = sample();
        for prox in [prox_red, prox_l2] {
            let y = prox(&x, &ZeroDenoiser, 0.5, 2.0, 1).unwrap();
            for (a, b) in x.data().iter().zip(y.data()) {
                assert!((a / 2.0 - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn guard_replaces_quotient_near_zero() {
        let x = Image::new(1, 2, vec![0.0, 1e-9]).unwrap();
        let y = prox_l2(&x, &IdentityDenoiser, 1.0, 1.0, 1).unwrap();
        // guarded: (x̂ + λτ·D(u)) / (λτ + 1) = x̂ when D is the identity
        assert_eq!(y.data(), x.data());
    }

    #[test]
    fn rejects_bad_parameters() {
        let x = sample();
        assert!(prox_red(&x, &IdentityDenoiser, -1.0, 1.0, 1).is_err());
        assert!(prox_red(&x, &IdentityDenoiser, 1.0, 0.0, 1).is_err());
        assert!(prox_l2(&x, &IdentityDenoiser, 1.0, 1.0, 0).is_err());
    }
}

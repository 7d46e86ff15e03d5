//! Amplitude loss `F(x) = Σ (|⟨A_i, x⟩| − b_i)²` and its difference-of-convex
//! split `F = F1 − F2` with `F1 = ‖Ax‖² + ‖b‖²`, `F2 = 2 Σ b_i |⟨A_i, x⟩|`.
//!
//! Losses are returned unweighted. Gradients carry the fidelity weight
//! `1/(2σ²)`, i.e. they are gradients of `F1/(2σ²)` and `F2/(2σ²)`.

use crate::error::{Error, Result};
use crate::image::Image;
use crate::measurement::{Complex64, MeasurementOperator, Observation};

#[derive(Debug, Clone)]
pub struct LossContext {
    op: MeasurementOperator,
    b: Vec<f64>,
    sigma: f64,
}

/// Unit-modulus phase of `z`, with `phase(0) = 1`.
#[inline]
pub fn phase(z: Complex64) -> Complex64 {
    let m = z.norm();
    if m == 0.0 {
        Complex64::new(1.0, 0.0)
    } else {
        z / m
    }
}

impl LossContext {
    /// `sigma = ∞` is accepted and switches the data term off.
    pub fn new(op: MeasurementOperator, b: Vec<f64>, sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::invalid("sigma", format!("{sigma} is not > 0")));
        }
        if b.len() != op.measurement_count() {
            return Err(Error::dims(op.measurement_count(), b.len()));
        }
        if b.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("b", "amplitudes must be finite and nonnegative"));
        }
        Ok(Self { op, b, sigma })
    }

    pub fn from_observation(op: MeasurementOperator, obs: &Observation) -> Result<Self> {
        obs.check_operator(&op)?;
        Self::new(op, obs.amplitudes.clone(), obs.sigma_w)
    }

    pub fn op(&self) -> &MeasurementOperator {
        &self.op
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.b
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `1/σ²`; the gradient of `F/(2σ²)` is this times `Aᴴ(Ax − b∘phase(Ax))`.
    pub fn weight(&self) -> f64 {
        1.0 / (self.sigma * self.sigma)
    }

    fn project(&self, x: &Image) -> Result<Vec<Complex64>> {
        self.op.forward(x)
    }

    pub fn loss_f(&self, x: &Image) -> Result<f64> {
        Ok(self.loss_f_data(x.data()))
    }

    pub fn loss_f1(&self, x: &Image) -> Result<f64> {
        let ax = self.project(x)?;
        Ok(ax.iter().map(|z| z.norm_sqr()).sum::<f64>() + self.b.iter().map(|v| v * v).sum::<f64>())
    }

    pub fn loss_f2(&self, x: &Image) -> Result<f64> {
        let ax = self.project(x)?;
        Ok(2.0 * ax.iter().zip(&self.b).map(|(z, b)| b * z.norm()).sum::<f64>())
    }

    /// `(1/σ²)·Aᴴ A x`.
    pub fn grad_f1(&self, x: &Image) -> Result<Image> {
        let ax = self.project(x)?;
        let w = self.weight();
        let g = self.op.adjoint_data(&ax);
        Image::new(x.height(), x.width(), g.into_iter().map(|v| w * v).collect())
    }

    /// `(1/σ²)·Aᴴ(b ∘ phase(Ax))`.
    pub fn subgrad_f2(&self, x: &Image) -> Result<Image> {
        let ax = self.project(x)?;
        Image::new(x.height(), x.width(), self.subgrad_f2_from(&ax))
    }

    /// Lipschitz constant of `grad_f1`: `‖A‖²/σ²`.
    pub fn lipschitz_bound(&self) -> f64 {
        self.op.operator_norm_sq() * self.weight()
    }

    pub(crate) fn subgrad_f2_from(&self, ax: &[Complex64]) -> Vec<f64> {
        let w = self.weight();
        let z: Vec<Complex64> = ax.iter().zip(&self.b).map(|(z, &b)| phase(*z) * b).collect();
        self.op.adjoint_data(&z).into_iter().map(|v| w * v).collect()
    }

    pub(crate) fn loss_from(&self, ax: &[Complex64]) -> f64 {
        ax.iter()
            .zip(&self.b)
            .map(|(z, b)| {
                let d = z.norm() - b;
                d * d
            })
            .sum()
    }

    pub(crate) fn loss_f_data(&self, x: &[f64]) -> f64 {
        self.loss_from(&self.op.forward_data(x))
    }

    /// Weighted data term `F/(2σ²)` and its subgradient
    /// `(1/σ²)·Aᴴ(Ax − b∘phase(Ax))` from one forward/adjoint pair.
    pub(crate) fn data_value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let ax = self.op.forward_data(x);
        let w = self.weight();
        let value = 0.5 * w * self.loss_from(&ax);
        let residual: Vec<Complex64> = ax.iter().zip(&self.b).map(|(z, &b)| z - phase(*z) * b).collect();
        let grad = self.op.adjoint_data(&residual).into_iter().map(|v| w * v).collect();
        (value, grad)
    }

    pub(crate) fn data_value(&self, x: &[f64]) -> f64 {
        0.5 * self.weight() * self.loss_f_data(x)
    }
}

//! Difference-of-convex algorithm for `F = F1 − F2`.

use crate::error::{Error, Result};
use crate::image::{norm_sq, Image};
use crate::objective::LossContext;

/// Successive iterates closer than this (in Euclidean norm) count as a fixed point.
pub const DCA_FIXED_POINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DcaOutcome {
    pub x: Vec<f64>,
    /// Outer iterations performed.
    pub iterations: usize,
    /// Whether the fixed-point test triggered before the budget ran out.
    pub converged: bool,
    /// `x_0, x_1, …` in order.
    pub path: Vec<Vec<f64>>,
}

/// Runs `u_k ∈ ∂F2(x_k)`, `x_{k+1} = argmin F1(x) − ⟨u_k, x⟩`.
///
/// `f1_min` receives `u_k` and must return the minimizer of the linearized
/// problem.
pub fn dca_solve(
    mut f1_min: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    mut subgrad_f2: impl FnMut(&[f64]) -> Result<Vec<f64>>,
    x0: &[f64],
    outer_iters: usize,
) -> Result<DcaOutcome> {
    let mut x = x0.to_vec();
    let mut path = vec![x.clone()];
    for k in 1..=outer_iters {
        let u = subgrad_f2(&x)?;
        if u.len() != x.len() {
            return Err(Error::dims(x.len(), u.len()));
        }
        let next = f1_min(&u)?;
        if next.len() != x.len() {
            return Err(Error::dims(x.len(), next.len()));
        }
        let step = next.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>();
        path.push(next.clone());
        x = next;
        if norm_sq(&step).sqrt() <= DCA_FIXED_POINT_TOL {
            return Ok(DcaOutcome {
                x,
                iterations: k,
                converged: true,
                path,
            });
        }
    }
    Ok(DcaOutcome {
        x,
        iterations: outer_iters,
        converged: false,
        path,
    })
}

/// Approximately minimizes `(1/2σ²)F1(y) − ⟨(1/2σ²)∇F2(y_k), y − y_k⟩` by
/// gradient descent from `y_k` with step `σ²/c`.
///
/// Because `AᴴA = c·I` the first step already lands on the minimizer; the
/// remaining steps stop as soon as the gradient vanishes.
pub fn dca_inner_solve(ctx: &LossContext, y_k: &Image, inner_iters: usize) -> Result<Image> {
    if inner_iters == 0 {
        return Err(Error::invalid("inner_iters", "must be ≥ 1"));
    }
    let weight = ctx.weight();
    if weight == 0.0 {
        return Ok(y_k.clone());
    }
    let u = ctx.subgrad_f2(y_k)?;
    let step = 1.0 / ctx.lipschitz_bound();
    let mut y = y_k.data().to_vec();
    for _ in 0..inner_iters {
        let current = Image::new(y_k.height(), y_k.width(), y.clone())?;
        let g1 = ctx.grad_f1(&current)?;
        let grad: Vec<f64> = g1.data().iter().zip(u.data()).map(|(a, b)| a - b).collect();
        let grad_norm = norm_sq(&grad).sqrt();
        let scale = norm_sq(u.data()).sqrt().max(norm_sq(g1.data()).sqrt());
        if grad_norm <= 1e-14 * scale {
            break;
        }
        for (v, g) in y.iter_mut().zip(&grad) {
            *v -= step * g;
        }
    }
    y_k.with_data(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_concave_part_is_one_step() {
        let c = vec![1.0, -2.0, 3.5];
        let cc = c.clone();
        let out = dca_solve(move |u| Ok(u.iter().zip(&cc).map(|(u, c)| c + u).collect()), |x| Ok(vec![0.0; x.len()]), &[0.0; 3], 10).unwrap();
        assert_eq!(out.x, c);
        assert_eq!(out.iterations, 2);
        assert!(out.converged);
    }

    fn scalar(x0: f64) -> DcaOutcome {
        // F1 = x² + 1, F2 = 2|x|; argmin F1 − u·x = u/2, ∂F2(x) = 2·sign(x).
        dca_solve(|u| Ok(vec![u[0] / 2.0]), |x| Ok(vec![2.0 * if x[0] >= 0.0 { 1.0 } else { -1.0 }]), &[x0], 50).unwrap()
    }

    #[test]
    fn scalar_phase_retrieval_positive() {
        let out = scalar(0.5);
        assert_eq!(out.x, vec![1.0]);
        assert!(out.converged);
    }

    #[test]
    fn scalar_phase_retrieval_negative() {
        assert_eq!(scalar(-0.5).x, vec![-1.0]);
    }

    #[test]
    fn scalar_objective_monotone() {
        let f = |x: f64| (x.abs() - 1.0).powi(2);
        for x0 in [0.5, -0.3, 4.0, 1e-3] {
            let out = scalar(x0);
            for w in out.path.windows(2) {
                assert!(f(w[1][0]) <= f(w[0][0]));
            }
        }
    }

    #[test]
    fn oracle_failure_propagates() {
        let err = dca_solve(|_| Err(Error::invalid("oracle", "boom")), |x| Ok(x.to_vec()), &[1.0], 3);
        assert!(err.is_err());
    }
}

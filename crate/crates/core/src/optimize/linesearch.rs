//! Non-monotone backtracking: a step is accepted relative to the worst of
//! the last `M` objective values instead of the current one.

use crate::error::{Error, Result};
use crate::image::{dot, norm_sq};
use crate::optimize::{axpy_diff, LineSearchRecord};

/// Step-size halvings allowed before giving up.
pub const MAX_HALVINGS: usize = 50;

/// `f_new < max(history) + ⟨x_new − x_old, ∇f(x_old)⟩ + ‖x_new − x_old‖²/(2τ)`.
pub fn nonmonotone_accept(history: &[f64], f_new: f64, x_new: &[f64], x_old: &[f64], grad_old: &[f64], tau: f64) -> bool {
    acceptance_record(history, f_new, x_new, x_old, grad_old).holds(tau)
}

pub(crate) fn acceptance_record(
    history: &[f64],
    f_new: f64,
    x_new: &[f64],
    x_old: &[f64],
    grad_old: &[f64],
) -> LineSearchRecord {
    assert!(!history.is_empty(), "line-search history must be nonempty");
    let reference = history.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = axpy_diff(x_new, x_old);
    LineSearchRecord {
        f_new,
        reference,
        inner: dot(&step, grad_old),
        dist_sq: norm_sq(&step),
    }
}

/// Halves `tau` and recomputes the step until `accept(x, tau)` holds.
///
/// Returns the accepted point and step size, or
/// [`Error::LineSearchFloor`] after [`MAX_HALVINGS`] halvings.
pub fn backtrack<X>(
    mut step: impl FnMut(f64) -> Result<X>,
    mut accept: impl FnMut(&X, f64) -> Result<bool>,
    tau: f64,
) -> Result<(X, f64)> {
    let mut tau = tau;
    let mut x = step(tau)?;
    let mut halvings = 0;
    while !accept(&x, tau)? {
        if halvings == MAX_HALVINGS {
            return Err(Error::LineSearchFloor { halvings });
        }
        halvings += 1;
        tau /= 2.0;
        x = step(tau)?;
    }
    Ok((x, tau))
}

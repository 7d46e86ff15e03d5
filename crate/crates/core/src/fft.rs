//! Unnormalized 2-D DFT on row-major complex grids.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub(crate) struct Fft2 {
    rows: usize,
    cols: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            rows,
            cols,
            row_fwd: planner.plan_fft_forward(cols),
            row_inv: planner.plan_fft_inverse(cols),
            col_fwd: planner.plan_fft_forward(rows),
            col_inv: planner.plan_fft_inverse(rows),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rows * self.cols
    }

    /// In-place forward transform, `X[k] = Σ x[n] e^{-2πi k·n/N}`.
    pub(crate) fn forward(&self, buf: &mut [Complex64]) {
        self.process(buf, &self.row_fwd, &self.col_fwd);
    }

    /// In-place inverse transform without the `1/N` factor.
    pub(crate) fn inverse(&self, buf: &mut [Complex64]) {
        self.process(buf, &self.row_inv, &self.col_inv);
    }

    fn process(&self, buf: &mut [Complex64], row: &Arc<dyn Fft<f64>>, col: &Arc<dyn Fft<f64>>) {
        assert_eq!(buf.len(), self.len());
        let scratch_len = row
            .get_inplace_scratch_len()
            .max(col.get_inplace_scratch_len());
        let mut scratch = vec![Complex64::default(); scratch_len];
        row.process_with_scratch(buf, &mut scratch[..row.get_inplace_scratch_len()]);

        let mut column = vec![Complex64::default(); self.rows];
        for c in 0..self.cols {
            for r in 0..self.rows {
                column[r] = buf[r * self.cols + c];
            }
            col.process_with_scratch(&mut column, &mut scratch[..col.get_inplace_scratch_len()]);
            for r in 0..self.rows {
                buf[r * self.cols + c] = column[r];
            }
        }
    }
}

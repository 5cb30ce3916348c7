//! N-dimensional transforms on row-major arrays.
//!
//! The physical grid is centered (`x_a = -L/2 + a*L/n`), so relative to a
//! plain DFT each coefficient picks up `exp(-i k_j (-L/2)) = (-1)^j`. The
//! forward transform carries the `1/N` factor.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// In-place unnormalized transform along every axis.
fn fft_axes(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    debug_assert_eq!(total, data.len());
    let mut stride = 1;
    for axis in (0..shape.len()).rev() {
        let len = shape[axis];
        let fft = plan(len, direction);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        if stride == 1 {
            for line in data.chunks_exact_mut(len) {
                fft.process_with_scratch(line, &mut scratch);
            }
        } else {
            let block = len * stride;
            let mut line = vec![Complex64::new(0.0, 0.0); len];
            for outer in (0..total).step_by(block) {
                for inner in 0..stride {
                    let base = outer + inner;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
        stride *= len;
    }
}

/// Multiply entry `idx` by `(-1)^(sum of its multi-index)`.
fn apply_checkerboard(data: &mut [Complex64], shape: &[usize]) {
    let mut index = vec![0usize; shape.len()];
    for v in data.iter_mut() {
        if index.iter().sum::<usize>() % 2 == 1 {
            *v = -*v;
        }
        for axis in (0..shape.len()).rev() {
            index[axis] += 1;
            if index[axis] < shape[axis] {
                break;
            }
            index[axis] = 0;
        }
    }
}

pub(crate) fn forward(values: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
    let mut data = values.to_vec();
    fft_axes(&mut data, shape, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
    apply_checkerboard(&mut data, shape);
    data
}

pub(crate) fn inverse(coeffs: &[Complex64], shape: &[usize]) -> Vec<Complex64> {
    let mut data = coeffs.to_vec();
    apply_checkerboard(&mut data, shape);
    fft_axes(&mut data, shape, FftDirection::Inverse);
    data
}

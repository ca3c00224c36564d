//! Unitary DFT: both directions carry a 1/sqrt(K) factor, so
//! forward(inverse(x)) = x and signal energy is preserved.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// exp(-2*pi*j*n*k/K) kernel: time to frequency.
    Forward,
    /// exp(+2*pi*j*n*k/K) kernel: frequency to time.
    Inverse,
}

/// Reusable forward/inverse transform pair for one size.
pub struct DftPlan {
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl DftPlan {
    pub fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// In-place transform with the unitary 1/sqrt(K) scaling.
    pub fn process(&self, buf: &mut [Complex64], direction: Direction) {
        assert_eq!(buf.len(), self.size, "buffer length must match plan size");
        match direction {
            Direction::Forward => self.forward.process(buf),
            Direction::Inverse => self.inverse.process(buf),
        }
        let scale = 1.0 / (self.size as f64).sqrt();
        for v in buf.iter_mut() {
            *v *= scale;
        }
    }
}

/// One-shot unitary DFT of `x`.
pub fn unitary_dft(x: &[Complex64], direction: Direction) -> Vec<Complex64> {
    let plan = DftPlan::new(x.len());
    let mut buf = x.to_vec();
    plan.process(&mut buf, direction);
    buf
}

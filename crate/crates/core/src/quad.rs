//! Quadrature helpers on uniform grids.

use alloc::vec::Vec;

/// A uniform grid `start + i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub len: usize,
}

impl UniformGrid {
    /// `len` points spanning `[lo, hi]` inclusive. A single point sits at `lo`.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Self {
        let step = if len > 1 { (hi - lo) / (len - 1) as f64 } else { 0.0 };
        Self { start: lo, step, len }
    }

    #[inline]
    pub fn at(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.at(self.len.saturating_sub(1))
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.at(i)).collect()
    }

    /// Trapezoid weight of sample `i`.
    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if self.len < 2 {
            0.0
        } else if i == 0 || i + 1 == self.len {
            0.5 * self.step
        } else {
            self.step
        }
    }
}

/// Trapezoid rule for samples on a uniform grid with spacing `h`.
pub fn trapezoid(samples: &[f64], h: f64) -> f64 {
    match samples.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = samples[1..n - 1].iter().sum();
            h * (inner + 0.5 * (samples[0] + samples[n - 1]))
        }
    }
}

/// Running trapezoid integral; `out[0] = 0`.
pub fn cumulative_trapezoid(samples: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    for (i, &s) in samples.iter().enumerate() {
        if i > 0 {
            acc += 0.5 * h * (samples[i - 1] + s);
        }
        out.push(acc);
    }
    out
}

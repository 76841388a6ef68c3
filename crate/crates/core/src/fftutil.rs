//! Centered discrete Fourier transforms on symmetric grids.
//!
//! Grid convention used throughout: a length-`n` axis samples t_j =
//! (j - n/2) h (integer division), so t = 0 is always a sample; the dual
//! axis samples xi_m = (m - n/2) * (2 pi / (n h)). The centered transform
//!
//!   X_m = sum_j x_j exp(-2 pi i (m - c)(j - c) / n),   c = n/2,
//!
//! is reduced to a standard FFT by pre/post phase twiddles from expanding
//! (m - c)(j - c) = m j - c j - c m + c^2.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Index of the origin sample on a length-`n` centered axis.
pub fn center(n: usize) -> usize {
    n / 2
}

/// Dual grid spacing for a length-`n` axis with spacing `h`.
pub fn dual_spacing(n: usize, h: f64) -> f64 {
    2.0 * std::f64::consts::PI / (n as f64 * h)
}

/// Planned centered DFT of a fixed length.
pub struct CenteredDft {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    /// exp(+2 pi i c j / n)
    twiddle: Vec<Complex64>,
    /// exp(-2 pi i c^2 / n)
    corner: Complex64,
}

impl CenteredDft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "empty transform");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let c = center(n) as f64;
        let twiddle = (0..n)
            .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * c * j as f64 / n as f64))
            .collect();
        let corner = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * c * c / n as f64);
        CenteredDft {
            n,
            forward,
            inverse,
            twiddle,
            corner,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place centered forward transform (no 1/n normalization).
    pub fn forward_slice(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        for (v, t) in data.iter_mut().zip(&self.twiddle) {
            *v *= t;
        }
        self.forward.process(data);
        for (v, t) in data.iter_mut().zip(&self.twiddle) {
            *v *= t * self.corner;
        }
    }

    /// In-place centered inverse transform, normalized so that
    /// inverse(forward(x)) = x.
    pub fn inverse_slice(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.n);
        for (v, t) in data.iter_mut().zip(&self.twiddle) {
            *v *= t.conj();
        }
        self.inverse.process(data);
        let scale = 1.0 / self.n as f64;
        for (v, t) in data.iter_mut().zip(&self.twiddle) {
            *v *= t.conj() * self.corner.conj() * scale;
        }
    }
}

/// Applies a centered DFT along one axis of a row-major array of the given
/// shape, in place.
pub fn transform_axis(
    data: &mut [Complex64],
    shape: &[usize],
    axis: usize,
    dft: &CenteredDft,
    inverse: bool,
) {
    assert!(axis < shape.len());
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total);
    let len = shape[axis];
    assert_eq!(dft.len(), len);
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * stride * len + i;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            if inverse {
                dft.inverse_slice(&mut line);
            } else {
                dft.forward_slice(&mut line);
            }
            for (k, v) in line.iter().enumerate() {
                data[base + k * stride] = *v;
            }
        }
    }
}

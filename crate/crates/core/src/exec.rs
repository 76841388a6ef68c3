//! Execution strategy and deterministic reductions.
//!
//! Every data-parallel loop in the crate goes through this module so that a
//! single switch selects between the rayon thread pool and a plain sequential
//! loop. Reductions are always performed by pairwise summation over the
//! *ordered* mapped values, so parallel and sequential runs produce
//! bit-identical results regardless of thread count.

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for data-parallel kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Sequential,
    /// Uses the rayon pool when the `parallel` feature is enabled; otherwise
    /// behaves exactly like `Sequential`.
    Parallel,
}

impl Default for Mode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Mode::Parallel
        } else {
            Mode::Sequential
        }
    }
}

/// Maps `f` over `0..n` preserving index order.
pub fn map_indexed<R, F>(n: usize, mode: Mode, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match mode {
        Mode::Sequential => (0..n).map(f).collect(),
        Mode::Parallel => {
            #[cfg(feature = "parallel")]
            {
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}

/// Pairwise (cascade) summation: deterministic and far more accurate than a
/// running sum for the long reductions used in quadrature and grid norms.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Complex pairwise summation with the same splitting as [`pairwise_sum`].
pub fn pairwise_sum_c(values: &[Complex64]) -> Complex64 {
    if values.len() <= 32 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum_c(&values[..mid]) + pairwise_sum_c(&values[mid..])
}

/// Maps `f` over `0..n` (possibly in parallel) and pairwise-sums the results
/// in index order.
pub fn map_sum<F>(n: usize, mode: Mode, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let vals = map_indexed(n, mode, f);
    pairwise_sum(&vals)
}

/// Complex variant of [`map_sum`].
pub fn map_sum_c<F>(n: usize, mode: Mode, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync + Send,
{
    let vals = map_indexed(n, mode, f);
    pairwise_sum_c(&vals)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..17).map(|i| i as f64 * 0.1).collect();
        let naive: f64 = v.iter().sum();
        assert!((pairwise_sum(&v) - naive).abs() < 1e-12);
    }

    #[test]
    fn parallel_and_sequential_reductions_are_bit_identical() {
        let f = |i: usize| ((i as f64) * 0.731).sin() / (1.0 + i as f64);
        let a = map_sum(100_000, Mode::Sequential, f);
        let b = map_sum(100_000, Mode::Parallel, f);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn map_indexed_preserves_order() {
        let v = map_indexed(1000, Mode::Parallel, |i| i);
        assert!(v.iter().enumerate().all(|(i, &x)| i == x));
    }
}

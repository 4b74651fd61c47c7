//! Data-parallel map helper.
//!
//! Sweeps and batch experiments in this crate are embarrassingly parallel;
//! with the `parallel` feature (default) they fan out over rayon, otherwise
//! they fall back to a plain sequential loop. Both entry points are kept
//! public so benchmarks can compare them on the same workload.

/// Maps `f` over `items`, in parallel when the `parallel` feature is enabled.
#[cfg(feature = "parallel")]
pub fn parallel_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items` sequentially (fallback when `parallel` is disabled).
#[cfg(not(feature = "parallel"))]
pub fn parallel_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    sequential_map(items, f)
}

/// Sequential reference implementation of [`parallel_map`].
pub fn sequential_map<T, U>(items: &[T], f: impl Fn(&T) -> U) -> Vec<U> {
    items.iter().map(f).collect()
}

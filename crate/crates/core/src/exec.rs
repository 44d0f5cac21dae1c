//! Execution policy for the data-parallel loops (grid-line solves, region
//! scans, convergence ladders).
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] silently
//! runs the sequential path, so callers never need their own `cfg` guards.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// True when work will actually be spread over the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Applies `f(chunk_index, chunk)` to consecutive `chunk_len`-sized pieces of `data`.
pub fn for_each_chunk_mut<F>(exec: Execution, data: &mut [f64], chunk_len: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        data.par_chunks_mut(chunk_len)
            .enumerate()
            .for_each(|(k, c)| f(k, c));
        return;
    }
    let _ = exec;
    data.chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(k, c)| f(k, c));
}

/// Evaluates `f` on `0..n` and returns the results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

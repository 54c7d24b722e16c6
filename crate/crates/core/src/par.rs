//! Index-space mapping helpers. With the `parallel` feature the work is
//! spread over the current rayon pool; without it everything runs on the
//! calling thread. Results are collected in index order either way, so
//! outputs never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Evaluates `f` for every index in `0..n` and collects the results in order.
#[cfg(feature = "parallel")]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indices<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Maps over a slice, preserving order.
#[cfg(feature = "parallel")]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_slice<S, T, F>(items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Runs `f` with at most `jobs` worker threads. `jobs == 0` means the
/// default pool size.
#[cfg(feature = "parallel")]
pub fn with_jobs<T, F>(jobs: usize, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    if jobs == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_jobs<T, F>(_jobs: usize, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    f()
}

//! Parallel/sequential dispatch for the data-parallel sweeps.
//!
//! Every sweep maps an index range to per-index results and concatenates them
//! in index order, so the parallel and sequential paths produce identical
//! output. With the `parallel` feature disabled the parallel mode silently
//! degrades to the sequential loop.

/// Execution mode for the grid classification and seed refinement sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Parallelism {
    /// Plain loop on the calling thread.
    Sequential,
    /// Rayon work-stealing pool (requires the `parallel` feature; otherwise
    /// falls back to the sequential loop).
    #[default]
    Parallel,
}

/// Caps the worker pool used by parallel sweeps. First call wins for the
/// whole process; calling again (or after the pool is already in use)
/// returns an error. Without the `parallel` feature this only validates `n`.
pub fn set_worker_cap(n: usize) -> crate::Result<()> {
    if n == 0 {
        return Err(crate::Error::InvalidInput(
            "worker cap must be at least 1".to_string(),
        ));
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| crate::Error::InvalidInput(format!("worker pool: {e}")))?;
    }
    Ok(())
}

/// Maps `0..n` through `f`, returning results in index order.
pub(crate) fn map_indexed<T, F>(n: usize, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if mode == Parallelism::Parallel {
            return (0..n).into_par_iter().map(f).collect();
        }
    }
    let _ = mode;
    (0..n).map(f).collect()
}

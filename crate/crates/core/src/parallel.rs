//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the per-face and per-cell loops of
//! a step run on the rayon pool; otherwise everything is sequential. Both
//! paths produce bit-identical results since every element is computed
//! independently.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Rayon pool; same as `Sequential` when built without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    /// Parallel when the feature is on and the pool has more than one thread.
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        if rayon::current_num_threads() > 1 {
            return Execution::Parallel;
        }
        Execution::Sequential
    }
}

pub(crate) fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..n).into_par_iter().with_min_len(MIN_CHUNK).map(f).collect(),
        _ => (0..n).map(f).collect(),
    }
}

/// Like [`map_indexed`] but stops at the lowest failing index.
pub(crate) fn try_map_indexed<T, E, F>(exec: Execution, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    // Collect first so the reported error does not depend on scheduling.
    map_indexed(exec, n, f).into_iter().collect()
}

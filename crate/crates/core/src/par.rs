//! Index-parallel map with a sequential fallback.

use crate::Execution;

/// Evaluates `f(0..n)` and returns the results in index order, regardless of
/// how the work was scheduled.
pub(crate) fn map_indexed<T, F>(execution: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Like [`map_indexed`] but stops at the first error (in index order).
pub(crate) fn try_map_indexed<T, E, F>(execution: Execution, n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(execution, n, f).into_iter().collect()
}

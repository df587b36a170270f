//! Deterministic fan-out: work is split by index and the results are
//! combined in index order, so outputs never depend on the worker count.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Send + Sync) -> Vec<T> {
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T: Send>(count: usize, f: impl Fn(usize) -> T + Send + Sync) -> Vec<T> {
    (0..count).map(f).collect()
}

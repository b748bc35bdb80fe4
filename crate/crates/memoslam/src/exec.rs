//! Chunked execution: data-parallel with rayon or sequential, with identical
//! results either way.
//!
//! Work is split into fixed-size chunks by index; each chunk produces its own
//! result which is reduced in chunk order afterwards. Because the chunking
//! does not depend on the thread count, results are bit-identical between the
//! sequential path, the rayon path, and any number of threads.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to evaluate a chunked batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parallelism {
    Sequential,
    /// Rayon work-stealing over chunks. Falls back to sequential when the
    /// crate is built without the `parallel` feature.
    Rayon,
}

impl Parallelism {
    pub fn from_flag(parallel: bool) -> Self {
        if parallel {
            Parallelism::Rayon
        } else {
            Parallelism::Sequential
        }
    }
}

/// Splits `0..n_items` into `ceil(n/chunk_size)` contiguous ranges and maps
/// `f` over them, returning results in chunk order.
pub fn map_chunks<T, F>(
    n_items: usize,
    chunk_size: usize,
    mode: Parallelism,
    f: F,
) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<usize>) -> T + Sync + Send,
{
    assert!(chunk_size > 0);
    let ranges: Vec<std::ops::Range<usize>> = (0..n_items)
        .step_by(chunk_size)
        .map(|start| start..(start + chunk_size).min(n_items))
        .collect();
    match mode {
        Parallelism::Sequential => ranges.into_iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Parallelism::Rayon => ranges.into_par_iter().map(f).collect(),
        #[cfg(not(feature = "parallel"))]
        Parallelism::Rayon => ranges.into_iter().map(f).collect(),
    }
}

//! Data-parallel batch helpers with a sequential fallback.
//!
//! Every batch loop in the crate goes through [`map_indexed`], so results are
//! collected in index order no matter how work is scheduled. With the
//! `parallel` feature off, [`Exec::Parallel`] silently runs sequentially.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Smallest run of items handed to one rayon task.
#[cfg(feature = "parallel")]
const MIN_SPLIT: usize = 8;

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    match exec {
        Exec::Parallel => (0..n).into_par_iter().with_min_len(MIN_SPLIT).map(f).collect(),
        Exec::Sequential => (0..n).map(f).collect(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(_exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sums fixed-size chunks of `0..n` in parallel and merges them in chunk order.
pub fn fold_chunks<A, F, M>(exec: Exec, n: usize, chunk: usize, f: F, merge: M) -> Option<A>
where
    A: Send,
    F: Fn(std::ops::Range<usize>) -> A + Sync + Send,
    M: Fn(A, A) -> A,
{
    let chunk = chunk.max(1);
    let chunks = n.div_ceil(chunk);
    map_indexed(exec, chunks, |c| f(c * chunk..((c + 1) * chunk).min(n)))
        .into_iter()
        .reduce(merge)
}

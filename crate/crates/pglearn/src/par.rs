//! Deterministic parallel accumulation.
//!
//! Reductions over observations run on fixed chunk boundaries and are
//! combined in chunk order, so a result never depends on the number of
//! worker threads.

use rayon::prelude::*;
use std::ops::Range;

/// Maps fixed chunks of `0..count` in parallel and returns the per-chunk
/// results in order.
pub(crate) fn par_chunk_reduce<T, F>(count: usize, chunk: usize, map_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let chunk = chunk.max(1);
    let ranges: Vec<Range<usize>> = (0..count)
        .step_by(chunk)
        .map(|start| start..(start + chunk).min(count))
        .collect();
    ranges.into_par_iter().map(map_chunk).collect()
}

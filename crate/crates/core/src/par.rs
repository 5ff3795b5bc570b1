//! Data-parallel bridge. With the `parallel` feature the closures run on
//! rayon; without it the same code runs sequentially. Results come back in
//! input order either way, so everything built on top is deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub(crate) fn map_ordered<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Split `[lo, hi)` into chunks of at most `chunk` elements, in order.
pub(crate) fn split_range(lo: u64, hi: u64, chunk: u64) -> Vec<(u64, u64)> {
    assert!(chunk >= 1);
    let mut out = Vec::new();
    let mut at = lo;
    while at < hi {
        let end = at.saturating_add(chunk).min(hi);
        out.push((at, end));
        at = end;
    }
    out
}

/// Default chunk size for internal range-parallel operations.
pub(crate) const RANGE_CHUNK: u64 = 1 << 20;

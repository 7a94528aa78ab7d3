//! Sequential/parallel execution helpers.
//!
//! Data-parallel inner loops (batch neighbor queries, row vectorization,
//! per-class synthetic generation, experiment cells) all funnel through
//! [`map_indexed`]. With the `parallel` feature (default) it runs on the
//! current rayon pool; without it, the loop is plain sequential. Both paths
//! collect results in index order, so output is identical either way.

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

/// Map `f` over `0..n`, collecting results in index order.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Send + Sync,
{
    map_indexed_seq(n, f)
}

/// Sequential fallback with the same contract as [`map_indexed`].
///
/// Always available; benchmarks use it to compare the rayon path against
/// plain iteration.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preserves_index_order() {
        let out = map_indexed(100, |i| i * i);
        let expected = map_indexed_seq(100, |i| i * i);
        assert_eq!(out, expected);
    }
}

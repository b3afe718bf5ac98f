//! Element-parallel helpers; serial when the `parallel` feature is off.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Calls `f(chunk_index, chunk)` for consecutive `chunk`-sized pieces of `buf`.
/// Each chunk is written by exactly one call, so results do not depend on
/// scheduling.
pub(crate) fn try_for_each_chunk<T, E, F>(buf: &mut [T], chunk: usize, f: F) -> Result<(), E>
where
    T: Send,
    E: Send,
    F: Fn(usize, &mut [T]) -> Result<(), E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        buf.par_chunks_mut(chunk).enumerate().try_for_each(|(i, c)| f(i, c))
    }
    #[cfg(not(feature = "parallel"))]
    {
        buf.chunks_mut(chunk).enumerate().try_for_each(|(i, c)| f(i, c))
    }
}

/// Order-preserving map over a slice.
pub(crate) fn map_collect<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Runs `f` on a single worker thread.
pub(crate) fn serial<T, E, F>(f: F) -> Result<T, E>
where
    T: Send,
    E: Send + From<std::io::Error>,
    F: FnOnce() -> Result<T, E> + Send,
{
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .map_err(|e| E::from(std::io::Error::other(e.to_string())))?;
        pool.install(f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        f()
    }
}

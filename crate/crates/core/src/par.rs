//! Chunk-level data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the helpers dispatch to rayon;
//! without it they run plain sequential loops with identical semantics.
//! Callers keep any cross-chunk accumulation order fixed themselves, so
//! outputs do not depend on the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Apply `f` to disjoint consecutive chunks of `data`, `chunk_len` elements
/// each (the tail chunk may be shorter). `f` receives the chunk index.
pub fn for_each_chunk_mut<T, F>(data: &mut [T], chunk_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync,
{
    assert!(chunk_len > 0, "chunk_len must be positive");
    #[cfg(feature = "parallel")]
    data.par_chunks_mut(chunk_len)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
    #[cfg(not(feature = "parallel"))]
    data.chunks_mut(chunk_len).enumerate().for_each(|(i, c)| f(i, c));
}

/// Like [`for_each_chunk_mut`] but zips a read-only source split into chunks
/// of the same length.
pub fn for_each_chunk_zip<T, U, F>(dst: &mut [T], src: &[U], chunk_len: usize, f: F)
where
    T: Send,
    U: Sync,
    F: Fn(usize, &mut [T], &[U]) + Sync,
{
    assert!(chunk_len > 0, "chunk_len must be positive");
    assert_eq!(dst.len(), src.len(), "chunk zip length mismatch");
    #[cfg(feature = "parallel")]
    dst.par_chunks_mut(chunk_len)
        .zip(src.par_chunks(chunk_len))
        .enumerate()
        .for_each(|(i, (d, s))| f(i, d, s));
    #[cfg(not(feature = "parallel"))]
    dst.chunks_mut(chunk_len)
        .zip(src.chunks(chunk_len))
        .enumerate()
        .for_each(|(i, (d, s))| f(i, d, s));
}

/// Number of worker threads the helpers will use.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

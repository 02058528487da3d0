//! Multidimensional complex FFT built from rustfft's 1-D transforms.
//!
//! Transforms are unnormalized in both directions (forward kernel
//! `e^{-2πi pq/M}`, backward `e^{+2πi pq/M}`); callers apply their own
//! scaling. Axis sweeps are parallelized over independent lines, which is
//! bitwise deterministic for any thread count.

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::par;

static PLANS: OnceLock<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> = OnceLock::new();

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap();
    map.entry((len, inverse))
        .or_insert_with(|| {
            let dir = if inverse { FftDirection::Inverse } else { FftDirection::Forward };
            FftPlanner::new().plan_fft(len, dir)
        })
        .clone()
}

/// In-place n-dimensional DFT of row-major `data` with extents `dims`.
pub fn ndfft(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total, "fft buffer does not match dims");
    for axis in 0..dims.len() {
        transform_axis(data, dims, axis, inverse);
    }
}

fn transform_axis(data: &mut [Complex64], dims: &[usize], axis: usize, inverse: bool) {
    let len = dims[axis];
    if len == 1 {
        return;
    }
    let fft = plan(len, inverse);
    let inner: usize = dims[axis + 1..].iter().product();
    if inner == 1 {
        // Contiguous lines; batch several per task so each task allocates
        // its scratch once.
        let lines_per_task = (1usize << 20) / len.max(1) + 1;
        par::for_each_chunk_mut(data, len * lines_per_task, |_, chunk| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            for line in chunk.chunks_exact_mut(len) {
                fft.process_with_scratch(line, &mut scratch);
            }
        });
        return;
    }
    // Strided lines: work slab by slab (a slab is one contiguous len × inner
    // block), transposing lines into a scratch buffer so the 1-D transforms
    // run on contiguous memory.
    let slab_len = len * inner;
    let mut scratch = vec![Complex64::default(); slab_len];
    for slab in data.chunks_exact_mut(slab_len) {
        par::for_each_chunk_mut(&mut scratch, len, |line, row| {
            for (t, x) in row.iter_mut().enumerate() {
                *x = slab[t * inner + line];
            }
        });
        par::for_each_chunk_mut(&mut scratch, len, |_, row| {
            let mut s = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(row, &mut s);
        });
        par::for_each_chunk_mut(slab, inner, |t, row| {
            for (line, x) in row.iter_mut().enumerate() {
                *x = scratch[line * len + t];
            }
        });
    }
}

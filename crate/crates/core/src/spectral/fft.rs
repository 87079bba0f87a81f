//! Cached 2D complex FFTs on square power-of-two grids.
//!
//! Rows are transformed, the matrix is transposed in place, rows are
//! transformed again and the transpose is undone. Row batches run on the rayon
//! pool for large grids; each row is independent so the result does not depend
//! on the thread count.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Grids at or above this size transform rows in parallel.
const PARALLEL_MIN_N: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

fn transform_rows(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], n: usize) {
    let scratch_len = fft.get_inplace_scratch_len();
    if n >= PARALLEL_MIN_N {
        let rows_per_chunk = (n / rayon::current_num_threads().max(1)).max(8);
        data.par_chunks_mut(rows_per_chunk * n).for_each_init(
            || vec![Complex64::default(); scratch_len],
            |scratch, chunk| fft.process_with_scratch(chunk, scratch),
        );
    } else {
        let mut scratch = vec![Complex64::default(); scratch_len];
        fft.process_with_scratch(data, &mut scratch);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for r in 0..n {
        for c in (r + 1)..n {
            data.swap(r * n + c, c * n + r);
        }
    }
}

/// Unnormalized 2D transform of a row-major `n x n` array, in place.
pub(crate) fn fft2(data: &mut [Complex64], n: usize, direction: Direction) {
    debug_assert_eq!(data.len(), n * n);
    let plans = plans(n);
    let fft = match direction {
        Direction::Forward => &plans.forward,
        Direction::Inverse => &plans.inverse,
    };
    transform_rows(fft, data, n);
    transpose_square(data, n);
    transform_rows(fft, data, n);
    transpose_square(data, n);
}

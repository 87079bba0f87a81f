use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Grid, SpectrumField};

/// Seeded random mean-zero field whose spectrum is supported on `lo ≤ |k| < hi`,
/// with Gaussian coefficients of standard deviation `|k|^{-slope}`.
///
/// Coefficients are drawn once per `±k` pair in a fixed lattice order, so the
/// result depends only on `(grid, lo, hi, slope, seed)`.
pub fn random_band(grid: Grid, lo: f64, hi: f64, slope: f64, seed: u64) -> SpectrumField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for idx in 0..grid.len() {
        let partner = grid.conj_index(idx);
        if partner < idx {
            continue;
        }
        let r = grid.radius(idx);
        if r == 0.0 || !(r >= lo && r < hi) {
            continue;
        }
        let sd = if slope == 0.0 { 1.0 } else { r.powf(-slope) };
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        if partner == idx {
            coeffs[idx] = Complex64::new(sd * re, 0.0);
        } else {
            let c = Complex64::new(sd * re, sd * im);
            coeffs[idx] = c;
            coeffs[partner] = c.conj();
        }
    }
    SpectrumField::from_raw(grid, coeffs)
}

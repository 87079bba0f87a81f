//! Periodic square grid, real/spectral field containers and the Fourier
//! multiplier machinery everything else is built on.
//!
//! Layout: a flat row-major `n x n` array, row index `i2` along `x₂`, column
//! index `i1` along `x₁`. Spectral arrays use the same layout in FFT order, so
//! index `i` carries the signed mode `i` for `i < n/2` and `i - n` otherwise.
//!
//! Normalization: the forward transform carries `1/n²`, the inverse none, so
//! `coeff(0)` is the grid mean and `cos(x₁)` has coefficients `1/2` at `(±1, 0)`.

mod fft;
mod field;
mod random;
pub mod snapshot;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use field::{dealias_keeps, ScalarField, SpectrumField, HERMITIAN_TOL};
pub use random::random_band;

/// Square periodic grid with `n` points per side on `[0, L)²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    n: usize,
    length: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    n: usize,
    #[serde(rename = "L", default = "default_length")]
    length: f64,
}

fn default_length() -> f64 {
    2.0 * PI
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(repr: GridRepr) -> Result<Self> {
        Grid::new(repr.n, repr.length)
    }
}

impl From<Grid> for GridRepr {
    fn from(grid: Grid) -> Self {
        GridRepr {
            n: grid.n,
            length: grid.length,
        }
    }
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "period must be positive and finite, got {length}"
            )));
        }
        Ok(Grid { n, length })
    }

    /// Grid on the standard torus of period `2π`.
    pub fn periodic(n: usize) -> Result<Self> {
        Grid::new(n, 2.0 * PI)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Number of grid points, `n²`.
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical wavenumber spacing `2π/L`.
    pub fn k_unit(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Signed mode number stored at FFT index `i`.
    pub fn mode(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// FFT index holding signed mode `m`.
    pub fn index_of_mode(&self, m: i64) -> usize {
        m.rem_euclid(self.n as i64) as usize
    }

    pub fn flat_index(&self, m1: i64, m2: i64) -> usize {
        self.index_of_mode(m2) * self.n + self.index_of_mode(m1)
    }

    /// Physical wavenumber `(k₁, k₂)` at a flat spectral index.
    pub fn wavevector(&self, idx: usize) -> (f64, f64) {
        let ku = self.k_unit();
        (
            self.mode(idx % self.n) as f64 * ku,
            self.mode(idx / self.n) as f64 * ku,
        )
    }

    /// `|k|` at a flat spectral index.
    pub fn radius(&self, idx: usize) -> f64 {
        let m1 = self.mode(idx % self.n);
        let m2 = self.mode(idx / self.n);
        ((m1 * m1 + m2 * m2) as f64).sqrt() * self.k_unit()
    }

    /// `|k|` for every lattice point, in spectral layout.
    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.radius(i)).collect()
    }

    /// Flat index of `-k`.
    pub fn conj_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (c, r) = (idx % n, idx / n);
        ((n - r) % n) * n + (n - c) % n
    }

    /// True on the Nyquist row or column, where `m₁ = -n/2` or `m₂ = -n/2`.
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let half = self.n / 2;
        idx % self.n == half || idx / self.n == half
    }

    /// Largest `|k|` on the lattice (the corner mode).
    pub fn max_radius(&self) -> f64 {
        let half = (self.n / 2) as f64;
        (2.0 * half * half).sqrt() * self.k_unit()
    }

    /// Real-space coordinates `(x₁, x₂)` of a flat index.
    pub fn coordinates(&self, idx: usize) -> (f64, f64) {
        let dx = self.dx();
        ((idx % self.n) as f64 * dx, (idx / self.n) as f64 * dx)
    }
}

/// Forward transform, `coeff(k) = n⁻² Σ f(x) e^{-ik·x}`.
pub fn forward_transform(f: &ScalarField) -> Result<SpectrumField> {
    SpectrumField::forward(f)
}

/// Inverse transform; rejects spectra that are not Hermitian to `1e-10`.
pub fn inverse_transform(spectrum: &SpectrumField) -> Result<ScalarField> {
    spectrum.inverse()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_sizes() {
        assert!(Grid::periodic(4).is_err());
        assert!(Grid::periodic(48).is_err());
        assert!(Grid::new(16, 0.0).is_err());
        assert!(Grid::new(16, f64::NAN).is_err());
        assert!(Grid::periodic(8).is_ok());
    }

    #[test]
    fn mode_bookkeeping() {
        let g = Grid::periodic(8).unwrap();
        let modes: Vec<i64> = (0..8).map(|i| g.mode(i)).collect();
        assert_eq!(modes, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for m in -4..4 {
            assert_eq!(g.mode(g.index_of_mode(m)), m);
        }
        let idx = g.flat_index(3, -2);
        assert_eq!(g.wavevector(idx), (3.0, -2.0));
        assert_eq!(g.wavevector(g.conj_index(idx)), (-3.0, 2.0));
        // the Nyquist mode is its own partner
        let nyq = g.flat_index(-4, 0);
        assert_eq!(g.conj_index(nyq), nyq);
        assert!(g.is_nyquist(nyq));
    }

    #[test]
    fn grid_serde_defaults_period() {
        let g: Grid = serde_json::from_str(r#"{"n": 16}"#).unwrap();
        assert_eq!(g.length(), 2.0 * PI);
        assert!(serde_json::from_str::<Grid>(r#"{"n": 12}"#).is_err());
        assert!(serde_json::from_str::<Grid>(r#"{"n": 16, "m": 1}"#).is_err());
    }
}

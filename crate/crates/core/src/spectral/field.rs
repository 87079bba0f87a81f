use std::ops::{Add, Mul};

use num_complex::Complex64;

use super::fft::{fft2, Direction};
use super::Grid;
use crate::error::{Error, Result};

/// Relative tolerance on `coeff(-k) = conj(coeff(k))` accepted by the inverse.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Real field sampled on the grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("scalar field"));
        }
        Ok(ScalarField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    /// Samples `f(x₁, x₂)` at the grid points. Panics if `f` returns a
    /// non-finite value.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .map(|i| {
                let (x1, x2) = grid.coordinates(i);
                f(x1, x2)
            })
            .collect();
        assert!(
            values.iter().all(|v| v.is_finite()),
            "from_fn produced a non-finite sample"
        );
        ScalarField { grid, values }
    }

    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scale(&self, c: f64) -> ScalarField {
        ScalarField::from_raw(self.grid, self.values.iter().map(|v| c * v).collect())
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn forward(&self) -> Result<SpectrumField> {
        SpectrumField::forward(self)
    }

    /// Forward transform without the finiteness check; non-finite values
    /// propagate into the spectrum.
    pub(crate) fn forward_unchecked(&self) -> SpectrumField {
        SpectrumField::forward_raw(self)
    }
}

/// Fourier coefficients over the full `n x n` lattice, FFT order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectrumField {
    /// Wraps raw coefficients. No symmetry check here; `inverse` performs it.
    pub fn new(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::NonFinite("spectrum"));
        }
        Ok(SpectrumField { grid, coeffs })
    }

    pub fn zeros(grid: Grid) -> Self {
        SpectrumField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub(crate) fn from_raw(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        SpectrumField { grid, coeffs }
    }

    pub fn forward(f: &ScalarField) -> Result<SpectrumField> {
        if !f.is_finite() {
            return Err(Error::NonFinite("forward transform input"));
        }
        Ok(f.forward_unchecked())
    }

    fn forward_raw(f: &ScalarField) -> SpectrumField {
        let grid = f.grid;
        let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut data, grid.n(), Direction::Forward);
        let norm = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
        SpectrumField { grid, coeffs: data }
    }

    /// Checked inverse: the spectrum must be Hermitian to [`HERMITIAN_TOL`].
    pub fn inverse(&self) -> Result<ScalarField> {
        let residual = self.hermitian_residual();
        if residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian { residual });
        }
        Ok(self.to_real_unchecked())
    }

    /// Inverse transform keeping only the real part. Callers guarantee the
    /// spectrum came from real data through real-preserving operations.
    pub(crate) fn to_real_unchecked(&self) -> ScalarField {
        let mut data = self.coeffs.clone();
        fft2(&mut data, self.grid.n(), Direction::Inverse);
        ScalarField::from_raw(self.grid, data.into_iter().map(|c| c.re).collect())
    }

    /// `max |c(k) - conj(c(-k))| / max |c|`, zero for the zero spectrum.
    pub fn hermitian_residual(&self) -> f64 {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.norm()));
        if scale == 0.0 {
            return 0.0;
        }
        let worst = (0..self.coeffs.len()).fold(0.0_f64, |m, i| {
            let partner = self.coeffs[self.grid.conj_index(i)].conj();
            m.max((self.coeffs[i] - partner).norm())
        });
        worst / scale
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of signed mode `(m₁, m₂)`.
    pub fn coeff(&self, m1: i64, m2: i64) -> Complex64 {
        self.coeffs[self.grid.flat_index(m1, m2)]
    }

    /// `Σ_k |coeff(k)|²`, equal to the grid mean of `f²`.
    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs_diff(&self, other: &SpectrumField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }

    /// `coeff(k) ← m(|k|)·coeff(k)`. `m` is evaluated at every radius
    /// including `r = 0`; a non-finite value is an error only where the
    /// coefficient is nonzero.
    pub fn apply_radial_multiplier(&self, m: impl Fn(f64) -> f64) -> Result<SpectrumField> {
        let grid = self.grid;
        let mut out = self.coeffs.clone();
        for (i, c) in out.iter_mut().enumerate() {
            let factor = m(grid.radius(i));
            if factor.is_finite() {
                *c *= factor;
            } else if *c == Complex64::default() {
                *c = Complex64::default();
            } else {
                return Err(Error::NonFinite("radial multiplier"));
            }
        }
        Ok(SpectrumField { grid, coeffs: out })
    }

    /// Spectral `(∂₁, ∂₂)`; the Nyquist column of `∂₁` and row of `∂₂` are zeroed.
    pub fn gradient(&self) -> (SpectrumField, SpectrumField) {
        let grid = self.grid;
        let n = grid.n();
        let half = n / 2;
        let ku = grid.k_unit();
        let mut d1 = vec![Complex64::default(); grid.len()];
        let mut d2 = vec![Complex64::default(); grid.len()];
        for r in 0..n {
            let k2 = if r == half {
                0.0
            } else {
                grid.mode(r) as f64 * ku
            };
            for c in 0..n {
                let k1 = if c == half {
                    0.0
                } else {
                    grid.mode(c) as f64 * ku
                };
                let idx = r * n + c;
                let v = self.coeffs[idx];
                // i·k·v
                d1[idx] = Complex64::new(-k1 * v.im, k1 * v.re);
                d2[idx] = Complex64::new(-k2 * v.im, k2 * v.re);
            }
        }
        (
            SpectrumField { grid, coeffs: d1 },
            SpectrumField { grid, coeffs: d2 },
        )
    }

    /// Two-thirds rule: zero every mode with `max(|m₁|, |m₂|) > n/3`.
    pub fn dealias(&self) -> SpectrumField {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub(crate) fn dealias_in_place(&mut self) {
        let n = self.grid.n();
        for r in 0..n {
            let m2 = self.grid.mode(r);
            for c in 0..n {
                if !dealias_keeps(n, self.grid.mode(c), m2) {
                    self.coeffs[r * n + c] = Complex64::default();
                }
            }
        }
    }

    pub fn scale(&self, c: f64) -> SpectrumField {
        SpectrumField {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|v| v * c).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// Whether the two-thirds rule on an `n`-point grid keeps mode `(m₁, m₂)`.
pub fn dealias_keeps(n: usize, m1: i64, m2: i64) -> bool {
    let largest = m1.unsigned_abs().max(m2.unsigned_abs()) as f64;
    largest <= n as f64 / 3.0
}

impl Add for &SpectrumField {
    type Output = SpectrumField;

    fn add(self, rhs: &SpectrumField) -> SpectrumField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        SpectrumField {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Mul<f64> for &SpectrumField {
    type Output = SpectrumField;

    fn mul(self, rhs: f64) -> SpectrumField {
        self.scale(rhs)
    }
}

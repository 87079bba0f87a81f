//! Discrete Triebel–Lizorkin type semi-norm and the level-curve direction field.
//!
//! The `y` integral/supremum runs over a thinned set of periodic grid shifts:
//! every shift with `|y| ≤ 4dx`, then one band per dyadic radius `2ᵐdx`
//! (`m ≥ 3`, up to `L/2`) sampled at 8 angles. For `q < ∞` each shift carries
//! the area of the region it stands for.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField, SpectrumField};

use super::{gradient_magnitude, lp_norm_values};

/// A periodic grid shift `y = (d₁, d₂)·dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shift {
    pub d1: i64,
    pub d2: i64,
    /// `|y|` in physical units.
    pub dist: f64,
    /// Quadrature area represented by this shift.
    pub weight: f64,
}

const DENSE_RADIUS: i64 = 4;
const ANGLES: usize = 8;

pub fn tl_shifts(grid: Grid) -> Vec<Shift> {
    let dx = grid.dx();
    let mut shifts = Vec::new();
    for d2 in -DENSE_RADIUS..=DENSE_RADIUS {
        for d1 in -DENSE_RADIUS..=DENSE_RADIUS {
            let r2 = d1 * d1 + d2 * d2;
            if r2 == 0 || r2 > DENSE_RADIUS * DENSE_RADIUS {
                continue;
            }
            shifts.push(Shift {
                d1,
                d2,
                dist: (r2 as f64).sqrt() * dx,
                weight: dx * dx,
            });
        }
    }
    let dense_edge = (DENSE_RADIUS as f64 + 0.5) * dx;
    let half = grid.n() as i64 / 2;
    let mut m = 3;
    while (1_i64 << m) <= half {
        let steps = (1_i64 << m) as f64;
        let inner = (steps / 2f64.sqrt() * dx).max(dense_edge);
        let outer = (steps * 2f64.sqrt() * dx).min(grid.length() / 2.0);
        let area = PI * (outer * outer - inner * inner).max(0.0) / ANGLES as f64;
        for a in 0..ANGLES {
            let angle = a as f64 * 2.0 * PI / ANGLES as f64;
            let d1 = (steps * angle.cos()).round() as i64;
            let d2 = (steps * angle.sin()).round() as i64;
            shifts.push(Shift {
                d1,
                d2,
                dist: ((d1 * d1 + d2 * d2) as f64).sqrt() * dx,
                weight: area,
            });
        }
        m += 1;
    }
    shifts
}

/// Semi-norm of a (possibly vector valued) field over the sampled shifts.
/// With a mask, only pairs where both `x` and `x + y` are unmasked count.
pub(crate) fn tl_core(
    grid: Grid,
    components: &[&[f64]],
    mask: Option<&[bool]>,
    sigma: f64,
    p: f64,
    q: f64,
) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(Error::Domain(format!(
            "sigma must lie in (0, 1), got {sigma}"
        )));
    }
    if !(p >= 1.0 && q >= 1.0) {
        return Err(Error::Domain(format!("p and q must be >= 1, got {p}, {q}")));
    }
    let n = grid.n();
    let shifts = tl_shifts(grid);
    let mut inner = vec![0.0_f64; grid.len()];
    for s in &shifts {
        let denom = if q.is_infinite() {
            s.dist.powf(sigma)
        } else {
            s.dist.powf(2.0 + sigma * q)
        };
        let o1 = s.d1.rem_euclid(n as i64) as usize;
        let o2 = s.d2.rem_euclid(n as i64) as usize;
        for r in 0..n {
            let rr = (r + o2) % n;
            for c in 0..n {
                let idx = r * n + c;
                let shifted = rr * n + (c + o1) % n;
                if let Some(m) = mask {
                    if !(m[idx] && m[shifted]) {
                        continue;
                    }
                }
                let diff = components
                    .iter()
                    .map(|f| (f[shifted] - f[idx]).powi(2))
                    .sum::<f64>()
                    .sqrt();
                if q.is_infinite() {
                    inner[idx] = inner[idx].max(diff / denom);
                } else {
                    inner[idx] += s.weight * diff.powf(q) / denom;
                }
            }
        }
    }
    if q.is_finite() {
        inner.iter_mut().for_each(|v| *v = v.powf(1.0 / q));
    }
    let outer = match mask {
        Some(m) => inner
            .iter()
            .zip(m)
            .map(|(&v, &keep)| if keep { v } else { 0.0 })
            .collect::<Vec<_>>(),
        None => inner,
    };
    Ok(lp_norm_values(&outer, grid.dx(), p))
}

/// `‖f‖_{Ḟ^σ_{p,q}}` estimated on the sampled shift set.
pub fn tl_seminorm(f: &ScalarField, sigma: f64, p: f64, q: f64) -> Result<f64> {
    tl_core(f.grid(), &[f.values()], None, sigma, p, q)
}

/// Unit tangent `ξ = ∇⊥θ/|∇⊥θ|` to level curves, defined where
/// `|∇θ| ≥ floor`.
#[derive(Debug, Clone)]
pub struct DirectionField {
    pub xi1: ScalarField,
    pub xi2: ScalarField,
    pub mask: Vec<bool>,
    pub floor: f64,
}

impl DirectionField {
    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&m| m)
    }

    /// Semi-norm of `ξ` over unmasked pairs, with an emptiness flag; an empty
    /// mask reports zero.
    pub fn tl_seminorm(&self, sigma: f64, p: f64, q: f64) -> Result<(f64, bool)> {
        if self.is_empty() {
            return Ok((0.0, true));
        }
        let value = tl_core(
            self.xi1.grid(),
            &[self.xi1.values(), self.xi2.values()],
            Some(&self.mask),
            sigma,
            p,
            q,
        )?;
        Ok((value, false))
    }
}

/// Default floor is `1e-6 · max|∇θ|`.
pub fn direction_field(theta_hat: &SpectrumField, floor: Option<f64>) -> DirectionField {
    let grid = theta_hat.grid();
    let (d1, d2) = theta_hat.gradient();
    let t1 = d1.to_real_unchecked();
    let t2 = d2.to_real_unchecked();
    let magnitude = gradient_magnitude(theta_hat);
    let floor = floor.unwrap_or(1e-6 * magnitude.max_abs());
    let mut xi1 = vec![0.0; grid.len()];
    let mut xi2 = vec![0.0; grid.len()];
    let mut mask = vec![false; grid.len()];
    for i in 0..grid.len() {
        let m = magnitude.values()[i];
        if m > 0.0 && m >= floor {
            // ∇⊥θ = (−∂₂θ, ∂₁θ)
            xi1[i] = -t2.values()[i] / m;
            xi2[i] = t1.values()[i] / m;
            mask[i] = true;
        }
    }
    DirectionField {
        xi1: ScalarField::from_raw(grid, xi1),
        xi2: ScalarField::from_raw(grid, xi2),
        mask,
        floor,
    }
}

//! The constitutive law: `Δψ = P(Λ)θ`, `u = ∇⊥ψ = (−∂₂ψ, ∂₁ψ)`.

use num_complex::Complex64;

use crate::error::Result;
use crate::spectral::{ScalarField, SpectrumField};
use crate::symbols::MultiplierSpec;

/// Divergence-free velocity on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityPair {
    pub u1: ScalarField,
    pub u2: ScalarField,
}

impl VelocityPair {
    pub fn max_speed(&self) -> f64 {
        self.u1
            .values()
            .iter()
            .zip(self.u2.values())
            .fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }
}

/// `ψ̂(k) = −P(|k|) θ̂(k) / |k|²` for `k ≠ 0`, `ψ̂(0) = 0`.
pub fn stream_function(theta_hat: &SpectrumField, p: &MultiplierSpec) -> SpectrumField {
    let grid = theta_hat.grid();
    let coeffs = theta_hat
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            let r = grid.radius(i);
            if r == 0.0 {
                Complex64::default()
            } else {
                c * (-p.evaluate(r) / (r * r))
            }
        })
        .collect();
    SpectrumField::from_raw(grid, coeffs)
}

/// Spectral velocity `(û₁, û₂) = (−∂₂ψ̂, ∂₁ψ̂)`.
pub fn velocity_spectra(
    theta_hat: &SpectrumField,
    p: &MultiplierSpec,
) -> (SpectrumField, SpectrumField) {
    let psi = stream_function(theta_hat, p);
    let (d1, d2) = psi.gradient();
    (d2.scale(-1.0), d1)
}

/// Real-space velocity from `θ̂`. The zero mode of `θ̂` does not contribute.
pub fn compute_velocity(theta_hat: &SpectrumField, p: &MultiplierSpec) -> Result<VelocityPair> {
    let (u1, u2) = velocity_spectra(theta_hat, p);
    Ok(VelocityPair {
        u1: u1.inverse()?,
        u2: u2.inverse()?,
    })
}

/// Spectral entries `∂ₖuⱼ` ordered `[∂₁u₁, ∂₂u₁, ∂₁u₂, ∂₂u₂]`.
pub fn velocity_gradient_spectra(
    theta_hat: &SpectrumField,
    p: &MultiplierSpec,
) -> [SpectrumField; 4] {
    let (u1, u2) = velocity_spectra(theta_hat, p);
    let (a, b) = u1.gradient();
    let (c, d) = u2.gradient();
    [a, b, c, d]
}

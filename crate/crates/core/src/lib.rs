//! Pseudo-spectral laboratory for dissipative active scalar equations
//!
//! ```text
//! ∂tθ + u·∇θ + κ(−Δ)^α θ = 0,   u = ∇⊥ψ,   Δψ = P(Λ)θ
//! ```
//!
//! on the periodic square. `P ≡ 1` gives 2D Navier–Stokes in vorticity form,
//! `P(Λ) = Λ` gives SQG, `P(Λ) = Λ^β` the generalized SQG family and
//! `P(Λ) = log(1 − Δ)^γ` the Log-Euler family.
//!
//! Modules, bottom up:
//! - [`spectral`]: grid, transforms, multipliers, dealiasing, snapshots
//! - [`symbols`]: catalog of `P(|ξ|)` and the Mihlin-type symbol checker
//! - [`velocity`]: stream function and velocity from `θ̂`
//! - [`dynamics`]: run configuration, integrating-factor RK4, the run loop
//! - [`lp`]: Littlewood–Paley blocks, Besov and Triebel–Lizorkin diagnostics
//! - [`gate`]: hypothesis checks and regime classification
//! - [`harness`]: diagnostic records, sweeps and post-run analysis

pub mod dynamics;
pub mod error;
pub mod gate;
pub mod harness;
pub mod lp;
pub mod spectral;
pub mod symbols;
pub mod velocity;

pub use error::{Error, Result};
pub use spectral::{Grid, ScalarField, SpectrumField};
pub use symbols::MultiplierSpec;

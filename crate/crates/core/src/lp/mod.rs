//! Littlewood–Paley blocks and the function-space diagnostics built on them.
//!
//! Blocks use sharp annuli: `Δ₋₁` keeps `|k| < 1`, `Δⱼ` keeps
//! `2ʲ ≤ |k| < 2ʲ⁺¹`, and `S_N` keeps `|k| < 2ᴺ`. Sharp shells partition the
//! lattice, so blocks sum back to the field exactly, are orthogonal in `L²`,
//! and satisfy Bernstein and dissipation bounds with constant one.

mod bounds;
mod tl;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField, SpectrumField};

pub use bounds::{
    field_bound_ratios, verify_multiplier_bounds, verify_multiplier_bounds_on, BoundsReport,
    CutoffRatio, FieldRatios, ShellRatios, ShellSummary,
};
pub use tl::{direction_field, tl_seminorm, tl_shifts, DirectionField, Shift};

/// Nondecreasing weight sequence `A = {Aⱼ}` of an extended Besov space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceSpec {
    /// `Aⱼ = j + 1`, the standard Besov weights.
    Linear,
    /// `Aⱼ = (j + 1)^b`.
    Power { b: f64 },
}

impl SequenceSpec {
    /// `Aⱼ`, with `Aⱼ ≡ 0` for `j < −1`.
    pub fn value(&self, j: i32) -> f64 {
        if j < -1 {
            return 0.0;
        }
        let base = (j + 1) as f64;
        match *self {
            SequenceSpec::Linear => base,
            SequenceSpec::Power { b } => base.powf(b),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SequenceSpec::Linear => Ok(()),
            SequenceSpec::Power { b } if b.is_finite() && b > 0.0 => Ok(()),
            SequenceSpec::Power { b } => Err(Error::config("A.b", format!("must be > 0, got {b}"))),
        }
    }

    /// Parses `linear` or `power:<b>`.
    pub fn parse(text: &str) -> Result<Self> {
        let spec = match text.split_once(':') {
            None if text == "linear" => SequenceSpec::Linear,
            Some(("linear", b)) if b.parse::<f64>() == Ok(1.0) => SequenceSpec::Linear,
            Some(("power", b)) => SequenceSpec::Power {
                b: b.parse()
                    .map_err(|_| Error::config("A", format!("bad exponent `{b}`")))?,
            },
            _ => {
                return Err(Error::config(
                    "A",
                    format!("expected `linear` or `power:<b>`, got `{text}`"),
                ))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Lebesgue exponent restricted to integers or infinity; serialized as a
/// number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "serde_json::Value")]
pub enum Integrability {
    Finite(u32),
    Infinite,
}

impl Integrability {
    pub fn as_f64(&self) -> f64 {
        match *self {
            Integrability::Finite(q) => q as f64,
            Integrability::Infinite => f64::INFINITY,
        }
    }
}

impl TryFrom<serde_json::Value> for Integrability {
    type Error = String;

    fn try_from(v: serde_json::Value) -> std::result::Result<Self, String> {
        match v {
            serde_json::Value::String(s) if s == "inf" => Ok(Integrability::Infinite),
            serde_json::Value::Number(n) => n
                .as_u64()
                .and_then(|q| u32::try_from(q).ok())
                .map(Integrability::Finite)
                .ok_or_else(|| format!("exponent must be a positive integer or \"inf\", got {n}")),
            other => Err(format!(
                "exponent must be a positive integer or \"inf\", got {other}"
            )),
        }
    }
}

impl From<Integrability> for serde_json::Value {
    fn from(q: Integrability) -> Self {
        match q {
            Integrability::Finite(q) => serde_json::Value::from(q),
            Integrability::Infinite => serde_json::Value::from("inf"),
        }
    }
}

/// Index `(s, q, A)` of `B^{s,A}_{q,∞}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovIndex {
    pub s: f64,
    pub q: Integrability,
    #[serde(rename = "A")]
    pub a: SequenceSpec,
}

impl Default for BesovIndex {
    fn default() -> Self {
        BesovIndex {
            s: 2.0,
            q: Integrability::Finite(2),
            a: SequenceSpec::Linear,
        }
    }
}

impl BesovIndex {
    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s > 1.0) {
            return Err(Error::config(
                "besov.s",
                format!("must be > 1, got {}", self.s),
            ));
        }
        if let Integrability::Finite(q) = self.q {
            if q < 2 {
                return Err(Error::config("besov.q", format!("must be >= 2, got {q}")));
            }
        }
        self.a.validate()
    }
}

/// Dyadic shell of a radius: `−1` below one, else `⌊log₂ r⌋`.
pub fn shell_of(radius: f64) -> i32 {
    if radius < 1.0 {
        return -1;
    }
    let mut j = radius.log2().floor() as i32;
    while 2f64.powi(j) > radius {
        j -= 1;
    }
    while 2f64.powi(j + 1) <= radius {
        j += 1;
    }
    j
}

/// Highest shell that intersects the lattice.
pub fn top_shell(grid: Grid) -> i32 {
    shell_of(grid.max_radius())
}

/// How a shell sits on the finite lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockCoverage {
    /// The whole annulus lies inside the Nyquist box.
    Full,
    /// The annulus pokes past the Nyquist frequency; only its lattice part is kept.
    Truncated,
    /// No lattice point falls in the annulus.
    OutOfRange,
}

pub fn block_coverage(grid: Grid, j: i32) -> BlockCoverage {
    if j < -1 || j > top_shell(grid) {
        BlockCoverage::OutOfRange
    } else if 2f64.powi(j + 1) <= (grid.n() / 2) as f64 * grid.k_unit() {
        BlockCoverage::Full
    } else {
        BlockCoverage::Truncated
    }
}

fn keep_where(theta_hat: &SpectrumField, keep: impl Fn(f64) -> bool) -> SpectrumField {
    let grid = theta_hat.grid();
    let coeffs = theta_hat
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, &c)| {
            if keep(grid.radius(i)) {
                c
            } else {
                Complex64::default()
            }
        })
        .collect();
    SpectrumField::from_raw(grid, coeffs)
}

/// `Δⱼθ̂` in spectral form.
pub fn dyadic_block_hat(theta_hat: &SpectrumField, j: i32) -> SpectrumField {
    keep_where(theta_hat, |r| shell_of(r) == j)
}

/// `Δⱼθ` in real space together with how the shell sits on the lattice; an
/// out-of-range shell yields the zero field.
pub fn dyadic_block(theta_hat: &SpectrumField, j: i32) -> (ScalarField, BlockCoverage) {
    let coverage = block_coverage(theta_hat.grid(), j);
    if coverage == BlockCoverage::OutOfRange {
        return (ScalarField::zeros(theta_hat.grid()), coverage);
    }
    (dyadic_block_hat(theta_hat, j).to_real_unchecked(), coverage)
}

/// `S_N θ̂`: keeps `|k| < 2ᴺ`.
pub fn low_pass_hat(theta_hat: &SpectrumField, cutoff: i32) -> SpectrumField {
    let edge = 2f64.powi(cutoff);
    keep_where(theta_hat, |r| r < edge)
}

pub fn low_pass(theta_hat: &SpectrumField, cutoff: i32) -> ScalarField {
    low_pass_hat(theta_hat, cutoff).to_real_unchecked()
}

/// Discrete `L^p` norm with `dx²` quadrature weights; `p = ∞` is the max.
pub fn lp_norm(f: &ScalarField, p: f64) -> f64 {
    lp_norm_values(f.values(), f.grid().dx(), p)
}

pub(crate) fn lp_norm_values(values: &[f64], dx: f64, p: f64) -> f64 {
    assert!(p >= 1.0, "L^p exponent must be >= 1, got {p}");
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let w = dx * dx;
    if p == 1.0 {
        return w * values.iter().map(|v| v.abs()).sum::<f64>();
    }
    if p == 2.0 {
        return (w * values.iter().map(|v| v * v).sum::<f64>()).sqrt();
    }
    // scale by the max to keep |v|^p in range for large p
    let m = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * (w * values.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>()).powf(1.0 / p)
}

/// `‖θ‖_{L¹∩L∞} = ‖θ‖_{L¹} + ‖θ‖_{L∞}`.
pub fn l1_inf_norm(f: &ScalarField) -> f64 {
    lp_norm(f, 1.0) + lp_norm(f, f64::INFINITY)
}

/// `sup_j 2^{s·Aⱼ} ‖Δⱼθ‖_{L^q}` over the shells present on the grid. The
/// mean mode is left out; see [`has_mean`].
pub fn besov_norm(theta_hat: &SpectrumField, idx: &BesovIndex) -> f64 {
    let grid = theta_hat.grid();
    let mut zero_mean = theta_hat.clone();
    zero_mean.coeffs_mut()[0] = Complex64::default();
    let q = idx.q.as_f64();
    (-1..=top_shell(grid))
        .map(|j| {
            let block = dyadic_block_hat(&zero_mean, j);
            if block.energy() == 0.0 {
                return 0.0;
            }
            let norm = lp_norm(&block.to_real_unchecked(), q);
            (idx.s * idx.a.value(j) * std::f64::consts::LN_2).exp() * norm
        })
        .fold(0.0, f64::max)
}

/// Whether the mean mode is nonzero relative to the rest of the spectrum.
pub fn has_mean(theta_hat: &SpectrumField) -> bool {
    let c0 = theta_hat.coeffs()[0].norm();
    let scale = theta_hat
        .coeffs()
        .iter()
        .fold(0.0_f64, |m, c| m.max(c.norm()));
    c0 > 1e-13 * scale.max(f64::MIN_POSITIVE)
}

/// Pointwise `|∇θ|`.
pub fn gradient_magnitude(theta_hat: &SpectrumField) -> ScalarField {
    let (d1, d2) = theta_hat.gradient();
    let a = d1.to_real_unchecked();
    let b = d2.to_real_unchecked();
    let values = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| x.hypot(*y))
        .collect();
    ScalarField::from_raw(theta_hat.grid(), values)
}

/// `∫ Δⱼθ (−Δ)^α Δⱼθ dx = L² Σ_k |k|^{2α} |Δⱼθ̂(k)|²`.
pub fn shell_dissipation(theta_hat: &SpectrumField, j: i32, alpha: f64) -> f64 {
    let grid = theta_hat.grid();
    let area = grid.length() * grid.length();
    let sum: f64 = theta_hat
        .coeffs()
        .iter()
        .enumerate()
        .filter(|&(i, _)| shell_of(grid.radius(i)) == j)
        .map(|(i, c)| grid.radius(i).powf(2.0 * alpha) * c.norm_sqr())
        .sum();
    area * sum
}

/// `∫ f|f|^{q−2} (−Δ)^α f dx` by grid quadrature, for a real field `f`.
pub fn dissipation_integral(f: &ScalarField, alpha: f64, q: f64) -> Result<f64> {
    let lifted = f
        .forward()?
        .apply_radial_multiplier(|r| r.powf(2.0 * alpha))?
        .to_real_unchecked();
    let dx = f.grid().dx();
    Ok(dx
        * dx
        * f.values()
            .iter()
            .zip(lifted.values())
            .map(|(v, l)| v * v.abs().powf(q - 2.0) * l)
            .sum::<f64>())
}

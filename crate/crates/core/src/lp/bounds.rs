//! Empirical constants in the block and low-pass bounds for `∇u`:
//!
//! ```text
//! ‖Δⱼ∇u‖_q    ≤ C P(2ʲ⁺¹) ‖Δⱼθ‖_q
//! ‖S_N∇u‖_∞   ≤ C ‖θ‖_{L¹∩L∞} + C N P(2ᴺ⁺¹) ‖S_{N+1}θ‖_∞
//! ```
//!
//! `|∇u|` is the pointwise Frobenius norm of the four entries `∂ₖuⱼ`.

use serde::Serialize;

use crate::spectral::{random_band, Grid, ScalarField, SpectrumField};
use crate::symbols::MultiplierSpec;
use crate::velocity::velocity_gradient_spectra;

use super::{dyadic_block_hat, l1_inf_norm, low_pass_hat, lp_norm, top_shell};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellRatios {
    pub j: i32,
    /// `None` when the block of `θ` vanishes.
    pub q2: Option<f64>,
    pub qinf: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CutoffRatio {
    pub n: i32,
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldRatios {
    pub shells: Vec<ShellRatios>,
    pub cutoffs: Vec<CutoffRatio>,
}

impl FieldRatios {
    pub fn shell_max(&self) -> Option<f64> {
        self.shells
            .iter()
            .flat_map(|s| [s.q2, s.qinf])
            .flatten()
            .reduce(f64::max)
    }

    pub fn cutoff_max(&self) -> Option<f64> {
        self.cutoffs.iter().filter_map(|c| c.value).reduce(f64::max)
    }
}

fn peak_coeff(f: &SpectrumField) -> f64 {
    f.coeffs().iter().fold(0.0, |m, c| m.max(c.norm()))
}

fn frobenius(entries: &[SpectrumField; 4]) -> ScalarField {
    let grid = entries[0].grid();
    let real: Vec<ScalarField> = entries.iter().map(|e| e.to_real_unchecked()).collect();
    let values = (0..grid.len())
        .map(|i| {
            real.iter()
                .map(|f| f.values()[i].powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .collect();
    ScalarField::from_raw(grid, values)
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0 && num.is_finite()).then(|| num / den)
}

// blocks below this fraction of the field's spectral peak are roundoff
const EMPTY_BLOCK: f64 = 1e-12;

/// Block ratios for `j ∈ [0, j_max]` and low-pass ratios for `N ∈ [1, j_max + 1]`.
pub fn field_bound_ratios(
    theta_hat: &SpectrumField,
    p: &MultiplierSpec,
    j_max: i32,
) -> FieldRatios {
    let j_max = j_max.min(top_shell(theta_hat.grid()));
    let peak = peak_coeff(theta_hat);
    let shells = (0..=j_max)
        .map(|j| {
            let mut block = dyadic_block_hat(theta_hat, j);
            if peak_coeff(&block) <= EMPTY_BLOCK * peak {
                block = SpectrumField::zeros(theta_hat.grid());
            }
            let theta_j = block.to_real_unchecked();
            let grad = frobenius(&velocity_gradient_spectra(&block, p));
            let weight = p.evaluate(2f64.powi(j + 1));
            ShellRatios {
                j,
                q2: ratio(lp_norm(&grad, 2.0), weight * lp_norm(&theta_j, 2.0)),
                qinf: ratio(
                    lp_norm(&grad, f64::INFINITY),
                    weight * lp_norm(&theta_j, f64::INFINITY),
                ),
            }
        })
        .collect();
    let whole = l1_inf_norm(&theta_hat.to_real_unchecked());
    let cutoffs = (1..=j_max + 1)
        .map(|n| {
            let grad = frobenius(&velocity_gradient_spectra(&low_pass_hat(theta_hat, n), p));
            let upper = lp_norm(
                &low_pass_hat(theta_hat, n + 1).to_real_unchecked(),
                f64::INFINITY,
            );
            let den = whole + n as f64 * p.evaluate(2f64.powi(n + 1)) * upper;
            CutoffRatio {
                n,
                value: ratio(lp_norm(&grad, f64::INFINITY), den),
            }
        })
        .collect();
    FieldRatios { shells, cutoffs }
}

/// Worst case over trials for one shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShellSummary {
    pub j: i32,
    pub q2_max: f64,
    pub qinf_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub multiplier: MultiplierSpec,
    pub trials: usize,
    pub seed: u64,
    pub n: usize,
    pub shells: Vec<ShellSummary>,
    pub cutoffs: Vec<(i32, f64)>,
    pub ratio2_q2_max: f64,
    pub ratio2_qinf_max: f64,
    pub ratio2_qinf_median: f64,
    /// Least-squares slope of `ln ratio₂` at `q = ∞` against `j`.
    pub ratio2_qinf_trend: f64,
    pub ratio3_max: f64,
}

impl BoundsReport {
    /// Max over median of the per-shell worst cases at `q = ∞`.
    pub fn qinf_spread(&self) -> f64 {
        self.ratio2_qinf_max / self.ratio2_qinf_median
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

pub const DEFAULT_BOUNDS_N: usize = 128;
pub const DEFAULT_BOUNDS_J_MAX: i32 = 5;

/// Seeded sweep over shells `j ∈ [0, 5]` and cutoffs `N ∈ [1, 6]` on a
/// 128² grid.
pub fn verify_multiplier_bounds(p: &MultiplierSpec, trials: usize, seed: u64) -> BoundsReport {
    let grid = Grid::periodic(DEFAULT_BOUNDS_N).expect("default grid is valid");
    verify_multiplier_bounds_on(grid, DEFAULT_BOUNDS_J_MAX, p, trials, seed)
}

pub fn verify_multiplier_bounds_on(
    grid: Grid,
    j_max: i32,
    p: &MultiplierSpec,
    trials: usize,
    seed: u64,
) -> BoundsReport {
    assert!(trials >= 1, "at least one trial is required");
    let j_max = j_max.min(top_shell(grid)).max(0);
    let mut q2 = vec![0.0_f64; j_max as usize + 1];
    let mut qinf = vec![0.0_f64; j_max as usize + 1];
    let mut cut = vec![0.0_f64; j_max as usize + 1];
    for t in 0..trials {
        let base = seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(t as u64 * 1000);
        for j in 0..=j_max {
            let shell = random_band(grid, 2f64.powi(j), 2f64.powi(j + 1), 0.0, base + j as u64);
            let r = field_bound_ratios(&shell, p, j_max);
            let s = r.shells[j as usize];
            q2[j as usize] = q2[j as usize].max(s.q2.unwrap_or(0.0));
            qinf[j as usize] = qinf[j as usize].max(s.qinf.unwrap_or(0.0));
        }
        let broad = random_band(grid, 0.0, 2f64.powi(j_max + 1), 1.0, base + 999);
        for c in field_bound_ratios(&broad, p, j_max).cutoffs {
            let slot = &mut cut[(c.n - 1) as usize];
            *slot = slot.max(c.value.unwrap_or(0.0));
        }
    }
    let shells: Vec<ShellSummary> = (0..=j_max)
        .map(|j| ShellSummary {
            j,
            q2_max: q2[j as usize],
            qinf_max: qinf[j as usize],
        })
        .collect();
    let trend_points: Vec<(f64, f64)> = shells
        .iter()
        .filter(|s| s.qinf_max > 0.0)
        .map(|s| (s.j as f64, s.qinf_max.ln()))
        .collect();
    BoundsReport {
        multiplier: *p,
        trials,
        seed,
        n: grid.n(),
        cutoffs: cut
            .iter()
            .enumerate()
            .map(|(i, &v)| (i as i32 + 1, v))
            .collect(),
        ratio2_q2_max: q2.iter().copied().fold(0.0, f64::max),
        ratio2_qinf_max: qinf.iter().copied().fold(0.0, f64::max),
        ratio2_qinf_median: median(&mut qinf.clone()),
        ratio2_qinf_trend: slope(&trend_points),
        ratio3_max: cut.iter().copied().fold(0.0, f64::max),
        shells,
    }
}

//! Hypothesis checks for global regularity and the regime map.
//!
//! The summability and decay conditions are infinite statements; they are
//! decided here on finite index ranges, in log space, and the raw sequences
//! are returned next to each verdict.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::dynamics::RunConfig;
use crate::error::{Error, Result};
use crate::harness::{grad_channel, DiagnosticRecord};
use crate::lp::{BesovIndex, SequenceSpec};
use crate::symbols::MultiplierSpec;

/// Log-sums above this are reported as saturated.
const SATURATION_LN: f64 = 700.0;
/// Per-step ratio the tail of each partial sum must stay below.
const TAIL_RATIO: f64 = 0.9;
const DECADE: i32 = 10;

/// Result of [`check_sb`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbReport {
    /// `(j, Σ_k term)`; saturated entries hold `f64::MAX`.
    pub partial_sums: Vec<(i32, f64)>,
    /// Indices whose sum overflowed.
    pub saturated: Vec<i32>,
    /// Largest last-decade per-step term ratio over all `j`.
    pub tail_ratio: f64,
    pub bounded: bool,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `Σ_{k ≥ max(j−1, −1)} 2^{s(A_{j−2} − A_k)} P(2^{k+1}) / P(2^{j+1})` for
/// every `j ∈ [−1, j_max]`, truncated at `k_max`.
pub fn check_sb(
    p: &MultiplierSpec,
    a: &SequenceSpec,
    s: f64,
    j_max: i32,
    k_max: i32,
) -> Result<SbReport> {
    check_sb_with(p, |j| a.value(j), s, j_max, k_max)
}

/// [`check_sb`] with an arbitrary weight sequence.
pub fn check_sb_with(
    p: &MultiplierSpec,
    a: impl Fn(i32) -> f64,
    s: f64,
    j_max: i32,
    k_max: i32,
) -> Result<SbReport> {
    if !(s > 1.0 && s.is_finite()) {
        return Err(Error::Domain(format!("s must be > 1, got {s}")));
    }
    if j_max < 4 || k_max < j_max + 20 {
        return Err(Error::Domain(format!(
            "need j_max >= 4 and k_max >= j_max + 20, got {j_max}, {k_max}"
        )));
    }
    let ln_p = |e: i32| p.ln_evaluate_at_ln(e as f64 * LN_2);
    let mut partial_sums = Vec::new();
    let mut saturated = Vec::new();
    let mut tail_ratio = 0.0_f64;
    for j in -1..=j_max {
        let head = s * LN_2 * a(j - 2) - ln_p(j + 1);
        let ln_term = |k: i32| head - s * LN_2 * a(k) + ln_p(k + 1);
        let mut total = f64::NEG_INFINITY;
        for k in (j - 1).max(-1)..=k_max {
            total = log_add(total, ln_term(k));
        }
        let step = ((ln_term(k_max) - ln_term(k_max - DECADE)) / DECADE as f64).exp();
        tail_ratio = tail_ratio.max(step);
        if total.is_finite() && total <= SATURATION_LN {
            partial_sums.push((j, total.exp()));
        } else {
            saturated.push(j);
            partial_sums.push((j, f64::MAX));
        }
    }
    let bounded = saturated.is_empty() && tail_ratio < TAIL_RATIO;
    Ok(SbReport {
        partial_sums,
        saturated,
        tail_ratio,
        bounded,
    })
}

/// Result of [`check_decay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `(j, d_j)`; values beyond `f64` range are clamped to `f64::MAX`.
    pub sequence: Vec<(i32, f64)>,
    /// `(j, ln d_j)`, exact even where `d_j` overflows.
    pub ln_sequence: Vec<(i32, f64)>,
    pub decay_ok: bool,
}

/// `ln d_j` with `d_j = κ⁻¹ 2^{s(A_j − A_{j−2})} (j+2) P(2^{j+2}) 2^{−2αj}`.
fn ln_decay_term(
    p: &MultiplierSpec,
    a: &SequenceSpec,
    s: f64,
    alpha: f64,
    kappa: f64,
    j: i32,
) -> f64 {
    -kappa.ln()
        + s * LN_2 * (a.value(j) - a.value(j - 2))
        + ((j + 2) as f64).ln()
        + p.ln_evaluate_at_ln((j + 2) as f64 * LN_2)
        - 2.0 * alpha * j as f64 * LN_2
}

/// The decay sequence for `j ∈ [0, j_max]`. `decay_ok` asks for a strictly
/// decreasing final decade ending below `10⁻³` of the peak.
pub fn check_decay(
    p: &MultiplierSpec,
    a: &SequenceSpec,
    s: f64,
    alpha: f64,
    kappa: f64,
    j_max: i32,
) -> Result<DecayReport> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::Domain(format!("kappa must be > 0, got {kappa}")));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
    }
    if j_max < DECADE {
        return Err(Error::Domain(format!(
            "j_max must be >= {DECADE}, got {j_max}"
        )));
    }
    let ln_sequence: Vec<(i32, f64)> = (0..=j_max)
        .map(|j| (j, ln_decay_term(p, a, s, alpha, kappa, j)))
        .collect();
    let sequence = ln_sequence
        .iter()
        .map(|&(j, l)| (j, l.exp().min(f64::MAX)))
        .collect();
    let peak = ln_sequence
        .iter()
        .map(|x| x.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let tail = &ln_sequence[ln_sequence.len() - 1 - DECADE as usize..];
    let decreasing = tail.windows(2).all(|w| w[1].1 < w[0].1);
    let last = ln_sequence.last().expect("nonempty").1;
    let decay_ok = decreasing && last < peak + 1e-3_f64.ln();
    Ok(DecayReport {
        sequence,
        ln_sequence,
        decay_ok,
    })
}

/// Regimes of the case analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Both hypotheses hold; global regularity in the extended Besov class.
    TheoremCovered,
    /// Logarithmic velocity symbol with standard or sub-Besov weights.
    LogEulerCorollary,
    /// `Λ^β log(1−Δ)^γ` with `0 ≤ β < 2α ≤ 1`.
    Sub2alphaCorollary,
    /// `β = 2α`, outside the theorem.
    ModifiedSqgOpen,
    /// `β > 2α`.
    SupercriticalOpen,
    /// Hypotheses fail without matching a named case (for instance `κ = 0`).
    Unclassified,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::TheoremCovered => "theorem_covered",
            Regime::LogEulerCorollary => "log_euler_corollary",
            Regime::Sub2alphaCorollary => "sub_2alpha_corollary",
            Regime::ModifiedSqgOpen => "modified_sqg_open",
            Regime::SupercriticalOpen => "supercritical_open",
            Regime::Unclassified => "unclassified",
        }
    }

    /// Regimes in which the theorem applies.
    pub fn is_covered(&self) -> bool {
        matches!(
            self,
            Regime::TheoremCovered | Regime::LogEulerCorollary | Regime::Sub2alphaCorollary
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateVerdict {
    pub sb_partial_sums: Vec<(i32, f64)>,
    pub sb_saturated: Vec<i32>,
    pub sb_tail_ratio: f64,
    pub sb_bounded: bool,
    pub decay_sequence: Vec<(i32, f64)>,
    pub decay_ok: bool,
    pub regime: Regime,
    pub j_max: i32,
    pub k_max: i32,
    pub notes: String,
}

const BETA_TIE: f64 = 1e-12;

/// Index range used by [`classify`]: enough shells for `2^{−2αj}` to fall
/// by `2^{−60}`, capped at 10000.
pub fn classify_j_max(alpha: f64) -> i32 {
    (30.0 / alpha).ceil().clamp(60.0, 10_000.0) as i32
}

/// Runs both checks for `(P, α, κ)` and maps the outcome to a regime.
pub fn classify_params(
    p: &MultiplierSpec,
    alpha: f64,
    kappa: f64,
    idx: &BesovIndex,
) -> Result<GateVerdict> {
    p.validate()?;
    idx.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
    }
    let j_max = classify_j_max(alpha);
    let k_max = j_max + 20;
    let sb = check_sb(p, &idx.a, idx.s, j_max, k_max)?;
    let mut notes = Vec::new();
    let decay = if kappa > 0.0 {
        Some(check_decay(p, &idx.a, idx.s, alpha, kappa, j_max)?)
    } else {
        notes.push("kappa = 0: decay condition not applicable".to_string());
        None
    };
    let decay_ok = decay.as_ref().is_some_and(|d| d.decay_ok);
    let beta = p.beta();
    let two_alpha = 2.0 * alpha;
    let regime = if sb.bounded && decay_ok {
        let weights_at_most_linear = match idx.a {
            SequenceSpec::Linear => true,
            SequenceSpec::Power { b } => b <= 1.0,
        };
        match p {
            MultiplierSpec::LogPower { .. } | MultiplierSpec::Identity
                if weights_at_most_linear =>
            {
                Regime::LogEulerCorollary
            }
            MultiplierSpec::Power { .. } | MultiplierSpec::PowerTimesLog { .. }
                if idx.a == SequenceSpec::Linear && beta < two_alpha && two_alpha <= 1.0 =>
            {
                Regime::Sub2alphaCorollary
            }
            _ => Regime::TheoremCovered,
        }
    } else if kappa == 0.0 {
        Regime::Unclassified
    } else if (beta - two_alpha).abs() <= BETA_TIE {
        Regime::ModifiedSqgOpen
    } else if beta > two_alpha {
        Regime::SupercriticalOpen
    } else {
        Regime::Unclassified
    };
    if !sb.bounded {
        notes.push(format!(
            "summability fails (tail ratio {:.4})",
            sb.tail_ratio
        ));
    }
    if kappa > 0.0 && !decay_ok {
        notes.push("decay condition fails".to_string());
    }
    Ok(GateVerdict {
        sb_partial_sums: sb.partial_sums,
        sb_saturated: sb.saturated,
        sb_tail_ratio: sb.tail_ratio,
        sb_bounded: sb.bounded,
        decay_sequence: decay.map(|d| d.sequence).unwrap_or_default(),
        decay_ok,
        regime,
        j_max,
        k_max,
        notes: notes.join("; "),
    })
}

pub fn classify(config: &RunConfig, idx: &BesovIndex) -> Result<GateVerdict> {
    classify_params(&config.p, config.alpha, config.kappa, idx)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SerrinVerdict {
    /// Exponents qualify and the integral is finite over the recorded span.
    Satisfied,
    /// Nothing can be concluded from this run.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerrinReport {
    pub p: f64,
    pub r: f64,
    pub alpha: f64,
    pub t_end: f64,
    /// `1/p + α/r`.
    pub lhs: f64,
    pub condition_holds: bool,
    /// Trapezoid value of `∫₀^T ‖∇⊥θ‖_{L^p}^r dt` over the samples in `[0, T]`.
    pub integral: f64,
    pub samples: usize,
    pub verdict: SerrinVerdict,
}

fn serrin_pre(p: f64, r: f64, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 0, got {alpha}")));
    }
    if !(p.is_finite() && p > 1.0 / alpha) {
        return Err(Error::Domain(format!(
            "need 1/alpha < p < inf, got p = {p}"
        )));
    }
    if !(r.is_finite() && r > 1.0) {
        return Err(Error::Domain(format!("need 1 < r < inf, got r = {r}")));
    }
    Ok(())
}

/// `1/p + α/r ≤ α`.
pub fn serrin_condition(p: f64, r: f64, alpha: f64) -> bool {
    1.0 / p + alpha / r <= alpha
}

/// Serrin-type check on a time series of `‖∇⊥θ(t)‖_{L^p}`.
pub fn serrin_check_series(
    times: &[f64],
    norms: &[f64],
    p: f64,
    r: f64,
    alpha: f64,
    t_end: f64,
) -> Result<SerrinReport> {
    serrin_pre(p, r, alpha)?;
    let pairs: Vec<(f64, f64)> = times
        .iter()
        .zip(norms)
        .filter(|(t, _)| **t <= t_end * (1.0 + 1e-12))
        .map(|(t, v)| (*t, v.powf(r)))
        .collect();
    if pairs.len() < 3 {
        return Err(Error::InsufficientRecords {
            needed: 3,
            got: pairs.len(),
        });
    }
    let integral: f64 = pairs
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    let condition_holds = serrin_condition(p, r, alpha);
    let verdict = if condition_holds && integral.is_finite() {
        SerrinVerdict::Satisfied
    } else {
        SerrinVerdict::Inconclusive
    };
    Ok(SerrinReport {
        p,
        r,
        alpha,
        t_end,
        lhs: 1.0 / p + alpha / r,
        condition_holds,
        integral,
        samples: pairs.len(),
        verdict,
    })
}

/// Serrin-type check reading the `grad_l{p}` channel of run records.
pub fn serrin_check(
    records: &[DiagnosticRecord],
    p: f64,
    r: f64,
    alpha: f64,
    t_end: f64,
) -> Result<SerrinReport> {
    serrin_pre(p, r, alpha)?;
    let name = grad_channel(p);
    let (times, norms): (Vec<f64>, Vec<f64>) = records
        .iter()
        .filter_map(|rec| rec.get(&name).map(|v| (rec.t, v)))
        .unzip();
    serrin_check_series(&times, &norms, p, r, alpha, t_end)
}

/// Exponents of the level-curve criterion. Infinite exponents are `f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometricParams {
    pub p1: f64,
    pub p2: f64,
    pub r1: f64,
    pub r2: f64,
    /// Integrability index of the semi-norm of `ξ`.
    pub q: f64,
    pub sigma: f64,
    pub beta: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricReport {
    /// `1/p₁ + 1/p₂ + α/r₁ + α/r₂`.
    pub lhs: f64,
    /// `α + (1 + σ − β)/2`.
    pub rhs: f64,
    pub holds: bool,
    /// `s = σ − β + 1`.
    pub s: f64,
    /// `Q = 2α / ((2α + s) − 2/p₁ − 2/p₂)`, absent when the denominator is not positive.
    pub big_q: Option<f64>,
    pub q_out_of_domain: bool,
    /// `1/r₁ + 1/r₂ ≤ 1/Q`; agrees with `holds` whenever `Q` exists.
    pub r_condition: Option<bool>,
    /// Whether `p₂` and `q` lie in the index windows of the criterion.
    pub domain_ok: bool,
    pub domain_notes: Vec<String>,
}

pub fn geometric_check(g: &GeometricParams) -> Result<GeometricReport> {
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    if !(g.sigma > 0.0 && g.sigma < 1.0) {
        return Err(Error::Domain(format!(
            "sigma must lie in (0, 1), got {}",
            g.sigma
        )));
    }
    if !(0.0..=1.0).contains(&g.beta) {
        return Err(Error::Domain(format!(
            "beta must lie in [0, 1], got {}",
            g.beta
        )));
    }
    if !(g.alpha > 0.0 && g.alpha.is_finite()) {
        return Err(Error::Domain(format!("alpha must be > 0, got {}", g.alpha)));
    }
    for (name, v) in [("p1", g.p1), ("p2", g.p2)] {
        if v.is_nan() || v <= 1.0 {
            return Err(Error::Domain(format!("{name} must be > 1, got {v}")));
        }
    }
    for (name, v) in [("r1", g.r1), ("r2", g.r2), ("q", g.q)] {
        if v.is_nan() || v < 1.0 {
            return Err(Error::Domain(format!("{name} must be >= 1, got {v}")));
        }
    }
    let lhs = inv(g.p1) + inv(g.p2) + g.alpha * inv(g.r1) + g.alpha * inv(g.r2);
    let rhs = g.alpha + 0.5 * (1.0 + g.sigma - g.beta);
    let s = g.sigma - g.beta + 1.0;
    let denom = 2.0 * g.alpha + s - 2.0 * inv(g.p1) - 2.0 * inv(g.p2);
    let big_q = (denom > 0.0).then(|| 2.0 * g.alpha / denom);
    let r_condition = big_q.map(|q| inv(g.r1) + inv(g.r2) <= 1.0 / q);
    let mut domain_notes = Vec::new();
    let p2_edge = 2.0 / (1.0 + g.sigma - g.beta);
    if g.p2 >= p2_edge {
        domain_notes.push(format!("p2 = {} outside (1, {p2_edge})", g.p2));
    }
    let q_edge = 2.0 / (1.0 + g.beta - g.sigma);
    if g.q <= q_edge {
        domain_notes.push(format!("q = {} outside ({q_edge}, inf]", g.q));
    }
    Ok(GeometricReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
        s,
        big_q,
        q_out_of_domain: big_q.is_none(),
        r_condition,
        domain_ok: domain_notes.is_empty(),
        domain_notes,
    })
}

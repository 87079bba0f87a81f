//! Radial multiplier symbols `P(|ξ|)` and a sampled check of the
//! Mihlin-type smoothness condition they are required to satisfy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The symbol catalog. Serialized with a `family` tag, e.g.
/// `{"family":"power_times_log","beta":0.4,"gamma":1.0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MultiplierSpec {
    /// `P ≡ 1`.
    Identity,
    /// `P(r) = r^β`.
    Power { beta: f64 },
    /// `P(r) = log(1 + r²)^γ`.
    LogPower { gamma: f64 },
    /// `P(r) = log(1 + log(1 + r²))^γ`.
    LoglogPower { gamma: f64 },
    /// `P(r) = log(1 + r²)^γ r^β`.
    PowerTimesLog { beta: f64, gamma: f64 },
}

impl MultiplierSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = |name: &str, v: f64| {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    format!("P.{name}"),
                    format!("must be finite and >= 0, got {v}"),
                ))
            }
        };
        match *self {
            MultiplierSpec::Identity => Ok(()),
            MultiplierSpec::Power { beta } => ok("beta", beta),
            MultiplierSpec::LogPower { gamma } | MultiplierSpec::LoglogPower { gamma } => {
                ok("gamma", gamma)
            }
            MultiplierSpec::PowerTimesLog { beta, gamma } => {
                ok("beta", beta)?;
                ok("gamma", gamma)
            }
        }
    }

    /// Parses either the JSON form or a compact `family[:a[:b]]` form:
    /// `identity`, `power:1`, `log_power:2`, `loglog_power:1`,
    /// `power_times_log:0.4:1` (β then γ).
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |m: String| Error::config("P", m);
        let spec = if text.starts_with('{') {
            serde_json::from_str(text).map_err(|e| bad(e.to_string()))?
        } else {
            let mut parts = text.split(':');
            let family = parts.next().unwrap_or_default();
            let args = parts
                .map(|a| {
                    a.parse::<f64>()
                        .map_err(|_| bad(format!("not a number: {a}")))
                })
                .collect::<Result<Vec<f64>>>()?;
            match (family, args.as_slice()) {
                ("identity", []) => MultiplierSpec::Identity,
                ("power", &[beta]) => MultiplierSpec::Power { beta },
                ("log_power", &[gamma]) => MultiplierSpec::LogPower { gamma },
                ("loglog_power", &[gamma]) => MultiplierSpec::LoglogPower { gamma },
                ("power_times_log", &[beta, gamma]) => {
                    MultiplierSpec::PowerTimesLog { beta, gamma }
                }
                _ => return Err(bad(format!("unrecognized symbol `{text}`"))),
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            MultiplierSpec::Identity => "identity",
            MultiplierSpec::Power { .. } => "power",
            MultiplierSpec::LogPower { .. } => "log_power",
            MultiplierSpec::LoglogPower { .. } => "loglog_power",
            MultiplierSpec::PowerTimesLog { .. } => "power_times_log",
        }
    }

    /// Power-law exponent `β` (0 for the purely logarithmic families).
    pub fn beta(&self) -> f64 {
        match *self {
            MultiplierSpec::Power { beta } | MultiplierSpec::PowerTimesLog { beta, .. } => beta,
            _ => 0.0,
        }
    }

    /// Logarithmic exponent `γ` (0 for identity and pure powers).
    pub fn gamma(&self) -> f64 {
        match *self {
            MultiplierSpec::LogPower { gamma }
            | MultiplierSpec::LoglogPower { gamma }
            | MultiplierSpec::PowerTimesLog { gamma, .. } => gamma,
            _ => 0.0,
        }
    }

    /// `P(r)` for `r ≥ 0`.
    pub fn evaluate(&self, r: f64) -> f64 {
        debug_assert!(r >= 0.0, "negative radius {r}");
        match *self {
            MultiplierSpec::Identity => 1.0,
            MultiplierSpec::Power { beta } => r.powf(beta),
            MultiplierSpec::LogPower { gamma } => log1p_sq(r).powf(gamma),
            MultiplierSpec::LoglogPower { gamma } => log1p_sq(r).ln_1p().powf(gamma),
            MultiplierSpec::PowerTimesLog { beta, gamma } => log1p_sq(r).powf(gamma) * r.powf(beta),
        }
    }

    /// `ln P(r)` for `r > 0`, stable for radii far beyond `f64` overflow of `P`.
    pub fn ln_evaluate(&self, r: f64) -> f64 {
        debug_assert!(r > 0.0);
        let ln_log = |g: f64| if g == 0.0 { 0.0 } else { g * ln_log1p_sq(r) };
        match *self {
            MultiplierSpec::Identity => 0.0,
            MultiplierSpec::Power { beta } => beta * r.ln(),
            MultiplierSpec::LogPower { gamma } => ln_log(gamma),
            MultiplierSpec::LoglogPower { gamma } => {
                if gamma == 0.0 {
                    0.0
                } else {
                    gamma * ln_log1p_sq(r).exp().ln_1p().ln()
                }
            }
            MultiplierSpec::PowerTimesLog { beta, gamma } => beta * r.ln() + ln_log(gamma),
        }
    }
}

impl MultiplierSpec {
    /// `ln P(e^ℓ)`, usable for radii that do not fit in an `f64`.
    pub fn ln_evaluate_at_ln(&self, ln_r: f64) -> f64 {
        if ln_r < 300.0 {
            return self.ln_evaluate(ln_r.exp());
        }
        // log(1 + r²) = 2ℓ to double precision here
        let log_part = 2.0 * ln_r;
        let ln_log = |g: f64| if g == 0.0 { 0.0 } else { g * log_part.ln() };
        match *self {
            MultiplierSpec::Identity => 0.0,
            MultiplierSpec::Power { beta } => beta * ln_r,
            MultiplierSpec::LogPower { gamma } => ln_log(gamma),
            MultiplierSpec::LoglogPower { gamma } => {
                if gamma == 0.0 {
                    0.0
                } else {
                    gamma * log_part.ln_1p().ln()
                }
            }
            MultiplierSpec::PowerTimesLog { beta, gamma } => beta * ln_r + ln_log(gamma),
        }
    }
}

/// `log(1 + r²)`, switching to `2 log r` once `r²` would overflow.
fn log1p_sq(r: f64) -> f64 {
    if r < 1e150 {
        (r * r).ln_1p()
    } else {
        2.0 * r.ln()
    }
}

fn ln_log1p_sq(r: f64) -> f64 {
    log1p_sq(r).ln()
}

/// Outcome of [`check_condition`]. The check samples a finite set of scales
/// and radii, so `true`/small ratios mean only that no violation was found.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub nondecreasing_ok: bool,
    /// Max over sampled `j` and `n ∈ {1, 2}` of
    /// `sup_{1/2≤|η|≤2} |(I−Δ_η)^n P(2^j|η|)| / P(C₀2^j)`.
    pub smoothness_ratio: f64,
    pub c0: f64,
    pub n_max: u32,
    /// `(j, ratio)` per scale, ratio maximized over `n`.
    pub samples: Vec<(i32, f64)>,
    /// Scales whose evaluation overflowed.
    pub skipped: Vec<i32>,
    pub note: String,
}

/// Highest power of `(I − Δ)` required in two dimensions, `1 + ⌊d/2⌋`.
const N_MAX_2D: u32 = 2;

pub const DEFAULT_C0: f64 = 2.0;

/// Check the catalog symbol `spec`; see [`check_condition_with`].
pub fn check_condition(
    spec: &MultiplierSpec,
    j_range: std::ops::RangeInclusive<i32>,
    eta_samples: usize,
    c0: f64,
) -> Result<ConditionReport> {
    spec.validate()?;
    check_condition_with(|r| spec.evaluate(r), j_range, eta_samples, c0)
}

/// Sampled falsifier for the symbol conditions: monotonicity from consecutive
/// samples, and the annulus bound on `(I−Δ_η)^n P(2^j|η|)`, `n = 1, 2`, using
/// second-order central differences with step `h = 1/(4·eta_samples)` and the
/// radial Laplacian `g'' + g'/|η|`.
pub fn check_condition_with(
    symbol: impl Fn(f64) -> f64,
    j_range: std::ops::RangeInclusive<i32>,
    eta_samples: usize,
    c0: f64,
) -> Result<ConditionReport> {
    if j_range.is_empty() {
        return Err(Error::Domain("j_range must be nonempty".into()));
    }
    if eta_samples < 16 {
        return Err(Error::Domain(format!(
            "eta_samples must be >= 16, got {eta_samples}"
        )));
    }
    if !(c0.is_finite() && c0 > 0.0) {
        return Err(Error::Domain(format!("C0 must be positive, got {c0}")));
    }

    let h = 1.0 / (4.0 * eta_samples as f64);
    let etas: Vec<f64> = (0..eta_samples)
        .map(|i| 0.5 + 1.5 * i as f64 / (eta_samples - 1) as f64)
        .collect();

    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    for j in j_range.clone() {
        let scale = 2f64.powi(j);
        let g = |r: f64| symbol(scale * r);
        // (I - Δ) g at r from samples at r, r ± h
        let once = |r: f64| {
            let (gm, g0, gp) = (g(r - h), g(r), g(r + h));
            let d1 = (gp - gm) / (2.0 * h);
            let d2 = (gp - 2.0 * g0 + gm) / (h * h);
            g0 - d2 - d1 / r
        };
        let twice = |r: f64| {
            let (lm, l0, lp) = (once(r - h), once(r), once(r + h));
            let d1 = (lp - lm) / (2.0 * h);
            let d2 = (lp - 2.0 * l0 + lm) / (h * h);
            l0 - d2 - d1 / r
        };
        let denom = symbol(c0 * scale);
        let mut worst = 0.0_f64;
        let mut finite = denom.is_finite() && denom > 0.0;
        for &eta in &etas {
            let a = once(eta).abs();
            let b = twice(eta).abs();
            if !(a.is_finite() && b.is_finite()) {
                finite = false;
                break;
            }
            worst = worst.max(a).max(b);
        }
        let ratio = worst / denom;
        if finite && ratio.is_finite() {
            samples.push((j, ratio));
        } else {
            skipped.push(j);
        }
    }

    // monotonicity on a geometric radius grid spanning all probed scales
    let r_hi = c0 * 2f64.powi(*j_range.end()) * 2.0;
    let mut nondecreasing_ok = symbol(0.0).is_finite();
    let mut prev = symbol(0.0);
    let steps = 64 * (j_range.end() - j_range.start() + 8).max(1) as usize;
    let r_lo = 2f64.powi(*j_range.start()) / 64.0;
    for i in 0..=steps {
        let r = r_lo * (r_hi / r_lo).powf(i as f64 / steps as f64);
        let v = symbol(r);
        if !(v.is_finite() && v >= 0.0 && v >= prev) {
            nondecreasing_ok = false;
            break;
        }
        prev = v;
    }

    let smoothness_ratio = samples.iter().map(|&(_, r)| r).fold(0.0, f64::max);
    Ok(ConditionReport {
        nondecreasing_ok,
        smoothness_ratio,
        c0,
        n_max: N_MAX_2D,
        samples,
        skipped,
        note: "sampled check: reports only that no violation was found at the probed scales".into(),
    })
}

//! Run configuration: JSON schema, preset expansion and validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::{BesovIndex, Integrability};
use crate::spectral::{random_band, Grid, ScalarField, SpectrumField};
use crate::symbols::MultiplierSpec;

/// Named equation families that pin parts of the configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// `P ≡ 1`, `α = 1`; `κ` plays the viscosity.
    NavierStokes,
    /// `P(Λ) = Λ`.
    Sqg,
    /// `P(Λ) = Λ^{2α}`.
    ModifiedSqg,
    /// `P(Λ) = log(1 − Δ)^γ`, `γ = 1` unless given.
    LogEuler,
    /// `P(Λ) = Λ^β` with `β` taken from `P`.
    GeneralizedSqg,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::NavierStokes,
        Preset::Sqg,
        Preset::ModifiedSqg,
        Preset::LogEuler,
        Preset::GeneralizedSqg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::NavierStokes => "navier_stokes",
            Preset::Sqg => "sqg",
            Preset::ModifiedSqg => "modified_sqg",
            Preset::LogEuler => "log_euler",
            Preset::GeneralizedSqg => "generalized_sqg",
        }
    }

    /// Resolves `(α, P)` against what the user supplied.
    fn expand(
        &self,
        alpha: Option<f64>,
        p: Option<MultiplierSpec>,
    ) -> Result<(f64, MultiplierSpec)> {
        let conflict = |field: &str, what: String| {
            Err(Error::config(
                field,
                format!("conflicts with preset {}: {what}", self.name()),
            ))
        };
        let need_alpha = || alpha.ok_or_else(|| Error::config("alpha", "missing"));
        match self {
            Preset::NavierStokes => {
                if let Some(a) = alpha.filter(|&a| a != 1.0) {
                    return conflict("alpha", format!("expected 1, got {a}"));
                }
                match p {
                    None | Some(MultiplierSpec::Identity) => Ok((1.0, MultiplierSpec::Identity)),
                    Some(other) => conflict(
                        "P",
                        format!("expected identity, got {}", other.family_name()),
                    ),
                }
            }
            Preset::Sqg => {
                let fixed = MultiplierSpec::Power { beta: 1.0 };
                match p {
                    Some(given) if given != fixed => {
                        conflict("P", format!("expected power beta=1, got {given:?}"))
                    }
                    _ => Ok((need_alpha()?, fixed)),
                }
            }
            Preset::ModifiedSqg => {
                let a = need_alpha()?;
                let fixed = MultiplierSpec::Power { beta: 2.0 * a };
                match p {
                    Some(given) if given != fixed => conflict(
                        "P",
                        format!("expected power beta=2*alpha={}, got {given:?}", 2.0 * a),
                    ),
                    _ => Ok((a, fixed)),
                }
            }
            Preset::LogEuler => match p {
                None => Ok((need_alpha()?, MultiplierSpec::LogPower { gamma: 1.0 })),
                Some(given @ MultiplierSpec::LogPower { .. }) => Ok((need_alpha()?, given)),
                Some(other) => conflict(
                    "P",
                    format!("expected log_power, got {}", other.family_name()),
                ),
            },
            Preset::GeneralizedSqg => match p {
                Some(given @ MultiplierSpec::Power { .. }) => Ok((need_alpha()?, given)),
                None => Err(Error::config(
                    "P",
                    "generalized_sqg needs P = power with beta",
                )),
                Some(other) => {
                    conflict("P", format!("expected power, got {}", other.family_name()))
                }
            },
        }
    }
}

/// `"auto"` or a positive number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "serde_json::Value", into = "serde_json::Value")]
pub enum TimeStep {
    Auto,
    Fixed(f64),
}

impl TryFrom<serde_json::Value> for TimeStep {
    type Error = String;

    fn try_from(v: serde_json::Value) -> std::result::Result<Self, String> {
        match v {
            serde_json::Value::String(s) if s == "auto" => Ok(TimeStep::Auto),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(TimeStep::Fixed)
                .ok_or_else(|| format!("bad dt {n}")),
            other => Err(format!("dt must be \"auto\" or a number, got {other}")),
        }
    }
}

impl From<TimeStep> for serde_json::Value {
    fn from(dt: TimeStep) -> Self {
        match dt {
            TimeStep::Auto => "auto".into(),
            TimeStep::Fixed(v) => v.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Integrating-factor RK4; exact on the linear part.
    #[default]
    #[serde(rename = "ifrk4")]
    IfRk4,
    /// Classical RK4 on the full right-hand side.
    Rk4,
}

/// Mean-zero initial data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `amplitude · sin(k·x + phase)` with `k = (m1, m2)·2π/L`.
    SingleMode {
        m1: i64,
        m2: i64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Gaussian spectrum on shells `j_min..=j_max` with standard deviation
    /// `|k|^{-slope}`, rescaled to `max|θ₀| = amplitude`.
    RandomBand {
        j_min: i32,
        j_max: i32,
        #[serde(default)]
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
        seed: u64,
    },
    /// Periodized Gaussian of the given width centred in the box, minus its mean.
    Bump {
        width: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    fn validate(&self) -> Result<()> {
        let amp = |a: f64| {
            if a.is_finite() {
                Ok(())
            } else {
                Err(Error::config("initial.amplitude", "must be finite"))
            }
        };
        match *self {
            InitialData::SingleMode {
                m1,
                m2,
                amplitude,
                phase,
            } => {
                amp(amplitude)?;
                if (m1, m2) == (0, 0) {
                    return Err(Error::config(
                        "initial.m1",
                        "the zero mode is not mean-zero",
                    ));
                }
                if !phase.is_finite() {
                    return Err(Error::config("initial.phase", "must be finite"));
                }
                Ok(())
            }
            InitialData::RandomBand {
                j_min,
                j_max,
                slope,
                amplitude,
                ..
            } => {
                amp(amplitude)?;
                if j_min < -1 || j_max < j_min {
                    return Err(Error::config(
                        "initial.j_max",
                        format!("need -1 <= j_min <= j_max, got {j_min}..{j_max}"),
                    ));
                }
                if !slope.is_finite() {
                    return Err(Error::config("initial.slope", "must be finite"));
                }
                Ok(())
            }
            InitialData::Bump { width, amplitude } => {
                amp(amplitude)?;
                if !(width.is_finite() && width > 0.0) {
                    return Err(Error::config("initial.width", "must be > 0"));
                }
                Ok(())
            }
        }
    }

    /// Spectrum of the initial field, mean removed and dealiased.
    pub fn generate(&self, grid: Grid) -> Result<SpectrumField> {
        let mut hat = match *self {
            InitialData::SingleMode {
                m1,
                m2,
                amplitude,
                phase,
            } => {
                let ku = grid.k_unit();
                let (k1, k2) = (m1 as f64 * ku, m2 as f64 * ku);
                ScalarField::from_fn(grid, |x, y| amplitude * (k1 * x + k2 * y + phase).sin())
                    .forward()?
            }
            InitialData::RandomBand {
                j_min,
                j_max,
                slope,
                amplitude,
                seed,
            } => {
                let lo = if j_min < 0 { 0.0 } else { 2f64.powi(j_min) };
                let mut hat = random_band(grid, lo, 2f64.powi(j_max + 1), slope, seed);
                hat.dealias_in_place();
                let peak = hat.to_real_unchecked().max_abs();
                if peak > 0.0 {
                    hat = hat.scale(amplitude / peak);
                }
                hat
            }
            InitialData::Bump { width, amplitude } => {
                let l = grid.length();
                let c = l / 2.0;
                let wrap = |d: f64| {
                    let d = (d - c).rem_euclid(l);
                    d.min(l - d)
                };
                ScalarField::from_fn(grid, |x, y| {
                    let r2 = wrap(x).powi(2) + wrap(y).powi(2);
                    amplitude * (-r2 / (2.0 * width * width)).exp()
                })
                .forward()?
            }
        };
        hat.coeffs_mut()[0] = Default::default();
        hat.dealias_in_place();
        Ok(hat)
    }
}

/// Which diagnostics are evaluated at each cadence point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monitor {
    /// `lp_1`, `lp_2`, `lp_inf`, `mean`.
    Norms,
    /// `besov`.
    Besov,
    /// `grad_inf` and `grad_l{p}` for each configured `p`.
    Gradient,
    /// `tl_xi`, the semi-norm of the level-curve direction field.
    TlXi,
    /// `ratio2_max`, `ratio3_max`.
    Bounds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SnapshotPolicy {
    #[default]
    None,
    /// Initial and final states.
    Ends,
    /// Every cadence point.
    Every,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsConfig {
    pub monitors: Vec<Monitor>,
    pub besov: BesovIndex,
    /// Exponents `p` of the `‖∇⊥θ‖_{L^p}` channels.
    pub grad_p: Vec<f64>,
    pub tl_sigma: f64,
    pub tl_p: Integrability,
    pub tl_q: Integrability,
    /// Highest shell used by the bound-ratio monitor.
    pub bounds_j_max: i32,
    /// `(p, r)` pairs evaluated by `analyze`.
    pub serrin: Vec<(f64, f64)>,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            monitors: vec![
                Monitor::Norms,
                Monitor::Besov,
                Monitor::Gradient,
                Monitor::TlXi,
                Monitor::Bounds,
            ],
            besov: BesovIndex::default(),
            grad_p: vec![4.0],
            tl_sigma: 0.5,
            tl_p: Integrability::Infinite,
            tl_q: Integrability::Infinite,
            bounds_j_max: 5,
            serrin: vec![(4.0, 4.0)],
        }
    }
}

impl DiagnosticsConfig {
    pub fn has(&self, m: Monitor) -> bool {
        self.monitors.contains(&m)
    }

    fn validate(&self) -> Result<()> {
        self.besov.validate()?;
        if let Some(p) = self.grad_p.iter().find(|p| !(p.is_finite() && **p >= 1.0)) {
            return Err(Error::config(
                "diagnostics.grad_p",
                format!("exponents must be finite and >= 1, got {p}"),
            ));
        }
        if !(self.tl_sigma > 0.0 && self.tl_sigma < 1.0) {
            return Err(Error::config(
                "diagnostics.tl_sigma",
                format!("must lie in (0, 1), got {}", self.tl_sigma),
            ));
        }
        if self.bounds_j_max < 0 {
            return Err(Error::config("diagnostics.bounds_j_max", "must be >= 0"));
        }
        Ok(())
    }
}

/// Fully expanded run configuration. This is also the serialized form, so a
/// written config parses back to the same value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default = "default_grid")]
    pub grid: Grid,
    pub kappa: f64,
    pub alpha: f64,
    #[serde(rename = "P")]
    pub p: MultiplierSpec,
    pub initial: InitialData,
    #[serde(default = "default_dt")]
    pub dt: TimeStep,
    pub t_end: f64,
    pub cadence: f64,
    #[serde(default)]
    pub integrator: Integrator,
    /// Smallest admissible gradient length scale `‖θ₀‖_∞/‖∇θ‖_∞`, in cells.
    /// The run aborts as under-resolved once it is crossed.
    #[serde(default = "default_budget")]
    pub grad_budget: f64,
    #[serde(default)]
    pub snapshots: SnapshotPolicy,
    #[serde(default)]
    pub diagnostics: DiagnosticsConfig,
}

fn default_grid() -> Grid {
    Grid::periodic(128).expect("valid")
}

fn default_dt() -> TimeStep {
    TimeStep::Auto
}

pub const DEFAULT_GRAD_BUDGET: f64 = 0.1;

fn default_budget() -> f64 {
    DEFAULT_GRAD_BUDGET
}

/// Input schema: like [`RunConfig`] but with preset-controlled fields optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    preset: Option<Preset>,
    #[serde(default = "default_grid")]
    grid: Grid,
    kappa: f64,
    alpha: Option<f64>,
    #[serde(rename = "P")]
    p: Option<MultiplierSpec>,
    initial: InitialData,
    #[serde(default = "default_dt")]
    dt: TimeStep,
    t_end: f64,
    cadence: Option<f64>,
    #[serde(default)]
    integrator: Integrator,
    #[serde(default = "default_budget")]
    grad_budget: f64,
    #[serde(default)]
    snapshots: SnapshotPolicy,
    #[serde(default)]
    diagnostics: DiagnosticsConfig,
}

impl RunConfig {
    /// Parses JSON text, expands the preset and validates.
    pub fn from_json(text: &str) -> Result<RunConfig> {
        if text.trim().is_empty() {
            return Err(Error::config("<root>", "empty configuration"));
        }
        let raw: RawConfig =
            serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        Self::from_raw(raw)
    }

    /// Same as [`RunConfig::from_json`] for an already parsed value.
    pub fn from_value(value: serde_json::Value) -> Result<RunConfig> {
        let raw: RawConfig =
            serde_json::from_value(value).map_err(|e| Error::config("<json>", e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<RunConfig> {
        let (alpha, p) = match raw.preset {
            Some(preset) => preset.expand(raw.alpha, raw.p)?,
            None => (
                raw.alpha.ok_or_else(|| Error::config("alpha", "missing"))?,
                raw.p
                    .ok_or_else(|| Error::config("P", "missing (no preset given)"))?,
            ),
        };
        let config = RunConfig {
            preset: raw.preset,
            grid: raw.grid,
            kappa: raw.kappa,
            alpha,
            p,
            initial: raw.initial,
            dt: raw.dt,
            t_end: raw.t_end,
            cadence: raw.cadence.unwrap_or(raw.t_end / 10.0),
            integrator: raw.integrator,
            grad_budget: raw.grad_budget,
            snapshots: raw.snapshots,
            diagnostics: raw.diagnostics,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(Error::config(
                "kappa",
                format!("must be finite and >= 0, got {}", self.kappa),
            ));
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::config(
                "alpha",
                format!("must be > 0, got {}", self.alpha),
            ));
        }
        self.p.validate()?;
        self.initial.validate()?;
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::config(
                    "dt",
                    format!("must be > 0 or \"auto\", got {dt}"),
                ));
            }
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::config(
                "t_end",
                format!("must be >= 0, got {}", self.t_end),
            ));
        }
        if !(self.cadence.is_finite() && (self.cadence > 0.0 || self.t_end == 0.0)) {
            return Err(Error::config(
                "cadence",
                format!("must be > 0, got {}", self.cadence),
            ));
        }
        if !(self.grad_budget.is_finite() && self.grad_budget > 0.0) {
            return Err(Error::config("grad_budget", "must be > 0"));
        }
        self.diagnostics.validate()
    }

    /// A small reference configuration: SQG-family run of a single mode.
    pub fn example() -> RunConfig {
        RunConfig {
            preset: Some(Preset::Sqg),
            grid: Grid::periodic(64).expect("valid"),
            kappa: 1.0,
            alpha: 0.5,
            p: MultiplierSpec::Power { beta: 1.0 },
            initial: InitialData::SingleMode {
                m1: 1,
                m2: 0,
                amplitude: 1.0,
                phase: 0.0,
            },
            dt: TimeStep::Auto,
            t_end: 1.0,
            cadence: 0.1,
            integrator: Integrator::IfRk4,
            grad_budget: DEFAULT_GRAD_BUDGET,
            snapshots: SnapshotPolicy::None,
            diagnostics: DiagnosticsConfig::default(),
        }
    }
}

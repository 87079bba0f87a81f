//! The run loop: cadence, CFL gate, monitors, persistence.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{classify, GateVerdict};
use crate::harness::record::{
    grad_channel, DiagnosticRecord, FLAG_BLOW_UP, FLAG_CFL_CLAMPED, FLAG_MASK_EMPTY,
    FLAG_MEAN_NONZERO, FLAG_UNDER_RESOLVED,
};
use crate::lp::{
    besov_norm, direction_field, field_bound_ratios, gradient_magnitude, has_mean, lp_norm,
};
use crate::spectral::snapshot::save_snapshot;
use crate::velocity::compute_velocity;

use super::config::{Monitor, RunConfig, SnapshotPolicy, TimeStep};
use super::step::{SimState, Stepper};

pub const DIAGNOSTICS_FILE: &str = "diagnostics.ndjson";
pub const CONFIG_FILE: &str = "config.json";
pub const SUMMARY_FILE: &str = "summary.json";
pub const SNAPSHOT_DIR: &str = "snapshots";

/// Fraction of a cell an element may travel per step.
pub const CFL_SAFETY: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// The state became non-finite.
    BlowUpSuspected,
    /// `‖∇θ‖_∞` exceeded the resolution budget.
    UnderResolved,
}

impl RunStatus {
    pub fn is_abort(&self) -> bool {
        *self != RunStatus::Completed
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub status: RunStatus,
    pub t_final: f64,
    pub steps: u64,
    pub records: usize,
    pub wall_time_s: f64,
    /// Channels of the last record.
    pub final_norms: BTreeMap<String, f64>,
    pub regime: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub summary: RunSummary,
    pub records: Vec<DiagnosticRecord>,
    pub final_state: SimState,
    pub gate: Option<GateVerdict>,
}

/// Largest step the advective CFL gate allows at peak speed `u_max`.
pub fn cfl_limit(dx: f64, u_max: f64) -> f64 {
    CFL_SAFETY * dx / u_max.max(1.0)
}

/// Evaluates the configured monitors on a state. Returns the record and the
/// peak speed.
pub fn measure(state: &SimState, config: &RunConfig) -> Result<(DiagnosticRecord, f64)> {
    let diag = &config.diagnostics;
    let hat = &state.theta_hat;
    let mut rec = DiagnosticRecord::new(state.t);
    let u_max = compute_velocity(hat, &config.p)?.max_speed();
    rec.set("max_u", u_max);
    if diag.has(Monitor::Norms) {
        let theta = state.theta();
        rec.set("lp_1", lp_norm(&theta, 1.0));
        rec.set("lp_2", lp_norm(&theta, 2.0));
        rec.set("lp_inf", lp_norm(&theta, f64::INFINITY));
        rec.set("mean", hat.coeffs()[0].re);
    }
    if has_mean(hat) {
        rec.flag(FLAG_MEAN_NONZERO);
    }
    let grad = gradient_magnitude(hat);
    rec.set("grad_inf", grad.max_abs());
    if diag.has(Monitor::Gradient) {
        for &p in &diag.grad_p {
            rec.set(grad_channel(p), lp_norm(&grad, p));
        }
    }
    if diag.has(Monitor::Besov) {
        rec.set("besov", besov_norm(hat, &diag.besov));
    }
    if diag.has(Monitor::TlXi) {
        let (value, empty) = direction_field(hat, None).tl_seminorm(
            diag.tl_sigma,
            diag.tl_p.as_f64(),
            diag.tl_q.as_f64(),
        )?;
        rec.set("tl_xi", value);
        if empty {
            rec.flag(FLAG_MASK_EMPTY);
        }
    }
    if diag.has(Monitor::Bounds) {
        let ratios = field_bound_ratios(hat, &config.p, diag.bounds_j_max);
        if let Some(v) = ratios.shell_max() {
            rec.set("ratio2_max", v);
        }
        if let Some(v) = ratios.cutoff_max() {
            rec.set("ratio3_max", v);
        }
    }
    Ok((rec, u_max))
}

struct Output {
    dir: PathBuf,
    diagnostics: BufWriter<File>,
}

impl Output {
    fn create(dir: &Path, config: &RunConfig) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let cfg = dir.join(CONFIG_FILE);
        fs::write(&cfg, config.to_json()).map_err(|e| Error::io(&cfg, e))?;
        let path = dir.join(DIAGNOSTICS_FILE);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        Ok(Output {
            dir: dir.to_path_buf(),
            diagnostics: BufWriter::new(file),
        })
    }

    fn record(&mut self, rec: &DiagnosticRecord) -> Result<()> {
        let path = self.dir.join(DIAGNOSTICS_FILE);
        writeln!(self.diagnostics, "{}", rec.to_line())
            .and_then(|_| self.diagnostics.flush())
            .map_err(|e| Error::io(path, e))
    }

    fn snapshot(&self, state: &SimState, index: usize) -> Result<()> {
        let dir = self.dir.join(SNAPSHOT_DIR);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        save_snapshot(
            &dir.join(format!("theta_{index:05}.bin")),
            &state.theta(),
            "theta",
            state.t,
        )
    }

    fn summary(&self, summary: &RunSummary) -> Result<()> {
        let path = self.dir.join(SUMMARY_FILE);
        let text = serde_json::to_string_pretty(summary)?;
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    }
}

/// Integrates `config` to `t_end` or until an abort condition, recording
/// diagnostics at every cadence point. With `out_dir`, writes the config,
/// an NDJSON diagnostics stream, snapshots and a summary there.
pub fn run(config: &RunConfig, out_dir: Option<&Path>) -> Result<RunResult> {
    config.validate()?;
    let started = Instant::now();
    let mut out = out_dir.map(|d| Output::create(d, config)).transpose()?;
    let gate = classify(config, &config.diagnostics.besov).ok();
    let dx = config.grid.dx();

    let mut state = SimState::new(config.initial.generate(config.grid)?);
    let budget = state.theta().max_abs() / (config.grad_budget * dx);
    let mut stepper = Stepper::new(config);
    let mut records = Vec::new();
    let mut status = RunStatus::Completed;

    let (mut rec, mut u_max) = measure(&state, config)?;
    let mut snap_index = 0;
    let emit = |rec: DiagnosticRecord,
                records: &mut Vec<DiagnosticRecord>,
                out: &mut Option<Output>|
     -> Result<()> {
        if let Some(o) = out.as_mut() {
            o.record(&rec)?;
        }
        records.push(rec);
        Ok(())
    };
    if rec.get("grad_inf").is_some_and(|g| g > budget) {
        rec.flag(FLAG_UNDER_RESOLVED);
        status = RunStatus::UnderResolved;
    }
    emit(rec, &mut records, &mut out)?;
    if config.snapshots != SnapshotPolicy::None {
        if let Some(o) = &out {
            o.snapshot(&state, snap_index)?;
            snap_index += 1;
        }
    }

    let intervals = if config.t_end > 0.0 {
        ((config.t_end / config.cadence) - 1e-9).ceil().max(1.0) as usize
    } else {
        0
    };
    for i in 1..=intervals {
        if status.is_abort() {
            break;
        }
        let t_target = (i as f64 * config.cadence).min(config.t_end);
        let span = t_target - state.t;
        let limit = cfl_limit(dx, u_max);
        let (nominal, clamped) = match config.dt {
            TimeStep::Auto => (limit, false),
            TimeStep::Fixed(dt) if dt > limit => (limit, true),
            TimeStep::Fixed(dt) => (dt, false),
        };
        let steps = ((span / nominal) - 1e-9).ceil().max(1.0) as u64;
        let dt = span / steps as f64;
        let mut blown = false;
        for _ in 0..steps {
            match stepper.step(&state, dt) {
                Ok(next) => state = next,
                Err(Error::NonFinite(_)) => {
                    blown = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if blown {
            status = RunStatus::BlowUpSuspected;
            let mut rec = DiagnosticRecord::new(state.t);
            rec.flag(FLAG_BLOW_UP);
            log::warn!("non-finite state after t = {}", state.t);
            emit(rec, &mut records, &mut out)?;
            break;
        }
        state.t = t_target;
        let measured = measure(&state, config)?;
        rec = measured.0;
        u_max = measured.1;
        rec.set("dt", dt);
        rec.set("steps", state.step_count as f64);
        if clamped {
            rec.flag(FLAG_CFL_CLAMPED);
        }
        if rec.get("grad_inf").is_some_and(|g| g > budget) {
            rec.flag(FLAG_UNDER_RESOLVED);
            status = RunStatus::UnderResolved;
            log::warn!("gradient budget exceeded at t = {}", state.t);
        }
        emit(rec, &mut records, &mut out)?;
        let last = i == intervals || status.is_abort();
        let wanted = match config.snapshots {
            SnapshotPolicy::None => false,
            SnapshotPolicy::Ends => last,
            SnapshotPolicy::Every => true,
        };
        if wanted {
            if let Some(o) = &out {
                o.snapshot(&state, snap_index)?;
                snap_index += 1;
            }
        }
    }

    let summary = RunSummary {
        status,
        t_final: state.t,
        steps: state.step_count,
        records: records.len(),
        wall_time_s: started.elapsed().as_secs_f64(),
        final_norms: records
            .last()
            .map(|r| r.channels.clone())
            .unwrap_or_default(),
        regime: gate.as_ref().map(|g| g.regime.name().to_string()),
    };
    if let Some(o) = &out {
        o.summary(&summary)?;
    }
    Ok(RunResult {
        summary,
        records,
        final_state: state,
        gate,
    })
}

//! Post-run analysis of a diagnostics stream.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::run::{CONFIG_FILE, DIAGNOSTICS_FILE};
use crate::dynamics::RunConfig;
use crate::error::{Error, Result};
use crate::gate::{serrin_check, SerrinReport};

use super::record::DiagnosticRecord;

pub const ANALYSIS_FILE: &str = "analysis.json";
pub const CSV_DIR: &str = "csv";

/// Relative slack allowed before a decrease is called an increase.
pub const MONOTONE_SLACK: f64 = 1e-8;
/// Relative drift allowed for a conserved channel.
pub const CONSERVATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelStats {
    pub min: f64,
    pub max: f64,
    pub initial: f64,
    #[serde(rename = "final")]
    pub last: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monotonicity {
    /// Largest step-to-step increase relative to the earlier value.
    pub max_relative_increase: f64,
    pub nonincreasing: bool,
    /// `max |v(t) − v(0)| / |v(0)|`.
    pub relative_drift: f64,
    pub conserved: bool,
}

impl Monotonicity {
    pub fn of(values: &[f64]) -> Option<Monotonicity> {
        let first = *values.first()?;
        let max_relative_increase = values
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let relative_drift = values
            .iter()
            .map(|v| (v - first).abs() / first.abs().max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        Some(Monotonicity {
            max_relative_increase,
            nonincreasing: max_relative_increase <= MONOTONE_SLACK,
            relative_drift,
            conserved: relative_drift <= CONSERVATION_TOL,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerrinEntry {
    pub p: f64,
    pub r: f64,
    pub report: Option<SerrinReport>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub records: usize,
    pub corrupt_lines: usize,
    pub t_nondecreasing: bool,
    pub channels: BTreeMap<String, ChannelStats>,
    pub monotonicity: BTreeMap<String, Monotonicity>,
    pub serrin: Vec<SerrinEntry>,
    pub flags: BTreeMap<String, usize>,
    pub csv_files: Vec<PathBuf>,
}

/// Reads a diagnostics stream, skipping lines that do not parse.
pub fn read_records(path: &Path) -> Result<(Vec<DiagnosticRecord>, usize)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut corrupt = 0;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        match serde_json::from_str::<DiagnosticRecord>(line) {
            Ok(r) => records.push(r),
            Err(_) => corrupt += 1,
        }
    }
    Ok((records, corrupt))
}

/// Writes per-channel CSV series and `analysis.json` into `run_dir`.
/// The run's `config.json`, when present, supplies `α` and the `(p, r)`
/// pairs for the Serrin-type checks.
pub fn analyze(run_dir: &Path) -> Result<AnalysisReport> {
    let (records, corrupt_lines) = read_records(&run_dir.join(DIAGNOSTICS_FILE))?;
    if records.is_empty() {
        return Err(Error::EmptyDiagnostics(run_dir.join(DIAGNOSTICS_FILE)));
    }
    if corrupt_lines > 0 {
        log::warn!("{corrupt_lines} corrupt diagnostics lines skipped");
    }
    let mut series: BTreeMap<String, Vec<(f64, f64)>> = BTreeMap::new();
    let mut flags: BTreeMap<String, usize> = BTreeMap::new();
    for r in &records {
        for (name, v) in &r.channels {
            series.entry(name.clone()).or_default().push((r.t, *v));
        }
        for f in &r.flags {
            *flags.entry(f.clone()).or_default() += 1;
        }
    }

    let csv_dir = run_dir.join(CSV_DIR);
    fs::create_dir_all(&csv_dir).map_err(|e| Error::io(&csv_dir, e))?;
    let mut csv_files = Vec::new();
    let mut channels = BTreeMap::new();
    for (name, points) in &series {
        let path = csv_dir.join(format!("{name}.csv"));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["t", name.as_str()])?;
        for (t, v) in points {
            w.write_record([t.to_string(), v.to_string()])?;
        }
        w.flush().map_err(|e| Error::io(&path, e))?;
        csv_files.push(path);
        let values: Vec<f64> = points.iter().map(|p| p.1).collect();
        channels.insert(
            name.clone(),
            ChannelStats {
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                initial: values[0],
                last: *values.last().expect("nonempty"),
                samples: values.len(),
            },
        );
    }

    let monotonicity = ["lp_2", "lp_inf"]
        .iter()
        .filter_map(|&name| {
            let values: Vec<f64> = series.get(name)?.iter().map(|p| p.1).collect();
            Monotonicity::of(&values).map(|m| (name.to_string(), m))
        })
        .collect();

    let config_path = run_dir.join(CONFIG_FILE);
    let serrin = if config_path.exists() {
        let config = RunConfig::from_json(
            &fs::read_to_string(&config_path).map_err(|e| Error::io(&config_path, e))?,
        )?;
        let t_end = records.last().expect("nonempty").t;
        config
            .diagnostics
            .serrin
            .iter()
            .map(
                |&(p, r)| match serrin_check(&records, p, r, config.alpha, t_end) {
                    Ok(report) => SerrinEntry {
                        p,
                        r,
                        report: Some(report),
                        error: None,
                    },
                    Err(e) => SerrinEntry {
                        p,
                        r,
                        report: None,
                        error: Some(e.to_string()),
                    },
                },
            )
            .collect()
    } else {
        Vec::new()
    };

    let report = AnalysisReport {
        records: records.len(),
        corrupt_lines,
        t_nondecreasing: records.windows(2).all(|w| w[1].t >= w[0].t),
        channels,
        monotonicity,
        serrin,
        flags,
        csv_files,
    };
    let out = run_dir.join(ANALYSIS_FILE);
    fs::write(&out, serde_json::to_string_pretty(&report)?).map_err(|e| Error::io(&out, e))?;
    Ok(report)
}

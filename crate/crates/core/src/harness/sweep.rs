//! Cartesian parameter sweeps over a base configuration.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::{run, RunConfig, RunStatus};
use crate::error::{Error, Result};

use super::{config_hash, worker_count};

pub const DEFAULT_CAP: usize = 4096;
pub const INDEX_FILE: &str = "index.ndjson";

/// Axis values of one sweep point and its expanded configuration.
pub type SweepPoint = (BTreeMap<String, Value>, RunConfig);

/// One swept parameter, addressed by a dotted path into the config JSON
/// (`"alpha"`, `"P.beta"`, `"initial.seed"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub path: String,
    pub values: Vec<Value>,
}

/// The base is kept as raw JSON so presets expand per point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub base: Value,
    #[serde(default)]
    pub axes: Vec<Axis>,
    #[serde(default = "one")]
    pub max_parallel: usize,
    #[serde(default = "default_cap")]
    pub cap: usize,
}

fn one() -> usize {
    1
}

fn default_cap() -> usize {
    DEFAULT_CAP
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexRow {
    pub hash: String,
    pub params: BTreeMap<String, Value>,
    pub regime: Option<String>,
    pub status: Option<RunStatus>,
    pub final_norms: BTreeMap<String, f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub runs: usize,
    pub deduplicated: usize,
    pub failures: usize,
    pub aborted: usize,
    pub index: PathBuf,
}

impl SweepSpec {
    pub fn from_json(text: &str) -> Result<SweepSpec> {
        if text.trim().is_empty() {
            return Err(Error::config("<root>", "empty sweep spec"));
        }
        let spec: SweepSpec =
            serde_json::from_str(text).map_err(|e| Error::config("<json>", e.to_string()))?;
        if spec.max_parallel == 0 {
            return Err(Error::config("max_parallel", "must be >= 1"));
        }
        Ok(spec)
    }

    /// Expanded, validated and deduplicated points with their axis values,
    /// plus the number of points removed as duplicates.
    pub fn expand(&self) -> Result<(Vec<SweepPoint>, usize)> {
        let mut removed = 0;
        let mut axes = Vec::new();
        for axis in &self.axes {
            if axis.values.is_empty() {
                return Err(Error::config(format!("axes.{}", axis.path), "no values"));
            }
            let mut unique: Vec<Value> = Vec::new();
            for v in &axis.values {
                if unique.contains(v) {
                    log::warn!("duplicate value {v} on axis {} dropped", axis.path);
                    removed += 1;
                } else {
                    unique.push(v.clone());
                }
            }
            axes.push((axis.path.clone(), unique));
        }
        let size = axes
            .iter()
            .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()));
        match size {
            Some(s) if s <= self.cap => {}
            _ => {
                return Err(Error::config(
                    "axes",
                    format!("cartesian product exceeds the cap of {}", self.cap),
                ))
            }
        }
        let mut points: Vec<BTreeMap<String, Value>> = vec![BTreeMap::new()];
        for (path, values) in &axes {
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |v| {
                        let mut q = p.clone();
                        q.insert(path.clone(), v.clone());
                        q
                    })
                })
                .collect();
        }
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for params in points {
            let mut value = self.base.clone();
            for (path, v) in &params {
                set_path(&mut value, path, v.clone())?;
            }
            let config = RunConfig::from_value(value)?;
            let hash = config_hash(&config);
            if seen.contains(&hash) {
                log::warn!("sweep point {params:?} duplicates an earlier configuration");
                removed += 1;
                continue;
            }
            seen.push(hash);
            out.push((params, config));
        }
        Ok((out, removed))
    }
}

fn set_path(root: &mut Value, path: &str, v: Value) -> Result<()> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(Error::config(format!("axes.{path}"), "empty path segment"));
        }
        let obj = node.as_object_mut().ok_or_else(|| {
            Error::config(format!("axes.{path}"), "path runs through a non-object")
        })?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), v);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one segment")
}

/// Runs every point of the sweep, each in `out_dir/<hash>/`, and writes
/// `index.ndjson` with one row per point in expansion order. A failed run
/// is recorded in its row and does not stop the sweep.
pub fn sweep(spec: &SweepSpec, out_dir: &Path) -> Result<SweepSummary> {
    let (points, deduplicated) = spec.expand()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count(spec.max_parallel))
        .build()
        .map_err(|e| Error::config("max_parallel", e.to_string()))?;
    let rows: Vec<IndexRow> = pool.install(|| {
        points
            .par_iter()
            .map(|(params, config)| {
                let hash = config_hash(config);
                let mut row = IndexRow {
                    hash: hash.clone(),
                    params: params.clone(),
                    regime: None,
                    status: None,
                    final_norms: BTreeMap::new(),
                    error: None,
                };
                match run(config, Some(&out_dir.join(&hash))) {
                    Ok(result) => {
                        row.regime = result.summary.regime.clone();
                        row.status = Some(result.summary.status);
                        row.final_norms = result.summary.final_norms;
                    }
                    Err(e) => row.error = Some(e.to_string()),
                }
                row
            })
            .collect()
    });
    let index = out_dir.join(INDEX_FILE);
    let text: String = rows
        .iter()
        .map(|r| serde_json::to_string(r).expect("row serializes") + "\n")
        .collect();
    fs::write(&index, text).map_err(|e| Error::io(&index, e))?;
    Ok(SweepSummary {
        runs: rows.len(),
        deduplicated,
        failures: rows.iter().filter(|r| r.error.is_some()).count(),
        aborted: rows
            .iter()
            .filter(|r| r.status.is_some_and(|s| s.is_abort()))
            .count(),
        index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn base() -> Value {
        json!({
            "kappa": 1.0, "alpha": 0.5, "P": {"family": "power", "beta": 1.0},
            "grid": {"n": 16}, "t_end": 0.0, "cadence": 0.1,
            "initial": {"kind": "single_mode", "m1": 1, "m2": 0}
        })
    }

    #[test]
    fn expands_cartesian_product() {
        let spec = SweepSpec {
            base: base(),
            axes: vec![
                Axis {
                    path: "alpha".into(),
                    values: vec![json!(0.3), json!(0.5), json!(0.7)],
                },
                Axis {
                    path: "P.beta".into(),
                    values: vec![json!(0.5), json!(1.0)],
                },
            ],
            max_parallel: 1,
            cap: DEFAULT_CAP,
        };
        let (points, removed) = spec.expand().unwrap();
        assert_eq!(points.len(), 6);
        assert_eq!(removed, 0);
        assert_eq!(points[1].1.alpha, 0.3);
        assert_eq!(points[1].1.p.beta(), 1.0);
    }

    #[test]
    fn empty_axes_give_one_point() {
        let spec = SweepSpec {
            base: base(),
            axes: vec![],
            max_parallel: 1,
            cap: DEFAULT_CAP,
        };
        assert_eq!(spec.expand().unwrap().0.len(), 1);
    }

    #[test]
    fn duplicates_are_dropped() {
        let spec = SweepSpec {
            base: base(),
            axes: vec![Axis {
                path: "kappa".into(),
                values: vec![json!(0.1), json!(0.2), json!(0.1)],
            }],
            max_parallel: 1,
            cap: DEFAULT_CAP,
        };
        let (points, removed) = spec.expand().unwrap();
        assert_eq!((points.len(), removed), (2, 1));
    }

    #[test]
    fn cap_and_paths_checked() {
        let values: Vec<Value> = (0..100).map(|i| json!(i as f64 / 10.0)).collect();
        let spec = SweepSpec {
            base: base(),
            axes: vec![
                Axis {
                    path: "kappa".into(),
                    values: values.clone(),
                },
                Axis {
                    path: "alpha".into(),
                    values: values.iter().skip(1).cloned().collect(),
                },
            ],
            max_parallel: 1,
            cap: 50,
        };
        assert!(spec.expand().is_err());
        let spec = SweepSpec {
            base: base(),
            axes: vec![Axis {
                path: "kappa.x".into(),
                values: vec![json!(1)],
            }],
            max_parallel: 1,
            cap: DEFAULT_CAP,
        };
        assert!(spec.expand().is_err());
    }

    #[test]
    fn nested_paths_create_objects() {
        let mut v = json!({"a": 1});
        set_path(&mut v, "b.c.d", json!(2)).unwrap();
        assert_eq!(v, json!({"a": 1, "b": {"c": {"d": 2}}}));
    }
}

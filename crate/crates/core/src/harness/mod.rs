//! Records, configuration files, sweeps and post-run analysis.

pub mod analyze;
pub mod record;
pub mod sweep;

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::dynamics::RunConfig;
use crate::error::{Error, Result};

pub use analyze::{analyze, AnalysisReport, ChannelStats, Monotonicity};
pub use record::{grad_channel, DiagnosticRecord};
pub use sweep::{sweep, Axis, IndexRow, SweepSpec, SweepSummary};

/// Reads, expands and validates a JSON run configuration.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::from_json(&text)
}

/// First 16 hex digits of the SHA-256 of the sorted-key JSON form.
pub fn config_hash(config: &RunConfig) -> String {
    // serde_json's default map is ordered, so this is canonical
    let value = serde_json::to_value(config).expect("config serializes");
    let digest = Sha256::digest(value.to_string().as_bytes());
    hex::encode(digest)[..16].to_string()
}

/// Worker count: `requested`, capped by `GSQG_THREADS` when set.
pub fn worker_count(requested: usize) -> usize {
    let cap = std::env::var("GSQG_THREADS")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0);
    let n = requested.max(1);
    cap.map_or(n, |c| n.min(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::example();
        let h = config_hash(&a);
        assert_eq!(h.len(), 16);
        assert!(h.chars().all(|c| c.is_ascii_hexdigit()));
        assert_eq!(h, config_hash(&RunConfig::from_json(&a.to_json()).unwrap()));
        let mut b = a.clone();
        b.kappa = 0.5;
        assert_ne!(h, config_hash(&b));
    }

    #[test]
    fn parse_config_errors() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        assert!(matches!(parse_config(&missing), Err(Error::Io { .. })));
        let empty = dir.path().join("empty.json");
        fs::write(&empty, "").unwrap();
        assert!(matches!(parse_config(&empty), Err(Error::Config { .. })));
        let good = dir.path().join("good.json");
        fs::write(&good, RunConfig::example().to_json()).unwrap();
        assert_eq!(parse_config(&good).unwrap(), RunConfig::example());
    }
}

//! One row of monitored quantities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub const FLAG_UNDER_RESOLVED: &str = "under_resolved";
pub const FLAG_MEAN_NONZERO: &str = "mean_nonzero";
pub const FLAG_MASK_EMPTY: &str = "mask_empty";
pub const FLAG_CFL_CLAMPED: &str = "cfl_clamped";
pub const FLAG_BLOW_UP: &str = "blow_up_suspected";

/// Name of the `‖∇⊥θ‖_{L^p}` channel.
pub fn grad_channel(p: f64) -> String {
    format!("grad_l{p}")
}

/// Channels are kept sorted so serialized rows are byte-stable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticRecord {
    pub t: f64,
    pub channels: BTreeMap<String, f64>,
    #[serde(default)]
    pub flags: Vec<String>,
}

impl DiagnosticRecord {
    pub fn new(t: f64) -> Self {
        DiagnosticRecord {
            t,
            channels: BTreeMap::new(),
            flags: Vec::new(),
        }
    }

    /// Stores a channel value. Non-finite values cannot be written to JSON
    /// and are dropped; the return value says whether the value was kept.
    pub fn set(&mut self, name: impl Into<String>, value: f64) -> bool {
        if value.is_finite() {
            self.channels.insert(name.into(), value);
            true
        } else {
            false
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.channels.get(name).copied()
    }

    pub fn flag(&mut self, name: &str) {
        if !self.has_flag(name) {
            self.flags.push(name.to_string());
        }
    }

    pub fn has_flag(&self, name: &str) -> bool {
        self.flags.iter().any(|f| f == name)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_round_trip_and_order() {
        let mut r = DiagnosticRecord::new(0.5);
        r.set("lp_2", 1.25);
        r.set("besov", 3.0);
        assert!(!r.set("bad", f64::NAN));
        r.flag(FLAG_MEAN_NONZERO);
        r.flag(FLAG_MEAN_NONZERO);
        let line = r.to_line();
        assert_eq!(
            line,
            r#"{"t":0.5,"channels":{"besov":3.0,"lp_2":1.25},"flags":["mean_nonzero"]}"#
        );
        let back: DiagnosticRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, r);
        assert_eq!(grad_channel(4.0), "grad_l4");
        assert_eq!(grad_channel(2.5), "grad_l2.5");
    }
}

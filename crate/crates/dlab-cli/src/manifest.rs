use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use dlab_core::checks::CheckReport;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Debug, Serialize)]
pub struct CheckRow {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub criterion: Option<u8>,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl CheckRow {
    pub fn threshold(name: &str, key: &str, value: f64, limit: f64) -> Self {
        let passed = value < limit;
        CheckRow {
            name: name.into(),
            criterion: None,
            passed,
            measured: BTreeMap::from([(key.to_string(), value)]),
            failures: if passed { vec![] } else { vec![format!("{key} = {value:.6e}, want < {limit:e}")] },
        }
    }

    pub fn flag(name: &str, passed: bool, why: impl Into<String>) -> Self {
        CheckRow {
            name: name.into(),
            criterion: None,
            passed,
            measured: BTreeMap::new(),
            failures: if passed { vec![] } else { vec![why.into()] },
        }
    }
}

impl From<CheckReport> for CheckRow {
    fn from(r: CheckReport) -> Self {
        CheckRow { name: r.kind.to_string(), criterion: r.criterion, passed: r.passed, measured: r.measured, failures: r.failures }
    }
}

/// JSON record of one invocation. With timestamps off, the output depends only
/// on the command, its configuration and the seed.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub started_unix: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
    pub checks: Vec<CheckRow>,
    pub results: Value,
}

pub struct Clock {
    started: Option<(f64, Instant)>,
}

impl Clock {
    pub fn start(timestamps: bool) -> Self {
        let unix = || SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        Clock { started: timestamps.then(|| (unix(), Instant::now())) }
    }

    pub fn manifest(self, command: &str, config: Value, checks: Vec<CheckRow>, results: Value) -> RunManifest {
        RunManifest {
            command: command.into(),
            config,
            version: env!("CARGO_PKG_VERSION"),
            started_unix: self.started.map(|(u, _)| u),
            wall_clock_seconds: self.started.map(|(_, i)| i.elapsed().as_secs_f64()),
            checks,
            results,
        }
    }
}

impl RunManifest {
    pub fn failures(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.failures.join("; ")))
            .collect()
    }
}

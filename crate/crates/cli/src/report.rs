use crate::config::ExperimentConfig;
use serde::Serialize;
use serde_json::Value;
use std::path::Path;
use wwl::selftest::{Bound, Check};

pub const REPORT_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct ReportCheck {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl From<&Check> for ReportCheck {
    fn from(c: &Check) -> Self {
        ReportCheck { name: c.name.clone(), value: c.value, limit: c.limit, bound: c.bound, pass: c.pass() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Versions {
    pub wwl: &'static str,
    pub wwl_core: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
}

/// report.json. Everything except `timings` (and per-criterion `seconds` in
/// selftest results) is a function of the configuration and flags.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub versions: Versions,
    pub config: ExperimentConfig,
    pub flags: Value,
    pub pass: bool,
    pub error: Option<String>,
    pub checks: Vec<ReportCheck>,
    pub results: Value,
    pub timings: Timings,
}

impl Report {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(dir.join("report.json"), text + "\n")
    }
}

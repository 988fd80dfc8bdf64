use std::path::Path;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

use crate::error::Result;
use crate::output::write_json;

pub const MANIFEST_NAME: &str = "run_manifest.json";
pub const RESOLVED_CONFIG_NAME: &str = "resolved.cfg";
pub const BUILD_ID: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub resolved_config: serde_json::Map<String, serde_json::Value>,
    pub git_or_build_id: String,
    pub threads: usize,
    pub started_at: String,
    pub finished_at: String,
    pub output_paths: Vec<String>,
    pub error: Option<String>,
}

pub fn timestamp(t: DateTime<Utc>) -> String {
    t.to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        write_json(&dir.join(MANIFEST_NAME), &serde_json::to_value(self)?)
    }
}

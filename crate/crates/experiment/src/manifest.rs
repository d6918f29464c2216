use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ExpError, Result};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub wall_seconds: f64,
    /// Relative to the output directory.
    pub files: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub master: u64,
    pub shadow_stream: String,
    pub mask_stream: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub config_hash: String,
    pub seeds: SeedRecord,
    pub stages: BTreeMap<String, StageRecord>,
}

impl RunManifest {
    pub fn new(config_hash: &str, master: u64) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_hash: config_hash.into(),
            seeds: SeedRecord {
                master,
                shadow_stream: "chacha8(derive(master, \"shadows\", [timestep]))".into(),
                mask_stream: "chacha8(derive(master, \"mask\", [N, m]))".into(),
            },
            stages: BTreeMap::new(),
        }
    }

    /// Existing manifest if it belongs to the same config, else a fresh one.
    pub fn load_or_new(out: &Path, config_hash: &str, master: u64) -> Self {
        std::fs::read_to_string(out.join(MANIFEST_FILE))
            .ok()
            .and_then(|t| serde_json::from_str::<RunManifest>(&t).ok())
            .filter(|m| m.config_hash == config_hash)
            .unwrap_or_else(|| RunManifest::new(config_hash, master))
    }

    pub fn record(&mut self, stage: &str, wall_seconds: f64, mut files: Vec<String>) {
        files.sort();
        files.dedup();
        self.stages.insert(stage.into(), StageRecord { wall_seconds, files });
    }

    pub fn write(&self, out: &Path) -> Result<()> {
        for (stage, rec) in &self.stages {
            for f in &rec.files {
                if !out.join(f).is_file() {
                    return Err(ExpError::data(out.join(f), format!("listed by stage {stage} but missing")));
                }
            }
        }
        let path = out.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(&path, text + "\n").map_err(|e| ExpError::io(&path, e))
    }
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use ibsignal_core::TrainConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const EPOCHS_FILE: &str = "epochs.csv";
pub const IB_POINTS_FILE: &str = "ib_points.csv";
pub const NAMING_FILE: &str = "naming.csv";
pub const CHECKPOINT_DIR: &str = "checkpoints";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputFile {
    pub path: PathBuf,
    pub sha256: String,
}

/// Everything needed to re-run a training run bit-identically. Written
/// before any other artifact of the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: TrainConfig,
    pub config_hash: String,
    /// CLI flags that replaced config-file values, as given.
    pub overrides: BTreeMap<String, String>,
    pub inputs: Vec<InputFile>,
    /// Artifact paths relative to the run directory.
    pub artifacts: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn load(run_dir: &Path) -> Result<Self> {
        let path = run_dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path)
            .with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn save(&self, run_dir: &Path) -> Result<()> {
        let path = run_dir.join(MANIFEST_FILE);
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))
    }

    pub fn chips_path(&self) -> Option<&Path> {
        self.inputs.first().map(|i| i.path.as_path())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn hash_file(path: &Path) -> Result<InputFile> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(InputFile {
        path: path.to_path_buf(),
        sha256: sha256_hex(&bytes),
    })
}

pub fn default_artifacts() -> BTreeMap<String, String> {
    [
        ("epochs", EPOCHS_FILE),
        ("ib_points", IB_POINTS_FILE),
        ("naming", NAMING_FILE),
        ("checkpoints", CHECKPOINT_DIR),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

pub fn checkpoint_file(epoch: usize) -> String {
    format!("epoch_{epoch:05}.json")
}

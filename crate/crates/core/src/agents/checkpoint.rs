//! Checkpoint files: a JSON document
//!
//! ```json
//! {
//!   "format": "ibsignal-checkpoint/1",
//!   "epoch": 120,
//!   "config_hash": "…",
//!   "channel": { "kind": "vqvib", "codebook_size": 20, "dim": 2 },
//!   "hidden": [64, 64],
//!   "params": [ { "name": "speaker.0.w", "shape": [64, 3], "data": [ … ] }, … ]
//! }
//! ```
//!
//! `params` lists tensors in [`Agents::named_tensors`] order, values
//! row-major. Floats are written in shortest round-trip form, so a reload is
//! bit-exact.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Agents, ChannelSpec};
use crate::error::{Error, Result};
use crate::numerics::{RandomSource, Tensor};

pub const CHECKPOINT_FORMAT: &str = "ibsignal-checkpoint/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedTensor {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub epoch: usize,
    pub config_hash: String,
    pub channel: ChannelSpec,
    pub hidden: Vec<usize>,
    pub params: Vec<NamedTensor>,
}

impl Checkpoint {
    pub fn capture(
        agents: &Agents,
        channel: &ChannelSpec,
        hidden: &[usize],
        epoch: usize,
        config_hash: &str,
    ) -> Self {
        let params = agents
            .named_tensors()
            .into_iter()
            .map(|(name, t)| NamedTensor {
                name,
                shape: t.shape().to_vec(),
                data: t.data().to_vec(),
            })
            .collect();
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            epoch,
            config_hash: config_hash.to_string(),
            channel: channel.clone(),
            hidden: hidden.to_vec(),
            params,
        }
    }

    pub fn restore(&self) -> Result<Agents> {
        if self.format != CHECKPOINT_FORMAT {
            return Err(Error::Format(format!("unknown checkpoint format {:?}", self.format)));
        }
        let mut agents = Agents::new(&self.channel, &self.hidden, &mut RandomSource::new(0))?;
        let names: Vec<String> = agents.named_tensors().into_iter().map(|(n, _)| n).collect();
        if names.len() != self.params.len() {
            return Err(Error::Format(format!(
                "checkpoint has {} tensors, architecture needs {}",
                self.params.len(),
                names.len()
            )));
        }
        for ((slot, name), saved) in agents.tensors_mut().into_iter().zip(&names).zip(&self.params) {
            if &saved.name != name || saved.shape != slot.shape() {
                return Err(Error::Format(format!(
                    "tensor {:?} {:?} does not match expected {:?} {:?}",
                    saved.name,
                    saved.shape,
                    name,
                    slot.shape()
                )));
            }
            *slot = Tensor::new(saved.shape.clone(), saved.data.clone())?;
        }
        Ok(agents)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("checkpoint: {e}")))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

//! Speaker–listener agents that learn to name colors under a weighted
//! utility / informativeness / complexity objective, plus the tools to
//! compare what they learn against the information-bottleneck bound and
//! human color-naming data.

pub mod agents;
pub mod error;
pub mod ib;
pub mod metrics;
pub mod numerics;
pub mod training;
pub mod wcs;

pub use error::{Error, Result};
pub use agents::{Agents, ChannelSpec, Checkpoint};
pub use numerics::{RandomSource, Tensor};
pub use training::{EpochRecord, TrainConfig, Trainer};
pub use wcs::{ChipTable, NamingSystem};

use serde::{Deserialize, Serialize};

use super::chips::ChipTable;
use crate::error::{Error, Result};
use crate::numerics::RandomSource;

/// One round of the reference game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReferenceTrial {
    pub target: u32,
    pub distractor: u32,
    /// Slot (0 or 1) in which the listener sees the target.
    pub target_position: usize,
}

impl ReferenceTrial {
    /// Candidate chip ids in presentation order.
    pub fn candidates(&self) -> [u32; 2] {
        if self.target_position == 0 {
            [self.target, self.distractor]
        } else {
            [self.distractor, self.target]
        }
    }
}

/// Target and distractor drawn uniformly without replacement; the target's
/// slot is a fair coin.
pub fn sample_trial(chips: &ChipTable, rng: &mut RandomSource) -> Result<ReferenceTrial> {
    let n = chips.len();
    if n < 2 {
        return Err(Error::invalid("a reference trial needs at least 2 chips"));
    }
    let t = rng.below(n);
    let mut d = rng.below(n - 1);
    if d >= t {
        d += 1;
    }
    let target_position = usize::from(rng.coin());
    Ok(ReferenceTrial {
        target: chips.chips()[t].id,
        distractor: chips.chips()[d].id,
        target_position,
    })
}

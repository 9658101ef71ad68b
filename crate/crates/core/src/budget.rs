use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Cap on the working set of any single dense materialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemoryBudget {
    pub bytes: u64,
}

impl MemoryBudget {
    pub const DEFAULT_BYTES: u64 = 8 << 30;

    pub const fn new(bytes: u64) -> Self {
        Self { bytes }
    }

    pub const fn unlimited() -> Self {
        Self { bytes: u64::MAX }
    }

    /// Checks that `count` elements of `elem_bytes` each fit.
    pub fn check(&self, what: &'static str, count: u128, elem_bytes: u128) -> Result<()> {
        let requested = count.saturating_mul(elem_bytes);
        if requested > u128::from(self.bytes) {
            return Err(Error::BudgetExceeded {
                what,
                requested,
                budget: self.bytes,
            });
        }
        Ok(())
    }
}

impl Default for MemoryBudget {
    fn default() -> Self {
        Self::new(Self::DEFAULT_BYTES)
    }
}

//! Size guards shared by construction, verification and the theorem checkers.

/// Default ceiling: fields up to `2^28` elements and up to `2^28` ordered
/// pairs in a full difference count.
pub const DEFAULT_CEILING: u64 = 1 << 28;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Resources {
    /// Largest field order constructed, and largest `k²` fully verified.
    pub ceiling: u64,
    pub workers: usize,
}

impl Default for Resources {
    fn default() -> Self {
        Resources {
            ceiling: DEFAULT_CEILING,
            workers: 1,
        }
    }
}

impl Resources {
    pub fn new(ceiling: u64, workers: usize) -> Self {
        Resources {
            ceiling,
            workers: workers.max(1),
        }
    }

    /// Whether a full `O(k²)` difference count on a `k`-set fits the ceiling.
    pub fn allows_full_verification(&self, v: u64, k: u64) -> bool {
        (k as u128) * (k as u128) <= self.ceiling as u128 && v <= crate::dset::FULL_VERIFY_LIMIT
    }
}

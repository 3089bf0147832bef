//! Deterministic child-seed derivation for parallel campaigns.
//!
//! Every task derives its own RNG seed from the master seed and its
//! coordinates (cell, replicate, purpose), so results never depend on
//! scheduling or worker count.

/// SplitMix64 step; a well-mixed 64-bit permutation.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash `(master, parts...)` into a child seed.
pub fn child_seed(master: u64, parts: &[u64]) -> u64 {
    let mut state = splitmix64(master ^ 0x6A09_E667_F3BC_C908);
    for &part in parts {
        state = splitmix64(state ^ part.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    state
}

/// Purpose tags keeping unrelated random streams apart.
pub mod purpose {
    pub const NETWORK: u64 = 0x01;
    pub const TIE_BREAK: u64 = 0x02;
    pub const SAMPLE: u64 = 0x03;
}

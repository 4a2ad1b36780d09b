//! Seed derivation for reproducible experiments.
//!
//! Every random stream in an experiment (deployment, per-trial measurement
//! noise, per-run swarm initialisation) is seeded from a single master seed
//! plus a list of integer tags. The derivation is a splitmix64 chain, so
//! distinct tag lists give statistically independent seeds and the mapping is
//! identical across platforms and thread schedules.

/// One round of the splitmix64 mixing function.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `master` and an ordered list of tags.
///
/// Tag lists of different lengths or contents yield different seeds; the
/// empty list is a valid (identity-like) derivation of the master itself.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut seed = splitmix64(master);
    for &tag in tags {
        seed = splitmix64(seed ^ splitmix64(tag.wrapping_add(0x9e37_79b9_7f4a_7c15)));
    }
    seed
}

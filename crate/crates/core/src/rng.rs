//! Seed handling. All randomness in a run flows from one u64 run seed;
//! each entity gets its own substream so adding a node never perturbs the
//! draws another node sees.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::des::EntityId;

/// Substream split rule: splitmix64 finalizer over (run_seed, stream tag).
/// Documented so replay oracles can reproduce any entity's stream.
pub fn substream_seed(run_seed: u64, tag: u64) -> u64 {
    let mut z = run_seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn entity_rng(run_seed: u64, entity: EntityId) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_seed(run_seed, entity.0 as u64))
}

/// Stream for run-level draws not owned by any entity (placement, phases).
pub fn named_rng(run_seed: u64, name: &str) -> ChaCha8Rng {
    let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        tag ^= b as u64;
        tag = tag.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(substream_seed(run_seed, tag))
}

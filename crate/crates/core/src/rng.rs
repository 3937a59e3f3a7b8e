//! Seeded, splittable random streams.
//!
//! Every randomized routine takes an explicit `&mut Stream`. Independent trials
//! get their own stream via [`trial_stream`], so results do not depend on how
//! trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stream number `index` under `seed`.
pub fn trial_stream(seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Derive a child stream from a parent without disturbing other consumers of
/// the parent beyond a single draw.
pub fn fork(parent: &mut Stream) -> Stream {
    use rand::RngCore;
    ChaCha8Rng::seed_from_u64(parent.next_u64())
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Order-sensitive hash of a word sequence, used for hash-keyed oracle doubles.
pub fn hash_words<I: IntoIterator<Item = u64>>(salt: u64, words: I) -> u64 {
    let mut h = splitmix64(salt ^ 0x5851_f42d_4c95_7f2d);
    for w in words {
        h = splitmix64(h ^ w).rotate_left(17) ^ w.wrapping_mul(0x2545_f491_4f6c_dd1d);
    }
    splitmix64(h)
}

/// Map a hash to [0, 1).
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 / (1u64 << 53) as f64
}

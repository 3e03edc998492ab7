//! Random streams. All experiments draw from ChaCha20 (`rand_chacha`),
//! seeded with `seed_from_u64(seed)`; independent tasks of a sweep use
//! distinct stream ids of the same key so results do not depend on the
//! order in which tasks are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type LabRng = ChaCha20Rng;

pub fn rng_from_seed(seed: u64) -> LabRng {
    LabRng::seed_from_u64(seed)
}

/// Stream `stream` of the generator keyed by `seed`.
pub fn substream(seed: u64, stream: u64) -> LabRng {
    let mut r = LabRng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

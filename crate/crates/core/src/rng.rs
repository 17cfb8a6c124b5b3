//! Seeded, splittable random streams.
//!
//! ChaCha is counter based, so `(seed, stream)` pairs give independent reproducible
//! generators regardless of how work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for task `stream` under the run seed `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

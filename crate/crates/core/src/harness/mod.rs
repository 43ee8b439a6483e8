//! Numerical and symbolic checks built on the core types.

pub mod catalog;
pub mod checks;
pub mod groupfile;
pub mod operator;
pub mod report;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 42;

/// Independent stream `task` under `seed`.
pub fn rng_stream(seed: u64, task: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(task);
    r
}

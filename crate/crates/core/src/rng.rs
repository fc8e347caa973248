//! Seeded randomness.
//!
//! Every random draw in the crate goes through [`seeded`], a ChaCha8 stream
//! keyed by a 64-bit seed. Independent tasks (kernel entries, shot batches,
//! subsampling stages) derive their own stream with [`sub_seed`], the master
//! seed XOR the task index, so results never depend on which worker ran a task
//! or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[inline]
pub fn sub_seed(master: u64, task: u64) -> u64 {
    master ^ task
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<u64> = (0..8).map({
            let mut r = seeded(7);
            move |_| r.random()
        }).collect();
        let b: Vec<u64> = (0..8).map({
            let mut r = seeded(7);
            move |_| r.random()
        }).collect();
        assert_eq!(a, b);
        assert_ne!(seeded(7).random::<u64>(), seeded(sub_seed(7, 1)).random::<u64>());
    }
}

//! Deterministic random stream.
//!
//! Every stochastic component draws from a single [`RandomStream`] owned by
//! the engine. The generator is a concrete algorithm (ChaCha8) rather than
//! `StdRng`, so a seed reproduces the same run across library upgrades.

use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

pub use rand::Rng;

pub type RandomStream = rand_chacha::ChaCha8Rng;

/// Builds the stream for a 64-bit seed. Equal seeds give equal draw sequences.
pub fn stream(seed: u64) -> RandomStream {
    RandomStream::seed_from_u64(seed)
}

/// One standard-normal draw.
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// `k` distinct indices from `0..n`, uniformly without replacement
/// (partial Fisher-Yates). Order of the result is the draw order.
pub(crate) fn distinct_indices<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    debug_assert!(k <= n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    pool.truncate(k);
    pool
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = stream(42);
        let mut b = stream(42);
        for _ in 0..100 {
            assert_eq!(a.random::<u64>(), b.random::<u64>());
        }
    }

    #[test]
    fn distinct_indices_are_distinct_and_in_range() {
        let mut rng = stream(7);
        for _ in 0..1000 {
            let picked = distinct_indices(&mut rng, 10, 4);
            assert_eq!(picked.len(), 4);
            let mut sorted = picked.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted.len(), 4, "indices must be distinct: {picked:?}");
            assert!(picked.iter().all(|&i| i < 10));
        }
    }

    #[test]
    fn distinct_indices_full_draw_is_a_permutation() {
        let mut rng = stream(3);
        let mut picked = distinct_indices(&mut rng, 6, 6);
        picked.sort_unstable();
        assert_eq!(picked, vec![0, 1, 2, 3, 4, 5]);
    }
}

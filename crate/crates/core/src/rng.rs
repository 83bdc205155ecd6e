//! Seeded determinism. Every randomized routine takes an explicit u64 seed
//! and produces identical output on every platform; ChaCha8 is the stream.

use alloc::vec::Vec;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derives an independent stream for a sub-task; keeps sibling tasks'
    /// draws stable when one of them changes how much it consumes.
    pub fn fork(&mut self, salt: u64) -> SeededRng {
        let s = self.inner.next_u64() ^ salt.rotate_left(17);
        SeededRng::new(s)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in 0..bound via rejection; bound must be nonzero.
    pub fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0);
        let bound = bound as u64;
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let v = self.inner.next_u64();
            if v < zone {
                return (v % bound) as usize;
            }
        }
    }

    /// Bernoulli(num/2^64): true iff the next draw falls under `threshold`.
    /// Callers precompute threshold = round(p · 2^64) once per run.
    pub fn coin(&mut self, threshold: u64) -> bool {
        self.inner.next_u64() < threshold
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }

    /// k distinct values from 0..n, sorted. Floyd's algorithm.
    pub fn distinct_sorted(&mut self, n: usize, k: usize) -> Vec<usize> {
        assert!(k <= n);
        let mut chosen: Vec<usize> = Vec::with_capacity(k);
        for j in (n - k)..n {
            let t = self.below(j + 1);
            if chosen.contains(&t) {
                chosen.push(j);
            } else {
                chosen.push(t);
            }
        }
        chosen.sort_unstable();
        chosen
    }
}

/// Threshold for edge probability given as an exact rational p ∈ [0,1]:
/// round(p · 2^64), saturating so p = 1 always fires.
pub fn prob_threshold(num: u64, den: u64) -> u64 {
    assert!(den > 0 && num <= den);
    if num == den {
        return u64::MAX;
    }
    // floor(num · 2^64 / den) computed in u128
    ((num as u128) << 64).div_euclid(den as u128) as u64
}

//! Seeded, splittable random number generation.
//!
//! Everything random in this crate flows through [`SplitMix64`]: a tiny
//! generator with a 64-bit state that produces identical streams on every
//! platform. Parallel work derives one independent stream per unit of work
//! (per class, per candidate subset, per classifier) instead of sharing a
//! generator, so results do not depend on scheduling.

/// Weyl-sequence increment used both inside splitmix and to derive candidate
/// seeds (`seed ^ t * GOLDEN_GAMMA` for candidate index `t`).
pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 generator (Steele, Lea, Flood 2014).
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in `[0, bound)` without modulo bias (Lemire rejection).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        let mut x = self.next_u64();
        let mut m = u128::from(x) * u128::from(bound);
        let mut low = m as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                x = self.next_u64();
                m = u128::from(x) * u128::from(bound);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}

/// Seed for candidate subset `t` of an iterative search.
pub fn candidate_seed(seed: u64, t: u64) -> u64 {
    seed ^ t.wrapping_mul(GOLDEN_GAMMA)
}

/// In-place Fisher-Yates shuffle.
pub fn shuffle<T>(items: &mut [T], rng: &mut SplitMix64) {
    for i in (1..items.len()).rev() {
        let j = rng.below((i + 1) as u64) as usize;
        items.swap(i, j);
    }
}

/// Draw `k` distinct positions from `0..pool_len`, in shuffled order, by a
/// partial Fisher-Yates pass. `k >= pool_len` yields a full shuffle.
pub fn draw_without_replacement(rng: &mut SplitMix64, pool_len: usize, k: usize) -> Vec<usize> {
    let take = k.min(pool_len);
    let mut pool: Vec<usize> = (0..pool_len).collect();
    for i in 0..take {
        let j = i + rng.below((pool_len - i) as u64) as usize;
        pool.swap(i, j);
    }
    pool.truncate(take);
    pool
}

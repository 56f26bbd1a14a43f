//! Self-contained deterministic random number generation.
//!
//! Every sampled experiment in this crate must replay bit-for-bit from a
//! recorded seed, across platforms and across releases. Depending on an
//! external RNG crate would tie reproducibility to its version, so the two
//! classic public-domain generators are implemented here directly:
//! SplitMix64 for seeding and xoshiro256** for the working stream.

/// SplitMix64 (Steele, Lea, Flood). Used to expand seeds.
#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        mix64(self.state)
    }
}

/// SplitMix64 output finalizer; a strong 64-bit avalanche mix.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// xoshiro256** (Blackman, Vigna).
#[derive(Clone, Debug)]
pub struct Xoshiro256 {
    s: [u64; 4],
}

impl Xoshiro256 {
    /// Seed via SplitMix64, the seeding procedure recommended by the
    /// xoshiro authors.
    pub fn seeded(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let mut s = [0u64; 4];
        for w in s.iter_mut() {
            *w = sm.next_u64();
        }
        // The all-zero state is the one invalid state.
        if s == [0, 0, 0, 0] {
            s[0] = 0x9e3779b97f4a7c15;
        }
        Xoshiro256 { s }
    }

    /// Independent generator for sub-task `stream` of a seeded computation.
    ///
    /// Parallel permutation trials and matrix cells each draw their own
    /// stream so results do not depend on execution order.
    pub fn stream(seed: u64, stream: u64) -> Self {
        Self::seeded(derive_seed(seed, stream))
    }

    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform integer in `[0, n)`, unbiased by rejection of the short zone.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0) is meaningless");
        let threshold = n.wrapping_neg() % n; // (2^64 - n) % n
        loop {
            let x = self.next_u64();
            if x >= threshold {
                return x % n;
            }
        }
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }

    /// Uniform f64 in [0, 1) with 53 random bits.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Deterministic sub-seed for task `stream` of a computation seeded with
/// `seed`. Used wherever a recorded seed fans out into independent parts.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    mix64(seed).wrapping_add(mix64(stream.wrapping_add(0x9e3779b97f4a7c15)))
}

/// Uniform sample of `m` distinct values from `[0, population)` by Floyd's
/// algorithm, returned in ascending order.
pub fn sample_without_replacement(rng: &mut Xoshiro256, population: u64, m: u64) -> Vec<u64> {
    assert!(m <= population, "sample larger than population");
    let mut chosen = std::collections::BTreeSet::new();
    for j in population - m..population {
        let t = rng.below(j + 1);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_splitmix_vector() {
        // Reference sequence for seed 1234567 (from the published C code).
        let mut sm = SplitMix64::new(1234567);
        assert_eq!(sm.next_u64(), 6457827717110365317);
        assert_eq!(sm.next_u64(), 3203168211198807973);
    }

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let mut a1 = Xoshiro256::stream(42, 0);
        let mut a2 = Xoshiro256::stream(42, 0);
        let mut b = Xoshiro256::stream(42, 1);
        let xs1: Vec<u64> = (0..8).map(|_| a1.next_u64()).collect();
        let xs2: Vec<u64> = (0..8).map(|_| a2.next_u64()).collect();
        let ys: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_eq!(xs1, xs2);
        assert_ne!(xs1, ys);
    }

    #[test]
    fn below_is_in_range_and_covers() {
        let mut rng = Xoshiro256::seeded(7);
        let mut seen = [false; 10];
        for _ in 0..1000 {
            seen[rng.below(10) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn floyd_sample_is_distinct_sorted_subset() {
        let mut rng = Xoshiro256::seeded(9);
        let s = sample_without_replacement(&mut rng, 1000, 50);
        assert_eq!(s.len(), 50);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        assert!(s.iter().all(|&x| x < 1000));
    }

    #[test]
    fn full_sample_is_whole_population() {
        let mut rng = Xoshiro256::seeded(11);
        let s = sample_without_replacement(&mut rng, 20, 20);
        assert_eq!(s, (0..20).collect::<Vec<_>>());
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = Xoshiro256::seeded(3);
        let mut xs: Vec<u32> = (0..100).collect();
        rng.shuffle(&mut xs);
        let mut sorted = xs.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..100).collect::<Vec<_>>());
    }
}

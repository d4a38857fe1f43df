//! Size guards for the exhaustive algorithms.

use serde::{Deserialize, Serialize};

/// Caps for the exhaustive searches. All algorithms in this crate enumerate
/// rather than sample; the caps turn a runaway input into a typed error
/// instead of a hang.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Limits {
    /// Morphism cap for user-supplied categories fed to the full law scan.
    pub max_morphisms: usize,
    /// Total element cap for a single profunctor (sum over all fibers).
    pub max_elements: usize,
    /// Node budget for the backtracking isomorphism search.
    pub iso_budget: u64,
    /// Candidate-entry cap for the brute-force trace enumeration.
    pub trace_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_morphisms: 64,
            max_elements: 2_000_000,
            iso_budget: 1_000_000,
            trace_budget: 10_000_000,
        }
    }
}

impl Limits {
    pub fn from_env() -> Self {
        let mut l = Limits::default();
        if let Ok(v) = std::env::var("PROFCHECK_MAX_ELEMENTS") {
            if let Ok(n) = v.parse() {
                l.max_elements = n;
            }
        }
        l
    }
}

/// Deterministic splittable PRNG for the seeded shuffle re-checks.
/// SplitMix64: tiny, portable, byte-for-byte reproducible.
#[derive(Debug, Clone)]
pub struct Rng(u64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n.max(1) as u64) as usize
    }

    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below(i + 1);
            xs.swap(i, j);
        }
    }
}

//! Small deterministic pseudorandom source for sampling probes. Exact
//! verification never depends on randomness for correctness, only for
//! picking sample points, and fixed seeds keep every run byte-identical.

use crate::rat::{frac, Rat};

/// SplitMix64; good enough for choosing sample points.
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
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in `0..n` (n > 0).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    /// A rational `p/q` with `p` in `-bound..=bound` and `q` in `1..=den_bound`.
    pub fn rational(&mut self, bound: u64, den_bound: u64) -> Rat {
        let p = self.below(2 * bound + 1) as i64 - bound as i64;
        let q = self.below(den_bound) as i64 + 1;
        frac(p, q)
    }

    /// A nonzero rational with the same shape.
    pub fn nonzero_rational(&mut self, bound: u64, den_bound: u64) -> Rat {
        use num_traits::Zero;
        loop {
            let r = self.rational(bound, den_bound);
            if !r.is_zero() {
                return r;
            }
        }
    }
}

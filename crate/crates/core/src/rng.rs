//! Deterministic sampling. All randomized checks in the crate draw from a
//! ChaCha stream seeded explicitly, so identical seeds reproduce runs
//! bit for bit.

use alloc::vec::Vec;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform in 0..n.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        // modulo bias is irrelevant at the sample counts used here
        self.rng.next_u64() % n
    }

    pub fn int_in(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// Rational with numerator in [-bound, bound] and denominator in [1, den].
    pub fn rational(&mut self, bound: i64, den: i64) -> BigRational {
        let n = self.int_in(-bound, bound);
        let d = self.int_in(1, den);
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    /// Nonzero variant.
    pub fn rational_nonzero(&mut self, bound: i64, den: i64) -> BigRational {
        loop {
            let x = self.rational(bound, den);
            if !num_traits::Zero::is_zero(&x) {
                return x;
            }
        }
    }

    pub fn vec_rational(&mut self, n: usize, bound: i64, den: i64) -> Vec<BigRational> {
        (0..n).map(|_| self.rational(bound, den)).collect()
    }
}

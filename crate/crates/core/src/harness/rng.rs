//! Deterministic, platform-independent PRNG for corpus generation.
//!
//! xoshiro256++ seeded through splitmix64, with the reference constants
//! spelled out so corpora can be reproduced from any implementation:
//!
//! splitmix64: state += 0x9e3779b97f4a7c15;
//!             z = state; z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
//!             z = (z ^ (z >> 27)) * 0x94d049bb133111eb; return z ^ (z >> 31)
//!
//! xoshiro256++: out = rotl(s0 + s3, 23) + s0; t = s1 << 17;
//!               s2 ^= s0; s3 ^= s1; s1 ^= s2; s0 ^= s3; s2 ^= t;
//!               s3 = rotl(s3, 45)
//!
//! Uniform doubles take the top 53 bits: (out >> 11) * 2⁻⁵³.

#[derive(Debug, Clone)]
pub struct Xoshiro256pp {
    s: [u64; 4],
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Xoshiro256pp {
    pub fn seed_from(seed: u64) -> Xoshiro256pp {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Xoshiro256pp { s }
    }

    /// Independent stream for instance `idx` of a sweep under one seed.
    pub fn for_instance(seed: u64, idx: u64) -> Xoshiro256pp {
        let mut sm = seed;
        let base = splitmix64(&mut sm);
        Xoshiro256pp::seed_from(base ^ idx.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = self.s[0]
            .wrapping_add(self.s[3])
            .rotate_left(23)
            .wrapping_add(self.s[0]);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        out
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [-1, 1).
    pub fn next_signed(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Uniform integer in [0, n).
    pub fn next_below(&mut self, n: u64) -> u64 {
        // Multiply-shift; bias is negligible for the small n used here.
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let mut a = Xoshiro256pp::seed_from(42);
        let mut b = Xoshiro256pp::seed_from(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn streams_differ_per_instance() {
        let mut a = Xoshiro256pp::for_instance(7, 0);
        let mut b = Xoshiro256pp::for_instance(7, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn doubles_in_unit_interval() {
        let mut r = Xoshiro256pp::seed_from(1);
        for _ in 0..1000 {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}

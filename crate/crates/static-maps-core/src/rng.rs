//! Deterministic seed generation for the table construction.
//!
//! Plain xorshift64. Zero is the generator's fixed point, so seeding
//! replaces it with a fixed nonzero constant.

use crate::hash::raw_hash;

/// Substituted whenever a seed would otherwise be zero.
pub const FALLBACK_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// xorshift64 state. Nonzero by construction.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Xorshift64 {
    state: u64,
}

impl Xorshift64 {
    pub fn new(seed: u64) -> Xorshift64 {
        Xorshift64 { state: if seed == 0 { FALLBACK_SEED } else { seed } }
    }

    /// Seed from build-timestamp strings in the C macro formats
    /// ("Mmm dd yyyy" and "hh:mm:ss"). The strings are not parsed, just
    /// hashed, so malformed input still yields a usable seed.
    pub fn from_timestamp(date: &str, time: &str) -> Xorshift64 {
        let mut h = raw_hash(date.as_bytes()).0;
        for &b in time.as_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(crate::hash::FNV_PRIME);
        }
        Xorshift64::new(h)
    }

    #[inline]
    pub fn state(&self) -> u64 {
        self.state
    }

    /// Advance and emit. Shift triple (13, 7, 17); nonzero in, nonzero out.
    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.state = x;
        x
    }
}

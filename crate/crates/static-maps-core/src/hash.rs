//! Raw key hashing and modular arithmetic for primes just below a word
//! type's maximum.
//!
//! Everything here is pure and branch-light: FNV-1a for the raw digest, an
//! optional XOR salt, truncation to the table's index width, and the
//! `k*i mod P mod r` universal hash family. `P` is always the largest prime
//! below `2^w`, so `x mod P` is a compare-and-subtract and `a*b mod P` can
//! be computed in `w`-bit arithmetic by folding each wraparound of `2^w`
//! back in as the prime's deficit `2^w - P`.

use core::fmt;

/// Full-width digest of a key's bytes (FNV-1a, 64-bit).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct RawHash(pub u64);

pub const FNV_OFFSET_BASIS: u64 = 0xcbf2_9ce4_8422_2325;
pub const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// FNV-1a over the key bytes. Deterministic, stable across platforms.
#[inline]
pub fn raw_hash(key: &[u8]) -> RawHash {
    let mut h = FNV_OFFSET_BASIS;
    for &b in key {
        h ^= b as u64;
        h = h.wrapping_mul(FNV_PRIME);
    }
    RawHash(h)
}

/// Fixed XOR applied to raw hashes before truncation. XOR by a constant is
/// a bijection, so distinct hashes stay distinct; it only reshuffles them.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Salt {
    enabled: bool,
    value: u64,
}

impl Salt {
    pub const DISABLED: Salt = Salt { enabled: false, value: 0 };

    #[inline]
    pub fn new(value: u64) -> Salt {
        Salt { enabled: true, value }
    }

    #[inline]
    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }
}

/// `h XOR salt` when the salt is enabled, otherwise `h` unchanged.
///
/// A disabled salt always carries value 0 (enforced by the constructors),
/// so this compiles to one unconditional XOR.
#[inline]
pub fn apply_salt(h: RawHash, s: Salt) -> RawHash {
    debug_assert!(s.enabled || s.value == 0);
    RawHash(h.0 ^ s.value)
}

/// Width of the integer type driving the table: 8, 16, 32 or 64 bits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum IndexWidth {
    W8,
    W16,
    W32,
    W64,
}

impl IndexWidth {
    /// All widths, narrowest first. Inference walks this order.
    pub const ASCENDING: [IndexWidth; 4] =
        [IndexWidth::W8, IndexWidth::W16, IndexWidth::W32, IndexWidth::W64];

    #[inline]
    pub fn bits(self) -> u32 {
        match self {
            IndexWidth::W8 => 8,
            IndexWidth::W16 => 16,
            IndexWidth::W32 => 32,
            IndexWidth::W64 => 64,
        }
    }

    pub fn from_bits(bits: u32) -> Option<IndexWidth> {
        match bits {
            8 => Some(IndexWidth::W8),
            16 => Some(IndexWidth::W16),
            32 => Some(IndexWidth::W32),
            64 => Some(IndexWidth::W64),
            _ => None,
        }
    }

    pub fn next_wider(self) -> Option<IndexWidth> {
        match self {
            IndexWidth::W8 => Some(IndexWidth::W16),
            IndexWidth::W16 => Some(IndexWidth::W32),
            IndexWidth::W32 => Some(IndexWidth::W64),
            IndexWidth::W64 => None,
        }
    }

    /// `2^w - 1` as a 64-bit mask.
    #[inline]
    pub fn mask(self) -> u64 {
        match self {
            IndexWidth::W64 => u64::MAX,
            w => (1u64 << w.bits()) - 1,
        }
    }
}

impl fmt::Display for IndexWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits())
    }
}

/// The largest prime below `2^w`, plus its deficit `2^w - P`.
///
/// The deficits are tiny (5, 15, 5, 59), which is what makes the
/// wraparound-corrected arithmetic below cheap.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NearMaxPrime {
    width: IndexWidth,
    value: u64,
    deficit: u64,
}

impl NearMaxPrime {
    #[inline]
    pub fn width(&self) -> IndexWidth {
        self.width
    }

    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn deficit(&self) -> u64 {
        self.deficit
    }
}

/// Largest prime below `2^w` for each supported width.
pub fn largest_prime_below(width: IndexWidth) -> NearMaxPrime {
    let value = match width {
        IndexWidth::W8 => u8::PRIME as u64,
        IndexWidth::W16 => u16::PRIME as u64,
        IndexWidth::W32 => u32::PRIME as u64,
        IndexWidth::W64 => u64::PRIME,
    };
    NearMaxPrime { width, value, deficit: width.mask() - value + 1 }
}

/// Low `width` bits of the raw hash.
#[inline]
pub fn truncate_hash(h: RawHash, width: IndexWidth) -> u64 {
    h.0 & width.mask()
}

/// Unsigned word types the table machinery can be instantiated over.
///
/// The associated functions implement `mod P` and `a*b mod P` for the
/// type's near-max prime without ever needing an integer wider than the
/// type itself: every wraparound of `2^w` is congruent to `DEFICIT` mod
/// `P`, so partial products are folded back in as they are formed.
pub trait IndexWord:
    Copy + Eq + Ord + core::hash::Hash + fmt::Debug + fmt::Display + Default + 'static
{
    const WIDTH: IndexWidth;
    const ZERO: Self;
    const MAX: Self;
    /// Largest prime below `2^w`.
    const PRIME: Self;
    /// `2^w - PRIME`, always < 64.
    const DEFICIT: Self;

    fn truncate_u64(x: u64) -> Self;
    fn widen_u64(self) -> u64;
    fn to_usize(self) -> usize;
    /// Caller must know `x` fits; debug-asserted.
    fn from_usize(x: usize) -> Self;

    /// `x mod PRIME` by compare-and-subtract; never a division.
    fn mod_near_max(x: Self) -> Self;
    /// Same, reporting how many subtractions ran (for bound assertions).
    fn mod_near_max_counted(x: Self) -> (Self, u32);
    /// `(a + b) mod PRIME` for any two word values.
    fn addmod(a: Self, b: Self) -> Self;
    /// `(a * b) mod PRIME`, exact, in `w`-bit arithmetic only.
    fn mulmod_near_max(a: Self, b: Self) -> Self;
    /// `(k * i mod PRIME) & mask`, the universal hash with power-of-two
    /// table size `r = mask + 1`.
    #[inline]
    fn universal_hash(k: Self, i: Self, mask: Self) -> Self {
        Self::mask_and(Self::mulmod_near_max(k, i), mask)
    }
    fn mask_and(x: Self, mask: Self) -> Self;
}

macro_rules! impl_index_word {
    ($ty:ty, $width:expr, $prime:expr) => {
        impl IndexWord for $ty {
            const WIDTH: IndexWidth = $width;
            const ZERO: $ty = 0;
            const MAX: $ty = <$ty>::MAX;
            const PRIME: $ty = $prime;
            const DEFICIT: $ty = ($prime as $ty).wrapping_neg();

            #[inline]
            fn truncate_u64(x: u64) -> $ty {
                x as $ty
            }

            #[inline]
            fn widen_u64(self) -> u64 {
                self as u64
            }

            #[inline]
            fn to_usize(self) -> usize {
                self as usize
            }

            #[inline]
            fn from_usize(x: usize) -> $ty {
                debug_assert!(x as u64 <= <$ty>::MAX as u64);
                x as $ty
            }

            #[inline]
            fn mod_near_max(x: $ty) -> $ty {
                // Any word value is below 2*PRIME (2^w - 1 = P + DEFICIT - 1),
                // so one compare-and-subtract suffices; this compiles to a
                // conditional move, not a branch.
                if x >= Self::PRIME {
                    x - Self::PRIME
                } else {
                    x
                }
            }

            fn mod_near_max_counted(mut x: $ty) -> ($ty, u32) {
                let mut steps = 0;
                while x >= Self::PRIME {
                    x -= Self::PRIME;
                    steps += 1;
                }
                (x, steps)
            }

            #[inline]
            fn addmod(a: $ty, b: $ty) -> $ty {
                // Each dropped 2^w re-enters as DEFICIT; the second add can
                // carry at most once more, leaving a value below 2*DEFICIT.
                // Written with conditional moves, not branches: the carry
                // pattern is data-dependent and would mispredict.
                let (s, carried) = a.overflowing_add(b);
                let bump = if carried { Self::DEFICIT } else { 0 };
                let (s2, carried2) = s.overflowing_add(bump);
                let bump2 = if carried2 { Self::DEFICIT } else { 0 };
                Self::mod_near_max(s2.wrapping_add(bump2))
            }

            #[inline]
            fn mulmod_near_max(a: $ty, b: $ty) -> $ty {
                const HALF: u32 = <$ty>::BITS / 2;
                const HALF_MASK: $ty = (1 << HALF) - 1;

                // (x << HALF) mod PRIME. The high half re-enters as
                // hi * DEFICIT, which fits: hi < 2^(w/2) and DEFICIT < 2^6
                // with w/2 + 6 <= w for every supported width's deficit.
                #[inline]
                fn shift_half_mod(x: $ty) -> $ty {
                    let hi = x >> HALF;
                    let lo = x & HALF_MASK;
                    <$ty>::addmod(hi * <$ty>::DEFICIT, lo << HALF)
                }

                // (x * DEFICIT) mod PRIME via the same split.
                #[inline]
                fn mul_deficit_mod(x: $ty) -> $ty {
                    let hi = x >> HALF;
                    let lo = x & HALF_MASK;
                    <$ty>::addmod(shift_half_mod(hi * <$ty>::DEFICIT), lo * <$ty>::DEFICIT)
                }

                let (ah, al) = (a >> HALF, a & HALF_MASK);
                let (bh, bl) = (b >> HALF, b & HALF_MASK);

                // a*b = ah*bh*2^w + (ah*bl + al*bh)*2^(w/2) + al*bl, where
                // every half-product fits in w bits and 2^w folds to DEFICIT.
                let hh = mul_deficit_mod(ah * bh);
                let cross = shift_half_mod(Self::addmod(ah * bl, al * bh));
                Self::addmod(Self::addmod(hh, cross), Self::mod_near_max(al * bl))
            }

            #[inline]
            fn mask_and(x: $ty, mask: $ty) -> $ty {
                x & mask
            }
        }
    };
}

impl_index_word!(u8, IndexWidth::W8, 251);
impl_index_word!(u16, IndexWidth::W16, 65_521);
impl_index_word!(u32, IndexWidth::W32, 4_294_967_291);
impl_index_word!(u64, IndexWidth::W64, 18_446_744_073_709_551_557);

macro_rules! dispatch_width {
    ($width:expr, $ty:ident, $body:expr) => {
        match $width {
            IndexWidth::W8 => {
                type $ty = u8;
                $body
            }
            IndexWidth::W16 => {
                type $ty = u16;
                $body
            }
            IndexWidth::W32 => {
                type $ty = u32;
                $body
            }
            IndexWidth::W64 => {
                type $ty = u64;
                $body
            }
        }
    };
}

pub(crate) use dispatch_width;

/// Width-dynamic `x mod P`. `x` must fit the prime's width.
#[inline]
pub fn mod_near_max(x: u64, p: &NearMaxPrime) -> u64 {
    debug_assert!(x <= p.width.mask());
    dispatch_width!(p.width, W, W::mod_near_max(W::truncate_u64(x)).widen_u64())
}

/// Width-dynamic `(a * b) mod P`. Both operands must fit the prime's width.
#[inline]
pub fn mulmod_near_max(a: u64, b: u64, p: &NearMaxPrime) -> u64 {
    debug_assert!(a <= p.width.mask() && b <= p.width.mask());
    dispatch_width!(p.width, W, {
        W::mulmod_near_max(W::truncate_u64(a), W::truncate_u64(b)).widen_u64()
    })
}

/// Width-dynamic `(k * i mod P) mod r` with power-of-two `r` (bitmask).
#[inline]
pub fn universal_hash(k: u64, i: u64, r: u64, p: &NearMaxPrime) -> u64 {
    debug_assert!(r >= 1 && r.is_power_of_two());
    mulmod_near_max(k, i, p) & (r - 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn fnv_vectors() {
        assert_eq!(raw_hash(b"").0, 0xcbf29ce484222325);
        assert_eq!(raw_hash(b"a").0, 0xaf63dc4c8601ec8c);
        // Determinism over an arbitrary key.
        assert_eq!(raw_hash(b"perfect"), raw_hash(b"perfect"));
    }

    /// Trial-division primality, good to 2^32 and beyond (slowly).
    fn is_prime_trial(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2u64;
        while d.checked_mul(d).map_or(false, |sq| sq <= n) {
            if n % d == 0 {
                return false;
            }
            d += 1;
        }
        true
    }

    /// Deterministic Miller-Rabin, exact for all u64 with these bases.
    fn is_prime_mr(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            if n == p {
                return true;
            }
            if n % p == 0 {
                return false;
            }
        }
        let mut d = n - 1;
        let mut r = 0;
        while d % 2 == 0 {
            d /= 2;
            r += 1;
        }
        'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
            let mut x = 1u128;
            let mut base = a as u128 % n as u128;
            let mut e = d;
            while e > 0 {
                if e & 1 == 1 {
                    x = x * base % n as u128;
                }
                base = base * base % n as u128;
                e >>= 1;
            }
            if x == 1 || x == (n - 1) as u128 {
                continue;
            }
            for _ in 0..r - 1 {
                x = x * x % n as u128;
                if x == (n - 1) as u128 {
                    continue 'witness;
                }
            }
            return false;
        }
        true
    }

    #[test]
    fn near_max_primes_are_the_largest_below_each_width() {
        // Exhaustive scan for the small widths.
        let best8 = (2..256u64).filter(|&n| is_prime_trial(n)).max().unwrap();
        assert_eq!(best8, 251);
        let best16 = (2..65536u64).filter(|&n| is_prime_trial(n)).max().unwrap();
        assert_eq!(best16, 65521);
        // Downward scan from the top for the wide ones.
        let best32 = (0..64u64)
            .map(|d| u32::MAX as u64 - d)
            .find(|&n| is_prime_trial(n))
            .unwrap();
        assert_eq!(best32, 4294967291);
        let best64 = (0..64u64)
            .map(|d| u64::MAX - d)
            .find(|&n| is_prime_mr(n))
            .unwrap();
        assert_eq!(best64, 18446744073709551557);

        for (w, expect) in [
            (IndexWidth::W8, best8),
            (IndexWidth::W16, best16),
            (IndexWidth::W32, best32),
            (IndexWidth::W64, best64),
        ] {
            let p = largest_prime_below(w);
            assert_eq!(p.value(), expect);
            assert_eq!(p.deficit(), w.mask().wrapping_sub(expect).wrapping_add(1));
            assert!(p.deficit() < 64);
        }
    }

    #[test]
    fn deficit_constants_match() {
        assert_eq!(u8::DEFICIT, 5);
        assert_eq!(u16::DEFICIT, 15);
        assert_eq!(u32::DEFICIT, 5);
        assert_eq!(u64::DEFICIT, 59);
    }

    #[test]
    fn mod_examples() {
        let p8 = largest_prime_below(IndexWidth::W8);
        assert_eq!(mod_near_max(5, &p8), 5);
        assert_eq!(mod_near_max(251, &p8), 0);
        let p64 = largest_prime_below(IndexWidth::W64);
        assert_eq!(mod_near_max(u64::MAX, &p64), 58);
    }

    #[test]
    fn mod_exhaustive_width8() {
        for x in 0..=255u8 {
            let (got, steps) = u8::mod_near_max_counted(x);
            assert_eq!(got as u64, x as u64 % 251);
            assert!(steps <= 2);
        }
    }

    #[test]
    fn mulmod_examples() {
        let p64 = largest_prime_below(IndexWidth::W64);
        // 2^32 * 2^32 = 2^64 = P + 59.
        assert_eq!(mulmod_near_max(1 << 32, 1 << 32, &p64), 59);
        assert_eq!(mulmod_near_max(1, 12345, &p64), 12345);
        assert_eq!(mulmod_near_max(1, u64::MAX, &p64), 58);
    }

    #[test]
    fn mulmod_exhaustive_width8() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                let expect = (a as u32 * b as u32 % 251) as u8;
                assert_eq!(u8::mulmod_near_max(a, b), expect, "a={a} b={b}");
            }
        }
    }

    fn mulmod_oracle(a: u64, b: u64, p: u64) -> u64 {
        (a as u128 * b as u128 % p as u128) as u64
    }

    #[test]
    fn mulmod_random_against_big_integer_oracle() {
        // Cheap xorshift-free LCG so this test doesn't depend on the crate's
        // own generator.
        let mut state = 0x853c49e6748fea9bu64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            state
        };
        for width in IndexWidth::ASCENDING {
            let p = largest_prime_below(width);
            for _ in 0..20_000 {
                let a = next() & width.mask();
                let b = next() & width.mask();
                assert_eq!(
                    mulmod_near_max(a, b, &p),
                    mulmod_oracle(a, b, p.value()),
                    "width={width} a={a} b={b}"
                );
                let x = next() & width.mask();
                assert_eq!(mod_near_max(x, &p), x % p.value());
            }
        }
    }

    #[test]
    fn universal_hash_examples() {
        let p8 = largest_prime_below(IndexWidth::W8);
        assert_eq!(universal_hash(0, 99, 16, &p8), 0);
        assert_eq!(universal_hash(1, 5, 8, &p8), 5);
        // 3*7 = 21, 21 mod 251 = 21, 21 mod 4 = 1.
        assert_eq!(universal_hash(3, 7, 4, &p8), 1);
    }

    #[test]
    fn truncate_and_salt_examples() {
        assert_eq!(truncate_hash(RawHash(0x1234567890ABCDEF), IndexWidth::W16), 0xCDEF);
        assert_eq!(truncate_hash(RawHash(0xFF), IndexWidth::W8), 0xFF);
        assert_eq!(truncate_hash(RawHash(0x1FF), IndexWidth::W8), 0xFF);
        assert_eq!(apply_salt(RawHash(0b1010), Salt::new(0b0110)).0, 0b1100);
        assert_eq!(apply_salt(RawHash(42), Salt::DISABLED).0, 42);
    }

    proptest! {
        #[test]
        fn salt_is_an_involution(h: u64, s: u64) {
            let salt = Salt::new(s);
            let once = apply_salt(RawHash(h), salt);
            prop_assert_eq!(apply_salt(once, salt).0, h);
        }

        #[test]
        fn universal_hash_below_r(k: u64, i: u64, r_log in 0u32..16) {
            let r = 1u64 << r_log;
            let p = largest_prime_below(IndexWidth::W64);
            prop_assert!(universal_hash(k, i, r, &p) < r);
        }

        #[test]
        fn mulmod_u64_matches_oracle(a: u64, b: u64) {
            let p = largest_prime_below(IndexWidth::W64);
            prop_assert_eq!(mulmod_near_max(a, b, &p), mulmod_oracle(a, b, p.value()));
        }

        #[test]
        fn mulmod_u16_matches_oracle(a: u16, b: u16) {
            prop_assert_eq!(
                u16::mulmod_near_max(a, b) as u64,
                mulmod_oracle(a as u64, b as u64, u16::PRIME as u64)
            );
        }

        #[test]
        fn mod_step_bound_holds(x: u64) {
            let (_, steps) = u64::mod_near_max_counted(x);
            prop_assert!(steps <= 2);
        }
    }
}

//! The user-facing containers.
//!
//! Four perfect-hash variants trade safety and footprint against speed,
//! plus one sorted-array ordered map:
//!
//! - [`DangerousMap`]: keys not stored, values directly in the secondary
//!   table, not iterable. The building block for everything else.
//! - [`SmallValuesMap`]: iterable; values stored twice (in-table and in
//!   insertion order) to keep the lookup free of indirection.
//! - [`IndexedMap`]: the general map; the table stores indices into an
//!   insertion-order value array and `at()` gives exact membership.
//! - [`MutableValuesMap`]: immutable key-to-index mapping over a mutable
//!   value array.
//! - [`OrderedMap`]: sorted pairs with binary-search lookup.
//!
//! Lookups on the hash variants never compare keys (the one exception is
//! the exact-membership check in `IndexedMap::at`) and evaluate the
//! universal hash at most twice — exactly once when the key's bucket holds
//! a single entry.

mod dangerous;
mod indexed;
mod mutable;
mod ordered;
mod small;

pub use dangerous::{AnyDangerousMap, DangerousMap};
pub use indexed::{AnyIndexedMap, IndexedMap};
pub use mutable::{AnyMutableValuesMap, MutableValuesMap};
pub use ordered::OrderedMap;
pub use small::{AnySmallValuesMap, SmallValuesMap};

use crate::hash::raw_hash;

/// Where a key's lookup lands in the two-level table.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SlotInfo {
    pub row: usize,
    pub col: usize,
    /// Allocated size of the row; 0 means the primary bucket is empty.
    pub row_size: usize,
}

/// Work counters from an instrumented lookup.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct LookupStats {
    /// Universal-hash evaluations performed (1 for singleton buckets,
    /// 2 otherwise).
    pub hash_evals: u32,
    /// Whole-key equality comparisons performed.
    pub key_comparisons: u32,
}

/// Numeric projection summed by [`cache`] warming. For non-numeric values
/// the projection is the low 32 bits of the value's own FNV-1a hash.
///
/// [`cache`]: SmallValuesMap::cache
pub trait CacheWeight {
    fn cache_weight(&self) -> f64;
}

macro_rules! weight_by_cast {
    ($($ty:ty),*) => {
        $(impl CacheWeight for $ty {
            #[inline]
            fn cache_weight(&self) -> f64 {
                *self as f64
            }
        })*
    };
}

weight_by_cast!(f64, f32, i8, i16, i32, i64, isize, u8, u16, u32, u64, usize);

impl CacheWeight for char {
    #[inline]
    fn cache_weight(&self) -> f64 {
        *self as u32 as f64
    }
}

impl CacheWeight for str {
    fn cache_weight(&self) -> f64 {
        (raw_hash(self.as_bytes()).0 & 0xFFFF_FFFF) as f64
    }
}

impl CacheWeight for &str {
    fn cache_weight(&self) -> f64 {
        (raw_hash(self.as_bytes()).0 & 0xFFFF_FFFF) as f64
    }
}

impl CacheWeight for alloc::string::String {
    fn cache_weight(&self) -> f64 {
        (raw_hash(self.as_bytes()).0 & 0xFFFF_FFFF) as f64
    }
}

/// Run `$body` with `$m` bound to the width-concrete inner map.
macro_rules! with_inner {
    ($self:expr, $m:ident, $body:expr) => {
        match $self {
            Self::W8($m) => $body,
            Self::W16($m) => $body,
            Self::W32($m) => $body,
            Self::W64($m) => $body,
        }
    };
}

/// Width-erasing enum over one typed map, plus `From` impls per width.
macro_rules! any_map_enum {
    ($(#[$doc:meta])* $any:ident, $typed:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug)]
        pub enum $any<K, V> {
            W8($typed<K, V, u8>),
            W16($typed<K, V, u16>),
            W32($typed<K, V, u32>),
            W64($typed<K, V, u64>),
        }

        impl<K, V> From<$typed<K, V, u8>> for $any<K, V> {
            fn from(m: $typed<K, V, u8>) -> Self {
                Self::W8(m)
            }
        }
        impl<K, V> From<$typed<K, V, u16>> for $any<K, V> {
            fn from(m: $typed<K, V, u16>) -> Self {
                Self::W16(m)
            }
        }
        impl<K, V> From<$typed<K, V, u32>> for $any<K, V> {
            fn from(m: $typed<K, V, u32>) -> Self {
                Self::W32(m)
            }
        }
        impl<K, V> From<$typed<K, V, u64>> for $any<K, V> {
            fn from(m: $typed<K, V, u64>) -> Self {
                Self::W64(m)
            }
        }

        impl<K, V> $any<K, V> {
            pub fn width(&self) -> crate::hash::IndexWidth {
                match self {
                    Self::W8(_) => crate::hash::IndexWidth::W8,
                    Self::W16(_) => crate::hash::IndexWidth::W16,
                    Self::W32(_) => crate::hash::IndexWidth::W32,
                    Self::W64(_) => crate::hash::IndexWidth::W64,
                }
            }
        }
    };
}

pub(crate) use any_map_enum;
pub(crate) use with_inner;

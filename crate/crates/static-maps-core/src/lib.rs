//! Perfect-hash maps for keysets that are fixed before the program runs.
//!
//! The construction is the classic two-level scheme: a primary universal
//! hash `g_k(h, r) = k*h mod P mod r` scatters keys into buckets, a random
//! seed search keeps the total number of primary collisions below a Markov
//! bound, and each colliding bucket gets its own quadratically sized
//! secondary table with a collision-free seed of the same hash family.
//! Lookups then need at most two multiplications and zero key comparisons.
//!
//! `P` is always the largest prime below the index type's maximum, so the
//! modulo reduces to compare-and-subtract steps and the multiplication can
//! be corrected for word wraparound without ever widening past the index
//! type. Table sizes are powers of two, so `mod r` is a bitmask.
//!
//! The crate is `no_std` (with `alloc`); all construction is deterministic
//! given a seed, so tables can be built in an offline step and embedded or
//! serialized.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod build;
pub mod error;
pub mod hash;
pub mod maps;
pub mod ragged;
pub mod rng;
pub mod sizing;

pub use build::{
    build_perfect_hash, find_primary_seed, find_secondary_seed, group_by_primary,
    make_dangerous_map, make_indexed_map, make_mutable_values_map, make_small_values_map,
    row_size_for_bucket, BuildOptions, KeyValueSet, PerfectHashParams, PrimarySearch, Slot,
};
pub use error::{BuildError, KeyNotFound, ParamError};
pub use hash::{
    apply_salt, largest_prime_below, mod_near_max, mulmod_near_max, raw_hash, truncate_hash,
    universal_hash, IndexWidth, IndexWord, NearMaxPrime, RawHash, Salt,
};
pub use maps::{
    AnyDangerousMap, AnyIndexedMap, AnyMutableValuesMap, AnySmallValuesMap, CacheWeight,
    DangerousMap, IndexedMap, LookupStats, MutableValuesMap, OrderedMap, SlotInfo, SmallValuesMap,
};
pub use ragged::RaggedArray;
pub use rng::Xorshift64;
pub use sizing::{
    collision_threshold, count_collisions, expected_trials, infer_index_width, primary_table_size,
    secondary_total_size_bound, BucketSizes, TableConfig,
};

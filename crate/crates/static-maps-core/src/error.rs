//! Error types for parameter validation, construction, and lookup.

use core::fmt;

use crate::hash::IndexWidth;

/// Rejected construction parameter.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ParamError {
    /// tau <= 1 makes the Markov bound vacuous and the seed search
    /// potentially endless.
    TauNotAboveOne,
    DeltaNotPositive,
    /// The primary table would need more slots than the index width can
    /// address.
    PrimaryTableExceedsWidth { width: IndexWidth, r_primary: u64 },
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::TauNotAboveOne => write!(f, "tau must be greater than 1"),
            ParamError::DeltaNotPositive => write!(f, "delta must be positive"),
            ParamError::PrimaryTableExceedsWidth { width, r_primary } => write!(
                f,
                "primary table of {r_primary} slots is not addressable with {width}-bit indices"
            ),
        }
    }
}

impl core::error::Error for ParamError {}

/// Which seed search gave up.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SearchStage {
    Primary,
    /// Secondary search for the bucket at this primary index.
    Secondary { row: u64 },
}

impl fmt::Display for SearchStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchStage::Primary => write!(f, "primary"),
            SearchStage::Secondary { row } => write!(f, "secondary (bucket {row})"),
        }
    }
}

/// Why a table could not be constructed.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum BuildError {
    /// Hash variants need at least one key.
    EmptyKeySet,
    /// Two input keys have identical bytes. Indices are positions in the
    /// original pair order.
    DuplicateKey { first: usize, second: usize },
    /// Two distinct keys share a full 64-bit raw hash; no width or salt
    /// can separate them.
    RawHashCollision { first: usize, second: usize },
    /// The requested width truncates two keys' hashes onto each other (or
    /// onto a pair the hash family can never split).
    WidthCollision { width: IndexWidth, first: usize, second: usize },
    /// Random search exhausted its trial budget; points at delta/tau/width
    /// being too tight for the keyset.
    SeedSearchExhausted { stage: SearchStage, trials: u64 },
    /// Secondary tables would overflow what the index width can address.
    TableOverflow { width: IndexWidth, total_slots: u64 },
    Param(ParamError),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::EmptyKeySet => write!(f, "cannot build a hash table over an empty keyset"),
            BuildError::DuplicateKey { first, second } => {
                write!(f, "duplicate key: entries {first} and {second} have identical bytes")
            }
            BuildError::RawHashCollision { first, second } => {
                write!(f, "raw hash collision between entries {first} and {second}")
            }
            BuildError::WidthCollision { width, first, second } => write!(
                f,
                "entries {first} and {second} collide at the requested {width}-bit index width"
            ),
            BuildError::SeedSearchExhausted { stage, trials } => {
                write!(f, "{stage} seed search exhausted after {trials} trials")
            }
            BuildError::TableOverflow { width, total_slots } => write!(
                f,
                "{total_slots} secondary slots exceed the {width}-bit index range"
            ),
            BuildError::Param(e) => e.fmt(f),
        }
    }
}

impl core::error::Error for BuildError {}

impl From<ParamError> for BuildError {
    fn from(e: ParamError) -> BuildError {
        BuildError::Param(e)
    }
}

/// Checked lookup miss.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct KeyNotFound;

impl fmt::Display for KeyNotFound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "key not found")
    }
}

impl core::error::Error for KeyNotFound {}

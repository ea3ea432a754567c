//! Closed-form bounds and parameter inference for the two-level scheme.
//!
//! With primary table size `r = delta*n`, a random seed keeps the total
//! collision count `C` below `tau*n/(2*delta)` with probability at least
//! `1 - 1/tau` (Markov), so the expected number of seed trials is
//! `1/(1 - 1/tau)`. Secondary tables are quadratic per bucket, and
//! `sum n_j^2 = n + 2C` bounds their total size by `n + tau*n/delta`.

use alloc::vec::Vec;

use crate::error::{BuildError, ParamError};
use crate::hash::{apply_salt, truncate_hash, IndexWidth, RawHash, Salt};
use crate::rng::Xorshift64;

/// Markov slack factor default; just above 1 keeps collisions low without
/// making the seed search expensive.
pub const DEFAULT_TAU: f64 = 1.5;
/// Primary load factor default.
pub const DEFAULT_DELTA: f64 = 1.0;
/// Salt draws attempted per width before giving up and widening.
pub const SALT_TRIALS_PER_WIDTH: usize = 16;
/// Seed draws per secondary bucket; collision probability per draw is
/// below 1/2 at quadratic size, so 64 misses in a row signals a bug or a
/// hash-family blind spot rather than bad luck.
pub const MAX_SECONDARY_TRIALS: u64 = 64;

fn check_tau(tau: f64) -> Result<(), ParamError> {
    if !(tau > 1.0) || !tau.is_finite() {
        return Err(ParamError::TauNotAboveOne);
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<(), ParamError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(ParamError::DeltaNotPositive);
    }
    Ok(())
}

/// Smallest u64 >= x, for finite non-negative x. (no_std: no f64::ceil.)
fn ceil_to_u64(x: f64) -> u64 {
    let t = x as u64;
    if (t as f64) < x {
        t + 1
    } else {
        t
    }
}

/// The accepted-seed collision bound `tau * n / (2 * delta)`.
pub fn collision_threshold(n: usize, delta: f64, tau: f64) -> Result<f64, ParamError> {
    check_delta(delta)?;
    check_tau(tau)?;
    Ok(tau * n as f64 / (2.0 * delta))
}

/// Expected seed trials before the Markov bound is met: `1/(1 - 1/tau)`.
pub fn expected_trials(tau: f64) -> Result<f64, ParamError> {
    check_tau(tau)?;
    Ok(1.0 / (1.0 - 1.0 / tau))
}

/// Per-primary-index key counts `n_j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BucketSizes(pub Vec<usize>);

impl BucketSizes {
    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// `C = sum_j C(n_j, 2)`.
    pub fn count_collisions(&self) -> u64 {
        count_collisions(&self.0)
    }
}

/// Total pairwise collisions in the primary table: `sum_j C(n_j, 2)`.
pub fn count_collisions(bucket_sizes: &[usize]) -> u64 {
    bucket_sizes.iter().map(|&c| (c as u64) * (c as u64).saturating_sub(1) / 2).sum()
}

/// Upper bound on total secondary slots: `ceil(n + tau*n/delta)`.
///
/// Follows from `sum n_j^2 = n + 2C` and `C < tau*n/(2*delta)`.
pub fn secondary_total_size_bound(n: usize, delta: f64, tau: f64) -> Result<u64, ParamError> {
    check_delta(delta)?;
    check_tau(tau)?;
    Ok(ceil_to_u64(n as f64 + tau * n as f64 / delta))
}

/// Smallest power of two >= delta*n, so the primary modulo is a bitmask.
pub fn primary_table_size(n: usize, delta: f64) -> Result<u64, ParamError> {
    check_delta(delta)?;
    let wanted = ceil_to_u64(delta * n as f64).max(1);
    wanted.checked_next_power_of_two().ok_or(ParamError::PrimaryTableExceedsWidth {
        width: IndexWidth::W64,
        r_primary: u64::MAX,
    })
}

/// Constructor-path width fallback: smallest width with `2^w > 4*n`.
pub fn default_width_for(n: usize) -> IndexWidth {
    let need = 4u128 * n as u128;
    IndexWidth::ASCENDING
        .into_iter()
        .find(|w| (1u128 << w.bits()) > need)
        .unwrap_or(IndexWidth::W64)
}

/// Everything the construction pipeline needs to know about sizes, trials,
/// and the key-to-index transform.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct TableConfig {
    pub n: usize,
    pub delta: f64,
    pub tau: f64,
    pub width: IndexWidth,
    pub salt: Salt,
    pub r_primary: u64,
    pub collision_threshold: f64,
    /// Bound on total secondary slots (before power-of-two row rounding).
    pub r_secondary_total: u64,
    pub max_primary_trials: u64,
    pub max_secondary_trials: u64,
}

impl TableConfig {
    pub fn new(
        n: usize,
        delta: f64,
        tau: f64,
        width: IndexWidth,
        salt: Salt,
    ) -> Result<TableConfig, BuildError> {
        if n == 0 {
            return Err(BuildError::EmptyKeySet);
        }
        let r_primary = primary_table_size(n, delta)?;
        if r_primary - 1 > width.mask() {
            return Err(ParamError::PrimaryTableExceedsWidth { width, r_primary }.into());
        }
        let threshold = collision_threshold(n, delta, tau)?;
        let bound = secondary_total_size_bound(n, delta, tau)?;
        let max_primary_trials = ceil_to_u64(32.0 * expected_trials(tau)?);
        Ok(TableConfig {
            n,
            delta,
            tau,
            width,
            salt,
            r_primary,
            collision_threshold: threshold,
            r_secondary_total: bound,
            max_primary_trials,
            max_secondary_trials: MAX_SECONDARY_TRIALS,
        })
    }

    /// `r_primary - 1`, valid because r_primary is a power of two that the
    /// width can address.
    pub fn primary_mask(&self) -> u64 {
        self.r_primary - 1
    }
}

/// How the factory should treat the salt during width selection.
#[derive(Clone, Copy, Debug)]
pub(crate) enum SaltPolicy {
    /// Enable and search for a salt only when a pair of truncated hashes
    /// differs by exactly the width's prime.
    Infer,
    /// Use exactly this salt (possibly disabled), never search.
    Forced(Salt),
}

/// Outcome of checking one (width, salt) candidate.
enum WidthCheck {
    Clean,
    /// Two hashes truncate to the same value; no salt can separate them.
    Collision(usize, usize),
    /// Distinct, but a pair differs by exactly the prime, which the hash
    /// family `k*i mod P` can never split.
    PrimeGap(usize, usize),
}

fn check_width(hashes: &[RawHash], width: IndexWidth, salt: Salt) -> WidthCheck {
    let prime = crate::hash::largest_prime_below(width).value();
    let mut truncated: Vec<(u64, usize)> = hashes
        .iter()
        .enumerate()
        .map(|(i, &h)| (truncate_hash(apply_salt(h, salt), width), i))
        .collect();
    truncated.sort_unstable();
    for pair in truncated.windows(2) {
        if pair[0].0 == pair[1].0 {
            let (a, b) = (pair[0].1, pair[1].1);
            return WidthCheck::Collision(a.min(b), a.max(b));
        }
    }
    for &(v, i) in truncated.iter() {
        if let Some(above) = v.checked_add(prime) {
            if let Ok(pos) = truncated.binary_search_by(|probe| probe.0.cmp(&above)) {
                let j = truncated[pos].1;
                return WidthCheck::PrimeGap(i.min(j), i.max(j));
            }
        }
    }
    WidthCheck::Clean
}

/// Confirm a (width, salt) pair leaves the truncated hashes pairwise
/// distinct and free of mod-P-congruent pairs; either defect makes every
/// seed search hopeless, so construction refuses up front.
pub(crate) fn assert_width_viable(
    raws: &[RawHash],
    width: IndexWidth,
    salt: Salt,
) -> Result<(), BuildError> {
    match check_width(raws, width, salt) {
        WidthCheck::Clean => Ok(()),
        WidthCheck::Collision(first, second) | WidthCheck::PrimeGap(first, second) => {
            Err(BuildError::WidthCollision { width, first, second })
        }
    }
}

pub(crate) fn choose_width_and_salt(
    hashes: &[RawHash],
    candidates: &[IndexWidth],
    policy: SaltPolicy,
    rng: &mut Xorshift64,
) -> Result<(IndexWidth, Salt), BuildError> {
    // Duplicate raw hashes are unrecoverable regardless of width.
    {
        let mut sorted: Vec<(u64, usize)> =
            hashes.iter().enumerate().map(|(i, h)| (h.0, i)).collect();
        sorted.sort_unstable();
        for pair in sorted.windows(2) {
            if pair[0].0 == pair[1].0 {
                let (a, b) = (pair[0].1, pair[1].1);
                return Err(BuildError::DuplicateKey { first: a.min(b), second: a.max(b) });
            }
        }
    }

    let mut last_block = (0usize, 0usize);
    for &width in candidates {
        let base_salt = match policy {
            SaltPolicy::Infer => Salt::DISABLED,
            SaltPolicy::Forced(s) => s,
        };
        match check_width(hashes, width, base_salt) {
            WidthCheck::Clean => return Ok((width, base_salt)),
            WidthCheck::Collision(a, b) => {
                last_block = (a, b);
                continue; // salting is an XOR on the truncated value: collisions survive it
            }
            WidthCheck::PrimeGap(a, b) => {
                last_block = (a, b);
                if let SaltPolicy::Forced(_) = policy {
                    continue;
                }
                for _ in 0..SALT_TRIALS_PER_WIDTH {
                    let salt = Salt::new(rng.next_u64());
                    if let WidthCheck::Clean = check_width(hashes, width, salt) {
                        return Ok((width, salt));
                    }
                }
            }
        }
    }
    Err(BuildError::RawHashCollision { first: last_block.0, second: last_block.1 })
}

/// Smallest width whose truncations are collision-free, plus a salt when a
/// pair of truncated hashes differs by exactly that width's prime.
///
/// Errors with `DuplicateKey` on duplicate raw hashes and
/// `RawHashCollision` when even 64 bits cannot separate the set.
pub fn infer_index_width(
    raw_hashes: &[RawHash],
    rng: &mut Xorshift64,
) -> Result<(IndexWidth, Salt), BuildError> {
    choose_width_and_salt(raw_hashes, &IndexWidth::ASCENDING, SaltPolicy::Infer, rng)
}

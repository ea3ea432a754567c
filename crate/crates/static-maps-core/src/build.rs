//! The perfect-hash build pipeline: primary seed search under the Markov
//! bound, bucket grouping, quadratic secondary tables, secondary seed
//! search, and the parameter-inferring factory functions.
//!
//! Construction is a pure function of (keyset, config, seed): two builds
//! with the same inputs produce identical tables, so the whole pipeline
//! can run in an offline build step and be serialized or embedded.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{BuildError, SearchStage};
use crate::hash::{dispatch_width, raw_hash, IndexWidth, IndexWord, RawHash, Salt};
use crate::maps::{
    AnyDangerousMap, AnyIndexedMap, AnyMutableValuesMap, AnySmallValuesMap, DangerousMap,
    IndexedMap, MutableValuesMap, SmallValuesMap,
};
use crate::rng::Xorshift64;
use crate::sizing::{
    choose_width_and_salt, count_collisions, BucketSizes, SaltPolicy, TableConfig, DEFAULT_DELTA,
    DEFAULT_TAU,
};

/// Seed used when the caller provides none; fixed so that library builds
/// are reproducible by default. (The CLI layers env/timestamp seeding on
/// top of this.)
pub const DEFAULT_SEED: u64 = 0x243f_6a88_85a3_08d3;

/// The immutable construction input: key-value pairs in caller order.
///
/// Keys must have pairwise distinct bytes; the original order is preserved
/// and is the iteration order of every iterable map variant.
#[derive(Clone, Debug)]
pub struct KeyValueSet<K, V> {
    pairs: Vec<(K, V)>,
}

impl<K: AsRef<[u8]>, V> KeyValueSet<K, V> {
    pub fn new(pairs: Vec<(K, V)>) -> Result<KeyValueSet<K, V>, BuildError> {
        let mut order: Vec<usize> = (0..pairs.len()).collect();
        order.sort_by(|&a, &b| pairs[a].0.as_ref().cmp(pairs[b].0.as_ref()));
        for w in order.windows(2) {
            if pairs[w[0]].0.as_ref() == pairs[w[1]].0.as_ref() {
                let (a, b) = (w[0].min(w[1]), w[0].max(w[1]));
                return Err(BuildError::DuplicateKey { first: a, second: b });
            }
        }
        Ok(KeyValueSet { pairs })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(K, V)] {
        &self.pairs
    }

    pub fn into_pairs(self) -> Vec<(K, V)> {
        self.pairs
    }

    pub fn raw_hashes(&self) -> Vec<RawHash> {
        self.pairs.iter().map(|(k, _)| raw_hash(k.as_ref())).collect()
    }
}

/// A key's position in the two-level table.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Slot {
    pub row: u64,
    pub col: u64,
}

/// Secondary row size for a bucket of `n_j` keys: quadratic, rounded up to
/// a power of two so the in-row modulo is a bitmask. Empty buckets get no
/// slots, singletons exactly one.
pub fn row_size_for_bucket(n_j: usize) -> u64 {
    match n_j {
        0 => 0,
        1 => 1,
        _ => ((n_j as u64).saturating_mul(n_j as u64)).checked_next_power_of_two().unwrap_or(u64::MAX),
    }
}

/// Everything construction decides: seeds, sizes, and each key's slot.
/// Fully determines the table hash.
#[derive(Clone, PartialEq, Debug)]
pub struct PerfectHashParams<W: IndexWord> {
    pub config: TableConfig,
    pub k_primary: W,
    /// One secondary seed per primary index; 0 is the unused/singleton
    /// sentinel (an accepted seed for a multi-key bucket is never 0, since
    /// k = 0 maps every key to slot 0).
    pub ks_secondary: Vec<W>,
    pub bucket_sizes: BucketSizes,
    /// For each input key (in original order), its (row, column).
    pub slots: Vec<Slot>,
}

impl<W: IndexWord> PerfectHashParams<W> {
    pub fn row_sizes(&self) -> Vec<u64> {
        self.bucket_sizes.0.iter().map(|&n_j| row_size_for_bucket(n_j)).collect()
    }

    pub fn total_secondary_slots(&self) -> u64 {
        self.bucket_sizes.0.iter().map(|&n_j| row_size_for_bucket(n_j)).sum()
    }
}

/// Bucket occupancy and total collision count `C` under seed `k`.
pub fn evaluate_primary_seed<W: IndexWord>(
    hashes: &[W],
    k: W,
    cfg: &TableConfig,
) -> (u64, BucketSizes) {
    let mask = W::truncate_u64(cfg.primary_mask());
    let mut sizes = vec![0usize; cfg.r_primary as usize];
    for &h in hashes {
        sizes[W::universal_hash(k, h, mask).to_usize()] += 1;
    }
    (count_collisions(&sizes), BucketSizes(sizes))
}

pub struct PrimarySearch<W> {
    pub k: W,
    pub buckets: BucketSizes,
    /// 1-based number of seeds tried, the accepted one included.
    pub trials: u64,
}

/// Draw seeds until the collision count drops below the Markov threshold.
pub fn find_primary_seed<W: IndexWord>(
    hashes: &[W],
    cfg: &TableConfig,
    rng: &mut Xorshift64,
) -> Result<PrimarySearch<W>, BuildError> {
    for trial in 1..=cfg.max_primary_trials {
        let k = W::truncate_u64(rng.next_u64());
        let (collisions, buckets) = evaluate_primary_seed(hashes, k, cfg);
        if (collisions as f64) < cfg.collision_threshold {
            return Ok(PrimarySearch { k, buckets, trials: trial });
        }
    }
    Err(BuildError::SeedSearchExhausted {
        stage: SearchStage::Primary,
        trials: cfg.max_primary_trials,
    })
}

/// Bucket keys by primary index, keeping each key's original position.
pub fn group_by_primary<W: IndexWord>(
    hashes: &[W],
    k_primary: W,
    cfg: &TableConfig,
) -> Vec<Vec<(usize, W)>> {
    let mask = W::truncate_u64(cfg.primary_mask());
    let mut buckets: Vec<Vec<(usize, W)>> = vec![Vec::new(); cfg.r_primary as usize];
    for (idx, &h) in hashes.iter().enumerate() {
        buckets[W::universal_hash(k_primary, h, mask).to_usize()].push((idx, h));
    }
    buckets
}

/// Find a seed that maps the bucket's hashes injectively into its
/// quadratic row. `r_j` must be `row_size_for_bucket(bucket_hashes.len())`.
pub fn find_secondary_seed<W: IndexWord>(
    bucket_hashes: &[W],
    r_j: u64,
    row: u64,
    cfg: &TableConfig,
    rng: &mut Xorshift64,
) -> Result<W, BuildError> {
    debug_assert!(bucket_hashes.len() >= 2);
    debug_assert!(r_j.is_power_of_two());
    let mask = W::truncate_u64(r_j - 1);
    let mut stamps = vec![0u64; r_j as usize];
    for trial in 1..=cfg.max_secondary_trials {
        let k = W::truncate_u64(rng.next_u64());
        let mut injective = true;
        for &h in bucket_hashes {
            let slot = W::universal_hash(k, h, mask).to_usize();
            if stamps[slot] == trial {
                injective = false;
                break;
            }
            stamps[slot] = trial;
        }
        if injective {
            return Ok(k);
        }
    }
    Err(BuildError::SeedSearchExhausted {
        stage: SearchStage::Secondary { row },
        trials: cfg.max_secondary_trials,
    })
}

/// Salted, truncated hashes of every key at the config's width.
pub(crate) fn table_hashes<K: AsRef<[u8]>, V, W: IndexWord>(
    kv: &KeyValueSet<K, V>,
    cfg: &TableConfig,
) -> Vec<W> {
    kv.pairs
        .iter()
        .map(|(k, _)| W::truncate_u64(crate::hash::apply_salt(raw_hash(k.as_ref()), cfg.salt).0))
        .collect()
}

/// Run the whole pipeline for a fixed config. Deterministic in
/// (kv, cfg, rng state); key values are never consulted, only key bytes.
pub fn build_perfect_hash<K: AsRef<[u8]>, V, W: IndexWord>(
    kv: &KeyValueSet<K, V>,
    cfg: TableConfig,
    rng: &mut Xorshift64,
) -> Result<PerfectHashParams<W>, BuildError> {
    if kv.is_empty() {
        return Err(BuildError::EmptyKeySet);
    }
    debug_assert_eq!(cfg.width, W::WIDTH);
    debug_assert_eq!(cfg.n, kv.len());

    // The width/salt must leave the truncated hashes pairwise distinct and
    // free of pairs congruent mod P, or no seed can ever separate them.
    let raws = kv.raw_hashes();
    crate::sizing::assert_width_viable(&raws, cfg.width, cfg.salt)?;

    let hashes: Vec<W> = table_hashes(kv, &cfg);
    let search = find_primary_seed(&hashes, &cfg, rng)?;

    let row_sizes: Vec<u64> = search.buckets.0.iter().map(|&n_j| row_size_for_bucket(n_j)).collect();
    let mut total: u64 = 0;
    for &r in &row_sizes {
        total = total.checked_add(r).unwrap_or(u64::MAX);
    }
    if total > W::MAX.widen_u64() {
        return Err(BuildError::TableOverflow { width: W::WIDTH, total_slots: total });
    }

    let buckets = group_by_primary(&hashes, search.k, &cfg);
    let mut ks_secondary = vec![W::ZERO; cfg.r_primary as usize];
    let mut slots = vec![Slot::default(); kv.len()];
    for (j, bucket) in buckets.iter().enumerate() {
        match bucket.len() {
            0 => {}
            1 => {
                slots[bucket[0].0] = Slot { row: j as u64, col: 0 };
            }
            _ => {
                let r_j = row_sizes[j];
                let bucket_hashes: Vec<W> = bucket.iter().map(|&(_, h)| h).collect();
                let k_j = find_secondary_seed(&bucket_hashes, r_j, j as u64, &cfg, rng)?;
                ks_secondary[j] = k_j;
                let mask = W::truncate_u64(r_j - 1);
                for &(idx, h) in bucket {
                    slots[idx] =
                        Slot { row: j as u64, col: W::universal_hash(k_j, h, mask).widen_u64() };
                }
            }
        }
    }

    #[cfg(debug_assertions)]
    {
        let mut seen: Vec<Slot> = slots.clone();
        seen.sort_by_key(|s| (s.row, s.col));
        debug_assert!(
            seen.windows(2).all(|p| p[0] != p[1]),
            "constructed slots must be pairwise distinct"
        );
    }

    Ok(PerfectHashParams {
        config: cfg,
        k_primary: search.k,
        ks_secondary,
        bucket_sizes: search.buckets,
        slots,
    })
}

/// Overrides for the inferring factories. `None` fields are inferred
/// (width, salt) or defaulted (delta 1, tau 1.5, fixed seed).
#[derive(Clone, Copy, Debug, Default)]
pub struct BuildOptions {
    pub delta: Option<f64>,
    pub tau: Option<f64>,
    pub width: Option<IndexWidth>,
    /// `Some(Salt::DISABLED)` forces salting off; `None` infers.
    pub salt: Option<Salt>,
    pub seed: Option<u64>,
}

/// Shared factory driver: pick width and salt, build, and on a retryable
/// failure (seed search exhausted, table overflow) move to the next wider
/// index type — unless the caller forced a width, which is never widened
/// silently.
fn drive_factory<R>(
    raws: &[RawHash],
    n: usize,
    opts: &BuildOptions,
    mut try_build: impl FnMut(TableConfig, &mut Xorshift64) -> Result<R, BuildError>,
) -> Result<R, BuildError> {
    if n == 0 {
        return Err(BuildError::EmptyKeySet);
    }
    let delta = opts.delta.unwrap_or(DEFAULT_DELTA);
    let tau = opts.tau.unwrap_or(DEFAULT_TAU);
    let mut rng = Xorshift64::new(opts.seed.unwrap_or(DEFAULT_SEED));
    let policy = match opts.salt {
        Some(s) => SaltPolicy::Forced(s),
        None => SaltPolicy::Infer,
    };
    let candidates: Vec<IndexWidth> = match opts.width {
        Some(w) => vec![w],
        None => IndexWidth::ASCENDING.to_vec(),
    };

    let mut start = 0;
    let mut last_err = BuildError::EmptyKeySet;
    while start < candidates.len() {
        let (width, salt) = match choose_width_and_salt(raws, &candidates[start..], policy, &mut rng)
        {
            Ok(ws) => ws,
            Err(BuildError::DuplicateKey { first, second }) => {
                // Keys are already byte-distinct here, so equal raw hashes
                // mean the digests themselves collide.
                return Err(BuildError::RawHashCollision { first, second });
            }
            Err(BuildError::RawHashCollision { first, second }) if opts.width.is_some() => {
                return Err(BuildError::WidthCollision {
                    width: opts.width.unwrap(),
                    first,
                    second,
                });
            }
            Err(e) => return Err(e),
        };
        let chosen_pos = candidates.iter().position(|&w| w == width).unwrap();
        let cfg = match TableConfig::new(n, delta, tau, width, salt) {
            Ok(c) => c,
            Err(
                e @ BuildError::Param(crate::error::ParamError::PrimaryTableExceedsWidth { .. }),
            ) => {
                last_err = e;
                start = chosen_pos + 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        match try_build(cfg, &mut rng) {
            Ok(r) => return Ok(r),
            Err(
                e @ (BuildError::SeedSearchExhausted { .. } | BuildError::TableOverflow { .. }),
            ) => {
                last_err = e;
                start = chosen_pos + 1;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

macro_rules! factory_fn {
    ($(#[$doc:meta])* $name:ident, $any:ident, $typed:ident) => {
        $(#[$doc])*
        pub fn $name<K: AsRef<[u8]> + Clone, V: Clone>(
            kv: &KeyValueSet<K, V>,
            opts: &BuildOptions,
        ) -> Result<$any<K, V>, BuildError> {
            let raws = kv.raw_hashes();
            drive_factory(&raws, kv.len(), opts, |cfg, rng| {
                dispatch_width!(cfg.width, W, {
                    let params = build_perfect_hash::<K, V, W>(kv, cfg, rng)?;
                    Ok($any::from($typed::assemble(params, kv)?))
                })
            })
        }
    };
}

factory_fn!(
    /// Build the keyless, non-iterable building block: values live directly
    /// in the secondary table.
    make_dangerous_map,
    AnyDangerousMap,
    DangerousMap
);
factory_fn!(
    /// Build the iterable small-values variant (values stored twice: once
    /// in the table, once in insertion order).
    make_small_values_map,
    AnySmallValuesMap,
    SmallValuesMap
);
factory_fn!(
    /// Build the general map: the table stores indices into an
    /// insertion-order value array, with an invalid-index sentinel for
    /// empty slots.
    make_indexed_map,
    AnyIndexedMap,
    IndexedMap
);
factory_fn!(
    /// Build the mutable-values variant: immutable key-to-index mapping
    /// over an updatable value array.
    make_mutable_values_map,
    AnyMutableValuesMap,
    MutableValuesMap
);

//! The general map: table slots hold indices into insertion-order arrays.

use alloc::vec::Vec;
use core::borrow::Borrow;
use core::hint::black_box;

use super::{any_map_enum, with_inner, CacheWeight, DangerousMap, LookupStats, SlotInfo};
use crate::build::{KeyValueSet, PerfectHashParams};
use crate::error::{BuildError, KeyNotFound};
use crate::hash::IndexWord;

/// Iterable perfect-hash map storing each value once.
///
/// The inner table maps keys to positions in the insertion-order
/// `keys`/`values` arrays; the all-ones index marks slots no key occupies.
/// `at()` checks the sentinel *and* compares the stored key, so it gives
/// exact membership at the cost of a single key comparison.
#[derive(Clone, Debug)]
pub struct IndexedMap<K, V, W: IndexWord> {
    inner: DangerousMap<K, W, W>,
    keys: Vec<K>,
    values: Vec<V>,
}

impl<K: AsRef<[u8]> + Clone, V: Clone, W: IndexWord> IndexedMap<K, V, W> {
    pub fn assemble(
        params: PerfectHashParams<W>,
        kv: &KeyValueSet<K, V>,
    ) -> Result<IndexedMap<K, V, W>, BuildError> {
        let n = kv.len();
        // W::MAX is the empty-slot sentinel, so indices must stay below it.
        if n as u64 > W::MAX.widen_u64() {
            return Err(BuildError::TableOverflow { width: W::WIDTH, total_slots: n as u64 });
        }
        let indices: Vec<W> = (0..n).map(W::from_usize).collect();
        let inner = DangerousMap::assemble_with_fill(&params, indices, W::MAX)?;
        let keys = kv.pairs().iter().map(|(k, _)| k.clone()).collect();
        let values = kv.pairs().iter().map(|(_, v)| v.clone()).collect();
        Ok(IndexedMap { inner, keys, values })
    }
}

impl<K: AsRef<[u8]>, V, W: IndexWord> IndexedMap<K, V, W> {
    pub fn from_parts(
        inner: DangerousMap<K, W, W>,
        keys: Vec<K>,
        values: Vec<V>,
    ) -> Option<IndexedMap<K, V, W>> {
        if keys.len() != values.len() || keys.len() != inner.len() {
            return None;
        }
        if keys.len() as u64 > W::MAX.widen_u64() {
            return None;
        }
        Some(IndexedMap { inner, keys, values })
    }

    /// Exact-membership position lookup: sentinel check plus one key
    /// comparison.
    pub fn position<Q>(&self, key: &Q) -> Result<usize, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        let idx = *self.inner.at(key)?;
        if idx == W::MAX {
            return Err(KeyNotFound);
        }
        let idx = idx.to_usize();
        if self.keys[idx].borrow() == key {
            Ok(idx)
        } else {
            Err(KeyNotFound)
        }
    }

    /// Checked lookup with exact membership: errors on empty buckets, on
    /// the empty-slot sentinel, and on colliding invalid keys.
    pub fn at<Q>(&self, key: &Q) -> Result<&V, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        self.position(key).map(|i| &self.values[i])
    }

    /// Unchecked (`[]`) lookup: no sentinel or membership check, only a
    /// lightweight bounds guard so an invalid key can never read out of
    /// range (it returns an unspecified value instead).
    #[inline]
    pub fn get_unchecked<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> &V {
        let idx = self.inner.get_unchecked(key).to_usize();
        let idx = if idx < self.values.len() { idx } else { 0 };
        &self.values[idx]
    }

    pub fn lookup_slot<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> SlotInfo {
        self.inner.lookup_slot(key)
    }

    /// Instrumented `at()`-path lookup, counting hash evaluations and key
    /// comparisons as they happen.
    pub fn lookup_stats<Q>(&self, key: &Q) -> (Result<&V, KeyNotFound>, LookupStats)
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        let (res, mut stats) = self.inner.lookup_stats(key);
        let out = match res {
            Err(e) => Err(e),
            Ok(&idx) => {
                if idx == W::MAX {
                    Err(KeyNotFound)
                } else {
                    let i = idx.to_usize();
                    stats.key_comparisons += 1;
                    if self.keys[i].borrow() == key {
                        Ok(&self.values[i])
                    } else {
                        Err(KeyNotFound)
                    }
                }
            }
        };
        (out, stats)
    }

    /// Pairs in their original construction order.
    pub fn iter(&self) -> impl Iterator<Item = (&K, &V)> {
        self.keys.iter().zip(self.values.iter())
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [V] {
        &mut self.values
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Touch every key's lookup path and fold the values into an
    /// optimizer-opaque running total, so the table memory is warm before
    /// latency-sensitive use.
    pub fn cache(&self) -> f64
    where
        V: CacheWeight,
    {
        let mut total = 0.0f64;
        for key in &self.keys {
            let v = self.get_unchecked(key);
            total = black_box(total + v.cache_weight());
        }
        total
    }

    /// The encapsulated key-to-index table (serialization needs its raw
    /// parts).
    pub fn index_table(&self) -> &DangerousMap<K, W, W> {
        &self.inner
    }
}

any_map_enum!(
    /// [`IndexedMap`] with the index width chosen at run time.
    AnyIndexedMap,
    IndexedMap
);

impl<K: AsRef<[u8]>, V> AnyIndexedMap<K, V> {
    pub fn at<Q>(&self, key: &Q) -> Result<&V, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        with_inner!(self, m, m.at(key))
    }

    pub fn get_unchecked<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> &V {
        with_inner!(self, m, m.get_unchecked(key))
    }

    pub fn position<Q>(&self, key: &Q) -> Result<usize, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        with_inner!(self, m, m.position(key))
    }

    pub fn lookup_slot<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> SlotInfo {
        with_inner!(self, m, m.lookup_slot(key))
    }

    pub fn lookup_stats<Q>(&self, key: &Q) -> (Result<&V, KeyNotFound>, LookupStats)
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        with_inner!(self, m, m.lookup_stats(key))
    }

    pub fn iter(&self) -> alloc::boxed::Box<dyn Iterator<Item = (&K, &V)> + '_> {
        with_inner!(self, m, alloc::boxed::Box::new(m.iter()))
    }

    pub fn keys(&self) -> &[K] {
        with_inner!(self, m, m.keys())
    }

    pub fn values(&self) -> &[V] {
        with_inner!(self, m, m.values())
    }

    pub fn len(&self) -> usize {
        with_inner!(self, m, m.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cache(&self) -> f64
    where
        V: CacheWeight,
    {
        with_inner!(self, m, m.cache())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build::{make_indexed_map, BuildOptions};

    fn sample() -> AnyIndexedMap<&'static str, i64> {
        let kv = KeyValueSet::new(vec![
            ("mercury", 1i64),
            ("venus", 2),
            ("earth", 3),
            ("mars", 4),
            ("jupiter", 5),
            ("saturn", 6),
        ])
        .unwrap();
        make_indexed_map(&kv, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn at_is_exact_membership() {
        let map = sample();
        assert_eq!(map.at("earth"), Ok(&3));
        assert_eq!(map.at("pluto"), Err(KeyNotFound));
        assert_eq!(map.at(""), Err(KeyNotFound));
    }

    #[test]
    fn iteration_preserves_insertion_order() {
        let map = sample();
        let keys: Vec<&str> = map.iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, ["mercury", "venus", "earth", "mars", "jupiter", "saturn"]);
        assert_eq!(map.iter().count(), map.len());
    }

    #[test]
    fn at_most_one_comparison_and_two_hash_evals() {
        let map = sample();
        for key in map.keys().to_vec() {
            let (res, stats) = map.lookup_stats(key);
            assert!(res.is_ok());
            assert!(stats.key_comparisons <= 1);
            assert!((1..=2).contains(&stats.hash_evals));
        }
    }

    #[test]
    fn cache_total_is_value_sum_for_numeric_values() {
        let kv = KeyValueSet::new(vec![("a", 1.0f64), ("b", 2.0)]).unwrap();
        let map = make_indexed_map(&kv, &BuildOptions::default()).unwrap();
        assert_eq!(map.cache(), 3.0);
        assert_eq!(map.cache(), map.cache());
    }
}

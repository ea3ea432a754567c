//! Mutable-values variant: fixed key-to-index mapping, updatable values.

use core::borrow::Borrow;
use core::mem;

use super::{any_map_enum, with_inner, CacheWeight, IndexedMap, LookupStats, SlotInfo};
use crate::build::{KeyValueSet, PerfectHashParams};
use crate::error::{BuildError, KeyNotFound};
use crate::hash::IndexWord;

/// An [`IndexedMap`] whose value array accepts writes after construction.
///
/// The key-to-index mapping never changes; only value cells do. Concurrent
/// readers are safe exactly as long as no writer is active — writers need
/// external serialization.
#[derive(Clone, Debug)]
pub struct MutableValuesMap<K, V, W: IndexWord> {
    index: IndexedMap<K, V, W>,
}

impl<K: AsRef<[u8]> + Clone, V: Clone, W: IndexWord> MutableValuesMap<K, V, W> {
    pub fn assemble(
        params: PerfectHashParams<W>,
        kv: &KeyValueSet<K, V>,
    ) -> Result<MutableValuesMap<K, V, W>, BuildError> {
        Ok(MutableValuesMap { index: IndexedMap::assemble(params, kv)? })
    }
}

impl<K: AsRef<[u8]>, V, W: IndexWord> MutableValuesMap<K, V, W> {
    pub fn from_indexed(index: IndexedMap<K, V, W>) -> MutableValuesMap<K, V, W> {
        MutableValuesMap { index }
    }

    pub fn at<Q>(&self, key: &Q) -> Result<&V, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        self.index.at(key)
    }

    pub fn get_unchecked<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> &V {
        self.index.get_unchecked(key)
    }

    /// Replace the key's value, returning the previous one. The key must
    /// be in the construction set; the key-to-slot mapping is untouched.
    pub fn set_value<Q>(&mut self, key: &Q, value: V) -> Result<V, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        let i = self.index.position(key)?;
        Ok(mem::replace(&mut self.index.values_mut()[i], value))
    }

    pub fn lookup_slot<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> SlotInfo {
        self.index.lookup_slot(key)
    }

    pub fn lookup_stats<Q>(&self, key: &Q) -> (Result<&V, KeyNotFound>, LookupStats)
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        self.index.lookup_stats(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &V)> {
        self.index.iter()
    }

    pub fn keys(&self) -> &[K] {
        self.index.keys()
    }

    pub fn values(&self) -> &[V] {
        self.index.values()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cache(&self) -> f64
    where
        V: CacheWeight,
    {
        self.index.cache()
    }
}

any_map_enum!(
    /// [`MutableValuesMap`] with the index width chosen at run time.
    AnyMutableValuesMap,
    MutableValuesMap
);

impl<K: AsRef<[u8]>, V> AnyMutableValuesMap<K, V> {
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

    pub fn set_value<Q>(&mut self, key: &Q, value: V) -> Result<V, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: AsRef<[u8]> + Eq + ?Sized,
    {
        with_inner!(self, m, m.set_value(key, value))
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

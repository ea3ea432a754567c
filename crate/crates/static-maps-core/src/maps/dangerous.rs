//! The keyless building block: perfect hash straight to values.

use alloc::vec::Vec;
use core::marker::PhantomData;

use super::{any_map_enum, with_inner, LookupStats, SlotInfo};
use crate::build::{KeyValueSet, PerfectHashParams};
use crate::error::{BuildError, KeyNotFound};
use crate::hash::{apply_salt, raw_hash, IndexWord, Salt};
use crate::ragged::RaggedArray;

/// Perfect-hash map that stores no keys: values live directly in the
/// secondary table.
///
/// `[]`-style access ([`get_unchecked`]) with a key outside the
/// construction set returns *some* value from the table rather than an
/// error; [`at`] only guards against empty buckets, so an invalid key may
/// still silently collide with a valid one. Not iterable. The other hash
/// variants wrap this type.
///
/// [`get_unchecked`]: DangerousMap::get_unchecked
/// [`at`]: DangerousMap::at
#[derive(Clone, Debug)]
pub struct DangerousMap<K, V, W: IndexWord> {
    salt: Salt,
    k_primary: W,
    primary_mask: W,
    ks_secondary: Vec<W>,
    table: RaggedArray<V, W>,
    n: usize,
    _key: PhantomData<fn(K) -> K>,
}

impl<K: AsRef<[u8]>, V, W: IndexWord> DangerousMap<K, V, W> {
    /// Place `values` (one per key, in key order) into the slots the
    /// params assign; every remaining slot holds `fill`.
    pub fn assemble_with_fill(
        params: &PerfectHashParams<W>,
        values: Vec<V>,
        fill: V,
    ) -> Result<DangerousMap<K, V, W>, BuildError>
    where
        V: Clone,
    {
        debug_assert_eq!(values.len(), params.slots.len());
        let mut table: RaggedArray<V, W> = RaggedArray::build(&params.row_sizes(), fill)?;
        for (slot, value) in params.slots.iter().zip(values) {
            *table.at_mut(slot.row as usize, slot.col as usize).expect("slot in range") = value;
        }
        Ok(DangerousMap {
            salt: params.config.salt,
            k_primary: params.k_primary,
            primary_mask: W::truncate_u64(params.config.primary_mask()),
            ks_secondary: params.ks_secondary.clone(),
            table,
            n: params.config.n,
            _key: PhantomData,
        })
    }

    /// Standard assembly from a keyset: unused slots repeat the first
    /// value (an invalid lookup then yields "some value from the table").
    pub fn assemble(
        params: PerfectHashParams<W>,
        kv: &KeyValueSet<K, V>,
    ) -> Result<DangerousMap<K, V, W>, BuildError>
    where
        V: Clone,
    {
        let values: Vec<V> = kv.pairs().iter().map(|(_, v)| v.clone()).collect();
        let fill = values.first().ok_or(BuildError::EmptyKeySet)?.clone();
        Self::assemble_with_fill(&params, values, fill)
    }

    /// Rebuild from serialized parts. Validates structural invariants
    /// only; callers wanting semantic validation should replay lookups.
    pub fn from_parts(
        salt: Salt,
        k_primary: W,
        ks_secondary: Vec<W>,
        table: RaggedArray<V, W>,
        n: usize,
    ) -> Option<DangerousMap<K, V, W>> {
        let rows = table.rows();
        if rows == 0 || !rows.is_power_of_two() || ks_secondary.len() != rows {
            return None;
        }
        if n == 0 || n > table.total_slots() {
            return None;
        }
        Some(DangerousMap {
            salt,
            k_primary,
            primary_mask: W::from_usize(rows - 1),
            ks_secondary,
            table,
            n,
            _key: PhantomData,
        })
    }

    /// Two-level slot computation; the returned eval counter is 1 when the
    /// singleton shortcut skipped the secondary hash, 2 otherwise.
    #[inline]
    fn locate(&self, key: &[u8]) -> (SlotInfo, u32) {
        let h = W::truncate_u64(apply_salt(raw_hash(key), self.salt).0);
        let row = W::universal_hash(self.k_primary, h, self.primary_mask).to_usize();
        let offsets = self.table.offsets();
        let start = offsets[row].to_usize();
        let row_size = offsets[row + 1].to_usize() - start;
        if row_size <= 1 {
            (SlotInfo { row, col: 0, row_size }, 1)
        } else {
            // Power-of-two row, so the in-row modulo is also a mask.
            let col =
                W::universal_hash(self.ks_secondary[row], h, W::from_usize(row_size - 1));
            (SlotInfo { row, col: col.to_usize(), row_size }, 2)
        }
    }

    /// Row and column a key hashes to, plus the row's allocated size.
    #[inline]
    pub fn lookup_slot<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> SlotInfo {
        self.locate(key.as_ref()).0
    }

    /// Instrumented lookup: the same path as [`at`](Self::at), counting
    /// hash evaluations as they run. This variant never compares keys.
    pub fn lookup_stats<Q: AsRef<[u8]> + ?Sized>(
        &self,
        key: &Q,
    ) -> (Result<&V, KeyNotFound>, LookupStats) {
        let (slot, hash_evals) = self.locate(key.as_ref());
        let stats = LookupStats { hash_evals, key_comparisons: 0 };
        if slot.row_size == 0 {
            (Err(KeyNotFound), stats)
        } else {
            (Ok(&self.table.storage()[self.flat(slot)]), stats)
        }
    }

    #[inline]
    fn flat(&self, slot: SlotInfo) -> usize {
        self.table.offsets()[slot.row].to_usize() + slot.col
    }

    /// Checked lookup: errors only when the key's primary bucket is empty.
    /// An invalid key may still collide with a valid one and silently
    /// return that value.
    #[inline]
    pub fn at<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> Result<&V, KeyNotFound> {
        let (slot, _) = self.locate(key.as_ref());
        if slot.row_size == 0 {
            return Err(KeyNotFound);
        }
        Ok(&self.table.storage()[self.flat(slot)])
    }

    /// Unchecked (`[]`) lookup. For keys in the construction set this is
    /// the associated value; for anything else it is an unspecified value
    /// from the table, never an out-of-bounds read. (An invalid key can
    /// land on an empty trailing row whose start offset equals the storage
    /// length; the clamp keeps that read in bounds at no cost to valid
    /// keys.)
    #[inline]
    pub fn get_unchecked<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> &V {
        let h = W::truncate_u64(apply_salt(raw_hash(key.as_ref()), self.salt).0);
        let row = W::universal_hash(self.k_primary, h, self.primary_mask).to_usize();
        let offsets = self.table.offsets();
        let start = offsets[row].to_usize();
        let row_size = offsets[row + 1].to_usize() - start;
        let flat = if row_size <= 1 {
            start
        } else {
            start
                + W::universal_hash(self.ks_secondary[row], h, W::from_usize(row_size - 1))
                    .to_usize()
        };
        let storage = self.table.storage();
        let idx = if flat < storage.len() { flat } else { 0 };
        &storage[idx]
    }

    /// Number of keys the map was built over.
    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty keysets
    }

    pub fn salt(&self) -> Salt {
        self.salt
    }

    pub fn k_primary(&self) -> W {
        self.k_primary
    }

    pub fn r_primary(&self) -> u64 {
        self.primary_mask.widen_u64() + 1
    }

    pub fn ks_secondary(&self) -> &[W] {
        &self.ks_secondary
    }

    pub fn table(&self) -> &RaggedArray<V, W> {
        &self.table
    }
}

any_map_enum!(
    /// [`DangerousMap`] with the index width chosen at run time.
    AnyDangerousMap,
    DangerousMap
);

impl<K: AsRef<[u8]>, V> AnyDangerousMap<K, V> {
    pub fn at<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> Result<&V, KeyNotFound> {
        with_inner!(self, m, m.at(key))
    }

    pub fn get_unchecked<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> &V {
        with_inner!(self, m, m.get_unchecked(key))
    }

    pub fn lookup_slot<Q: AsRef<[u8]> + ?Sized>(&self, key: &Q) -> SlotInfo {
        with_inner!(self, m, m.lookup_slot(key))
    }

    pub fn lookup_stats<Q: AsRef<[u8]> + ?Sized>(
        &self,
        key: &Q,
    ) -> (Result<&V, KeyNotFound>, LookupStats) {
        with_inner!(self, m, m.lookup_stats(key))
    }

    pub fn len(&self) -> usize {
        with_inner!(self, m, m.len())
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[cfg(test)]
mod tests {
    use crate::build::{make_dangerous_map, BuildOptions};
    use crate::build::KeyValueSet;

    #[test]
    fn values_come_back_for_every_key() {
        let kv = KeyValueSet::new(vec![
            ("one", 1.0f64),
            ("two", 2.0),
            ("three", 3.0),
            ("four", 4.0),
        ])
        .unwrap();
        let map = make_dangerous_map(&kv, &BuildOptions::default()).unwrap();
        for (k, v) in kv.pairs() {
            assert_eq!(map.at(k).unwrap(), v);
            assert_eq!(map.get_unchecked(k), v);
        }
    }

    #[test]
    fn unchecked_lookup_of_unknown_key_yields_some_table_value() {
        let kv = KeyValueSet::new(vec![("a", 10u32), ("b", 20), ("c", 30)]).unwrap();
        let map = make_dangerous_map(&kv, &BuildOptions::default()).unwrap();
        // No trap, and whatever comes back is one of the table's values
        // (placed or fill, which repeats the first value).
        let v = *map.get_unchecked("zebra");
        assert!([10u32, 20, 30].contains(&v));
    }

    #[test]
    fn lookup_never_compares_keys() {
        let kv = KeyValueSet::new(vec![("x", 1u8), ("y", 2), ("z", 3)]).unwrap();
        let map = make_dangerous_map(&kv, &BuildOptions::default()).unwrap();
        for (k, _) in kv.pairs() {
            let (res, stats) = map.lookup_stats(k);
            assert!(res.is_ok());
            assert_eq!(stats.key_comparisons, 0);
            assert!(stats.hash_evals <= 2);
        }
    }
}

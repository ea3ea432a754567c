//! Sorted-array ordered map with binary-search lookup.

use alloc::vec::Vec;
use core::borrow::Borrow;
use core::hint::black_box;

use super::CacheWeight;
use crate::build::KeyValueSet;
use crate::error::{BuildError, KeyNotFound};

/// Key-value pairs sorted by key; lookup is a lower-bound binary search
/// plus one equality check. Unlike the hash variants, an empty map is
/// allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedMap<K, V> {
    pairs: Vec<(K, V)>,
}

impl<K: Ord, V> OrderedMap<K, V> {
    /// Sort the keyset's pairs. Keys must be strictly increasing after the
    /// sort; equal keys are a `DuplicateKey` error.
    pub fn build(kv: KeyValueSet<K, V>) -> Result<OrderedMap<K, V>, BuildError>
    where
        K: AsRef<[u8]>,
    {
        let mut decorated: Vec<(usize, (K, V))> = kv.into_pairs().into_iter().enumerate().collect();
        decorated.sort_by(|a, b| a.1 .0.cmp(&b.1 .0));
        for w in decorated.windows(2) {
            if w[0].1 .0 == w[1].1 .0 {
                let (a, b) = (w[0].0.min(w[1].0), w[0].0.max(w[1].0));
                return Err(BuildError::DuplicateKey { first: a, second: b });
            }
        }
        Ok(OrderedMap { pairs: decorated.into_iter().map(|(_, p)| p).collect() })
    }

    /// Lower-bound position of `key` among the sorted keys, `None` if the
    /// key is absent.
    pub fn position<Q>(&self, key: &Q) -> Option<usize>
    where
        K: Borrow<Q>,
        Q: Ord + ?Sized,
    {
        let at = self.pairs.partition_point(|(k, _)| k.borrow() < key);
        if at < self.pairs.len() && self.pairs[at].0.borrow() == key {
            Some(at)
        } else {
            None
        }
    }

    pub fn at<Q>(&self, key: &Q) -> Result<&V, KeyNotFound>
    where
        K: Borrow<Q>,
        Q: Ord + ?Sized,
    {
        self.get(key).ok_or(KeyNotFound)
    }

    pub fn get<Q>(&self, key: &Q) -> Option<&V>
    where
        K: Borrow<Q>,
        Q: Ord + ?Sized,
    {
        self.position(key).map(|i| &self.pairs[i].1)
    }

    /// Value cell at a known position (for harnesses that update values
    /// while keeping the sorted keys fixed).
    pub fn value_at(&self, position: usize) -> Option<&V> {
        self.pairs.get(position).map(|(_, v)| v)
    }

    /// Pairs in sorted key order.
    pub fn iter(&self) -> impl Iterator<Item = (&K, &V)> {
        self.pairs.iter().map(|(k, v)| (k, v))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// One binary-search lookup per key, values folded into an
    /// optimizer-opaque total.
    pub fn cache(&self) -> f64
    where
        V: CacheWeight,
    {
        let mut total = 0.0f64;
        for (k, _) in &self.pairs {
            let v = self.get(k).expect("own key present");
            total = black_box(total + v.cache_weight());
        }
        total
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_of(pairs: Vec<(&'static str, i32)>) -> OrderedMap<&'static str, i32> {
        OrderedMap::build(KeyValueSet::new(pairs).unwrap()).unwrap()
    }

    #[test]
    fn sorts_pairs_by_key() {
        let m = map_of(vec![("c", 3), ("a", 1), ("b", 2)]);
        let keys: Vec<&str> = m.iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, ["a", "b", "c"]);

        let already = map_of(vec![("a", 1), ("b", 2), ("c", 3)]);
        let keys: Vec<&str> = already.iter().map(|(k, _)| *k).collect();
        assert_eq!(keys, ["a", "b", "c"]);
    }

    #[test]
    fn lookup_hits_and_misses() {
        let m = map_of(vec![("b", 2), ("d", 4), ("f", 6)]);
        assert_eq!(m.at("d"), Ok(&4));
        // Absent between two keys and past the end.
        assert_eq!(m.at("c"), Err(KeyNotFound));
        assert_eq!(m.at("z"), Err(KeyNotFound));
        assert_eq!(m.at(""), Err(KeyNotFound));
    }

    #[test]
    fn empty_map_is_allowed() {
        let m: OrderedMap<&str, i32> =
            OrderedMap::build(KeyValueSet::new(vec![]).unwrap()).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.iter().count(), 0);
        assert_eq!(m.at("anything"), Err(KeyNotFound));
    }

    #[test]
    fn agrees_with_linear_scan_oracle() {
        let mut lcg = 3u64;
        let mut next = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            lcg
        };
        let pairs: Vec<(String, u64)> = (0..200)
            .map(|_| {
                let k = next();
                (format!("k{k:016x}"), k)
            })
            .collect();
        let m = OrderedMap::build(KeyValueSet::new(pairs.clone()).unwrap()).unwrap();
        for (k, v) in &pairs {
            let oracle = pairs.iter().find(|(pk, _)| pk == k).map(|(_, pv)| pv);
            assert_eq!(m.get(k.as_str()), oracle);
            assert_eq!(*m.at(k.as_str()).unwrap(), *v);
        }
        for _ in 0..1000 {
            let probe = format!("absent{:x}", next());
            assert!(m.get(probe.as_str()).is_none());
        }
    }
}

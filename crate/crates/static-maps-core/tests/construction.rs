//! Construction-level properties: the Markov acceptance bound, the
//! quadratic space bound, determinism, and equivalence with a brute-force
//! oracle on small instances.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use static_maps_core::{
    build_perfect_hash, collision_threshold, expected_trials, find_primary_seed,
    make_indexed_map, make_mutable_values_map, make_small_values_map, row_size_for_bucket,
    secondary_total_size_bound, BuildError, BuildOptions, IndexWidth, KeyValueSet, Salt,
    TableConfig, Xorshift64,
};

fn distinct_hashes(rng: &mut ChaCha8Rng, n: usize) -> Vec<u32> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let h: u32 = rng.gen();
        if seen.insert(h) {
            out.push(h);
        }
    }
    out
}

/// Over many random keysets (n=256, tau=2, delta=1), the first drawn seed
/// must meet the collision bound at least 45% of the time (theory says
/// >= 50%; slack for sampling noise), and the mean number of trials must
/// stay within 1.5x the geometric expectation.
#[test]
fn markov_bound_holds_empirically() {
    let (n, delta, tau) = (256usize, 1.0, 2.0);
    let runs = 1000;
    let mut keyset_rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut seed_rng = Xorshift64::new(0xabcdef);
    let threshold = collision_threshold(n, delta, tau).unwrap();
    let bound = secondary_total_size_bound(n, delta, tau).unwrap();

    let mut first_try_accepts = 0u32;
    let mut total_trials = 0u64;
    for _ in 0..runs {
        let hashes = distinct_hashes(&mut keyset_rng, n);
        let cfg = TableConfig::new(n, delta, tau, IndexWidth::W32, Salt::DISABLED).unwrap();
        let search = find_primary_seed::<u32>(&hashes, &cfg, &mut seed_rng).unwrap();
        assert!((search.buckets.count_collisions() as f64) < threshold);
        if search.trials == 1 {
            first_try_accepts += 1;
        }
        total_trials += search.trials;

        // Space bound: quadratic total before rounding, 2x after.
        let sum_sq: u64 = search.buckets.0.iter().map(|&s| (s * s) as u64).sum();
        assert!(sum_sq <= bound, "sum n_j^2 = {sum_sq} > bound {bound}");
        let rounded: u64 = search.buckets.0.iter().map(|&s| row_size_for_bucket(s)).sum();
        assert!(rounded <= 2 * bound, "rounded total {rounded} > 2x bound {bound}");
    }

    let accept_rate = first_try_accepts as f64 / runs as f64;
    assert!(accept_rate >= 0.45, "single-trial acceptance {accept_rate} below 0.45");
    let mean_trials = total_trials as f64 / runs as f64;
    let limit = 1.5 * expected_trials(tau).unwrap();
    assert!(mean_trials <= limit, "mean trials {mean_trials} above {limit}");
}

fn random_small_keyset(rng: &mut ChaCha8Rng, max_n: usize) -> Vec<(String, i64)> {
    let n = rng.gen_range(1..=max_n);
    let mut keys = HashSet::new();
    let mut pairs = Vec::new();
    while pairs.len() < n {
        let len = rng.gen_range(1..10);
        let key: String = (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        if keys.insert(key.clone()) {
            pairs.push((key, rng.gen::<i64>()));
        }
    }
    pairs
}

/// 500 random keysets with n <= 16: all-key lookups across variants match
/// a linear-scan oracle, and absent probes never return a wrong "hit" from
/// the exact-membership map.
#[test]
fn small_instances_match_linear_scan_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..500 {
        let pairs = random_small_keyset(&mut rng, 16);
        let kv = KeyValueSet::new(pairs.clone()).unwrap();
        let opts = BuildOptions { seed: Some(round), ..Default::default() };
        let indexed = make_indexed_map(&kv, &opts).unwrap();
        let small = make_small_values_map(&kv, &opts).unwrap();

        let oracle = |key: &str| pairs.iter().find(|(k, _)| k == key).map(|(_, v)| *v);
        for (k, v) in &pairs {
            assert_eq!(oracle(k), Some(*v));
            assert_eq!(indexed.at(k.as_str()), Ok(v));
            assert_eq!(indexed.get_unchecked(k.as_str()), v);
            assert_eq!(small.at(k.as_str()), Ok(v));
            assert_eq!(small.get_unchecked(k.as_str()), v);
        }
        // Exact membership on the indexed map agrees with the oracle for
        // absent keys too.
        for _ in 0..20 {
            let probe: String =
                (0..rng.gen_range(1..12)).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
            assert_eq!(indexed.at(probe.as_str()).ok().copied(), oracle(&probe));
        }
    }
}

#[test]
fn factory_is_deterministic_per_seed() {
    let pairs: Vec<(String, u32)> = (0..120).map(|i| (format!("key{i:03}"), i)).collect();
    let kv = KeyValueSet::new(pairs.clone()).unwrap();
    let opts = BuildOptions { seed: Some(7), ..Default::default() };
    let a = make_indexed_map(&kv, &opts).unwrap();
    let b = make_indexed_map(&kv, &opts).unwrap();
    assert_eq!(a.width(), b.width());
    for (k, _) in &pairs {
        assert_eq!(a.lookup_slot(k.as_str()), b.lookup_slot(k.as_str()));
    }
    // A different seed still builds a correct (if differently seeded) map.
    let c = make_indexed_map(&kv, &BuildOptions { seed: Some(8), ..Default::default() }).unwrap();
    for (k, v) in &pairs {
        assert_eq!(c.at(k.as_str()), Ok(v));
    }
}

#[test]
fn width_override_64_always_fits_distinct_raw_hashes() {
    let pairs: Vec<(String, u8)> = (0..50).map(|i| (format!("{i}"), i as u8)).collect();
    let kv = KeyValueSet::new(pairs).unwrap();
    let opts = BuildOptions { width: Some(IndexWidth::W64), ..Default::default() };
    let map = make_indexed_map(&kv, &opts).unwrap();
    assert_eq!(map.width(), IndexWidth::W64);
    assert_eq!(map.at("17"), Ok(&17u8));
}

#[test]
fn forced_width_collision_is_an_explicit_error() {
    // More keys than 8-bit truncations can distinguish: collision by
    // pigeonhole.
    let pairs: Vec<(String, u8)> = (0..300).map(|i| (format!("entry-{i}"), i as u8)).collect();
    let kv = KeyValueSet::new(pairs).unwrap();
    let opts = BuildOptions { width: Some(IndexWidth::W8), ..Default::default() };
    match make_indexed_map(&kv, &opts) {
        Err(BuildError::WidthCollision { width, .. }) => assert_eq!(width, IndexWidth::W8),
        other => panic!("expected WidthCollision, got {other:?}"),
    }
}

#[test]
fn forced_salt_is_respected() {
    let pairs = vec![("aa", 1), ("bb", 2), ("cc", 3)];
    let kv = KeyValueSet::new(pairs).unwrap();
    let opts = BuildOptions { salt: Some(Salt::new(0x1234)), ..Default::default() };
    let map = make_small_values_map(&kv, &opts).unwrap();
    assert_eq!(map.at("bb"), Ok(&2));
    match &map {
        static_maps_core::AnySmallValuesMap::W8(m) => {
            assert!(m.inner().salt().is_enabled());
            assert_eq!(m.inner().salt().value(), 0x1234);
        }
        _ => {} // wider widths keep the salt too; spot-check only W8
    }
}

/// The shadow-oracle mutation workload from the stocks demo, scaled down.
#[test]
fn mutable_map_matches_shadow_oracle_over_random_updates() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pairs: Vec<(String, f64)> =
        (0..200).map(|i| (format!("TKR{i:03}"), i as f64)).collect();
    let kv = KeyValueSet::new(pairs.clone()).unwrap();
    let mut map = make_mutable_values_map(&kv, &BuildOptions::default()).unwrap();
    let mut shadow: HashMap<String, f64> = pairs.iter().cloned().collect();

    let slots_before: Vec<_> = pairs.iter().map(|(k, _)| map.lookup_slot(k.as_str())).collect();
    for _ in 0..50_000 {
        let which = rng.gen_range(0..pairs.len());
        let price: f64 = rng.gen_range(1.0..1000.0);
        let key = &pairs[which].0;
        map.set_value(key.as_str(), price).unwrap();
        shadow.insert(key.clone(), price);
    }
    for (k, v) in &shadow {
        assert_eq!(map.at(k.as_str()), Ok(v));
    }
    let slots_after: Vec<_> = pairs.iter().map(|(k, _)| map.lookup_slot(k.as_str())).collect();
    assert_eq!(slots_before, slots_after);
}

/// Single-key build exercises the degenerate path end to end.
#[test]
fn single_key_build_via_factory() {
    let kv = KeyValueSet::new(vec![("only", 1.5f64)]).unwrap();
    let map = make_indexed_map(&kv, &BuildOptions::default()).unwrap();
    assert_eq!(map.len(), 1);
    assert_eq!(map.at("only"), Ok(&1.5));
    assert_eq!(map.lookup_slot("only").row_size, 1);
}

/// The spec-shaped pipeline entry (explicit config) also stays injective.
#[test]
fn explicit_config_build_is_injective() {
    let pairs: Vec<(String, usize)> = (0..300).map(|i| (format!("w{i}"), i)).collect();
    let kv = KeyValueSet::new(pairs).unwrap();
    let cfg = TableConfig::new(300, 1.5, 1.2, IndexWidth::W32, Salt::DISABLED).unwrap();
    let mut rng = Xorshift64::new(1);
    let params = build_perfect_hash::<_, _, u32>(&kv, cfg, &mut rng).unwrap();
    let mut seen = HashSet::new();
    for slot in &params.slots {
        assert!(seen.insert((slot.row, slot.col)));
    }
}

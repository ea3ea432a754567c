//! Benchmark harness for the three demos: element mass lookup, codon
//! translation, and stock price updates, each against the standard
//! library's hash and ordered maps.
//!
//! Workloads are generated from a seed, identically for every
//! implementation, and each row carries a checksum accumulated inside the
//! measured loop; mismatched checksums across implementations of the same
//! demo abort the run, since timings of wrong answers are worthless.
//! Timing wraps batches of operations (default 10^4) around a monotonic
//! clock, excluding workload generation and warmup; the reported figures
//! are per-operation medians and p99s over batches.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::hint::black_box;
use std::time::Instant;

use static_maps_core::{
    make_mutable_values_map, make_small_values_map, BuildOptions, KeyValueSet, OrderedMap,
    Xorshift64,
};

use crate::datasets;
use crate::CliError;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Demo {
    Elements,
    Codons,
    Stocks,
}

impl Demo {
    pub const ALL: [Demo; 3] = [Demo::Elements, Demo::Codons, Demo::Stocks];

    pub fn name(self) -> &'static str {
        match self {
            Demo::Elements => "elements",
            Demo::Codons => "codons",
            Demo::Stocks => "stocks",
        }
    }

    /// The operation the demo is about: lookups for the read-only demos,
    /// updates for stocks.
    pub fn default_operation(self) -> Operation {
        match self {
            Demo::Elements | Demo::Codons => Operation::Lookup,
            Demo::Stocks => Operation::Update,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MapImpl {
    /// The perfect-hash map (small-values variant for the lookup demos,
    /// mutable-values for stocks).
    Phf,
    /// The sorted-array ordered map.
    Ordered,
    StdHash,
    StdOrdered,
}

impl MapImpl {
    pub const ALL: [MapImpl; 4] =
        [MapImpl::Phf, MapImpl::Ordered, MapImpl::StdHash, MapImpl::StdOrdered];

    pub fn name(self) -> &'static str {
        match self {
            MapImpl::Phf => "phf",
            MapImpl::Ordered => "ordered",
            MapImpl::StdHash => "std-hash",
            MapImpl::StdOrdered => "std-ordered",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Operation {
    Lookup,
    Update,
    Construct,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Operation::Lookup => "lookup",
            Operation::Update => "update",
            Operation::Construct => "construct",
        };
        write!(f, "{s}")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub workload_seed: u64,
    pub lookups: u64,
    pub updates: u64,
    pub batch: usize,
    pub construct_reps: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            workload_seed: 1,
            lookups: 10_000_000,
            updates: 1_000_000,
            batch: 10_000,
            construct_reps: 9,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub demo: Demo,
    pub map_impl: MapImpl,
    pub operation: Operation,
    pub iterations: u64,
    pub median_ns: f64,
    pub p99_ns: f64,
    pub checksum: u64,
}

fn order_stats(mut batch_ns: Vec<f64>) -> (f64, f64) {
    batch_ns.sort_by(f64::total_cmp);
    let median = batch_ns[batch_ns.len() / 2];
    let p99 = batch_ns[(batch_ns.len() * 99 / 100).min(batch_ns.len() - 1)];
    (median, p99)
}

/// Timed lookup loop: per batch, draw uniform key indices (untimed), then
/// run the lookups against the clock, folding values into the checksum.
fn time_lookups(
    keys: &[String],
    total: u64,
    batch: usize,
    seed: u64,
    mut lookup: impl FnMut(&str) -> f64,
) -> (Vec<f64>, f64) {
    let mut rng = Xorshift64::new(seed);
    let n = keys.len() as u64;
    let batches = (total / batch as u64).max(1);
    let mut idx = vec![0usize; batch];
    let mut batch_ns = Vec::with_capacity(batches as usize);
    let mut checksum = 0.0f64;
    for _ in 0..batches {
        for slot in idx.iter_mut() {
            *slot = (rng.next_u64() % n) as usize;
        }
        let t0 = Instant::now();
        for &i in &idx {
            let key = black_box(keys[i].as_str());
            checksum += lookup(key);
        }
        let elapsed = t0.elapsed().as_nanos() as f64;
        batch_ns.push(elapsed / batch as f64);
    }
    (batch_ns, black_box(checksum))
}

/// Timed update loop: per batch, draw (key index, new price) events, apply
/// them against the clock. The checksum is a full scan afterwards.
fn time_updates(
    keys: &[String],
    total: u64,
    batch: usize,
    seed: u64,
    mut update: impl FnMut(&str, f64),
) -> Vec<f64> {
    let mut rng = Xorshift64::new(seed);
    let n = keys.len() as u64;
    let batches = (total / batch as u64).max(1);
    let mut events = vec![(0usize, 0.0f64); batch];
    let mut batch_ns = Vec::with_capacity(batches as usize);
    for _ in 0..batches {
        for ev in events.iter_mut() {
            let i = (rng.next_u64() % n) as usize;
            let price = (rng.next_u64() % 100_000) as f64 / 100.0;
            *ev = (i, price);
        }
        let t0 = Instant::now();
        for &(i, price) in &events {
            update(black_box(keys[i].as_str()), price);
        }
        batch_ns.push(t0.elapsed().as_nanos() as f64 / batch as f64);
    }
    batch_ns
}

fn dataset_pairs(demo: Demo) -> Vec<(String, f64)> {
    match demo {
        Demo::Elements => datasets::elements(),
        // Codons checksum in f64 space: the amino-acid code point.
        Demo::Codons => {
            datasets::codons().into_iter().map(|(k, v)| (k, v as u32 as f64)).collect()
        }
        Demo::Stocks => datasets::stocks(),
    }
}

fn lookup_row(
    demo: Demo,
    map_impl: MapImpl,
    cfg: &BenchConfig,
    pairs: &[(String, f64)],
    keys: &[String],
) -> Result<BenchRow, CliError> {
    let build_err = |e| CliError::Bench(format!("{}: {e}", demo.name()));
    let kv = KeyValueSet::new(pairs.to_vec()).map_err(build_err)?;
    let (batch_ns, checksum) = match map_impl {
        MapImpl::Phf => {
            let map = make_small_values_map(&kv, &BuildOptions::default()).map_err(build_err)?;
            black_box(map.cache());
            // Dispatch on the width once, outside the timed loop.
            macro_rules! run {
                ($m:expr) => {
                    time_lookups(keys, cfg.lookups, cfg.batch, cfg.workload_seed, |k| {
                        *$m.get_unchecked(k)
                    })
                };
            }
            match &map {
                static_maps_core::AnySmallValuesMap::W8(m) => run!(m),
                static_maps_core::AnySmallValuesMap::W16(m) => run!(m),
                static_maps_core::AnySmallValuesMap::W32(m) => run!(m),
                static_maps_core::AnySmallValuesMap::W64(m) => run!(m),
            }
        }
        MapImpl::Ordered => {
            let map = OrderedMap::build(kv).map_err(build_err)?;
            black_box(map.cache());
            time_lookups(keys, cfg.lookups, cfg.batch, cfg.workload_seed, |k| {
                *map.get(k).expect("workload key present")
            })
        }
        MapImpl::StdHash => {
            let map: HashMap<String, f64> = pairs.to_vec().into_iter().collect();
            let mut warm = 0.0;
            for k in keys {
                warm += map[k];
            }
            black_box(warm);
            time_lookups(keys, cfg.lookups, cfg.batch, cfg.workload_seed, |k| map[k])
        }
        MapImpl::StdOrdered => {
            let map: BTreeMap<String, f64> = pairs.to_vec().into_iter().collect();
            let mut warm = 0.0;
            for k in keys {
                warm += map[k];
            }
            black_box(warm);
            time_lookups(keys, cfg.lookups, cfg.batch, cfg.workload_seed, |k| map[k])
        }
    };
    let (median_ns, p99_ns) = order_stats(batch_ns);
    Ok(BenchRow {
        demo,
        map_impl,
        operation: Operation::Lookup,
        iterations: cfg.lookups,
        median_ns,
        p99_ns,
        checksum: checksum.to_bits(),
    })
}

fn update_row(
    demo: Demo,
    map_impl: MapImpl,
    cfg: &BenchConfig,
    pairs: &[(String, f64)],
    keys: &[String],
) -> Result<BenchRow, CliError> {
    let build_err = |e| CliError::Bench(format!("{}: {e}", demo.name()));
    let kv = KeyValueSet::new(pairs.to_vec()).map_err(build_err)?;
    let (batch_ns, final_scan): (Vec<f64>, Box<dyn Fn(&str) -> f64>) = match map_impl {
        MapImpl::Phf => {
            let map =
                make_mutable_values_map(&kv, &BuildOptions::default()).map_err(build_err)?;
            // Dispatch on the width once, outside the timed loop.
            macro_rules! run {
                ($m:expr) => {{
                    let mut m = $m;
                    black_box(m.cache());
                    let ns =
                        time_updates(keys, cfg.updates, cfg.batch, cfg.workload_seed, |k, p| {
                            m.set_value(k, p).expect("workload key present");
                        });
                    (ns, Box::new(move |k: &str| *m.at(k).expect("scan key")) as Box<_>)
                }};
            }
            match map {
                static_maps_core::AnyMutableValuesMap::W8(m) => run!(m),
                static_maps_core::AnyMutableValuesMap::W16(m) => run!(m),
                static_maps_core::AnyMutableValuesMap::W32(m) => run!(m),
                static_maps_core::AnyMutableValuesMap::W64(m) => run!(m),
            }
        }
        MapImpl::Ordered => {
            // The ordered map's values are immutable; pair it with a value
            // array indexed by sorted position, which is what a sorted-array
            // baseline would do anyway.
            let map = OrderedMap::build(kv).map_err(build_err)?;
            let mut values: Vec<f64> = map.iter().map(|(_, v)| *v).collect();
            black_box(map.cache());
            let ns = time_updates(keys, cfg.updates, cfg.batch, cfg.workload_seed, |k, p| {
                let pos = map.position(k).expect("workload key present");
                values[pos] = p;
            });
            (ns, Box::new(move |k| values[map.position(k).expect("scan key")]))
        }
        MapImpl::StdHash => {
            let mut map: HashMap<String, f64> = pairs.to_vec().into_iter().collect();
            let mut warm = 0.0;
            for k in keys {
                warm += map[k];
            }
            black_box(warm);
            let ns = time_updates(keys, cfg.updates, cfg.batch, cfg.workload_seed, |k, p| {
                *map.get_mut(k).expect("workload key present") = p;
            });
            (ns, Box::new(move |k| map[k]))
        }
        MapImpl::StdOrdered => {
            let mut map: BTreeMap<String, f64> = pairs.to_vec().into_iter().collect();
            let mut warm = 0.0;
            for k in keys {
                warm += map[k];
            }
            black_box(warm);
            let ns = time_updates(keys, cfg.updates, cfg.batch, cfg.workload_seed, |k, p| {
                *map.get_mut(k).expect("workload key present") = p;
            });
            (ns, Box::new(move |k| map[k]))
        }
    };
    // Post-update state, scanned in dataset order, is the checksum.
    let mut checksum = 0.0f64;
    for k in keys {
        checksum += final_scan(k);
    }
    let (median_ns, p99_ns) = order_stats(batch_ns);
    Ok(BenchRow {
        demo,
        map_impl,
        operation: Operation::Update,
        iterations: cfg.updates,
        median_ns,
        p99_ns,
        checksum: checksum.to_bits(),
    })
}

fn construct_row(
    demo: Demo,
    map_impl: MapImpl,
    cfg: &BenchConfig,
    pairs: &[(String, f64)],
) -> Result<BenchRow, CliError> {
    let build_err = |e| CliError::Bench(format!("{}: {e}", demo.name()));
    let reps = cfg.construct_reps.max(1);
    let mut batch_ns = Vec::with_capacity(reps);
    for _ in 0..reps {
        let data = pairs.to_vec();
        let t0 = Instant::now();
        match map_impl {
            MapImpl::Phf => {
                let kv = KeyValueSet::new(data).map_err(build_err)?;
                black_box(make_small_values_map(&kv, &BuildOptions::default()).map_err(build_err)?);
            }
            MapImpl::Ordered => {
                let kv = KeyValueSet::new(data).map_err(build_err)?;
                black_box(OrderedMap::build(kv).map_err(build_err)?);
            }
            MapImpl::StdHash => {
                black_box(data.into_iter().collect::<HashMap<String, f64>>());
            }
            MapImpl::StdOrdered => {
                black_box(data.into_iter().collect::<BTreeMap<String, f64>>());
            }
        }
        batch_ns.push(t0.elapsed().as_nanos() as f64);
    }
    // Construction inputs are identical; the checksum is the value sum.
    let mut checksum = 0.0f64;
    for (_, v) in pairs {
        checksum += *v;
    }
    let (median_ns, p99_ns) = order_stats(batch_ns);
    Ok(BenchRow {
        demo,
        map_impl,
        operation: Operation::Construct,
        iterations: reps as u64,
        median_ns,
        p99_ns,
        checksum: checksum.to_bits(),
    })
}

/// Run one (demo, implementation, operation) cell.
pub fn run_demo(
    demo: Demo,
    map_impl: MapImpl,
    operation: Operation,
    cfg: &BenchConfig,
) -> Result<BenchRow, CliError> {
    let pairs = dataset_pairs(demo);
    let keys: Vec<String> = pairs.iter().map(|(k, _)| k.clone()).collect();
    match operation {
        Operation::Lookup => lookup_row(demo, map_impl, cfg, &pairs, &keys),
        Operation::Update => update_row(demo, map_impl, cfg, &pairs, &keys),
        Operation::Construct => construct_row(demo, map_impl, cfg, &pairs),
    }
}

/// Run the full matrix; per (demo, operation) every implementation must
/// produce the same checksum or the run aborts.
pub fn run_matrix(
    demos: &[Demo],
    impls: &[MapImpl],
    operation: Option<Operation>,
    cfg: &BenchConfig,
) -> Result<Vec<BenchRow>, CliError> {
    let mut rows = Vec::new();
    for &demo in demos {
        let op = operation.unwrap_or_else(|| demo.default_operation());
        let mut group: Vec<BenchRow> = Vec::new();
        for &map_impl in impls {
            group.push(run_demo(demo, map_impl, op, cfg)?);
        }
        if let Some(first) = group.first() {
            for row in &group {
                if row.checksum != first.checksum {
                    return Err(CliError::Bench(format!(
                        "checksum mismatch on {} {}: {} gave {:016x}, {} gave {:016x}",
                        demo.name(),
                        op,
                        first.map_impl.name(),
                        first.checksum,
                        row.map_impl.name(),
                        row.checksum,
                    )));
                }
            }
        }
        rows.extend(group);
    }
    Ok(rows)
}

/// CSV report: stable column order, one row per (demo, impl, operation).
pub fn write_csv(rows: &[BenchRow], mut out: impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "demo,impl,operation,iterations,median_ns,p99_ns,checksum")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{:.2},{:.2},{:016x}",
            r.demo.name(),
            r.map_impl.name(),
            r.operation,
            r.iterations,
            r.median_ns,
            r.p99_ns,
            r.checksum
        )?;
    }
    Ok(())
}

thread_local! {
    static STD_KEY_COMPARISONS: std::cell::Cell<u64> = const { std::cell::Cell::new(0) };
}

/// String key whose equality checks are counted, for demonstrating that
/// stdlib hash lookups compare keys while the perfect-hash path does not.
#[derive(Clone, Debug)]
pub struct CountedKey(pub String);

impl PartialEq for CountedKey {
    fn eq(&self, other: &CountedKey) -> bool {
        STD_KEY_COMPARISONS.with(|c| c.set(c.get() + 1));
        self.0 == other.0
    }
}

impl Eq for CountedKey {}

impl Hash for CountedKey {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state);
    }
}

/// Comparison counts over one full key scan: (perfect hash, stdlib hash).
/// The perfect-hash side counts via its instrumented lookup; the stdlib
/// side via [`CountedKey`].
pub fn probe_separation(demo: Demo) -> Result<(u64, u64), CliError> {
    let pairs = dataset_pairs(demo);
    let kv = KeyValueSet::new(pairs.clone())
        .map_err(|e| CliError::Bench(format!("{}: {e}", demo.name())))?;
    let map = make_small_values_map(&kv, &BuildOptions::default())
        .map_err(|e| CliError::Bench(format!("{}: {e}", demo.name())))?;
    let mut phf_comparisons = 0u64;
    for (k, _) in &pairs {
        let (res, stats) = map.lookup_stats(k.as_str());
        res.map_err(|e| CliError::Bench(format!("lookup of own key failed: {e}")))?;
        phf_comparisons += stats.key_comparisons as u64;
    }

    let std_map: HashMap<CountedKey, f64> =
        pairs.iter().map(|(k, v)| (CountedKey(k.clone()), *v)).collect();
    STD_KEY_COMPARISONS.with(|c| c.set(0));
    for (k, _) in &pairs {
        black_box(std_map.get(&CountedKey(k.clone())));
    }
    let std_comparisons = STD_KEY_COMPARISONS.with(|c| c.get());
    Ok((phf_comparisons, std_comparisons))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> BenchConfig {
        BenchConfig { workload_seed: 7, lookups: 20_000, updates: 20_000, batch: 1_000, construct_reps: 3 }
    }

    #[test]
    fn matrix_row_cardinality_and_stats_order() {
        let rows = run_matrix(&Demo::ALL, &MapImpl::ALL, None, &tiny()).unwrap();
        assert_eq!(rows.len(), 12); // 3 demos x 4 impls x 1 op
        for r in &rows {
            assert!(r.median_ns <= r.p99_ns, "median above p99 in {:?}", r);
            assert!(r.median_ns > 0.0);
        }
    }

    #[test]
    fn checksums_are_reproducible_for_a_seed() {
        let a = run_demo(Demo::Codons, MapImpl::Phf, Operation::Lookup, &tiny()).unwrap();
        let b = run_demo(Demo::Codons, MapImpl::StdHash, Operation::Lookup, &tiny()).unwrap();
        assert_eq!(a.checksum, b.checksum);
        let again = run_demo(Demo::Codons, MapImpl::Phf, Operation::Lookup, &tiny()).unwrap();
        assert_eq!(a.checksum, again.checksum);
    }

    #[test]
    fn update_demo_checksums_agree_across_impls() {
        let cfg = tiny();
        let phf = run_demo(Demo::Stocks, MapImpl::Phf, Operation::Update, &cfg).unwrap();
        for map_impl in [MapImpl::Ordered, MapImpl::StdHash, MapImpl::StdOrdered] {
            let other = run_demo(Demo::Stocks, map_impl, Operation::Update, &cfg).unwrap();
            assert_eq!(phf.checksum, other.checksum, "impl {}", map_impl.name());
        }
    }

    #[test]
    fn csv_shape() {
        let rows = run_matrix(&[Demo::Codons], &[MapImpl::Phf], None, &tiny()).unwrap();
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("demo,impl,operation,iterations,median_ns,p99_ns,checksum"));
        assert!(lines.next().unwrap().starts_with("codons,phf,lookup,20000,"));
    }

    #[test]
    fn perfect_hash_compares_no_keys_but_std_does() {
        let (phf, std) = probe_separation(Demo::Codons).unwrap();
        assert_eq!(phf, 0);
        assert!(std >= 64, "std comparisons {std} suspiciously low");
    }
}

use std::hint::black_box;
use std::time::Instant;
use static_maps_core::*;
use static_maps_cli::datasets;

fn main() {
    let pairs: Vec<(String, f64)> = datasets::codons().into_iter().map(|(k, v)| (k, v as u32 as f64)).collect();
    let kv = KeyValueSet::new(pairs.clone()).unwrap();
    let map = make_small_values_map(&kv, &BuildOptions::default()).unwrap();
    println!("codon map width: {}", map.width());
    // bucket structure
    let (mut singles, mut multi) = (0, 0);
    for (k, _) in &pairs {
        let s = map.lookup_slot(k.as_str());
        if s.row_size <= 1 { singles += 1 } else { multi += 1 }
    }
    println!("singleton-bucket keys: {singles}, multi: {multi}");

    let keys: Vec<String> = pairs.iter().map(|(k, _)| k.clone()).collect();
    let mut rng = Xorshift64::new(5);
    let n = keys.len() as u64;
    let total = 5_000_000u64;

    // 1) index generation + fnv only
    let t0 = Instant::now();
    let mut acc = 0u64;
    for _ in 0..total {
        let k = black_box(keys[(rng.next_u64() % n) as usize].as_str());
        acc ^= raw_hash(k.as_bytes()).0;
    }
    black_box(acc);
    println!("fnv-only: {:.2} ns/op", t0.elapsed().as_nanos() as f64 / total as f64);

    // 2) full get_unchecked
    let mut rng = Xorshift64::new(5);
    match &map {
        AnySmallValuesMap::W16(m) => {
            let t0 = Instant::now();
            let mut acc = 0.0f64;
            for _ in 0..total {
                let k = black_box(keys[(rng.next_u64() % n) as usize].as_str());
                acc += *m.get_unchecked(k);
            }
            black_box(acc);
            println!("typed W16 get_unchecked: {:.2} ns/op", t0.elapsed().as_nanos() as f64 / total as f64);
        }
        other => println!("width is {}", other.width()),
    }

    // 3) raw mulmod u16 throughput
    let mut x: u16 = 12345;
    let t0 = Instant::now();
    for _ in 0..total {
        x = u16::mulmod_near_max(x | 1, 31337);
    }
    black_box(x);
    println!("mulmod u16 (dependent chain): {:.2} ns/op", t0.elapsed().as_nanos() as f64 / total as f64);

    // 4) std::HashMap comparison
    let std_map: std::collections::HashMap<String, f64> = pairs.iter().cloned().collect();
    let mut rng = Xorshift64::new(5);
    let t0 = Instant::now();
    let mut acc = 0.0f64;
    for _ in 0..total {
        let k = black_box(keys[(rng.next_u64() % n) as usize].as_str());
        acc += std_map[k];
    }
    black_box(acc);
    println!("std HashMap: {:.2} ns/op", t0.elapsed().as_nanos() as f64 / total as f64);
}

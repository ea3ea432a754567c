//! Source-code emission: a self-contained Rust file declaring the static
//! table arrays and an exact-membership `get` function, in the spirit of
//! keyword-recognizer generators.

use std::fmt::Write;

use static_maps_core::{AnyIndexedMap, IndexWidth, IndexWord, IndexedMap};

use crate::dump::{DumpValue, LoadedTable};

/// How a value kind appears in generated source.
trait EmitValue: DumpValue {
    fn rust_type() -> &'static str;
    fn literal(&self) -> String;
}

impl EmitValue for f64 {
    fn rust_type() -> &'static str {
        "f64"
    }
    fn literal(&self) -> String {
        if self.is_finite() {
            format!("{self:?}")
        } else {
            format!("f64::from_bits(0x{:016x})", self.to_bits())
        }
    }
}

impl EmitValue for i64 {
    fn rust_type() -> &'static str {
        "i64"
    }
    fn literal(&self) -> String {
        self.to_string()
    }
}

impl EmitValue for char {
    fn rust_type() -> &'static str {
        "char"
    }
    fn literal(&self) -> String {
        format!("{self:?}")
    }
}

impl EmitValue for String {
    fn rust_type() -> &'static str {
        "&'static str"
    }
    fn literal(&self) -> String {
        format!("{self:?}")
    }
}

fn ix_type(width: IndexWidth) -> &'static str {
    match width {
        IndexWidth::W8 => "u8",
        IndexWidth::W16 => "u16",
        IndexWidth::W32 => "u32",
        IndexWidth::W64 => "u64",
    }
}

fn write_array(out: &mut String, name: &str, ty: &str, items: &[String]) {
    let _ = write!(out, "static {name}: [{ty}; {}] = [", items.len());
    for (i, item) in items.iter().enumerate() {
        if i % 12 == 0 {
            out.push_str("\n    ");
        } else {
            out.push(' ');
        }
        let _ = write!(out, "{item},");
    }
    out.push_str("\n];\n\n");
}

fn generate_typed<V: EmitValue, W: IndexWord>(map: &IndexedMap<String, V, W>) -> String {
    let inner = map.index_table();
    let width = W::WIDTH;
    let ix = ix_type(width);
    let prime = static_maps_core::largest_prime_below(width);

    let mut out = String::new();
    out.push_str("// Generated by `static-maps gen --emit source`. Do not edit by hand.\n");
    out.push_str("//\n");
    out.push_str("// Static two-level perfect-hash table. Lookup runs the universal hash\n");
    out.push_str("// k*h mod P mod r (power-of-two r, bitmask modulo) once for the primary\n");
    out.push_str("// row and once more only when the row holds several keys, then checks\n");
    out.push_str("// the stored key once for exact membership.\n\n");
    out.push_str("#![allow(clippy::all)]\n\n");

    let _ = writeln!(out, "pub const N: usize = {};", map.len());
    let _ = writeln!(out, "pub type Value = {};", V::rust_type());
    let _ = writeln!(out, "type Ix = {ix};");
    out.push('\n');
    let _ = writeln!(out, "const PRIME: Ix = {};", prime.value());
    let _ = writeln!(out, "const DEFICIT: Ix = {};", prime.deficit());
    let _ = writeln!(out, "const HALF: u32 = {};", width.bits() / 2);
    let _ = writeln!(out, "const HALF_MASK: Ix = {:#x};", (1u64 << (width.bits() / 2)) - 1);
    let salt = inner.salt();
    if salt.is_enabled() {
        let _ = writeln!(out, "const SALT: Option<u64> = Some(0x{:016x});", salt.value());
    } else {
        let _ = writeln!(out, "const SALT: Option<u64> = None;");
    }
    let _ = writeln!(out, "const K_PRIMARY: Ix = {};", inner.k_primary());
    let _ = writeln!(out, "const PRIMARY_MASK: Ix = {:#x};", inner.r_primary() - 1);
    let _ = writeln!(out, "const SENTINEL: Ix = Ix::MAX;");
    out.push('\n');

    let ks: Vec<String> = inner.ks_secondary().iter().map(|k| k.to_string()).collect();
    write_array(&mut out, "KS_SECONDARY", "Ix", &ks);
    let offsets: Vec<String> = inner.table().offsets().iter().map(|o| o.to_string()).collect();
    write_array(&mut out, "OFFSETS", "Ix", &offsets);
    let slots: Vec<String> = inner.table().storage().iter().map(|s| s.to_string()).collect();
    write_array(&mut out, "SLOTS", "Ix", &slots);
    let keys: Vec<String> = map.keys().iter().map(|k| format!("{k:?}")).collect();
    write_array(&mut out, "KEYS", "&'static str", &keys);
    let values: Vec<String> = map.values().iter().map(|v| v.literal()).collect();
    write_array(&mut out, "VALUES", "Value", &values);

    out.push_str(
        r#"fn raw_hash(key: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in key {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

// Any word value is below 2*PRIME, so one compare-and-subtract reduces it.
fn mod_p(x: Ix) -> Ix {
    if x >= PRIME { x - PRIME } else { x }
}

// (a + b) mod PRIME for any two Ix values; a wraparound of the word
// re-enters as DEFICIT.
fn addmod(a: Ix, b: Ix) -> Ix {
    let (s, carried) = a.overflowing_add(b);
    let bump = if carried { DEFICIT } else { 0 };
    let (s2, carried2) = s.overflowing_add(bump);
    let bump2 = if carried2 { DEFICIT } else { 0 };
    mod_p(s2.wrapping_add(bump2))
}

fn shift_half_mod(x: Ix) -> Ix {
    addmod((x >> HALF) * DEFICIT, (x & HALF_MASK) << HALF)
}

fn mul_deficit_mod(x: Ix) -> Ix {
    addmod(shift_half_mod((x >> HALF) * DEFICIT), (x & HALF_MASK) * DEFICIT)
}

// (a * b) mod PRIME in word-width arithmetic only.
fn mulmod(a: Ix, b: Ix) -> Ix {
    let (ah, al) = (a >> HALF, a & HALF_MASK);
    let (bh, bl) = (b >> HALF, b & HALF_MASK);
    let hh = mul_deficit_mod(ah * bh);
    let cross = shift_half_mod(addmod(ah * bl, al * bh));
    addmod(addmod(hh, cross), mod_p(al * bl))
}

fn table_slot(key: &str) -> usize {
    let mut h64 = raw_hash(key.as_bytes());
    if let Some(salt) = SALT {
        h64 ^= salt;
    }
    let h = h64 as Ix;
    let row = (mulmod(K_PRIMARY, h) & PRIMARY_MASK) as usize;
    let start = OFFSETS[row] as usize;
    let size = OFFSETS[row + 1] as usize - start;
    if size <= 1 {
        start
    } else {
        let col = (mulmod(KS_SECONDARY[row], h) as usize) & (size - 1);
        start + col
    }
}

/// Exact-membership lookup over the static keyset.
pub fn get(key: &str) -> Option<Value> {
    let slot = table_slot(key);
    if slot >= SLOTS.len() {
        return None;
    }
    let idx = SLOTS[slot];
    if idx == SENTINEL {
        return None;
    }
    let idx = idx as usize;
    if KEYS[idx] == key {
        Some(VALUES[idx])
    } else {
        None
    }
}

/// Key-value pairs in their original order.
pub fn entries() -> impl Iterator<Item = (&'static str, Value)> {
    KEYS.iter().copied().zip(VALUES.iter().copied())
}
"#,
    );
    out
}

/// Render a table as a standalone Rust source file.
pub fn generate_source(table: &LoadedTable) -> String {
    macro_rules! dispatch {
        ($map:expr) => {
            match $map {
                AnyIndexedMap::W8(m) => generate_typed(m),
                AnyIndexedMap::W16(m) => generate_typed(m),
                AnyIndexedMap::W32(m) => generate_typed(m),
                AnyIndexedMap::W64(m) => generate_typed(m),
            }
        };
    }
    match table {
        LoadedTable::Float64(m) => dispatch!(m),
        LoadedTable::Int64(m) => dispatch!(m),
        LoadedTable::Char(m) => dispatch!(m),
        LoadedTable::Text(m) => dispatch!(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dump::build_table;
    use crate::keyset::{parse_keyset_str, KeysetFormat, ValueKind};
    use static_maps_core::BuildOptions;

    #[test]
    fn generated_source_contains_the_table_and_api() {
        let kf = parse_keyset_str(
            "ATG\tM\nTAA\t*\nTGG\tW\nGGA\tG\n",
            KeysetFormat::Tsv,
            ValueKind::Char,
            "t",
        )
        .unwrap();
        let table = build_table(&kf, &BuildOptions { seed: Some(3), ..Default::default() }).unwrap();
        let src = generate_source(&table);
        assert!(src.contains("pub const N: usize = 4;"));
        assert!(src.contains("pub type Value = char;"));
        assert!(src.contains("pub fn get(key: &str) -> Option<Value>"));
        assert!(src.contains("\"ATG\""));
        assert!(src.contains("'M'"));
        // Deterministic for a fixed seed.
        let again = generate_source(
            &build_table(&kf, &BuildOptions { seed: Some(3), ..Default::default() }).unwrap(),
        );
        assert_eq!(src, again);
    }
}

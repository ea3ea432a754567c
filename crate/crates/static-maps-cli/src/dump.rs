//! The serialized table format and its in-memory counterpart.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic            8  b"SMAPTBL\0"
//! version          u32
//! width_bits       u8   (8 | 16 | 32 | 64)
//! salt_enabled     u8
//! value_kind       u8   (0 f64, 1 i64, 2 char, 3 text)
//! reserved         u8
//! salt_value       u64
//! k_primary        u64
//! r_primary        u64
//! n                u64
//! ks_secondary     r_primary words of width_bits
//! offsets          (r_primary + 1) words of width_bits
//! slot_table       offsets[r_primary] words of width_bits (key index,
//!                  all-ones = empty slot)
//! keys             n x (u32 length + UTF-8 bytes)
//! values           n, encoding per value_kind
//! ```
//!
//! Loading reassembles the map directly from the arrays (no re-hashing)
//! and then replays a lookup of every key as a self-check.

use static_maps_core::{
    make_indexed_map, AnyIndexedMap, BuildOptions, DangerousMap, IndexWidth, IndexWord,
    IndexedMap, KeyValueSet, RaggedArray, Salt,
};

use crate::keyset::{KeysetFile, ValueKind};
use crate::CliError;

pub const DUMP_MAGIC: [u8; 8] = *b"SMAPTBL\0";
pub const DUMP_VERSION: u32 = 1;

/// Value codec for the dump's typed value section.
pub trait DumpValue: Sized + Clone {
    const KIND: ValueKind;
    fn write(&self, out: &mut Vec<u8>);
    fn read(r: &mut Cursor<'_>) -> Result<Self, CliError>;
    /// Canonical text form (round-trip comparisons in tests and tools).
    fn to_text(&self) -> String;
    fn parse_text(raw: &str) -> Option<Self>;
}

impl DumpValue for f64 {
    const KIND: ValueKind = ValueKind::Float64;
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_bits().to_le_bytes());
    }
    fn read(r: &mut Cursor<'_>) -> Result<Self, CliError> {
        Ok(f64::from_bits(r.read_u64()?))
    }
    fn to_text(&self) -> String {
        format!("{self:?}")
    }
    fn parse_text(raw: &str) -> Option<Self> {
        raw.parse().ok()
    }
}

impl DumpValue for i64 {
    const KIND: ValueKind = ValueKind::Int64;
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read(r: &mut Cursor<'_>) -> Result<Self, CliError> {
        Ok(r.read_u64()? as i64)
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(raw: &str) -> Option<Self> {
        raw.parse().ok()
    }
}

impl DumpValue for char {
    const KIND: ValueKind = ValueKind::Char;
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(*self as u32).to_le_bytes());
    }
    fn read(r: &mut Cursor<'_>) -> Result<Self, CliError> {
        char::from_u32(r.read_u32()?).ok_or_else(|| CliError::Dump("bad char value".into()))
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn parse_text(raw: &str) -> Option<Self> {
        let mut chars = raw.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => Some(c),
            _ => None,
        }
    }
}

impl DumpValue for String {
    const KIND: ValueKind = ValueKind::Text;
    fn write(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.len() as u32).to_le_bytes());
        out.extend_from_slice(self.as_bytes());
    }
    fn read(r: &mut Cursor<'_>) -> Result<Self, CliError> {
        let len = r.read_u32()? as usize;
        let bytes = r.take(len)?;
        String::from_utf8(bytes.to_vec()).map_err(|_| CliError::Dump("bad UTF-8".into()))
    }
    fn to_text(&self) -> String {
        self.clone()
    }
    fn parse_text(raw: &str) -> Option<Self> {
        Some(raw.to_string())
    }
}

/// A constructed table of any width and value kind.
pub enum LoadedTable {
    Float64(AnyIndexedMap<String, f64>),
    Int64(AnyIndexedMap<String, i64>),
    Char(AnyIndexedMap<String, char>),
    Text(AnyIndexedMap<String, String>),
}

macro_rules! for_each_kind {
    ($table:expr, $map:ident, $body:expr) => {
        match $table {
            LoadedTable::Float64($map) => $body,
            LoadedTable::Int64($map) => $body,
            LoadedTable::Char($map) => $body,
            LoadedTable::Text($map) => $body,
        }
    };
}

impl LoadedTable {
    pub fn kind(&self) -> ValueKind {
        match self {
            LoadedTable::Float64(_) => ValueKind::Float64,
            LoadedTable::Int64(_) => ValueKind::Int64,
            LoadedTable::Char(_) => ValueKind::Char,
            LoadedTable::Text(_) => ValueKind::Text,
        }
    }

    pub fn width(&self) -> IndexWidth {
        for_each_kind!(self, m, m.width())
    }

    pub fn len(&self) -> usize {
        for_each_kind!(self, m, m.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn keys(&self) -> &[String] {
        for_each_kind!(self, m, m.keys())
    }

    /// Checked lookup, value rendered in its canonical text form.
    pub fn lookup_text(&self, key: &str) -> Option<String> {
        for_each_kind!(self, m, m.at(key).ok().map(|v| v.to_text()))
    }
}

/// Build a table from a parsed keyset file.
pub fn build_table(kf: &KeysetFile, opts: &BuildOptions) -> Result<LoadedTable, CliError> {
    let keys = kf.keys();
    fn typed<V: DumpValue>(
        kf: &KeysetFile,
        keys: &[String],
        opts: &BuildOptions,
    ) -> Result<AnyIndexedMap<String, V>, CliError> {
        let pairs: Vec<(String, V)> = kf
            .records
            .iter()
            .map(|r| {
                let v = V::parse_text(&r.value).ok_or_else(|| CliError::Parse {
                    path: String::new(),
                    line: r.line,
                    msg: format!("value {:?} does not parse as {}", r.value, V::KIND),
                })?;
                Ok((r.key.clone(), v))
            })
            .collect::<Result<_, CliError>>()?;
        let kv = KeyValueSet::new(pairs).map_err(|e| CliError::from_build(e, keys))?;
        make_indexed_map(&kv, opts).map_err(|e| CliError::from_build(e, keys))
    }
    Ok(match kf.kind {
        ValueKind::Float64 => LoadedTable::Float64(typed(kf, &keys, opts)?),
        ValueKind::Int64 => LoadedTable::Int64(typed(kf, &keys, opts)?),
        ValueKind::Char => LoadedTable::Char(typed(kf, &keys, opts)?),
        ValueKind::Text => LoadedTable::Text(typed(kf, &keys, opts)?),
    })
}

fn push_word(out: &mut Vec<u8>, value: u64, width: IndexWidth) {
    let bytes = value.to_le_bytes();
    out.extend_from_slice(&bytes[..(width.bits() / 8) as usize]);
}

fn write_typed<V: DumpValue, W: IndexWord>(map: &IndexedMap<String, V, W>) -> Vec<u8> {
    let inner = map.index_table();
    let width = W::WIDTH;
    let mut out = Vec::new();
    out.extend_from_slice(&DUMP_MAGIC);
    out.extend_from_slice(&DUMP_VERSION.to_le_bytes());
    out.push(width.bits() as u8);
    out.push(inner.salt().is_enabled() as u8);
    out.push(V::KIND.tag());
    out.push(0);
    out.extend_from_slice(&inner.salt().value().to_le_bytes());
    out.extend_from_slice(&inner.k_primary().widen_u64().to_le_bytes());
    out.extend_from_slice(&inner.r_primary().to_le_bytes());
    out.extend_from_slice(&(map.len() as u64).to_le_bytes());
    for &k in inner.ks_secondary() {
        push_word(&mut out, k.widen_u64(), width);
    }
    for &o in inner.table().offsets() {
        push_word(&mut out, o.widen_u64(), width);
    }
    for &slot in inner.table().storage() {
        push_word(&mut out, slot.widen_u64(), width);
    }
    for key in map.keys() {
        out.extend_from_slice(&(key.len() as u32).to_le_bytes());
        out.extend_from_slice(key.as_bytes());
    }
    for value in map.values() {
        value.write(&mut out);
    }
    out
}

/// Serialize a table to the dump format.
pub fn write_table(table: &LoadedTable) -> Vec<u8> {
    macro_rules! dispatch {
        ($map:expr) => {
            match $map {
                static_maps_core::AnyIndexedMap::W8(m) => write_typed(m),
                static_maps_core::AnyIndexedMap::W16(m) => write_typed(m),
                static_maps_core::AnyIndexedMap::W32(m) => write_typed(m),
                static_maps_core::AnyIndexedMap::W64(m) => write_typed(m),
            }
        };
    }
    for_each_kind!(table, m, dispatch!(m))
}

/// Byte reader over a dump buffer.
pub struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(buf: &'a [u8]) -> Cursor<'a> {
        Cursor { buf, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], CliError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| CliError::Dump("truncated".into()))?;
        let slice = &self.buf[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn read_u8(&mut self) -> Result<u8, CliError> {
        Ok(self.take(1)?[0])
    }

    fn read_u32(&mut self) -> Result<u32, CliError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn read_u64(&mut self) -> Result<u64, CliError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn read_word(&mut self, width: IndexWidth) -> Result<u64, CliError> {
        let n = (width.bits() / 8) as usize;
        let mut bytes = [0u8; 8];
        bytes[..n].copy_from_slice(self.take(n)?);
        Ok(u64::from_le_bytes(bytes))
    }

    fn done(&self) -> bool {
        self.pos == self.buf.len()
    }
}

struct Header {
    width: IndexWidth,
    salt: Salt,
    kind: ValueKind,
    k_primary: u64,
    r_primary: u64,
    n: u64,
}

fn read_header(r: &mut Cursor<'_>) -> Result<Header, CliError> {
    if r.take(8)? != DUMP_MAGIC {
        return Err(CliError::Dump("bad magic".into()));
    }
    let version = r.read_u32()?;
    if version != DUMP_VERSION {
        return Err(CliError::Dump(format!("unsupported version {version}")));
    }
    let width = IndexWidth::from_bits(r.read_u8()? as u32)
        .ok_or_else(|| CliError::Dump("bad width".into()))?;
    let salt_enabled = r.read_u8()? != 0;
    let kind = ValueKind::from_tag(r.read_u8()?)
        .ok_or_else(|| CliError::Dump("bad value kind".into()))?;
    let _reserved = r.read_u8()?;
    let salt_value = r.read_u64()?;
    let salt = if salt_enabled { Salt::new(salt_value) } else { Salt::DISABLED };
    Ok(Header {
        width,
        salt,
        kind,
        k_primary: r.read_u64()?,
        r_primary: r.read_u64()?,
        n: r.read_u64()?,
    })
}

fn load_typed<V: DumpValue, W: IndexWord>(
    r: &mut Cursor<'_>,
    h: &Header,
) -> Result<IndexedMap<String, V, W>, CliError> {
    let r_primary = usize::try_from(h.r_primary)
        .ok()
        .filter(|&rp| rp >= 1)
        .ok_or_else(|| CliError::Dump("bad r_primary".into()))?;
    let n =
        usize::try_from(h.n).ok().filter(|&n| n >= 1).ok_or_else(|| CliError::Dump("bad n".into()))?;

    let mut ks_secondary = Vec::with_capacity(r_primary);
    for _ in 0..r_primary {
        ks_secondary.push(W::truncate_u64(r.read_word(h.width)?));
    }
    let mut offsets = Vec::with_capacity(r_primary + 1);
    for _ in 0..=r_primary {
        offsets.push(W::truncate_u64(r.read_word(h.width)?));
    }
    let total = offsets.last().unwrap().to_usize();
    let mut slots = Vec::with_capacity(total);
    for _ in 0..total {
        slots.push(W::truncate_u64(r.read_word(h.width)?));
    }
    let table = RaggedArray::from_parts(offsets, slots)
        .ok_or_else(|| CliError::Dump("inconsistent offsets".into()))?;

    let mut keys = Vec::with_capacity(n);
    for _ in 0..n {
        let len = r.read_u32()? as usize;
        let bytes = r.take(len)?;
        keys.push(
            String::from_utf8(bytes.to_vec())
                .map_err(|_| CliError::Dump("key is not UTF-8".into()))?,
        );
    }
    let mut values = Vec::with_capacity(n);
    for _ in 0..n {
        values.push(V::read(r)?);
    }

    let inner =
        DangerousMap::from_parts(h.salt, W::truncate_u64(h.k_primary), ks_secondary, table, n)
            .ok_or_else(|| CliError::Dump("inconsistent table structure".into()))?;
    let map = IndexedMap::from_parts(inner, keys, values)
        .ok_or_else(|| CliError::Dump("inconsistent key/value arrays".into()))?;

    // Replay every key's lookup: the reassembled map must behave exactly
    // like the one that was dumped.
    for (i, key) in map.keys().iter().enumerate() {
        if map.position(key.as_str()) != Ok(i) {
            return Err(CliError::Dump(format!("slot table does not resolve key {key:?}")));
        }
    }
    Ok(map)
}

/// Parse a dump back into a usable table.
pub fn load_table(bytes: &[u8]) -> Result<LoadedTable, CliError> {
    let mut r = Cursor::new(bytes);
    let h = read_header(&mut r)?;

    macro_rules! widths {
        ($valty:ty, $ctor:path) => {
            match h.width {
                IndexWidth::W8 => $ctor(load_typed::<$valty, u8>(&mut r, &h)?.into()),
                IndexWidth::W16 => $ctor(load_typed::<$valty, u16>(&mut r, &h)?.into()),
                IndexWidth::W32 => $ctor(load_typed::<$valty, u32>(&mut r, &h)?.into()),
                IndexWidth::W64 => $ctor(load_typed::<$valty, u64>(&mut r, &h)?.into()),
            }
        };
    }
    let table = match h.kind {
        ValueKind::Float64 => widths!(f64, LoadedTable::Float64),
        ValueKind::Int64 => widths!(i64, LoadedTable::Int64),
        ValueKind::Char => widths!(char, LoadedTable::Char),
        ValueKind::Text => widths!(String, LoadedTable::Text),
    };
    if !r.done() {
        return Err(CliError::Dump("trailing bytes".into()));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keyset::{parse_keyset_str, KeysetFormat};

    fn demo_keyset() -> KeysetFile {
        parse_keyset_str(
            "H\t1.008\nHe\t4.002602\nLi\t6.94\nBe\t9.0121831\nB\t10.81\n",
            KeysetFormat::Tsv,
            ValueKind::Float64,
            "demo",
        )
        .unwrap()
    }

    #[test]
    fn dump_round_trips_and_is_deterministic() {
        let kf = demo_keyset();
        let opts = BuildOptions { seed: Some(1), ..Default::default() };
        let table = build_table(&kf, &opts).unwrap();
        let bytes_a = write_table(&table);
        let table_b = build_table(&kf, &opts).unwrap();
        let bytes_b = write_table(&table_b);
        assert_eq!(bytes_a, bytes_b, "same seed must give byte-identical dumps");

        let reloaded = load_table(&bytes_a).unwrap();
        assert_eq!(reloaded.len(), 5);
        assert_eq!(reloaded.width(), table.width());
        for r in &kf.records {
            assert_eq!(
                reloaded.lookup_text(&r.key),
                table.lookup_text(&r.key),
                "key {}",
                r.key
            );
        }
        assert_eq!(reloaded.lookup_text("He").unwrap(), "4.002602");
        assert!(reloaded.lookup_text("Xx").is_none());
    }

    #[test]
    fn truncated_and_corrupt_dumps_are_rejected() {
        let kf = demo_keyset();
        let table = build_table(&kf, &BuildOptions::default()).unwrap();
        let bytes = write_table(&table);
        assert!(load_table(&bytes[..bytes.len() - 1]).is_err());
        let mut corrupt = bytes.clone();
        corrupt[0] ^= 0xFF;
        assert!(load_table(&corrupt).is_err());
        let mut versioned = bytes.clone();
        versioned[8] = 99;
        assert!(load_table(&versioned).is_err());
    }

    #[test]
    fn all_value_kinds_round_trip() {
        for (raw, kind) in [
            ("a\t1.5\nb\t-2.25\n", ValueKind::Float64),
            ("a\t10\nb\t-20\n", ValueKind::Int64),
            ("a\tX\nb\t*\n", ValueKind::Char),
            ("a\thello world\nb\t\n", ValueKind::Text),
        ] {
            let kf = parse_keyset_str(raw, KeysetFormat::Tsv, kind, "t").unwrap();
            let table = build_table(&kf, &BuildOptions::default()).unwrap();
            let reloaded = load_table(&write_table(&table)).unwrap();
            assert_eq!(reloaded.kind(), kind);
            for r in &kf.records {
                assert_eq!(reloaded.lookup_text(&r.key), table.lookup_text(&r.key));
            }
        }
    }
}

//! Keyset-file ingestion: TSV, CSV, and JSON key-value records plus a
//! declared value kind.

use std::fmt;
use std::fs;
use std::path::Path;

use crate::CliError;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum KeysetFormat {
    Tsv,
    Csv,
    Json,
}

impl KeysetFormat {
    /// Guess from the file extension; TSV when in doubt.
    pub fn from_path(path: &Path) -> KeysetFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => KeysetFormat::Csv,
            Some("json") => KeysetFormat::Json,
            _ => KeysetFormat::Tsv,
        }
    }
}

/// What the value column holds.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValueKind {
    Float64,
    Int64,
    Char,
    Text,
}

impl ValueKind {
    pub fn tag(self) -> u8 {
        match self {
            ValueKind::Float64 => 0,
            ValueKind::Int64 => 1,
            ValueKind::Char => 2,
            ValueKind::Text => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<ValueKind> {
        match tag {
            0 => Some(ValueKind::Float64),
            1 => Some(ValueKind::Int64),
            2 => Some(ValueKind::Char),
            3 => Some(ValueKind::Text),
            _ => None,
        }
    }

    fn validate(self, raw: &str) -> Result<(), String> {
        match self {
            ValueKind::Float64 => {
                raw.parse::<f64>().map(|_| ()).map_err(|e| format!("bad float64 {raw:?}: {e}"))
            }
            ValueKind::Int64 => {
                raw.parse::<i64>().map(|_| ()).map_err(|e| format!("bad int64 {raw:?}: {e}"))
            }
            ValueKind::Char => {
                let mut chars = raw.chars();
                match (chars.next(), chars.next()) {
                    (Some(_), None) => Ok(()),
                    _ => Err(format!("bad char {raw:?}: expected exactly one character")),
                }
            }
            ValueKind::Text => Ok(()),
        }
    }
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValueKind::Float64 => "float64",
            ValueKind::Int64 => "int64",
            ValueKind::Char => "char",
            ValueKind::Text => "text",
        };
        write!(f, "{s}")
    }
}

/// One keyset record; `line` is 1-based (record index for JSON input).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Record {
    pub key: String,
    pub value: String,
    pub line: usize,
}

/// Parsed keyset: records in file order, keys distinct, values already
/// validated against the declared kind.
#[derive(Clone, Debug)]
pub struct KeysetFile {
    pub records: Vec<Record>,
    pub kind: ValueKind,
}

impl KeysetFile {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn keys(&self) -> Vec<String> {
        self.records.iter().map(|r| r.key.clone()).collect()
    }
}

pub fn parse_keyset(
    path: &Path,
    format: KeysetFormat,
    kind: ValueKind,
) -> Result<KeysetFile, CliError> {
    let display = path.display().to_string();
    let raw = fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: display.clone(), source })?;
    parse_keyset_str(&raw, format, kind, &display)
}

/// Same as [`parse_keyset`] over in-memory text (`path` is for messages).
pub fn parse_keyset_str(
    raw: &str,
    format: KeysetFormat,
    kind: ValueKind,
    path: &str,
) -> Result<KeysetFile, CliError> {
    let records = match format {
        KeysetFormat::Tsv => parse_tsv(raw, path)?,
        KeysetFormat::Csv => parse_csv(raw, path)?,
        KeysetFormat::Json => parse_json(raw, path)?,
    };

    // Values must fit the declared kind; report the offending line.
    for r in &records {
        kind.validate(&r.value).map_err(|msg| CliError::Parse {
            path: path.to_string(),
            line: r.line,
            msg,
        })?;
    }

    // Duplicate keys are fatal, named with both line numbers.
    let mut seen: std::collections::HashMap<&str, usize> = std::collections::HashMap::new();
    for r in &records {
        if let Some(&first) = seen.get(r.key.as_str()) {
            return Err(CliError::DuplicateKey {
                path: path.to_string(),
                key: r.key.clone(),
                first,
                second: r.line,
            });
        }
        seen.insert(r.key.as_str(), r.line);
    }

    Ok(KeysetFile { records, kind })
}

fn parse_tsv(raw: &str, path: &str) -> Result<Vec<Record>, CliError> {
    let mut records = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('\t').ok_or_else(|| CliError::Parse {
            path: path.to_string(),
            line: lineno,
            msg: "expected <key>\\t<value>".to_string(),
        })?;
        records.push(Record { key: key.to_string(), value: value.to_string(), line: lineno });
    }
    Ok(records)
}

fn parse_csv(raw: &str, path: &str) -> Result<Vec<Record>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(raw.as_bytes());
    let mut records = Vec::new();
    for result in reader.records() {
        let record = result.map_err(|e| CliError::Parse {
            path: path.to_string(),
            line: e.position().map(|p| p.line() as usize).unwrap_or(0),
            msg: e.to_string(),
        })?;
        let lineno = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        if record.len() != 2 {
            return Err(CliError::Parse {
                path: path.to_string(),
                line: lineno,
                msg: format!("expected 2 fields, found {}", record.len()),
            });
        }
        records.push(Record {
            key: record[0].to_string(),
            value: record[1].to_string(),
            line: lineno,
        });
    }
    Ok(records)
}

/// JSON input: either an object (`{"key": value, ...}`, insertion order
/// preserved) or an array of `[key, value]` pairs.
fn parse_json(raw: &str, path: &str) -> Result<Vec<Record>, CliError> {
    let parse_err = |msg: String| CliError::Parse { path: path.to_string(), line: 0, msg };
    let value: serde_json::Value =
        serde_json::from_str(raw).map_err(|e| CliError::Parse {
            path: path.to_string(),
            line: e.line(),
            msg: e.to_string(),
        })?;

    let scalar_to_string = |v: &serde_json::Value| -> Result<String, CliError> {
        match v {
            serde_json::Value::String(s) => Ok(s.clone()),
            serde_json::Value::Number(n) => Ok(n.to_string()),
            serde_json::Value::Bool(b) => Ok(b.to_string()),
            other => Err(parse_err(format!("unsupported value {other}"))),
        }
    };

    let mut records = Vec::new();
    match &value {
        serde_json::Value::Object(map) => {
            for (i, (k, v)) in map.iter().enumerate() {
                records.push(Record {
                    key: k.clone(),
                    value: scalar_to_string(v)?,
                    line: i + 1,
                });
            }
        }
        serde_json::Value::Array(items) => {
            for (i, item) in items.iter().enumerate() {
                let pair = item.as_array().filter(|a| a.len() == 2).ok_or_else(|| {
                    parse_err(format!("record {} is not a [key, value] pair", i + 1))
                })?;
                let key = pair[0]
                    .as_str()
                    .ok_or_else(|| parse_err(format!("record {} key is not a string", i + 1)))?;
                records.push(Record {
                    key: key.to_string(),
                    value: scalar_to_string(&pair[1])?,
                    line: i + 1,
                });
            }
        }
        _ => return Err(parse_err("expected a JSON object or array of pairs".to_string())),
    }
    Ok(records)
}

//! Tooling around the perfect-hash map library: keyset-file ingestion,
//! table construction, serialized table dumps, generated-source output,
//! and a benchmark harness over the three demo datasets.

pub mod bench;
pub mod datasets;
pub mod dump;
pub mod emit;
pub mod keyset;

pub use dump::{load_table, write_table, LoadedTable, DUMP_MAGIC, DUMP_VERSION};
pub use keyset::{parse_keyset, KeysetFile, KeysetFormat, Record, ValueKind};

use static_maps_core::BuildError;

/// Tool-level error with the process exit code baked in: 1 for I/O and
/// parse problems, 2 for construction failures.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("duplicate key {key:?} at lines {first} and {second} of {path}")]
    DuplicateKey { path: String, key: String, first: usize, second: usize },
    #[error("invalid table dump: {0}")]
    Dump(String),
    #[error("construction failed: {0}")]
    Build(String),
    #[error("benchmark failed: {0}")]
    Bench(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::DuplicateKey { .. }
            | CliError::Dump(_) => 1,
            CliError::Build(_) | CliError::Bench(_) => 2,
        }
    }

    /// Wrap a construction error, resolving key indices to the keys
    /// themselves so diagnostics name the colliding entries.
    pub fn from_build(err: BuildError, keys: &[String]) -> CliError {
        let key = |i: usize| keys.get(i).map(String::as_str).unwrap_or("?");
        let msg = match err {
            BuildError::DuplicateKey { first, second } => {
                format!("duplicate key {:?} (entries {first} and {second})", key(first))
            }
            BuildError::RawHashCollision { first, second } => format!(
                "raw hash collision between keys {:?} and {:?}",
                key(first),
                key(second)
            ),
            BuildError::WidthCollision { width, first, second } => format!(
                "keys {:?} and {:?} collide at the requested {width}-bit index width",
                key(first),
                key(second)
            ),
            other => other.to_string(),
        };
        CliError::Build(msg)
    }
}

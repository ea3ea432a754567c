use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use static_maps_core::{BuildOptions, IndexWidth, Salt, Xorshift64};
use time::OffsetDateTime;

use static_maps_cli::bench::{self, BenchConfig, Demo, MapImpl, Operation};
use static_maps_cli::emit::generate_source;
use static_maps_cli::{dump, keyset, CliError, KeysetFormat, ValueKind};

/// Build-time perfect-hash tables for fixed keysets: generate serialized
/// tables or standalone source, and benchmark the map variants.
#[derive(Parser)]
#[command(name = "static-maps", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest a keyset file, build the table, and emit a binary dump or a
    /// self-contained source file.
    Gen(GenArgs),
    /// Run the demo benchmarks and print a CSV report to stdout.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValueKindArg {
    Float64,
    Int64,
    Char,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum EmitKind {
    /// Binary table dump (little-endian, versioned magic).
    Blob,
    /// Standalone Rust source declaring the table and lookup function.
    Source,
}

#[derive(Args)]
struct GenArgs {
    /// Keyset file of (key, value) records.
    #[arg(long)]
    input: PathBuf,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Declared type of the value column.
    #[arg(long, value_enum, default_value = "text")]
    value_kind: ValueKindArg,
    /// Artifact to produce.
    #[arg(long, value_enum, default_value = "blob")]
    emit: EmitKind,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// Primary table load factor.
    #[arg(long, default_value_t = 1.0)]
    delta: f64,
    /// Markov slack factor (> 1).
    #[arg(long, default_value_t = 1.5)]
    tau: f64,
    /// Index width in bits (8, 16, 32, 64); inferred when omitted.
    #[arg(long, value_parser = parse_width)]
    width: Option<IndexWidth>,
    /// Fixed salt (decimal or 0x-hex); inferred when omitted.
    #[arg(long, value_parser = parse_u64_flexible)]
    salt: Option<u64>,
    /// Construction seed. Falls back to STATIC_MAPS_SEED, then to the
    /// current timestamp.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoArg {
    Elements,
    Codons,
    Stocks,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum ImplArg {
    Phf,
    Ordered,
    StdHash,
    StdOrdered,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    Lookup,
    Update,
    Construct,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutFormat {
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "all")]
    demo: DemoArg,
    /// Map implementation to measure.
    #[arg(long = "impl", value_enum, default_value = "all")]
    map_impl: ImplArg,
    #[arg(long, default_value_t = 1)]
    workload_seed: u64,
    /// Operation to time; defaults to each demo's natural one (lookups for
    /// elements/codons, updates for stocks).
    #[arg(long, value_enum)]
    op: Option<OpArg>,
    /// Lookup operations per lookup demo.
    #[arg(long, default_value_t = 10_000_000)]
    lookups: u64,
    /// Update operations for the stocks demo.
    #[arg(long, default_value_t = 1_000_000)]
    updates: u64,
    /// Report format on stdout.
    #[arg(long, value_enum, default_value = "csv")]
    out: OutFormat,
}

fn parse_width(raw: &str) -> Result<IndexWidth, String> {
    let bits: u32 = raw.parse().map_err(|_| format!("bad width {raw:?}"))?;
    IndexWidth::from_bits(bits).ok_or_else(|| format!("width must be 8, 16, 32 or 64, got {bits}"))
}

fn parse_u64_flexible(raw: &str) -> Result<u64, String> {
    let parsed = if let Some(hex) = raw.strip_prefix("0x").or_else(|| raw.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        raw.parse()
    };
    parsed.map_err(|_| format!("bad integer {raw:?}"))
}

/// Seed of last resort: hash of the current date and time rendered in the
/// build-timestamp-macro formats ("Mmm dd yyyy", "hh:mm:ss").
fn timestamp_seed() -> u64 {
    let now = OffsetDateTime::now_local().unwrap_or_else(|_| OffsetDateTime::now_utc());
    let month = match now.month() as u8 {
        1 => "Jan",
        2 => "Feb",
        3 => "Mar",
        4 => "Apr",
        5 => "May",
        6 => "Jun",
        7 => "Jul",
        8 => "Aug",
        9 => "Sep",
        10 => "Oct",
        11 => "Nov",
        _ => "Dec",
    };
    let date = format!("{month} {:>2} {}", now.day(), now.year());
    let time = format!("{:02}:{:02}:{:02}", now.hour(), now.minute(), now.second());
    Xorshift64::from_timestamp(&date, &time).state()
}

fn resolve_seed(cli_seed: Option<u64>) -> u64 {
    cli_seed
        .or_else(|| std::env::var("STATIC_MAPS_SEED").ok().and_then(|v| v.parse().ok()))
        .unwrap_or_else(timestamp_seed)
}

fn run_gen(args: GenArgs) -> Result<(), CliError> {
    let format = match args.format {
        Some(FormatArg::Tsv) => KeysetFormat::Tsv,
        Some(FormatArg::Csv) => KeysetFormat::Csv,
        Some(FormatArg::Json) => KeysetFormat::Json,
        None => KeysetFormat::from_path(&args.input),
    };
    let kind = match args.value_kind {
        ValueKindArg::Float64 => ValueKind::Float64,
        ValueKindArg::Int64 => ValueKind::Int64,
        ValueKindArg::Char => ValueKind::Char,
        ValueKindArg::Text => ValueKind::Text,
    };
    let kf = keyset::parse_keyset(&args.input, format, kind)?;

    let opts = BuildOptions {
        delta: Some(args.delta),
        tau: Some(args.tau),
        width: args.width,
        salt: args.salt.map(Salt::new),
        seed: Some(resolve_seed(args.seed)),
    };
    let table = dump::build_table(&kf, &opts)?;

    let out_path = args.out.display().to_string();
    let written = match args.emit {
        EmitKind::Blob => {
            let bytes = dump::write_table(&table);
            fs::write(&args.out, &bytes)
                .map_err(|source| CliError::Io { path: out_path.clone(), source })?;
            bytes.len()
        }
        EmitKind::Source => {
            let src = generate_source(&table);
            fs::write(&args.out, &src)
                .map_err(|source| CliError::Io { path: out_path.clone(), source })?;
            src.len()
        }
    };
    eprintln!(
        "wrote {} keys (width {} bits, salt {}) to {out_path} ({written} bytes)",
        table.len(),
        table.width(),
        if salt_enabled(&table) { "on" } else { "off" },
    );
    Ok(())
}

fn salt_enabled(table: &dump::LoadedTable) -> bool {
    use static_maps_core::AnyIndexedMap;
    macro_rules! probe {
        ($m:expr) => {
            match $m {
                AnyIndexedMap::W8(m) => m.index_table().salt().is_enabled(),
                AnyIndexedMap::W16(m) => m.index_table().salt().is_enabled(),
                AnyIndexedMap::W32(m) => m.index_table().salt().is_enabled(),
                AnyIndexedMap::W64(m) => m.index_table().salt().is_enabled(),
            }
        };
    }
    match table {
        dump::LoadedTable::Float64(m) => probe!(m),
        dump::LoadedTable::Int64(m) => probe!(m),
        dump::LoadedTable::Char(m) => probe!(m),
        dump::LoadedTable::Text(m) => probe!(m),
    }
}

fn run_bench(args: BenchArgs) -> Result<(), CliError> {
    let demos: Vec<Demo> = match args.demo {
        DemoArg::Elements => vec![Demo::Elements],
        DemoArg::Codons => vec![Demo::Codons],
        DemoArg::Stocks => vec![Demo::Stocks],
        DemoArg::All => Demo::ALL.to_vec(),
    };
    let impls: Vec<MapImpl> = match args.map_impl {
        ImplArg::Phf => vec![MapImpl::Phf],
        ImplArg::Ordered => vec![MapImpl::Ordered],
        ImplArg::StdHash => vec![MapImpl::StdHash],
        ImplArg::StdOrdered => vec![MapImpl::StdOrdered],
        ImplArg::All => MapImpl::ALL.to_vec(),
    };
    let operation = args.op.map(|op| match op {
        OpArg::Lookup => Operation::Lookup,
        OpArg::Update => Operation::Update,
        OpArg::Construct => Operation::Construct,
    });
    let cfg = BenchConfig {
        workload_seed: args.workload_seed,
        lookups: args.lookups,
        updates: args.updates,
        ..Default::default()
    };
    let rows = bench::run_matrix(&demos, &impls, operation, &cfg)?;
    let OutFormat::Csv = args.out;
    bench::write_csv(&rows, std::io::stdout().lock())
        .map_err(|source| CliError::Io { path: "<stdout>".into(), source })?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

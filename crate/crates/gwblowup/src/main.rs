//! Command-line front end: single-invariant queries, table generation,
//! relation verification, Cremona tools, and cache control.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 undefined invariant,
//! 3 verification failure, 4 internal consistency violation.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use gwblowup::cache;
use gwblowup::cremona::{cremona_transform, cremona_reduce, enumerativity, EnumReason, EnumStatus};
use gwblowup::engine::{Engine, EngineConfig, EngineError, MemoStore};
use gwblowup::lattice::{arithmetic_genus, expected_dim, CurveClass};
use gwblowup::relations::verify_relations;

#[derive(Parser)]
#[command(name = "gwblowup", about = "Exact rational-curve counts on blow-ups of the plane")]
struct Cli {
    /// Cache file to load before and save after the command.
    #[arg(long, global = true, value_name = "PATH")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Plain,
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Print N_{d,alpha} for one class.
    Invariant {
        d: i64,
        /// Comma-separated multiplicities; "" for none.
        alpha: String,
        /// Print 0 instead of failing when the expected dimension is negative.
        #[arg(long)]
        zero_if_undefined: bool,
        /// Also print the enumerativity status.
        #[arg(long)]
        status: bool,
        #[arg(long, value_enum, default_value = "plain")]
        format: OutputFormat,
    },
    /// List all invariants of degree d over multiplicities >= 2, omitting
    /// rows forced to vanish by the genus and pairwise-multiplicity rules.
    Table {
        d: i64,
        #[arg(long, value_enum, default_value = "plain")]
        format: OutputFormat,
    },
    /// Check the associativity relations over a range of classes.
    Verify {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        dmax: i64,
        #[arg(long)]
        nmax: i64,
    },
    /// Apply the Cremona transformation at the three largest multiplicities
    /// and print the transformed class and its fully reduced representative.
    Cremona {
        d: i64,
        /// Comma-separated multiplicities; "" for none.
        alpha: String,
        /// Also print both invariants and whether they agree.
        #[arg(long)]
        check: bool,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let code = match e {
            EngineError::UndefinedInvariant(_) => 2,
            EngineError::ConsistencyViolation(_) => 4,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<cache::CacheError> for Failure {
    fn from(e: cache::CacheError) -> Self {
        Failure::new(1, e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let store = match &cli.cache {
        Some(path) if path.exists() => cache::load_from_path(path)?,
        _ => MemoStore::new(),
    };
    let engine = Engine::with_store(store, EngineConfig::default());
    match &cli.command {
        Command::Invariant { d, alpha, zero_if_undefined, status, format } => {
            cmd_invariant(&engine, *d, alpha, *zero_if_undefined, *status, *format)?
        }
        Command::Table { d, format } => cmd_table(&engine, *d, *format)?,
        Command::Verify { r, dmax, nmax } => cmd_verify(&engine, *r, *dmax, *nmax)?,
        Command::Cremona { d, alpha, check } => cmd_cremona(&engine, *d, alpha, *check)?,
    }
    if let Some(path) = &cli.cache {
        cache::save_to_path(engine.store(), path)?;
    }
    Ok(())
}

fn parse_alpha(text: &str) -> Result<Vec<i64>, Failure> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|part| {
            part.trim()
                .parse::<i64>()
                .map_err(|e| Failure::new(1, format!("bad multiplicity {part:?}: {e}")))
        })
        .collect()
}

fn alpha_text(alpha: &[i64]) -> String {
    if alpha.is_empty() {
        "\"\"".to_string()
    } else {
        alpha.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
    }
}

fn status_words(s: EnumStatus) -> (&'static str, &'static str) {
    match s {
        EnumStatus::Enumerative(EnumReason::PositiveDim) => ("enumerative", "positive-dim"),
        EnumStatus::Enumerative(EnumReason::SmallMultiplicity) => {
            ("enumerative", "small-multiplicity")
        }
        EnumStatus::Enumerative(EnumReason::AtMostEight) => ("enumerative", "at-most-eight"),
        EnumStatus::Enumerative(EnumReason::CremonaOrbit) => ("enumerative", "cremona-orbit"),
        EnumStatus::Unknown => ("unknown", ""),
    }
}

fn classify(c: &CurveClass) -> Option<EnumStatus> {
    (c.d > 0 && c.alpha.iter().all(|&a| a >= 0) && expected_dim(c) >= 0)
        .then(|| enumerativity(c))
}

fn emit_row(c: &CurveClass, value: &str, status: Option<EnumStatus>, format: OutputFormat) {
    match format {
        OutputFormat::Plain => {
            println!("{} {} {}", c.d, alpha_text(&c.alpha), value);
            if let Some(s) = status {
                let (word, reason) = status_words(s);
                if reason.is_empty() {
                    println!("{word}");
                } else {
                    println!("{word} {reason}");
                }
            }
        }
        OutputFormat::Csv => {
            let alpha = c.alpha.iter().map(i64::to_string).collect::<Vec<_>>().join(";");
            match status {
                Some(s) => {
                    let (word, reason) = status_words(s);
                    println!("{},{},{},{},{}", c.d, alpha, value, word, reason);
                }
                None => println!("{},{},{}", c.d, alpha, value),
            }
        }
        OutputFormat::Jsonl => {
            let mut obj = json!({"d": c.d, "alpha": c.alpha, "N": value});
            if let Some(s) = status {
                let (word, reason) = status_words(s);
                obj["status"] = json!(word);
                if !reason.is_empty() {
                    obj["reason"] = json!(reason);
                }
            }
            println!("{obj}");
        }
    }
}

fn cmd_invariant(
    engine: &Engine,
    d: i64,
    alpha: &str,
    zero_if_undefined: bool,
    status: bool,
    format: OutputFormat,
) -> Result<(), Failure> {
    let c = CurveClass::new(d, parse_alpha(alpha)?);
    let value = match engine.invariant(&c) {
        Ok(v) => v,
        Err(EngineError::UndefinedInvariant(_)) if zero_if_undefined => 0.into(),
        Err(EngineError::UndefinedInvariant(_)) => {
            return Err(Failure::new(2, "undefined: expected dimension is negative"));
        }
        Err(e) => return Err(e.into()),
    };
    let st = status.then(|| classify(&c)).flatten();
    match format {
        OutputFormat::Plain => {
            println!("{value}");
            if let Some(s) = st {
                let (word, reason) = status_words(s);
                if reason.is_empty() {
                    println!("{word}");
                } else {
                    println!("{word} {reason}");
                }
            }
        }
        _ => emit_row(&c, &value.to_string(), st, format),
    }
    Ok(())
}

/// Descending multiplicity sequences with entries in 2..=d and |alpha| at most
/// 3d−1, in ascending lexicographic order.
fn table_rows(d: i64) -> Vec<Vec<i64>> {
    let mut rows = Vec::new();
    let mut current = Vec::new();
    fn extend(d: i64, budget: i64, max_entry: i64, current: &mut Vec<i64>, rows: &mut Vec<Vec<i64>>) {
        rows.push(current.clone());
        for a in (2..=max_entry.min(budget)).rev() {
            current.push(a);
            extend(d, budget - a, a, current, rows);
            current.pop();
        }
    }
    extend(d, 3 * d - 1, d, &mut current, &mut rows);
    rows.sort();
    rows
}

fn cmd_table(engine: &Engine, d: i64, format: OutputFormat) -> Result<(), Failure> {
    if d < 1 {
        return Err(Failure::new(1, "table degree must be at least 1"));
    }
    for alpha in table_rows(d) {
        let c = CurveClass::new(d, alpha);
        if arithmetic_genus(&c) < 0 {
            continue;
        }
        if c.r() >= 2 && c.alpha[0] + c.alpha[1] > d {
            continue;
        }
        let value = engine.invariant(&c)?;
        emit_row(&c, &value.to_string(), None, format);
    }
    Ok(())
}

fn cmd_verify(engine: &Engine, r: usize, dmax: i64, nmax: i64) -> Result<(), Failure> {
    if dmax < 1 || r > 16 {
        return Err(Failure::new(1, "verify needs dmax >= 1 and a small r"));
    }
    let report = verify_relations(r, dmax, nmax, engine)?;
    println!("{report}");
    if report.all_zero() {
        Ok(())
    } else {
        Err(Failure::new(3, format!("{} nonzero residuals", report.failures.len())))
    }
}

fn cmd_cremona(engine: &Engine, d: i64, alpha: &str, check: bool) -> Result<(), Failure> {
    let mut alpha = parse_alpha(alpha)?;
    let original = CurveClass::new(d, alpha.clone());
    while alpha.len() < 3 {
        alpha.push(0);
    }
    let padded = CurveClass::new(d, alpha);
    let mut idx: Vec<usize> = (0..padded.r()).collect();
    idx.sort_by_key(|&i| (std::cmp::Reverse(padded.alpha[i]), i));
    let triple = padded.alpha[idx[0]] + padded.alpha[idx[1]] + padded.alpha[idx[2]];
    let transformed = if triple > d {
        let mut t = cremona_transform(&padded, idx[0], idx[1], idx[2]);
        t.alpha.retain(|&a| a != 0);
        t.alpha.sort_unstable_by(|a, b| b.cmp(a));
        t
    } else {
        original.clone()
    };
    println!("{} {}", transformed.d, alpha_text(&transformed.alpha));
    let reduced = if original.d > 0 && original.alpha.iter().all(|&a| a >= 0) {
        cremona_reduce(&original)
    } else {
        transformed.clone()
    };
    println!("{} {}", reduced.d, alpha_text(&reduced.alpha));
    if check {
        let undefined = |e| match e {
            EngineError::UndefinedInvariant(_) => {
                Failure::new(2, "undefined: expected dimension is negative")
            }
            other => other.into(),
        };
        let before = engine.invariant(&original).map_err(undefined)?;
        let after = engine.invariant(&transformed).map_err(undefined)?;
        println!("{before}");
        println!("{after}");
        println!("{}", if before == after { "equal" } else { "NOT EQUAL" });
    }
    Ok(())
}

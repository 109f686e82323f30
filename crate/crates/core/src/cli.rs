//! The `sgx` command line. [`run`] is the whole program minus process exit,
//! so it can be driven from tests.
//!
//! Exit codes: 0 success (or Holds), 1 Fails or suite violations, 2 Unknown,
//! 64 usage error, 65 unreadable or invalid input, 70 domain error.

use std::ffi::OsString;
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::closedness::{
    audit_center_necessary, decide_c_closed_commutative, decide_ideally_closed_commutative,
    decide_projectively_closed_commutative, ClosednessReport,
};
use crate::corpus::{corpus_up_to, read_ndjson, run_invariant_suite, write_ndjson, DedupPolicy, Suite};
use crate::lazy::{parse_family, LazyError, LazySemigroup};
use crate::predicates::Subject;
use crate::quotients::{congruence_artifact, rees_artifact};
use crate::structure::StructureReport;
use crate::table::{ElementSet, FiniteSemigroup, TableError};
use crate::verdict::DEFAULT_BUDGET;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILS: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_DOMAIN: i32 = 70;

/// Environment variable capping the worker pool size.
pub const THREADS_ENV: &str = "SGX_THREADS";

#[derive(Parser, Debug)]
#[command(name = "sgx", version, about = "Analyze finite and lazily enumerated semigroups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a Cayley table is a semigroup.
    Validate { file: PathBuf },
    /// Idempotents, natural order, H-classes, centers, viability and root sets.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Rees quotient by an ideal, or quotient by the congruence generated by pairs.
    Quotient {
        file: PathBuf,
        /// Comma-separated element names; an empty list is the empty ideal.
        #[arg(long, conflicts_with = "pairs", required_unless_present = "pairs")]
        ideal: Option<String>,
        /// Comma-separated `a=b` name pairs.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Enumerate all semigroups of one order up to isomorphism, as NDJSON.
    Enumerate {
        #[arg(long)]
        order: usize,
        #[command(flatten)]
        corpus: CorpusOpts,
        /// Write to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an invariant suite over every semigroup of order up to N.
    Audit {
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[command(flatten)]
        corpus: CorpusOpts,
        /// Read the corpus from an NDJSON file instead of enumerating it.
        #[arg(long)]
        corpus_file: Option<PathBuf>,
    },
    /// Decide a closedness claim for a table or a built-in family.
    Decide {
        #[arg(value_enum)]
        claim: ClaimArg,
        #[arg(long, conflicts_with = "family", required_unless_present = "family")]
        file: Option<PathBuf>,
        /// naturals_plus, omega_min, infinite_null, bounded_boolean or quasicyclic:P
        #[arg(long)]
        family: Option<String>,
        /// Product evaluations allowed per predicate.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

#[derive(Args, Debug)]
struct CorpusOpts {
    #[arg(long, value_enum, default_value_t = DedupArg::Iso)]
    dedup: DedupArg,
    /// Permit order 5 (slow).
    #[arg(long)]
    allow_order_5: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DedupArg {
    Iso,
    IsoAnti,
}

impl From<DedupArg> for DedupPolicy {
    fn from(d: DedupArg) -> Self {
        match d {
            DedupArg::Iso => DedupPolicy::Iso,
            DedupArg::IsoAnti => DedupPolicy::IsoAnti,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Lemmas,
    Quotients,
    Closedness,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Lemmas => Suite::Lemmas,
            SuiteArg::Quotients => Suite::Quotients,
            SuiteArg::Closedness => Suite::Closedness,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClaimArg {
    CClosed,
    IdeallyClosed,
    ProjectivelyClosed,
    CenterNecessary,
}

/// An error with its exit code and a machine-readable kind.
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn data(kind: &'static str, message: impl ToString) -> Self {
        Failure {
            code: EXIT_DATA,
            kind,
            message: message.to_string(),
        }
    }

    fn domain(kind: &'static str, message: impl ToString) -> Self {
        Failure {
            code: EXIT_DOMAIN,
            kind,
            message: message.to_string(),
        }
    }

    fn usage(kind: &'static str, message: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind,
            message: message.to_string(),
        }
    }
}

fn table_error_kind(e: &TableError) -> &'static str {
    match e {
        TableError::EmptyCarrier => "EmptyCarrier",
        TableError::NonSquare { .. } => "NonSquare",
        TableError::IndexOutOfRange { .. } => "IndexOutOfRange",
        TableError::DuplicateName(_) => "DuplicateName",
        TableError::NotAssociative { .. } => "NotAssociative",
        TableError::EmptySeed => "EmptySeed",
        TableError::ElementOutOfRange { .. } => "ElementOutOfRange",
        TableError::UnknownName(_) => "UnknownName",
        TableError::NotClosed => "NotClosed",
        TableError::Parse(_) => "Parse",
    }
}

fn read_text(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::data("Io", format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<FiniteSemigroup, Failure> {
    FiniteSemigroup::parse_any(&read_text(path)?).map_err(|e| Failure::data(table_error_kind(&e), e))
}

fn load_family(spec: &str) -> Result<LazySemigroup, Failure> {
    parse_family(spec).map_err(|e| match e {
        LazyError::NotPrime(_) => Failure::domain("NotPrime", e),
        LazyError::UnknownFamily(_) => Failure::data("UnknownFamily", e),
        LazyError::BadParameter(_) => Failure::data("BadParameter", e),
        other => Failure::domain("FamilyConstruction", other),
    })
}

fn resolve(s: &FiniteSemigroup, name: &str) -> Result<usize, Failure> {
    s.index_of(name.trim()).map_err(|e| Failure::domain("UnknownName", e))
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').map(str::trim).filter(|t| !t.is_empty())
}

fn threads() -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::usage(
                "BadThreads",
                format!("{THREADS_ENV} must be a positive integer, got {v:?}"),
            )),
        },
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    let result = threads().and_then(|n| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = n {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| Failure::usage("ThreadPool", e))?;
        let mut buf = Vec::new();
        let code = pool.install(|| execute(cli.command, &mut buf))?;
        out.write_all(&buf).map_err(|e| Failure::data("Io", e))?;
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(
                err,
                "{}",
                json!({ "error": f.kind, "message": f.message, "exit": f.code })
            );
            f.code
        }
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| {
            if text.ends_with('\n') {
                Ok(())
            } else {
                out.write_all(b"\n")
            }
        })
        .map_err(|e| Failure::data("Io", e))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Validate { file } => {
            let text = read_text(&file)?;
            match FiniteSemigroup::parse_any(&text) {
                Ok(s) => {
                    emit(out, &format!("ok: semigroup of order {}", s.order()))?;
                    Ok(EXIT_OK)
                }
                Err(TableError::NotAssociative { i, j, k }) => Err(Failure::data(
                    "NotAssociative",
                    format!(
                        "not associative at ({i}, {j}, {k}): {}",
                        names_for_triple(&text, (i, j, k))
                    ),
                )),
                Err(e) => Err(Failure::data(table_error_kind(&e), e)),
            }
        }
        Command::Analyze { file, json } => {
            let s = load(&file)?;
            let report = StructureReport::compute(&s);
            if json {
                emit(out, &serde_json::to_string_pretty(&report).expect("reports serialize"))?;
            } else {
                emit(out, &report.to_text())?;
            }
            Ok(EXIT_OK)
        }
        Command::Quotient { file, ideal, pairs } => {
            let s = load(&file)?;
            let artifact = if let Some(ideal) = ideal {
                let members = split_list(&ideal)
                    .map(|n| resolve(&s, n))
                    .collect::<Result<Vec<_>, _>>()?;
                let set = ElementSet::from_indices(s.order(), members);
                rees_artifact(&s, &set).map_err(|e| Failure::domain("NotAnIdeal", e))?
            } else {
                let pairs = pairs.expect("clap requires --ideal or --pairs");
                let parsed = split_list(&pairs)
                    .map(|p| {
                        let (a, b) = p
                            .split_once('=')
                            .ok_or_else(|| Failure::usage("BadPair", format!("expected a=b, got {p:?}")))?;
                        Ok((resolve(&s, a)?, resolve(&s, b)?))
                    })
                    .collect::<Result<Vec<_>, Failure>>()?;
                congruence_artifact(&s, &parsed)
            };
            emit(
                out,
                &serde_json::to_string_pretty(&artifact).expect("artifacts serialize"),
            )?;
            Ok(EXIT_OK)
        }
        Command::Enumerate {
            order,
            corpus,
            out: path,
        } => {
            let entries = crate::corpus::enumerate_semigroups(order, corpus.dedup.into(), corpus.allow_order_5)
                .map_err(|e| Failure::domain("OrderTooLarge", e))?;
            let mut buf = Vec::new();
            write_ndjson(&entries, &mut buf).expect("writing to memory");
            match path {
                Some(p) => {
                    fs::write(&p, &buf).map_err(|e| Failure::data("Io", format!("{}: {e}", p.display())))?;
                    emit(
                        out,
                        &format!("wrote {} semigroups of order {order} to {}", entries.len(), p.display()),
                    )?;
                }
                None => out.write_all(&buf).map_err(|e| Failure::data("Io", e))?,
            }
            Ok(EXIT_OK)
        }
        Command::Audit {
            order,
            suite,
            corpus,
            corpus_file,
        } => {
            let tables: Vec<FiniteSemigroup> = match corpus_file {
                Some(p) => {
                    let f = fs::File::open(&p).map_err(|e| Failure::data("Io", format!("{}: {e}", p.display())))?;
                    read_ndjson(BufReader::new(f))
                        .map_err(|e| Failure::data("Parse", e))?
                        .into_iter()
                        .map(|e| e.semigroup)
                        .filter(|s| s.order() <= order)
                        .collect()
                }
                None => corpus_up_to(order, corpus.dedup.into(), corpus.allow_order_5)
                    .map_err(|e| Failure::domain("OrderTooLarge", e))?
                    .into_iter()
                    .map(|e| e.semigroup)
                    .collect(),
            };
            let report = run_invariant_suite(&tables, suite.into());
            emit(out, &report.to_json())?;
            Ok(if report.violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_FAILS
            })
        }
        Command::Decide {
            claim,
            file,
            family,
            budget,
        } => {
            let table;
            let lazy;
            let subject = match (&file, &family) {
                (Some(path), _) => {
                    table = load(path)?;
                    Subject::Finite(&table)
                }
                (None, Some(spec)) => {
                    lazy = load_family(spec)?;
                    Subject::Lazy(&lazy)
                }
                (None, None) => unreachable!("clap requires --file or --family"),
            };
            let report: ClosednessReport = match claim {
                ClaimArg::CClosed => decide_c_closed_commutative(subject, budget),
                ClaimArg::IdeallyClosed => decide_ideally_closed_commutative(subject, budget),
                ClaimArg::ProjectivelyClosed => decide_projectively_closed_commutative(subject, budget),
                ClaimArg::CenterNecessary => Ok(audit_center_necessary(subject, budget)),
            }
            .map_err(|e| Failure::domain("NotCommutative", e))?;
            emit(out, &report.to_json())?;
            Ok(report.verdict.status.exit_code())
        }
    }
}

/// Element names for a violating triple, read from the raw input.
fn names_for_triple(text: &str, (i, j, k): (usize, usize, usize)) -> String {
    let names: Option<Vec<String>> = serde_json::from_str::<crate::table::TableJson>(text)
        .ok()
        .map(|t| t.names);
    let name = |x: usize| {
        names
            .as_ref()
            .and_then(|n| n.get(x).cloned())
            .unwrap_or_else(|| x.to_string())
    };
    let (a, b, c) = (name(i), name(j), name(k));
    format!("({a}*{b})*{c} != {a}*({b}*{c})")
}

//! Command-line front end. `run` returns the exit code and the report.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::homotopy::{are_homotopic, graded_trace};
use crate::ring::RingSpec;
use crate::search::{build_paper_example, certify, search_violation, Mode, SearchConfig, DEFAULT_CEILING};
use crate::ses::{check_triple, Criterion};
use crate::text::{format_triple_file, parse_document, parse_matrix, Document};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
/// A violation over a reduced ring.
pub const EXIT_FALSIFIED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_NOINPUT: i32 = 66;

#[derive(Debug, Parser)]
#[command(
    name = "chaintrace",
    version,
    about = "Traces, homotopies and additivity checks for complexes over Z/m and Z/m[e]"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check every complex and map in a file, and the sequence if `j`, `q` are given.
    Validate { file: PathBuf },
    /// Graded trace of an endomorphism.
    Trace {
        file: PathBuf,
        #[arg(long)]
        endo: String,
    },
    /// A homotopy between two maps, or `none`.
    Homotopy {
        file: PathBuf,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Exactness of the sequence `j`, `q`.
    SesCheck { file: PathBuf },
    /// Trace ledger and square classification of the triple `u`, `v`, `w`.
    Additivity {
        file: PathBuf,
        #[arg(long, default_value = "squares")]
        criterion: Criterion,
    },
    /// The nilpotent counterexample over a given ring.
    PaperExample {
        #[arg(long)]
        ring: RingSpec,
    },
    /// Search for triples whose traces are not additive.
    Search {
        #[arg(long)]
        ring: RingSpec,
        #[arg(long, default_value = "randomized")]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        max_rank: usize,
        #[arg(long, default_value_t = 2)]
        max_window: usize,
        #[arg(long, default_value = "squares")]
        criterion: Criterion,
        #[arg(long, default_value_t = DEFAULT_CEILING)]
        ceiling: u128,
        /// Write a tab-separated line per instance.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Compare det(I + e u) with 1 + e Tr(u).
    Bridge {
        #[arg(long)]
        ring: RingSpec,
        #[arg(long)]
        matrix: String,
    },
}

/// Parse errors exit 65; anything else the library reports is a failed check.
fn code_of(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => EXIT_PARSE,
        _ => EXIT_FAIL,
    }
}

type Outcome = Result<(i32, String), (i32, String)>;

fn fail(e: Error) -> (i32, String) {
    (code_of(&e), format!("error: {e}\n"))
}

fn load(path: &PathBuf) -> Result<Document, (i32, String)> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_NOINPUT, format!("error: cannot read {}: {e}\n", path.display())))?;
    parse_document(&src).map_err(|e| (EXIT_PARSE, format!("error: {}: {e}\n", path.display())))
}

fn lookup<'a>(doc: &'a Document, name: &str) -> Result<&'a crate::complex::ChainMap, (i32, String)> {
    doc.map(name).ok_or_else(|| (EXIT_USAGE, format!("error: no map named `{name}`\n")))
}

pub fn run<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            return (code, e.render().to_string());
        }
    };
    match execute(cli.command) {
        Ok(r) | Err(r) => r,
    }
}

fn execute(command: Command) -> Outcome {
    match command {
        Command::Validate { file } => {
            let doc = load(&file)?;
            let mut out = String::new();
            let mut code = EXIT_OK;
            for (name, k) in &doc.complexes {
                let status = k.validate().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string());
                code = if status == "ok" { code } else { EXIT_FAIL };
                out.push_str(&format!("complex {name}: {status}\n"));
            }
            for m in &doc.maps {
                let status = m.map.validate().map(|_| "ok".to_string()).unwrap_or_else(|e| e.to_string());
                code = if status == "ok" { code } else { EXIT_FAIL };
                out.push_str(&format!("map {}: {status}\n", m.name));
            }
            if doc.map("j").is_some() && doc.map("q").is_some() {
                let status =
                    doc.ses().and_then(|s| s.validate()).map(|_| "exact".to_string()).unwrap_or_else(|e| e.to_string());
                code = if status == "exact" { code } else { EXIT_FAIL };
                out.push_str(&format!("sequence: {status}\n"));
            }
            Ok((code, out))
        }
        Command::Trace { file, endo } => {
            let doc = load(&file)?;
            let f = lookup(&doc, &endo)?;
            f.validate().map_err(fail)?;
            let tr = graded_trace(f).map_err(fail)?;
            Ok((EXIT_OK, format!("{tr}\n")))
        }
        Command::Homotopy { file, from, to } => {
            let doc = load(&file)?;
            let (f, g) = (lookup(&doc, &from)?, lookup(&doc, &to)?);
            f.validate().map_err(fail)?;
            g.validate().map_err(fail)?;
            let out = match are_homotopic(f, g).map_err(fail)? {
                None => "none\n".to_string(),
                Some(h) => {
                    let comps = h.components();
                    if comps.is_empty() {
                        "h = 0\n".to_string()
                    } else {
                        comps.iter().map(|(n, m)| format!("h^{n} = {m}\n")).collect()
                    }
                }
            };
            Ok((EXIT_OK, out))
        }
        Command::SesCheck { file } => {
            let doc = load(&file)?;
            let s = doc.ses().map_err(fail)?;
            s.validate().map_err(fail)?;
            let mut out = String::from("exact\n");
            let (lo, hi) = s.window();
            for n in lo..=hi {
                if let Some(sec) = s.find_section(n).map_err(fail)? {
                    if sec.rows() > 0 && sec.cols() > 0 {
                        out.push_str(&format!("s^{n} = {sec}\n"));
                    }
                }
            }
            Ok((EXIT_OK, out))
        }
        Command::Additivity { file, criterion } => {
            let doc = load(&file)?;
            let s = doc.ses().map_err(fail)?;
            s.validate().map_err(fail)?;
            let report = check_triple(&s, &doc.triple().map_err(fail)?).map_err(fail)?;
            let violation = report.is_violation(criterion);
            let verdict = if violation { "violation" } else { "additive or squares fail" };
            let code = if violation { EXIT_FAIL } else { EXIT_OK };
            Ok((code, format!("{report}{}: {verdict}\n", criterion.name())))
        }
        Command::PaperExample { ring } => {
            let (s, t, h) = build_paper_example(ring).map_err(fail)?;
            s.validate().map_err(fail)?;
            let report = check_triple(&s, &t).map_err(fail)?;
            let left = t.v.compose(&s.j).and_then(|vj| vj.sub(&s.j.compose(&t.u)?)).map_err(fail)?;
            let witness_ok = h.boundary().map_err(fail)? == left;
            let holds = witness_ok
                && report.right_square.label() == "strict"
                && report.left_square.commutes()
                && !report.defect.is_zero();
            let mut out = format_triple_file(&s, &t);
            out.push_str(&report.to_string());
            out.push_str(&format!(
                "stored witness h^1 = {}: {}\n",
                h.comp(1),
                if witness_ok { "verified" } else { "rejected" }
            ));
            Ok((if holds { EXIT_OK } else { EXIT_FAIL }, out))
        }
        Command::Search { ring, mode, trials, seed, max_rank, max_window, criterion, ceiling, log } => {
            let cfg =
                SearchConfig { ring, max_window, max_rank, trials, seed, mode, criterion, ceiling, log: log.is_some() };
            let outcome = search_violation(&cfg).map_err(fail)?;
            if let Some(path) = log {
                let body: String = outcome.log.iter().map(|r| format!("{r}\n")).collect();
                std::fs::write(&path, body)
                    .map_err(|e| (EXIT_NOINPUT, format!("error: cannot write {}: {e}\n", path.display())))?;
            }
            let mut out = outcome.to_string();
            if outcome.first_violation.is_some() {
                match certify(&outcome) {
                    Ok(_) => out.push_str("certified: yes\n"),
                    Err(e) => out.push_str(&format!("certified: no ({e})\n")),
                }
            }
            let code = match (outcome.violations_found, ring.is_reduced()) {
                (0, _) => EXIT_OK,
                (_, true) => EXIT_FALSIFIED,
                (_, false) => EXIT_FAIL,
            };
            Ok((code, out))
        }
        Command::Bridge { ring, matrix } => {
            let u = parse_matrix(ring, &matrix).map_err(fail)?;
            let (det, tr) = crate::det_line::det_trace_bridge(&u).map_err(fail)?;
            let equal = det == tr;
            let out =
                format!("det(I + e*u) = {det}\n1 + e*Tr(u) = {tr}\nequal: {}\n", if equal { "yes" } else { "no" });
            Ok((if equal { EXIT_OK } else { EXIT_FAIL }, out))
        }
    }
}

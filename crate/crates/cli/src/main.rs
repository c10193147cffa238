//! Command-line driver: builds buildings, runs verification targets and the
//! acceptance suite, and prints JSON or text reports.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use decomp_lab::buildings::{building, BuildingKind};
use decomp_lab::verify::{self, Outcome, Params, SuiteConfig, SuiteEntry, Target, VerifyError, SCHEMA};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "decomp-lab", version, about = "Exact checks on Tits buildings and Heisenberg-group decompositions")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Gl,
    Sp,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a Tits building and report its size and reduced homology.
    Building {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long, value_parser = parse_prime)]
        p: u32,
        #[arg(long, value_parser = parse_k)]
        k: usize,
        /// Include every homology group and the rank cross-check.
        #[arg(long)]
        homology: bool,
    },
    /// Run one verification target.
    Verify {
        #[arg(value_parser = parse_target)]
        target: Target,
        #[arg(long, value_parser = parse_prime, default_value_t = 2)]
        p: u32,
        #[arg(long, value_parser = parse_k, default_value_t = 2)]
        k: usize,
        /// Seed for randomized spot checks.
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the acceptance matrix.
    Suite {
        /// Include every entry, slow ones too.
        #[arg(long)]
        all: bool,
        /// Include the slow entries.
        #[arg(long)]
        slow: bool,
        #[arg(long)]
        max_p: Option<u32>,
        #[arg(long)]
        max_k: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_prime(s: &str) -> Result<u32, String> {
    let p: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if [2, 3, 5, 7].contains(&p) {
        Ok(p)
    } else {
        Err(format!("p must be one of 2, 3, 5, 7 (got {p})"))
    }
}

fn parse_k(s: &str) -> Result<usize, String> {
    let k: usize = s.parse().map_err(|e| format!("{e}"))?;
    if k >= 1 {
        Ok(k)
    } else {
        Err("k must be at least 1".to_string())
    }
}

fn parse_target(s: &str) -> Result<Target, String> {
    let t: Target = s.parse()?;
    if Target::VERIFY.contains(&t) {
        Ok(t)
    } else {
        let names: Vec<&str> = Target::VERIFY.iter().map(Target::name).collect();
        Err(format!("unknown target {s:?}; expected one of {}", names.join(", ")))
    }
}

/// A failed run: exit code and message for stderr.
struct Failure(u8, String);

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Guard(_) | VerifyError::Invalid(_) => Failure(2, e.to_string()),
            VerifyError::Internal(_) => Failure(1, e.to_string()),
        }
    }
}

struct Report {
    json: Value,
    text: String,
    passed: bool,
}

fn with_schema<T: Serialize>(value: &T) -> Value {
    let mut v = json!({ "schema": SCHEMA });
    if let (Value::Object(out), Ok(Value::Object(body))) = (&mut v, serde_json::to_value(value)) {
        out.extend(body);
    }
    v
}

fn cmd_building(kind: Kind, p: u32, k: usize, full: bool) -> Result<Report, Failure> {
    let kind = match kind {
        Kind::Gl => BuildingKind::Gl,
        Kind::Sp => BuildingKind::Sp,
    };
    let b = building(kind, p, k).map_err(VerifyError::from)?;
    let r = b.sphere_count_report().map_err(VerifyError::from)?;
    let text = if r.elements == 0 {
        "empty".to_string()
    } else {
        format!("{} elements, {}", r.elements, r.summary)
    };
    let mut json = json!({
        "schema": SCHEMA,
        "kind": kind,
        "p": p,
        "k": k,
        "elements": r.elements,
        "summary": text,
        "expected_rank_formula_matched": r.expected_rank_formula_matched,
    });
    if full {
        json["homology"] = serde_json::to_value(&r.homology).expect("serializable");
        json["degree"] = json!(r.degree);
        json["rank"] = json!(r.rank);
        json["euler_characteristic"] = json!(r.euler_characteristic);
    }
    let text = if full {
        format!(
            "{text}\ndegree {}, rank {}, reduced Euler characteristic {}, rank formula matched: {}",
            r.degree, r.rank, r.euler_characteristic, r.expected_rank_formula_matched
        )
    } else {
        text
    };
    Ok(Report { json, text, passed: true })
}

fn outcome_line(o: &Outcome) -> String {
    let k = o.k.map(|k| format!(", k={k}")).unwrap_or_default();
    let status = if o.passed { "PASS" } else { "FAIL" };
    let mut line = format!("{status} {} (p={}{k}): {}", o.target, o.p, o.summary);
    if let Some(f) = o.failures.first() {
        line.push_str(&format!("\n  first failure: {f}"));
    }
    line
}

fn cmd_verify(target: Target, params: Params) -> Result<Report, Failure> {
    let outcome = verify::run(target, params)?;
    Ok(Report { json: with_schema(&outcome), text: outcome_line(&outcome), passed: outcome.passed })
}

#[derive(Serialize)]
struct SuiteResult {
    criterion: u32,
    #[serde(flatten)]
    outcome: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    entry: Option<SuiteEntry>,
}

fn cmd_suite(config: SuiteConfig, seed: u64) -> Result<Report, Failure> {
    let entries = verify::suite_entries(config);
    let total = entries.len();
    let results: Vec<SuiteResult> = entries
        .par_iter()
        .map(|e| {
            let params = Params { p: e.p, k: e.k, seed };
            let r = verify::run(e.target, params);
            eprintln!("finished {} (p={}, k={})", e.target, e.p, e.k);
            match r {
                Ok(o) => SuiteResult { criterion: e.criterion, outcome: Some(o), error: None, entry: None },
                Err(err) => SuiteResult { criterion: e.criterion, outcome: None, error: Some(err.to_string()), entry: Some(*e) },
            }
        })
        .collect();
    let passed = results.iter().filter(|r| r.outcome.as_ref().is_some_and(|o| o.passed)).count();
    let mut text = Vec::new();
    for r in &results {
        match (&r.outcome, &r.error, &r.entry) {
            (Some(o), _, _) => text.push(format!("[{}] {}", r.criterion, outcome_line(o))),
            (None, Some(err), Some(e)) => {
                text.push(format!("[{}] FAIL {} (p={}, k={}): {err}", r.criterion, e.target, e.p, e.k))
            }
            _ => unreachable!("every result has an outcome or an error"),
        }
    }
    text.push(format!("{passed}/{total} passed"));
    let json = json!({
        "schema": SCHEMA,
        "entries": total,
        "passed": passed,
        "failed": total - passed,
        "results": results,
    });
    Ok(Report { json, text: text.join("\n"), passed: passed == total })
}

fn emit(cli: &Cli, report: &Report) -> std::io::Result<()> {
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report.json).expect("serializable"),
        Format::Text => report.text.clone(),
    };
    match &cli.output {
        Some(path) => std::fs::write(path, format!("{body}\n")),
        None => writeln!(std::io::stdout().lock(), "{body}"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Building { kind, p, k, homology } => cmd_building(*kind, *p, *k, *homology),
        Command::Verify { target, p, k, seed } => cmd_verify(*target, Params { p: *p, k: *k, seed: *seed }),
        Command::Suite { all, slow, max_p, max_k, seed } => {
            cmd_suite(SuiteConfig { slow: *all || *slow, max_p: *max_p, max_k: *max_k }, *seed)
        }
    };
    match result {
        Ok(report) => {
            if let Err(e) = emit(&cli, &report) {
                eprintln!("error: cannot write report: {e}");
                return ExitCode::from(2);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

//! `workbench` — exact computations with shifted Poisson and symplectic
//! structures on graded algebras.
//!
//! ```text
//! workbench <verb> --input <file> [--format json|text]
//!           [--truncation W] [--max-poly-weight K] [--seed S]
//! ```
//!
//! The verb may also come from the document's [command] section; a verb
//! given on the command line wins.  `WORKBENCH_BASIS_CAP` bounds the size
//! of any enumerated graded piece.
//!
//! Exit codes: 0 success, 1 definite mathematical negative, 2 input or
//! precondition error, 3 resource cap reached without a verdict.

use workbench_cli::{commands, doc, report};

use std::path::PathBuf;
use std::time::Instant;

use clap::Parser;
use workbench_core::basis::basis_cap_from_env;
use workbench_core::Error;

use report::Format;

#[derive(Parser)]
#[command(
    name = "workbench",
    version,
    about = "Exact workbench for shifted Poisson and symplectic structures"
)]
struct Cli {
    /// Verb to run (overrides the document's command section).
    verb: Option<String>,

    /// Path to the workbench document.
    #[arg(long)]
    input: PathBuf,

    /// Output format: json or text.
    #[arg(long, default_value = "json")]
    format: String,

    /// Weight truncation W (overrides the document).
    #[arg(long)]
    truncation: Option<u32>,

    /// Polynomial-weight cap K (overrides the document).
    #[arg(long)]
    max_poly_weight: Option<u32>,

    /// Seed for randomized verbs (consumed by key-identity).
    #[arg(long)]
    seed: Option<u64>,
}

fn exit_code_for(e: &Error) -> i32 {
    if e.is_resource_cap() {
        3
    } else {
        2
    }
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = Cli::parse();
    let started = Instant::now();
    let format = match cli.format.as_str() {
        "json" => Format::Json,
        "text" => Format::Text,
        other => {
            let r = report::error_report(
                cli.verb.as_deref(),
                "E_FORMAT",
                &format!("unknown format `{other}`; use `json` or `text`"),
            );
            print!("{}", report::render(&r, Format::Text));
            return 2;
        }
    };
    let emit_error = |verb: Option<&str>, code: &str, message: &str, exit: i32| -> i32 {
        let r = report::error_report(verb, code, message);
        let r = report::with_timing(r, started.elapsed().as_micros());
        print!("{}", report::render(&r, format));
        eprintln!("error[{code}]: {message}");
        exit
    };

    let text = match std::fs::read_to_string(&cli.input) {
        Ok(t) => t,
        Err(e) => {
            return emit_error(
                cli.verb.as_deref(),
                "E_IO",
                &format!("cannot read `{}`: {e}", cli.input.display()),
                2,
            );
        }
    };
    let parsed = match doc::parse_document(&text) {
        Ok(d) => d,
        Err(e) => {
            return emit_error(cli.verb.as_deref(), e.code(), &e.to_string(), exit_code_for(&e));
        }
    };
    let verb = match cli.verb.clone().or_else(|| parsed.verb.clone()) {
        Some(v) => v,
        None => {
            return emit_error(
                None,
                "E_NO_VERB",
                "no verb given on the command line or in the document's [command] section",
                2,
            );
        }
    };
    let inv = commands::Invocation {
        verb: verb.clone(),
        truncation: cli.truncation.unwrap_or(parsed.truncation),
        max_poly_weight: cli.max_poly_weight.unwrap_or(parsed.max_poly_weight),
        seed: cli.seed,
        cap: basis_cap_from_env(),
        doc: parsed,
    };
    match commands::run(&inv) {
        Ok(outcome) => {
            let r = report::with_timing(outcome.report, started.elapsed().as_micros());
            print!("{}", report::render(&r, format));
            outcome.exit
        }
        Err(e) => emit_error(Some(&verb), e.code(), &e.to_string(), exit_code_for(&e)),
    }
}

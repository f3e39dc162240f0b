//! `verify`: property suites.

use serde::Serialize;
use serde_json::{json, Value};

use ktrace_core::suites::{self, SuiteOptions, SuiteReport};

use crate::output::{csv_echo, csv_table, emit, fmt17, md_echo, md_table, to_json};
use crate::{CliError, CliResult, FormatArg, VerifyArgs, EXIT_OK, EXIT_VIOLATION};

#[derive(Debug, Serialize)]
pub struct VerifyDocument {
    pub config: Value,
    pub all_pass: bool,
    pub suites: Vec<SuiteReport>,
}

pub fn config_echo(args: &VerifyArgs) -> Value {
    json!({
        "command": "verify",
        "suite": args.suite,
        "instances": args.instances,
        "seed": args.seed,
        "n": args.n,
        "k": args.k,
        "tol": args.tol,
    })
}

pub fn execute(args: &VerifyArgs) -> CliResult<VerifyDocument> {
    let names: Vec<&str> = if args.suite == "all" {
        suites::suite_names()
    } else {
        args.suite.split(',').map(str::trim).collect()
    };
    let known = suites::suite_names();
    if let Some(bad) = names.iter().find(|n| !known.contains(n)) {
        return Err(CliError::Usage(format!(
            "unknown suite '{bad}' (known: all, {})",
            known.join(", ")
        )));
    }
    let opts = SuiteOptions {
        instances: args.instances,
        seed: args.seed,
        n: args.n,
        k: args.k,
        tol: args.tol,
    };
    let reports = names
        .iter()
        .map(|n| suites::run_suite(n, &opts))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| match e {
            ktrace_core::Error::Argument(m) => CliError::Usage(m),
            other => CliError::Core(other),
        })?;
    Ok(VerifyDocument {
        config: config_echo(args),
        all_pass: reports.iter().all(SuiteReport::all_pass),
        suites: reports,
    })
}

fn summary_rows(doc: &VerifyDocument) -> Vec<Vec<String>> {
    doc.suites
        .iter()
        .map(|s| {
            let (check, violation) = match &s.worst {
                Some(w) => (w.check.clone(), fmt17(w.violation)),
                None => (String::new(), String::new()),
            };
            vec![
                s.suite.clone(),
                s.instances.to_string(),
                s.passed.to_string(),
                s.failed.to_string(),
                check,
                violation,
                s.failing_instances.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
            ]
        })
        .collect()
}

const HEADER: [&str; 7] = [
    "suite",
    "instances",
    "passed",
    "failed",
    "worst_check",
    "worst_violation",
    "failing_instances",
];

pub fn render(doc: &VerifyDocument, format: FormatArg) -> String {
    match format {
        FormatArg::Json => to_json(doc),
        FormatArg::Csv => csv_echo(&doc.config) + &csv_table(&HEADER, &summary_rows(doc)),
        FormatArg::Md => {
            let verdict = if doc.all_pass { "all suites pass" } else { "violations found" };
            format!(
                "# Verification\n\n{}{}\n{verdict}\n",
                md_echo(&doc.config),
                md_table(&HEADER, &summary_rows(doc))
            )
        }
    }
}

pub fn run(args: &VerifyArgs) -> CliResult<i32> {
    let doc = execute(args)?;
    emit(args.out.as_deref(), &render(&doc, args.format))?;
    Ok(if doc.all_pass { EXIT_OK } else { EXIT_VIOLATION })
}

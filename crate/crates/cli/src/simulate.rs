//! `simulate`: Monte Carlo statistics.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ktrace_core::sim::{self, SampleStats};

use crate::bound::load_ensemble;
use crate::output::{csv_echo, csv_table, emit, ensure_dir, fmt17, md_echo, md_table, to_json, write_file};
use crate::{CliError, CliResult, FormatArg, SimulateArgs, EXIT_OK};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsDocument {
    pub config: Value,
    pub stats: SampleStats,
}

pub fn config_echo(args: &SimulateArgs) -> Value {
    json!({
        "command": "simulate",
        "input": args.input.display().to_string(),
        "samples": args.samples,
        "seed": args.seed,
        "k": args.k,
        "t": args.t,
    })
}

pub fn execute(args: &SimulateArgs) -> CliResult<StatsDocument> {
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let ensemble = load_ensemble(&args.input)?;
    let stats = sim::sample_sum(&ensemble, args.seed, args.samples, &args.k, &args.t)?;
    Ok(StatsDocument {
        config: config_echo(args),
        stats,
    })
}

fn table(doc: &StatsDocument) -> (Vec<String>, Vec<Vec<String>>) {
    let mut header: Vec<String> = ["k", "top_mean", "top_stderr", "bottom_mean", "bottom_stderr"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    for t in &doc.stats.thresholds {
        header.push(format!("top_tail@{}", fmt17(*t)));
        header.push(format!("bottom_tail@{}", fmt17(*t)));
    }
    let rows = doc
        .stats
        .per_k
        .iter()
        .map(|s| {
            let mut r = vec![
                s.k.to_string(),
                fmt17(s.top_mean),
                fmt17(s.top_stderr),
                fmt17(s.bottom_mean),
                fmt17(s.bottom_stderr),
            ];
            for (a, b) in s.top_tail.iter().zip(&s.bottom_tail) {
                r.push(fmt17(*a));
                r.push(fmt17(*b));
            }
            r
        })
        .collect();
    (header, rows)
}

pub fn render(doc: &StatsDocument, format: FormatArg) -> String {
    let (header, rows) = table(doc);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    match format {
        FormatArg::Json => to_json(doc),
        FormatArg::Csv => csv_echo(&doc.config) + &csv_table(&header, &rows),
        FormatArg::Md => format!("# Simulation\n\n{}{}", md_echo(&doc.config), md_table(&header, &rows)),
    }
}

pub fn run(args: &SimulateArgs) -> CliResult<i32> {
    let doc = execute(args)?;
    if let Some(dir) = &args.out {
        ensure_dir(dir)?;
        write_file(&dir.join("stats.json"), &to_json(&doc))?;
        write_file(&dir.join("stats.csv"), &render(&doc, FormatArg::Csv))?;
    }
    emit(None, &render(&doc, args.format))?;
    Ok(EXIT_OK)
}

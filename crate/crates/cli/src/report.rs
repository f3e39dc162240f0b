//! `report`: k-trace Chernoff bounds against subspace-argument bounds and
//! ground truth, plus the log-factor comparison table.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ktrace_core::bounds::{log_factor_table, LogFactorRow};

use crate::bound::BoundsDocument;
use crate::output::{csv_echo, csv_table, emit, fmt17, md_echo, md_table, opt17, read_json, to_json};
use crate::simulate::StatsDocument;
use crate::{CliError, CliResult, FormatArg, ReportArgs, EXIT_OK, EXIT_VIOLATION};

/// Largest dimension of the log-factor table.
pub const LOG_TABLE_MAX_N: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TruthSource {
    Exact,
    MonteCarlo,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub k: usize,
    pub truth_source: TruthSource,
    pub truth_top: Option<f64>,
    pub truth_top_stderr: Option<f64>,
    pub master_upper: f64,
    pub chernoff_upper: Option<f64>,
    pub subspace_upper: Option<f64>,
    pub truth_bottom: Option<f64>,
    pub truth_bottom_stderr: Option<f64>,
    pub master_lower: f64,
    pub chernoff_lower: Option<f64>,
    pub subspace_lower: Option<f64>,
    pub ln_binomial: f64,
    pub ln_falling: f64,
    /// Chernoff upper <= subspace upper and Chernoff lower >= subspace lower.
    pub ordered: Option<bool>,
    /// Every upper bound >= top truth and every lower bound <= bottom truth.
    pub dominates: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogFactorEntry {
    #[serde(flatten)]
    pub row: LogFactorRow,
    pub sharper: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportDocument {
    pub config: Value,
    pub rows: Vec<ReportRow>,
    pub log_factors: Vec<LogFactorEntry>,
    pub all_ok: bool,
}

fn build_row(b: &crate::bound::KBounds, stats: Option<&StatsDocument>) -> ReportRow {
    let bound = |r: &Option<ktrace_core::bounds::BoundReport>| r.as_ref().map(|r| r.bound);
    let mc = stats.and_then(|s| s.stats.per_k.iter().find(|x| x.k == b.k));
    let (source, top, top_se, bottom, bottom_se) = match (&b.exact, mc) {
        (Some(e), _) => (TruthSource::Exact, Some(e.top_mean), None, Some(e.bottom_mean), None),
        (None, Some(s)) => (
            TruthSource::MonteCarlo,
            Some(s.top_mean),
            Some(s.top_stderr),
            Some(s.bottom_mean),
            Some(s.bottom_stderr),
        ),
        (None, None) => (TruthSource::None, None, None, None, None),
    };
    let mut row = ReportRow {
        k: b.k,
        truth_source: source,
        truth_top: top,
        truth_top_stderr: top_se,
        master_upper: b.master_upper.bound,
        chernoff_upper: bound(&b.chernoff_upper),
        subspace_upper: bound(&b.subspace_upper),
        truth_bottom: bottom,
        truth_bottom_stderr: bottom_se,
        master_lower: b.master_lower.bound,
        chernoff_lower: bound(&b.chernoff_lower),
        subspace_lower: bound(&b.subspace_lower),
        ln_binomial: b.ln_binomial,
        ln_falling: b.ln_falling,
        ordered: None,
        dominates: None,
    };
    if let (Some(cu), Some(su), Some(cl), Some(sl)) = (row.chernoff_upper, row.subspace_upper, row.chernoff_lower, row.subspace_lower) {
        row.ordered = Some(cu <= su && cl >= sl);
    }
    if let (Some(t), Some(bt)) = (top, bottom) {
        let tol = |v: f64| crate::bound::SLACK_TOL * v.abs().max(1.0);
        let uppers = [Some(row.master_upper), row.chernoff_upper, row.subspace_upper];
        let lowers = [Some(row.master_lower), row.chernoff_lower, row.subspace_lower];
        let up_ok = uppers.iter().flatten().all(|&u| u >= t - tol(u.max(t)));
        let low_ok = lowers.iter().flatten().all(|&l| l <= bt + tol(l.max(bt)));
        row.dominates = Some(up_ok && low_ok);
    }
    row
}

pub fn build(bounds: &BoundsDocument, stats: Option<&StatsDocument>, config: Value) -> ReportDocument {
    let rows: Vec<ReportRow> = bounds.per_k.iter().map(|b| build_row(b, stats)).collect();
    let log_factors: Vec<LogFactorEntry> = log_factor_table(LOG_TABLE_MAX_N)
        .into_iter()
        .filter(|r| r.k >= 2)
        .map(|row| LogFactorEntry {
            sharper: row.ln_binomial < row.ln_falling,
            row,
        })
        .collect();
    let all_ok = rows.iter().all(|r| r.ordered != Some(false) && r.dominates != Some(false))
        && log_factors.iter().all(|r| r.sharper);
    ReportDocument {
        config,
        rows,
        log_factors,
        all_ok,
    }
}

const HEADER: [&str; 14] = [
    "k",
    "truth_source",
    "truth_top",
    "master_upper",
    "chernoff_upper",
    "subspace_upper",
    "truth_bottom",
    "master_lower",
    "chernoff_lower",
    "subspace_lower",
    "ln_binomial",
    "ln_falling",
    "ordered",
    "dominates",
];

const LOG_HEADER: [&str; 5] = ["n", "k", "ln_binomial", "ln_falling", "sharper"];

fn flag(v: Option<bool>) -> String {
    v.map(|b| b.to_string()).unwrap_or_default()
}

fn rows(doc: &ReportDocument) -> Vec<Vec<String>> {
    doc.rows
        .iter()
        .map(|r| {
            vec![
                r.k.to_string(),
                serde_json::to_value(r.truth_source).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                opt17(r.truth_top),
                fmt17(r.master_upper),
                opt17(r.chernoff_upper),
                opt17(r.subspace_upper),
                opt17(r.truth_bottom),
                fmt17(r.master_lower),
                opt17(r.chernoff_lower),
                opt17(r.subspace_lower),
                fmt17(r.ln_binomial),
                fmt17(r.ln_falling),
                flag(r.ordered),
                flag(r.dominates),
            ]
        })
        .collect()
}

fn log_rows(doc: &ReportDocument) -> Vec<Vec<String>> {
    doc.log_factors
        .iter()
        .map(|e| {
            vec![
                e.row.n.to_string(),
                e.row.k.to_string(),
                fmt17(e.row.ln_binomial),
                fmt17(e.row.ln_falling),
                e.sharper.to_string(),
            ]
        })
        .collect()
}

pub fn render(doc: &ReportDocument, format: FormatArg) -> String {
    match format {
        FormatArg::Json => to_json(doc),
        FormatArg::Csv => format!(
            "{}{}\n{}",
            csv_echo(&doc.config),
            csv_table(&HEADER, &rows(doc)),
            csv_table(&LOG_HEADER, &log_rows(doc))
        ),
        FormatArg::Md => format!(
            "# Bound comparison\n\n{}{}\n## Log factors\n\n{}",
            md_echo(&doc.config),
            md_table(&HEADER, &rows(doc)),
            md_table(&LOG_HEADER, &log_rows(doc))
        ),
    }
}

pub fn run(args: &ReportArgs) -> CliResult<i32> {
    let bounds_path = args.input.join("bounds.json");
    if !bounds_path.is_file() {
        return Err(CliError::Usage(format!(
            "{} not found; run `bound --out {}` first",
            bounds_path.display(),
            args.input.display()
        )));
    }
    let bounds: BoundsDocument = read_json(&bounds_path)?;
    let stats_path = args.input.join("stats.json");
    let stats: Option<StatsDocument> = if stats_path.is_file() { Some(read_json(&stats_path)?) } else { None };
    let config = json!({
        "command": "report",
        "input": args.input.display().to_string(),
        "bound_config": bounds.config,
        "simulate_config": stats.as_ref().map(|s| s.config.clone()),
    });
    let doc = build(&bounds, stats.as_ref(), config);
    emit(args.out.as_deref(), &render(&doc, args.format))?;
    Ok(if doc.all_ok { EXIT_OK } else { EXIT_VIOLATION })
}

//! `bound`: Laplace-transform bounds for an ensemble file.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use ktrace_core::bounds::{self, BoundReport, Branch, ThetaGrid, DEFAULT_THETA_MIN, DEFAULT_THETA_POINTS, THETA_SPAN};
use ktrace_core::ensemble::EnsembleSpec;
use ktrace_core::gap::Gap;
use ktrace_core::linalg::{ln_binomial, ln_falling_factorial};
use ktrace_core::sim::{self, ExactKStats, EXHAUSTIVE_LIMIT};

use crate::output::{csv_echo, csv_table, emit, ensure_dir, md_echo, md_table, opt17, read_text, to_json, write_file};
use crate::{BoundArgs, CliError, CliResult, FormatArg, EXIT_OK, EXIT_VIOLATION};

/// Slack below `-SLACK_TOL * scale` against exact ground truth is a violation.
pub const SLACK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KBounds {
    pub k: usize,
    /// `sum_{i<=k} λ_i(EY)` and `sum_{i<=k} λ_{n-i+1}(EY)`.
    pub mean_top: f64,
    pub mean_bottom: f64,
    /// Tail thresholds `μ_top + ε|μ_top|` and `μ_bottom - ε|μ_bottom|`.
    pub t_top: f64,
    pub t_bottom: f64,
    pub master_upper: BoundReport,
    pub master_lower: BoundReport,
    pub master_tail_upper: BoundReport,
    pub master_tail_lower: BoundReport,
    pub chernoff_upper: Option<BoundReport>,
    pub chernoff_lower: Option<BoundReport>,
    pub subspace_upper: Option<BoundReport>,
    pub subspace_lower: Option<BoundReport>,
    pub chernoff_tail_upper: Option<BoundReport>,
    pub chernoff_tail_lower: Option<BoundReport>,
    pub exact: Option<ExactKStats>,
    pub ln_binomial: f64,
    pub ln_falling: f64,
}

impl KBounds {
    pub fn reports(&self) -> Vec<(&'static str, &BoundReport)> {
        let mut out = vec![
            ("master_upper", &self.master_upper),
            ("master_lower", &self.master_lower),
            ("master_tail_upper", &self.master_tail_upper),
            ("master_tail_lower", &self.master_tail_lower),
        ];
        let optional = [
            ("chernoff_upper", &self.chernoff_upper),
            ("chernoff_lower", &self.chernoff_lower),
            ("subspace_upper", &self.subspace_upper),
            ("subspace_lower", &self.subspace_lower),
            ("chernoff_tail_upper", &self.chernoff_tail_upper),
            ("chernoff_tail_lower", &self.chernoff_tail_lower),
        ];
        out.extend(optional.into_iter().filter_map(|(n, r)| r.as_ref().map(|r| (n, r))));
        out
    }

    /// Reports whose slack against exact ground truth is below tolerance.
    pub fn violations(&self) -> Vec<&'static str> {
        self.reports()
            .into_iter()
            .filter(|(_, r)| r.slack_gap().is_some_and(|g: Gap| !g.nonnegative(SLACK_TOL)))
            .map(|(n, _)| n)
            .collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsDocument {
    pub config: Value,
    pub n: usize,
    pub m: usize,
    pub c: Option<f64>,
    pub epsilon: f64,
    pub joint_atoms: f64,
    pub exact_ground_truth: bool,
    pub per_k: Vec<KBounds>,
}

impl BoundsDocument {
    pub fn violations(&self) -> Vec<String> {
        self.per_k
            .iter()
            .flat_map(|b| b.violations().into_iter().map(move |n| format!("k={} {n}", b.k)))
            .collect()
    }
}

pub fn load_ensemble(path: &Path) -> CliResult<EnsembleSpec> {
    Ok(EnsembleSpec::from_json_str(&read_text(path)?)?)
}

pub fn master_grid(ensemble: &EnsembleSpec, args: &crate::GridArgs) -> CliResult<ThetaGrid> {
    let c_eff = ensemble.c_eff()?;
    let default_max = if c_eff > 0.0 { THETA_SPAN / c_eff } else { THETA_SPAN };
    let min = args.theta_min.unwrap_or(DEFAULT_THETA_MIN);
    let max = args.theta_max.unwrap_or(default_max.max(2.0 * min));
    let points = args.theta_points.unwrap_or(DEFAULT_THETA_POINTS);
    ThetaGrid::log_spaced(min, max, points).map_err(|e| CliError::Usage(e.to_string()))
}

pub fn compute(ensemble: &EnsembleSpec, ks: &[usize], grid: &ThetaGrid, epsilon: f64, config: Value) -> CliResult<BoundsDocument> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(CliError::Usage(format!("--epsilon {epsilon} outside [0, 1)")));
    }
    if ks.is_empty() || ks.iter().any(|&k| k == 0 || k > ensemble.n) {
        return Err(CliError::Usage(format!("--k values must lie in 1..={}", ensemble.n)));
    }
    let joint = ensemble.joint_support_size();
    let exhaustive = joint <= EXHAUSTIVE_LIMIT;
    let chernoff = ensemble.require_c().is_ok();
    let chernoff_grid = ThetaGrid::default_chernoff();
    let eig = ensemble.expectation().eigenvalues()?;
    let mut per_k = Vec::with_capacity(ks.len());
    for &k in ks {
        let (mean_top, mean_bottom) = sim::eigen_sums(&eig, k);
        let t_top = mean_top + epsilon * mean_top.abs();
        let t_bottom = mean_bottom - epsilon * mean_bottom.abs();
        let exact = if exhaustive {
            Some(sim::exhaustive_expectations(ensemble, &[k], &[t_top, t_bottom])?.per_k.remove(0))
        } else {
            None
        };
        let mut entry = KBounds {
            k,
            mean_top,
            mean_bottom,
            t_top,
            t_bottom,
            master_upper: bounds::master_expectation_bound(ensemble, k, grid, Branch::Max)?,
            master_lower: bounds::master_expectation_bound(ensemble, k, grid, Branch::Min)?,
            master_tail_upper: bounds::master_tail_bound(ensemble, k, t_top, grid, Branch::Max)?,
            master_tail_lower: bounds::master_tail_bound(ensemble, k, t_bottom, grid, Branch::Min)?,
            chernoff_upper: None,
            chernoff_lower: None,
            subspace_upper: None,
            subspace_lower: None,
            chernoff_tail_upper: None,
            chernoff_tail_lower: None,
            exact: None,
            ln_binomial: ln_binomial(ensemble.n, k),
            ln_falling: ln_falling_factorial(ensemble.n, k),
        };
        if chernoff {
            let (u, l) = bounds::chernoff_expectation_bounds(ensemble, k, &chernoff_grid)?;
            let (su, sl) = bounds::subspace_comparison_bounds(ensemble, k, &chernoff_grid)?;
            let (tu, tl) = bounds::chernoff_tail_bounds(ensemble, k, epsilon, &chernoff_grid)?;
            entry.chernoff_upper = Some(u);
            entry.chernoff_lower = Some(l);
            entry.subspace_upper = Some(su);
            entry.subspace_lower = Some(sl);
            entry.chernoff_tail_upper = Some(tu);
            entry.chernoff_tail_lower = Some(tl);
        }
        if let Some(ex) = exact {
            attach_truth(&mut entry, &ex);
            entry.exact = Some(ex);
        }
        per_k.push(entry);
    }
    Ok(BoundsDocument {
        config,
        n: ensemble.n,
        m: ensemble.m(),
        c: ensemble.c,
        epsilon,
        joint_atoms: joint as f64,
        exact_ground_truth: exhaustive,
        per_k,
    })
}

fn attach_truth(b: &mut KBounds, ex: &ExactKStats) {
    let set = |r: &mut BoundReport, v: f64| *r = r.clone().with_ground_truth(v);
    set(&mut b.master_upper, ex.top_mean);
    set(&mut b.master_lower, ex.bottom_mean);
    set(&mut b.master_tail_upper, ex.top_tail[0]);
    set(&mut b.master_tail_lower, ex.bottom_tail[1]);
    for (r, v) in [
        (&mut b.chernoff_upper, ex.top_mean),
        (&mut b.chernoff_lower, ex.bottom_mean),
        (&mut b.subspace_upper, ex.top_mean),
        (&mut b.subspace_lower, ex.bottom_mean),
        (&mut b.chernoff_tail_upper, ex.top_tail[0]),
        (&mut b.chernoff_tail_lower, ex.bottom_tail[1]),
    ] {
        if let Some(r) = r {
            set(r, v);
        }
    }
}

pub fn config_echo(args: &BoundArgs, grid: &ThetaGrid) -> Value {
    json!({
        "command": "bound",
        "input": args.input.display().to_string(),
        "k": args.k,
        "epsilon": args.epsilon,
        "theta_min": grid.points.first(),
        "theta_max": grid.points.last(),
        "theta_points": grid.points.len(),
        "chernoff_theta_grid": "dimensionless, 64 log-spaced points in [1e-3, 50]",
    })
}

const HEADER: [&str; 12] = [
    "k",
    "mean_top",
    "exact_top",
    "master_upper",
    "chernoff_upper",
    "subspace_upper",
    "mean_bottom",
    "exact_bottom",
    "master_lower",
    "chernoff_lower",
    "subspace_lower",
    "chernoff_tail_upper",
];

fn rows(doc: &BoundsDocument) -> Vec<Vec<String>> {
    let b = |r: &Option<BoundReport>| opt17(r.as_ref().map(|r| r.bound));
    doc.per_k
        .iter()
        .map(|x| {
            vec![
                x.k.to_string(),
                opt17(Some(x.mean_top)),
                opt17(x.exact.as_ref().map(|e| e.top_mean)),
                opt17(Some(x.master_upper.bound)),
                b(&x.chernoff_upper),
                b(&x.subspace_upper),
                opt17(Some(x.mean_bottom)),
                opt17(x.exact.as_ref().map(|e| e.bottom_mean)),
                opt17(Some(x.master_lower.bound)),
                b(&x.chernoff_lower),
                b(&x.subspace_lower),
                b(&x.chernoff_tail_upper),
            ]
        })
        .collect()
}

pub fn render(doc: &BoundsDocument, format: FormatArg) -> String {
    match format {
        FormatArg::Json => to_json(doc),
        FormatArg::Csv => csv_echo(&doc.config) + &csv_table(&HEADER, &rows(doc)),
        FormatArg::Md => format!("# Bounds\n\n{}{}", md_echo(&doc.config), md_table(&HEADER, &rows(doc))),
    }
}

/// Writes `bounds.json`, one `bound_k{k}.json` per order, and a curve CSV
/// per report.
pub fn write_outputs(dir: &Path, doc: &BoundsDocument) -> CliResult<()> {
    ensure_dir(dir)?;
    write_file(&dir.join("bounds.json"), &to_json(doc))?;
    let echo = csv_echo(&doc.config);
    for b in &doc.per_k {
        let single = json!({"config": doc.config, "bounds": b});
        write_file(&dir.join(format!("bound_k{}.json", b.k)), &to_json(&single))?;
        for (name, r) in b.reports() {
            write_file(&dir.join(format!("curve_k{}_{name}.csv", b.k)), &(echo.clone() + &r.curve_csv()))?;
        }
    }
    Ok(())
}

pub fn run(args: &BoundArgs) -> CliResult<i32> {
    let ensemble = load_ensemble(&args.input)?;
    let grid = master_grid(&ensemble, &args.grid)?;
    let doc = compute(&ensemble, &args.k, &grid, args.epsilon, config_echo(args, &grid))?;
    if let Some(dir) = &args.out {
        write_outputs(dir, &doc)?;
    }
    emit(None, &render(&doc, args.format))?;
    let bad = doc.violations();
    if bad.is_empty() {
        Ok(EXIT_OK)
    } else {
        eprintln!("bound violations against exact ground truth: {}", bad.join(", "));
        Ok(EXIT_VIOLATION)
    }
}

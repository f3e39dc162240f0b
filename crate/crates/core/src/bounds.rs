//! Laplace-transform bounds on sums of the k largest / smallest eigenvalues
//! of `Y = sum_i X^(i)`: master bounds from exact matrix MGFs, Chernoff
//! bounds for uniformly bounded PSD summands, and the subspace-argument
//! comparison bounds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, Summand};
use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::hermitian::{HermitianMatrix, SpectralDecomposition};
use crate::ktrace::log_ktrace_exp;
use crate::linalg::{ln_binomial, ln_falling_factorial};
use crate::sim::eigen_sums;

pub const DEFAULT_THETA_MIN: f64 = 1e-3;
/// Default master-bound grid ends at `THETA_SPAN / c_eff`.
pub const THETA_SPAN: f64 = 50.0;
pub const DEFAULT_THETA_POINTS: usize = 64;
pub const GOLDEN_ITERATIONS: usize = 40;
/// Largest exponent `θλ` evaluated.
pub const EXPONENT_LIMIT: f64 = 700.0;
/// Largest eigenvalue ratio of a matrix MGF whose logarithm is trusted.
pub const MGF_CONDITION_LIMIT: f64 = 1e10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    pub points: Vec<f64>,
}

impl ThetaGrid {
    pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Self> {
        if !(min > 0.0 && max > min && max.is_finite()) || count < 2 {
            return Err(Error::arg(format!(
                "θ grid needs 0 < min < max and at least 2 points (got [{min}, {max}] x {count})"
            )));
        }
        let (lmin, lmax) = (min.ln(), max.ln());
        let points = (0..count)
            .map(|i| (lmin + (lmax - lmin) * i as f64 / (count - 1) as f64).exp())
            .collect();
        Ok(ThetaGrid { points })
    }

    pub fn from_points(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::arg("θ grid points must be positive and finite"));
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        Ok(ThetaGrid { points })
    }

    /// `[1e-3, 50 / c_eff]` with 64 points.
    pub fn default_master(ensemble: &EnsembleSpec) -> Result<Self> {
        let c_eff = ensemble.c_eff()?;
        let max = if c_eff > 0.0 { THETA_SPAN / c_eff } else { THETA_SPAN };
        Self::log_spaced(DEFAULT_THETA_MIN, max.max(2.0 * DEFAULT_THETA_MIN), DEFAULT_THETA_POINTS)
    }

    /// Dimensionless grid `[1e-3, 50]` for the Chernoff expressions.
    pub fn default_chernoff() -> Self {
        Self::log_spaced(DEFAULT_THETA_MIN, THETA_SPAN, DEFAULT_THETA_POINTS).expect("valid default grid")
    }
}

/// Which eigenvalue sum is bounded: the `k` largest (θ > 0) or the `k`
/// smallest (θ < 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Max,
    Min,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    MasterExpectation,
    MasterTail,
    ChernoffExpectation,
    ChernoffTail,
    SubspaceExpectation,
    TroppExpectation,
    TroppTail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundQuery {
    pub k: usize,
    pub branch: Branch,
    pub theta_grid: Vec<f64>,
    pub t: Option<f64>,
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub theta: f64,
    /// NaN (serialized as `null`) where the point is invalid.
    #[serde(deserialize_with = "nan_from_null")]
    pub value: f64,
    pub valid: bool,
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub side: Side,
    pub query: BoundQuery,
    pub curve: Vec<CurvePoint>,
    pub best_theta: f64,
    /// Reported bound (probabilities clipped at 1).
    pub bound: f64,
    pub raw_bound: f64,
    /// Best curve value before refinement.
    pub grid_bound: f64,
    pub ground_truth: Option<f64>,
    /// `bound - truth` for upper bounds, `truth - bound` for lower bounds.
    pub slack: Option<f64>,
}

impl BoundReport {
    pub fn with_ground_truth(mut self, truth: f64) -> Self {
        self.ground_truth = Some(truth);
        self.slack = Some(match self.side {
            Side::Upper => self.bound - truth,
            Side::Lower => truth - self.bound,
        });
        self
    }

    /// Slack as a [`Gap`] (`bound` against `truth`, oriented so that a
    /// valid bound has a nonnegative gap).
    pub fn slack_gap(&self) -> Option<Gap> {
        let truth = self.ground_truth?;
        Some(match self.side {
            Side::Upper => Gap::signed(self.bound, truth),
            Side::Lower => Gap::signed(truth, self.bound),
        })
    }

    /// Curve as CSV with columns `theta,bound_value,valid`, 17 significant digits.
    pub fn curve_csv(&self) -> String {
        let mut out = String::from("theta,bound_value,valid\n");
        for p in &self.curve {
            out.push_str(&format!("{},{},{}\n", fmt17(p.theta), fmt17(p.value), p.valid));
        }
        out
    }
}

/// Round-trip formatting with 17 significant digits.
pub fn fmt17(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

/// Atom spectra of an ensemble, decomposed once.
pub struct PreparedEnsemble {
    n: usize,
    atoms: Vec<Vec<(f64, SpectralDecomposition)>>,
    /// Deterministic summands, whose log-MGF is exactly `θX`.
    fixed: Vec<Option<HermitianMatrix>>,
}

impl PreparedEnsemble {
    pub fn new(ensemble: &EnsembleSpec) -> Result<Self> {
        let atoms = ensemble
            .summands
            .iter()
            .map(|s| {
                s.atoms
                    .iter()
                    .filter(|a| a.p > 0.0)
                    .map(|a| Ok((a.p, a.matrix.decompose()?)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let fixed = ensemble
            .summands
            .iter()
            .map(|s| s.is_deterministic().then(|| s.mean()))
            .collect();
        Ok(PreparedEnsemble {
            n: ensemble.n,
            atoms,
            fixed,
        })
    }

    fn mgf(&self, summand: usize, theta: f64) -> Result<HermitianMatrix> {
        mgf_from(&self.atoms[summand], self.n, theta)
    }

    /// `sum_i ln E exp(θ X^(i))`.
    pub fn cgf_sum(&self, theta: f64) -> Result<HermitianMatrix> {
        let mut acc = HermitianMatrix::zeros(self.n);
        for i in 0..self.atoms.len() {
            let term = match &self.fixed[i] {
                Some(x) => x.scale(theta),
                None => checked_ln(&self.mgf(i, theta)?)?,
            };
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// `ln trace_k[exp(sum_i ln E exp(θ X^(i)))]`.
    pub fn log_laplace(&self, theta: f64, k: usize) -> Result<f64> {
        Ok(log_ktrace_exp(&self.cgf_sum(theta)?.eigenvalues()?, k))
    }
}

fn mgf_from(atoms: &[(f64, SpectralDecomposition)], n: usize, theta: f64) -> Result<HermitianMatrix> {
    let mut acc = HermitianMatrix::zeros(n);
    for (p, d) in atoms {
        let worst = d.eigenvalues.iter().map(|l| theta * l).fold(f64::NEG_INFINITY, f64::max);
        if worst > EXPONENT_LIMIT {
            return Err(Error::Overflow(format!("exponent θλ = {worst:e} exceeds {EXPONENT_LIMIT}")));
        }
        acc = acc.lincomb(1.0, &d.apply(|l| (theta * l).exp()), *p);
    }
    Ok(acc)
}

fn checked_ln(m: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = m.decompose()?;
    let (hi, lo) = (d.lambda_max(), d.lambda_min());
    if !(lo > 0.0) || hi / lo > MGF_CONDITION_LIMIT {
        return Err(Error::Overflow(format!(
            "matrix MGF condition {:e} exceeds {MGF_CONDITION_LIMIT:e}",
            hi / lo
        )));
    }
    Ok(d.apply(f64::ln))
}

/// `E exp(θX) = sum_j p_j exp(θ X_j)`.
pub fn matrix_mgf(summand: &Summand, theta: f64) -> Result<HermitianMatrix> {
    let n = summand.atoms[0].matrix.dim();
    let atoms = summand
        .atoms
        .iter()
        .filter(|a| a.p > 0.0)
        .map(|a| Ok((a.p, a.matrix.decompose()?)))
        .collect::<Result<Vec<_>>>()?;
    mgf_from(&atoms, n, theta)
}

/// `sum_i ln E exp(θ X^(i))`.
pub fn cgf_sum(ensemble: &EnsembleSpec, theta: f64) -> Result<HermitianMatrix> {
    PreparedEnsemble::new(ensemble)?.cgf_sum(theta)
}

fn check_k(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::arg(format!("order k={k} outside 1..={n}")));
    }
    Ok(())
}

/// Grid evaluation followed by golden-section refinement around the best
/// grid point. `f` returns `None` where the expression is not evaluable.
/// Returns `(curve, best θ, best value, best grid value)`.
fn optimize(
    grid: &[f64],
    minimize: bool,
    f: impl Fn(f64) -> Option<f64> + Sync,
) -> Result<(Vec<CurvePoint>, f64, f64, f64)> {
    let curve: Vec<CurvePoint> = grid
        .par_iter()
        .map(|&theta| match f(theta) {
            Some(v) if v.is_finite() => CurvePoint { theta, value: v, valid: true },
            _ => CurvePoint {
                theta,
                value: f64::NAN,
                valid: false,
            },
        })
        .collect();
    let better = |a: f64, b: f64| if minimize { a < b } else { a > b };
    let mut best: Option<usize> = None;
    for (i, p) in curve.iter().enumerate() {
        if p.valid && best.is_none_or(|b| better(p.value, curve[b].value)) {
            best = Some(i);
        }
    }
    let Some(bi) = best else {
        return Err(Error::Overflow("no θ grid point is numerically evaluable".into()));
    };
    let grid_value = curve[bi].value;
    let lo = curve[bi.saturating_sub(1)].theta;
    let hi = curve[(bi + 1).min(curve.len() - 1)].theta;
    let score = |t: f64| match f(t) {
        Some(v) if v.is_finite() => {
            if minimize {
                v
            } else {
                -v
            }
        }
        _ => f64::INFINITY,
    };
    let (mut a, mut b) = (lo, hi);
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (score(x1), score(x2));
    for _ in 0..GOLDEN_ITERATIONS {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = score(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = score(x2);
        }
    }
    let (mut best_theta, mut best_value) = (curve[bi].theta, grid_value);
    for (x, fx) in [(x1, f1), (x2, f2)] {
        if fx.is_finite() {
            let v = if minimize { fx } else { -fx };
            if better(v, best_value) {
                best_theta = x;
                best_value = v;
            }
        }
    }
    Ok((curve, best_theta, best_value, grid_value))
}

fn signed(branch: Branch, theta: f64) -> f64 {
    match branch {
        Branch::Max => theta,
        Branch::Min => -theta,
    }
}

fn sign_curve(curve: &mut [CurvePoint], branch: Branch) {
    for p in curve {
        p.theta = signed(branch, p.theta);
    }
}

/// Max branch: `inf_{θ>0} (1/θ) ln trace_k[exp(sum ln E e^{θX})]`, an upper
/// bound on `E sum_{i<=k} λ_i(Y)`. Min branch: the supremum over `θ < 0`,
/// a lower bound on `E sum_{i<=k} λ_{n-i+1}(Y)`.
pub fn master_expectation_bound(ensemble: &EnsembleSpec, k: usize, grid: &ThetaGrid, branch: Branch) -> Result<BoundReport> {
    check_k(ensemble.n, k)?;
    let prep = PreparedEnsemble::new(ensemble)?;
    let eval = |g: f64| {
        let theta = signed(branch, g);
        prep.log_laplace(theta, k).ok().map(|l| l / theta)
    };
    let minimize = branch == Branch::Max;
    let (mut curve, g, bound, grid_bound) = optimize(&grid.points, minimize, eval)?;
    sign_curve(&mut curve, branch);
    Ok(BoundReport {
        kind: BoundKind::MasterExpectation,
        side: if minimize { Side::Upper } else { Side::Lower },
        query: BoundQuery {
            k,
            branch,
            theta_grid: grid.points.clone(),
            t: None,
            epsilon: None,
        },
        curve,
        best_theta: signed(branch, g),
        bound,
        raw_bound: bound,
        grid_bound,
        ground_truth: None,
        slack: None,
    })
}

/// `inf_θ e^{-θt/k} trace_k[exp(sum ln E e^{θX})]^{1/k}` over `θ > 0` (max
/// branch, bounds `P{top-k sum >= t}`) or `θ < 0` (min branch, bounds
/// `P{bottom-k sum <= t}`). Curve values are the raw bound.
pub fn master_tail_bound(ensemble: &EnsembleSpec, k: usize, t: f64, grid: &ThetaGrid, branch: Branch) -> Result<BoundReport> {
    check_k(ensemble.n, k)?;
    if t.is_nan() {
        return Err(Error::arg("threshold t is NaN"));
    }
    let prep = PreparedEnsemble::new(ensemble)?;
    let kf = k as f64;
    let eval = |g: f64| {
        let theta = signed(branch, g);
        prep.log_laplace(theta, k).ok().map(|l| (-theta * t + l) / kf)
    };
    let (mut curve, g, log_bound, log_grid) = optimize(&grid.points, true, eval)?;
    for p in curve.iter_mut() {
        p.value = p.value.exp();
    }
    sign_curve(&mut curve, branch);
    let raw = log_bound.exp();
    Ok(BoundReport {
        kind: BoundKind::MasterTail,
        side: Side::Upper,
        query: BoundQuery {
            k,
            branch,
            theta_grid: grid.points.clone(),
            t: Some(t),
            epsilon: None,
        },
        curve,
        best_theta: signed(branch, g),
        bound: raw.min(1.0),
        raw_bound: raw,
        grid_bound: log_grid.exp(),
        ground_truth: None,
        slack: None,
    })
}

/// `(e^{θc} - 1) / c`, with the `c -> 0` limit `θ`.
fn g_theta(theta: f64, c: f64) -> f64 {
    if c == 0.0 {
        theta
    } else {
        (theta * c).exp_m1() / c
    }
}

/// Smallest eigenvalue of `g(θ) E X - ln E exp(θX)`, nonnegative for atoms
/// with spectra in `[0, c]`.
pub fn mgf_dominance_check(summand: &Summand, theta: f64, c: f64) -> Result<Gap> {
    let tol = crate::ensemble::SPECTRAL_BOUND_TOL * c.max(1.0);
    for atom in &summand.atoms {
        let d = atom.matrix.decompose()?;
        if d.lambda_min() < -tol {
            return Err(Error::domain("atom is not PSD", d.lambda_min()));
        }
        if d.lambda_max() > c + tol {
            return Err(Error::domain(format!("atom exceeds the spectral bound c={c}"), d.lambda_max()));
        }
    }
    let lhs = summand.mean().scale(g_theta(theta, c));
    let rhs = checked_ln(&matrix_mgf(summand, theta)?)?;
    let diff = &lhs - &rhs;
    let lmin = diff.decompose()?.lambda_min();
    Ok(Gap::norm(
        lhs.decompose()?.spectral_radius(),
        rhs.decompose()?.spectral_radius(),
        lmin,
    ))
}

fn mean_sums(ensemble: &EnsembleSpec, k: usize) -> Result<(f64, f64)> {
    Ok(eigen_sums(&ensemble.expectation().eigenvalues()?, k))
}

fn expectation_pair(
    mu_top: f64,
    mu_bottom: f64,
    c: f64,
    log_factor: f64,
    k: usize,
    grid: &ThetaGrid,
    kind: BoundKind,
) -> Result<(BoundReport, BoundReport)> {
    let upper_f = |th: f64| {
        if th > EXPONENT_LIMIT {
            return None;
        }
        Some(th.exp_m1() / th * mu_top + c / th * log_factor)
    };
    let lower_f = |th: f64| Some(-(-th).exp_m1() / th * mu_bottom - c / th * log_factor);
    let report = |branch, side, minimize: bool, f: &(dyn Fn(f64) -> Option<f64> + Sync)| -> Result<BoundReport> {
        let (curve, th, bound, grid_bound) = optimize(&grid.points, minimize, f)?;
        Ok(BoundReport {
            kind,
            side,
            query: BoundQuery {
                k,
                branch,
                theta_grid: grid.points.clone(),
                t: None,
                epsilon: None,
            },
            curve,
            best_theta: th,
            bound,
            raw_bound: bound,
            grid_bound,
            ground_truth: None,
            slack: None,
        })
    };
    Ok((
        report(Branch::Max, Side::Upper, true, &upper_f)?,
        report(Branch::Min, Side::Lower, false, &lower_f)?,
    ))
}

/// `inf_{θ>0} ((e^θ-1)/θ) μ_top + (c/θ) ln C(n,k)` and
/// `sup_{θ>0} ((1-e^{-θ})/θ) μ_bottom - (c/θ) ln C(n,k)` with `μ` the top-k
/// and bottom-k eigenvalue sums of the exact `E Y`; `θ` is dimensionless.
pub fn chernoff_expectation_bounds(ensemble: &EnsembleSpec, k: usize, grid: &ThetaGrid) -> Result<(BoundReport, BoundReport)> {
    check_k(ensemble.n, k)?;
    let c = ensemble.require_c()?;
    let (top, bottom) = mean_sums(ensemble, k)?;
    expectation_pair(top, bottom, c, ln_binomial(ensemble.n, k), k, grid, BoundKind::ChernoffExpectation)
}

/// Same expressions with the factor `ln prod_{i<=k} (n-i+1)`.
pub fn subspace_comparison_bounds(ensemble: &EnsembleSpec, k: usize, grid: &ThetaGrid) -> Result<(BoundReport, BoundReport)> {
    check_k(ensemble.n, k)?;
    let c = ensemble.require_c()?;
    let (top, bottom) = mean_sums(ensemble, k)?;
    expectation_pair(
        top,
        bottom,
        c,
        ln_falling_factorial(ensemble.n, k),
        k,
        grid,
        BoundKind::SubspaceExpectation,
    )
}

/// Largest-eigenvalue Chernoff expectation bounds, written directly in terms
/// of `λ_max(EY)`, `λ_min(EY)` and `ln n`.
pub fn tropp_expectation_bounds(ensemble: &EnsembleSpec, grid: &ThetaGrid) -> Result<(BoundReport, BoundReport)> {
    let c = ensemble.require_c()?;
    let d = ensemble.expectation().decompose()?;
    let ln_n = (ensemble.n as f64).ln();
    expectation_pair(d.lambda_max(), d.lambda_min(), c, ln_n, 1, grid, BoundKind::TroppExpectation)
}

fn tail_closed_forms(mu_top: f64, mu_bottom: f64, c: f64, log_factor: f64, k: usize, epsilon: f64) -> (f64, f64) {
    let kc = k as f64 * c;
    let upper = (log_factor / k as f64 + (epsilon - (1.0 + epsilon) * epsilon.ln_1p()) * mu_top / kc).exp();
    let lower = if epsilon < 1.0 {
        (log_factor / k as f64 + (-epsilon - (1.0 - epsilon) * (-epsilon).ln_1p()) * mu_bottom / kc).exp()
    } else {
        f64::NAN
    };
    (upper, lower)
}

/// Closed-form tail bounds
/// `C(n,k)^{1/k} (e^ε / (1+ε)^{1+ε})^{μ_top/(ck)}` for
/// `P{top-k sum >= (1+ε) μ_top}` and
/// `C(n,k)^{1/k} (e^{-ε} / (1-ε)^{1-ε})^{μ_bottom/(ck)}` for
/// `P{bottom-k sum <= (1-ε) μ_bottom}`. Each report's curve is the
/// unoptimized Laplace expression on the dimensionless grid `θc`, and
/// `grid_bound` its refined minimum.
pub fn chernoff_tail_bounds(ensemble: &EnsembleSpec, k: usize, epsilon: f64, grid: &ThetaGrid) -> Result<(BoundReport, BoundReport)> {
    check_k(ensemble.n, k)?;
    if !(epsilon >= 0.0 && epsilon < 1.0) {
        return Err(Error::arg(format!("ε={epsilon} outside [0, 1)")));
    }
    let c = ensemble.require_c()?;
    if c == 0.0 {
        return Err(Error::arg("Chernoff tail bounds need c > 0"));
    }
    let (top, bottom) = mean_sums(ensemble, k)?;
    let lf = ln_binomial(ensemble.n, k);
    let (upper, lower) = tail_closed_forms(top, bottom, c, lf, k, epsilon);
    let kf = k as f64;
    // exponent of the Laplace expression in the dimensionless u = |θ| c
    let up = |u: f64| {
        if u > EXPONENT_LIMIT {
            return None;
        }
        Some(lf / kf + (u.exp_m1() - (1.0 + epsilon) * u) * top / (c * kf))
    };
    let down = |u: f64| Some(lf / kf + ((-u).exp_m1() + (1.0 - epsilon) * u) * bottom / (c * kf));
    let make = |branch, closed: f64, theta_star: f64, f: &(dyn Fn(f64) -> Option<f64> + Sync)| -> Result<BoundReport> {
        let (mut curve, _, log_refined, _) = optimize(&grid.points, true, f)?;
        for p in curve.iter_mut() {
            p.value = p.value.exp();
            p.theta = signed(branch, p.theta) / c;
        }
        Ok(BoundReport {
            kind: BoundKind::ChernoffTail,
            side: Side::Upper,
            query: BoundQuery {
                k,
                branch,
                theta_grid: grid.points.clone(),
                t: None,
                epsilon: Some(epsilon),
            },
            curve,
            best_theta: theta_star,
            bound: closed.min(1.0),
            raw_bound: closed,
            grid_bound: log_refined.exp(),
            ground_truth: None,
            slack: None,
        })
    };
    Ok((
        make(Branch::Max, upper, epsilon.ln_1p() / c, &up)?,
        make(Branch::Min, lower, (-epsilon).ln_1p() / c, &down)?,
    ))
}

/// `n (e^ε/(1+ε)^{1+ε})^{λ_max(EY)/c}` and
/// `n (e^{-ε}/(1-ε)^{1-ε})^{λ_min(EY)/c}`.
pub fn tropp_tail_bounds(ensemble: &EnsembleSpec, epsilon: f64) -> Result<(f64, f64)> {
    let c = ensemble.require_c()?;
    if !(epsilon >= 0.0 && epsilon < 1.0) || c == 0.0 {
        return Err(Error::arg("tail bounds need ε in [0, 1) and c > 0"));
    }
    let d = ensemble.expectation().decompose()?;
    let n = ensemble.n as f64;
    let up = n * (epsilon.exp() / (1.0 + epsilon).powf(1.0 + epsilon)).powf(d.lambda_max() / c);
    let down = n * ((-epsilon).exp() / (1.0 - epsilon).powf(1.0 - epsilon)).powf(d.lambda_min() / c);
    Ok((up, down))
}

/// `sum_{i<=k} λ_i(τY1 + (1-τ)Y2)` against `τ sum λ_i(Y1) + (1-τ) sum λ_i(Y2)`.
pub fn top_k_convexity_gap(y1: &HermitianMatrix, y2: &HermitianMatrix, tau: f64, k: usize) -> Result<Gap> {
    check_k(y1.dim(), k)?;
    let top = |m: &HermitianMatrix| -> Result<f64> { Ok(m.decompose()?.top_k_sum(k)) };
    let lhs = top(&y1.lincomb(tau, y2, 1.0 - tau))?;
    let rhs = tau * top(y1)? + (1.0 - tau) * top(y2)?;
    Ok(Gap::signed(lhs, rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogFactorRow {
    pub n: usize,
    pub k: usize,
    pub ln_binomial: f64,
    pub ln_falling: f64,
}

/// `ln C(n,k)` and `ln prod_{i<=k}(n-i+1)` for all `1 <= k <= n <= n_max`.
pub fn log_factor_table(n_max: usize) -> Vec<LogFactorRow> {
    (1..=n_max)
        .flat_map(|n| {
            (1..=n).map(move |k| LogFactorRow {
                n,
                k,
                ln_binomial: ln_binomial(n, k),
                ln_falling: ln_falling_factorial(n, k),
            })
        })
        .collect()
}

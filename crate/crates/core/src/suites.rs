//! Batch certification: named suites of seeded random instances, each
//! producing signed gaps checked against a tolerance.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Branch, ThetaGrid};
use crate::concavity::{self, Form, ObjectiveSpec};
use crate::ensemble::{EnsembleSpec, Summand};
use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::hermitian::{self, quadrature, HermitianMatrix};
use crate::ktrace;
use crate::linalg::CMatrix;
use crate::mixed;
use crate::random::InstanceRng;
use crate::sim;
use crate::wedge::{self, SubsetBasis};

/// Suite names with their default instance counts.
pub const SUITES: &[(&str, usize)] = &[
    ("ktrace", 200),
    ("wedge", 100),
    ("identities", 100),
    ("wedge-properties", 50),
    ("af", 1000),
    ("af-general", 200),
    ("lieb-chord", 500),
    ("second-diff", 200),
    ("lieb-lemma", 300),
    ("trace-ineq", 300),
    ("tr-operators", 100),
    ("homogeneity", 100),
    ("holder", 1000),
    ("jensen", 100),
    ("bounds", 50),
    ("chernoff", 20),
    ("mgf-dominance", 100),
    ("convexity", 200),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(s, _)| *s).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    pub instances: Option<usize>,
    pub seed: u64,
    pub n: Option<usize>,
    pub k: Option<usize>,
    /// Replaces the tolerance of every check in the suite.
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    /// `|gap| <= tol * scale`.
    Zero,
    /// `gap >= -tol * scale`.
    Nonnegative,
    /// `gap <= tol * scale`.
    Nonpositive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expect: Expect,
    pub tol: f64,
    pub gap: Gap,
    /// Amount by which the gap moves against its expectation, over scale.
    pub violation: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: &str, expect: Expect, tol: f64, gap: Gap) -> Self {
        let r = gap.gap / gap.scale;
        let violation = match expect {
            Expect::Zero => r.abs(),
            Expect::Nonnegative => -r,
            Expect::Nonpositive => r,
        };
        let pass = match expect {
            Expect::Zero => gap.within(tol),
            Expect::Nonnegative => gap.nonnegative(tol),
            Expect::Nonpositive => gap.nonpositive(tol),
        };
        Check {
            name: name.into(),
            expect,
            tol,
            gap,
            violation: if violation.is_nan() { f64::INFINITY } else { violation },
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub instance: u64,
    /// Suite seed; with `instance` it reproduces the random draw.
    pub seed: u64,
    pub n: usize,
    pub k: Option<usize>,
    pub checks: Vec<Check>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstCheck {
    pub instance: u64,
    pub check: String,
    pub violation: f64,
    pub gap: Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub instances: usize,
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub tol_override: Option<f64>,
    pub passed: usize,
    pub failed: usize,
    pub worst: Option<WorstCheck>,
    pub failing_instances: Vec<u64>,
    pub records: Vec<InstanceRecord>,
}

impl SuiteReport {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }
}

struct Ctx {
    rng: InstanceRng,
    n_override: Option<usize>,
    k_override: Option<usize>,
    tol: Option<f64>,
    n: usize,
    k: Option<usize>,
    checks: Vec<Check>,
}

impl Ctx {
    fn pick_n(&mut self, lo: usize, hi: usize) -> usize {
        let lo = lo.max(self.k_override.unwrap_or(0));
        self.n = self.n_override.unwrap_or_else(|| self.rng.index(lo, hi.max(lo)));
        self.n
    }

    fn pick_k(&mut self, n: usize, hi: usize) -> usize {
        let k = self.k_override.unwrap_or_else(|| self.rng.index(1, hi.min(n).max(1)));
        self.k = Some(k);
        k
    }

    fn check(&mut self, name: &str, expect: Expect, tol: f64, gap: Gap) {
        let tol = self.tol.unwrap_or(tol);
        self.checks.push(Check::new(name, expect, tol, gap));
    }
}

type SuiteFn = fn(&mut Ctx) -> Result<()>;

fn suite_fn(name: &str) -> Option<SuiteFn> {
    Some(match name {
        "ktrace" => ktrace_suite,
        "wedge" => wedge_suite,
        "identities" => identities_suite,
        "wedge-properties" => wedge_properties_suite,
        "af" => af_suite,
        "af-general" => af_general_suite,
        "lieb-chord" => lieb_chord_suite,
        "second-diff" => second_diff_suite,
        "lieb-lemma" => lieb_lemma_suite,
        "trace-ineq" => trace_ineq_suite,
        "tr-operators" => tr_operators_suite,
        "homogeneity" => homogeneity_suite,
        "holder" => holder_suite,
        "jensen" => jensen_suite,
        "bounds" => bounds_suite,
        "chernoff" => chernoff_suite,
        "mgf-dominance" => mgf_dominance_suite,
        "convexity" => convexity_suite,
        _ => return None,
    })
}

fn min_n(name: &str) -> usize {
    match name {
        "af" | "af-general" | "convexity" => 2,
        _ => 1,
    }
}

/// Runs a suite over `instances` seeded draws in parallel. Unknown suite
/// names and inconsistent `n`/`k` are argument errors; resource limits hit by
/// any instance abort the run.
pub fn run_suite(name: &str, opts: &SuiteOptions) -> Result<SuiteReport> {
    let Some(&(_, default_count)) = SUITES.iter().find(|(s, _)| *s == name) else {
        return Err(Error::arg(format!(
            "unknown suite '{name}' (known: {})",
            suite_names().join(", ")
        )));
    };
    let f = suite_fn(name).expect("every listed suite has a runner");
    if let Some(n) = opts.n {
        if n < min_n(name) {
            return Err(Error::arg(format!("suite {name} needs n >= {}", min_n(name))));
        }
    }
    if let Some(k) = opts.k {
        if k == 0 || opts.n.is_some_and(|n| k > n) {
            return Err(Error::arg(format!("order k={k} outside 1..=n")));
        }
    }
    if let Some(t) = opts.tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::arg("tolerance must be a nonnegative number"));
        }
    }
    let count = opts.instances.unwrap_or(default_count);
    let records: Vec<InstanceRecord> = (0..count as u64)
        .into_par_iter()
        .map(|i| run_instance(f, opts, i))
        .collect::<Result<_>>()?;

    let mut worst: Option<WorstCheck> = None;
    for r in &records {
        for c in &r.checks {
            if worst.as_ref().is_none_or(|w| c.violation > w.violation) {
                worst = Some(WorstCheck {
                    instance: r.instance,
                    check: c.name.clone(),
                    violation: c.violation,
                    gap: c.gap,
                });
            }
        }
    }
    let failing: Vec<u64> = records.iter().filter(|r| !r.pass).map(|r| r.instance).collect();
    Ok(SuiteReport {
        suite: name.into(),
        seed: opts.seed,
        instances: count,
        n: opts.n,
        k: opts.k,
        tol_override: opts.tol,
        passed: count - failing.len(),
        failed: failing.len(),
        worst,
        failing_instances: failing,
        records,
    })
}

fn run_instance(f: SuiteFn, opts: &SuiteOptions, index: u64) -> Result<InstanceRecord> {
    let mut ctx = Ctx {
        rng: InstanceRng::new(opts.seed, index),
        n_override: opts.n,
        k_override: opts.k,
        tol: opts.tol,
        n: 0,
        k: None,
        checks: Vec::new(),
    };
    let outcome = f(&mut ctx);
    let error = match outcome {
        Ok(()) => None,
        Err(e @ Error::Resource { .. }) => return Err(e),
        Err(e) => Some(e.to_string()),
    };
    let pass = error.is_none() && ctx.checks.iter().all(|c| c.pass);
    Ok(InstanceRecord {
        instance: index,
        seed: opts.seed,
        n: ctx.n,
        k: ctx.k,
        checks: ctx.checks,
        error,
        pass,
    })
}

fn normwise(lhs: f64, rhs: f64, diff: f64, scale: f64) -> Gap {
    Gap {
        lhs,
        rhs,
        gap: diff,
        scale: scale.max(f64::MIN_POSITIVE),
    }
}

fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().max()
}

fn ktrace_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 10);
    let a = ctx.rng.hermitian(n);
    let ks: Vec<usize> = match ctx.k_override {
        Some(k) => vec![k],
        None => (1..=n).collect(),
    };
    for k in ks {
        let scale = ktrace::ktrace_scale(&a, k)?;
        let e = ktrace::trace_k_eigen(&a, k)?.value;
        let m = ktrace::trace_k_minors(a.matrix(), k)?;
        let c = ktrace::trace_k_charpoly(a.matrix(), k)?;
        ctx.check(&format!("eigen-minors k={k}"), Expect::Zero, 1e-10, normwise(e, m.re, (m - e).norm(), scale));
        ctx.check(&format!("eigen-charpoly k={k}"), Expect::Zero, 1e-10, normwise(e, c.re, (c - e).norm(), scale));
        ctx.check(&format!("minors-charpoly k={k}"), Expect::Zero, 1e-10, normwise(m.re, c.re, (m - c).norm(), scale));
    }
    let p = ctx.rng.pd(n);
    let k = ctx.rng.index(1, n);
    let b = ktrace::ktrace_brackets(&p, k)?;
    ctx.check("psd-bracket-lower", Expect::Nonnegative, 1e-12, Gap::signed(b.value, b.lower));
    ctx.check("psd-bracket-upper", Expect::Nonpositive, 1e-12, Gap::signed(b.value, b.upper));
    Ok(())
}

fn wedge_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let k = ctx.pick_k(n, n);
    let a = ctx.rng.hermitian(n);
    let basis = Arc::new(SubsetBasis::new(n, k)?);
    let w = wedge::wedge_trace(&wedge::m0(a.matrix(), &basis)?);
    let t = ktrace::trace_k_eigen(&a, k)?.value;
    let scale = ktrace::ktrace_scale(&a, k)?;
    ctx.check("compound-trace", Expect::Zero, 1e-9, normwise(w.re, t, (w - t).norm(), scale));

    let mats: Vec<CMatrix> = (0..k).map(|_| ctx.rng.hermitian(n).into_matrix()).collect();
    let via = mixed::mixed_disc_via_wedge(&mats, n)?;
    let brute = mixed::mixed_disc_complex(&mixed::pad_with_identity(&mats, n))?;
    let norm_scale: f64 = mats.iter().map(spectral_norm).product();
    let scale = via.value.abs().max(brute.re.abs()).max(norm_scale);
    let diff = ((brute.re - via.value).powi(2) + (brute.im - via.imaginary).powi(2)).sqrt();
    ctx.check("mixed-disc-wedge", Expect::Zero, 1e-9, normwise(via.value, brute.re, diff, scale));
    Ok(())
}

fn identities_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let k = ctx.pick_k(n, n);
    let a = ctx.rng.square(n);
    let b = ctx.rng.square(n);
    let lambdas: Vec<f64> = (0..n).map(|_| ctx.rng.gaussian()).collect();
    let gaps = wedge::verify_identities(&a, &b, &lambdas, k)?;
    for (name, g) in ["trace-m0", "trace-m1", "trace-m2"].iter().zip(gaps) {
        ctx.check(name, Expect::Zero, 1e-9, g);
    }
    Ok(())
}

fn wedge_properties_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 5);
    let k = ctx.pick_k(n, n);
    let m: Vec<CMatrix> = (0..6).map(|_| ctx.rng.square(n)).collect();
    let g = wedge::verify_product_derivative_properties(&m[0], &m[1], &m[2], &m[3], &m[4], &m[5], k, 1e-5)?;
    for (i, p) in g.product.into_iter().enumerate() {
        ctx.check(&format!("product-{}", i + 1), Expect::Zero, 1e-9, p);
    }
    for (i, d) in g.derivative.into_iter().enumerate() {
        ctx.check(&format!("derivative-{}", i + 1), Expect::Zero, 1e-5, d);
    }
    Ok(())
}

fn af_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(2, 6);
    let rest: Vec<HermitianMatrix> = (0..n - 2).map(|_| ctx.rng.pd(n)).collect();
    let a = ctx.rng.pd(n);
    if ctx.rng.index(0, 9) == 0 {
        let lambda = ctx.rng.uniform(0.1, 3.0);
        let g = mixed::af_gap(&a, &a.scale(lambda), &rest)?;
        ctx.check("af-equality", Expect::Zero, 1e-10, g);
    } else {
        let b = if ctx.rng.unit() < 0.5 { ctx.rng.pd(n) } else { ctx.rng.hermitian(n) };
        let g = mixed::af_gap(&a, &b, &rest)?;
        ctx.check("af", Expect::Nonnegative, 1e-9, g);
    }
    Ok(())
}

fn af_general_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(2, 6);
    let free = ctx.rng.index(2, n);
    ctx.k = Some(free);
    let rest: Vec<HermitianMatrix> = (0..n - free).map(|_| ctx.rng.pd(n)).collect();
    let (a, b) = (ctx.rng.pd(n), ctx.rng.pd(n));
    let l = ctx.rng.index(1, free - 1);
    ctx.check("general-af", Expect::Nonnegative, 1e-9, mixed::general_af_gap(&a, &b, &rest, l)?);
    let tau = ctx.rng.unit();
    ctx.check("bm-concavity", Expect::Nonnegative, 1e-9, mixed::bm_concavity_gap(&a, &b, &rest, tau)?);
    Ok(())
}

fn lieb_chord_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let k = ctx.pick_k(n, n);
    let h = ctx.rng.hermitian_unit(n);
    let (a1, a2) = (ctx.rng.pd(n), ctx.rng.pd(n));
    let tau = ctx.rng.unit();
    for form in [Form::Root, Form::Log] {
        let spec = ObjectiveSpec::new(h.clone(), k, form)?;
        let tag = form_tag(form);
        let c = concavity::chord_gap(&spec, &a1, &a2, tau)?;
        ctx.check(&format!("chord-{tag}"), Expect::Nonnegative, 1e-8, c.as_gap());
        let mid = concavity::chord_gap(&spec, &a1, &a2, 0.5)?;
        ctx.check(&format!("midpoint-{tag}"), Expect::Nonnegative, 1e-8, mid.as_gap());
    }
    Ok(())
}

fn form_tag(form: Form) -> &'static str {
    match form {
        Form::Root => "root",
        Form::Log => "log",
    }
}

/// Second difference step; the direction is scaled to `λ_min(A)`.
const SECOND_DIFF_STEP: f64 = 1e-3;

fn second_diff_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let k = ctx.pick_k(n, n);
    let h = ctx.rng.hermitian_unit(n);
    let a = ctx.rng.pd(n);
    let lmin = a.decompose()?.lambda_min();
    let c = ctx.rng.hermitian_unit(n).scale(lmin);
    for form in [Form::Root, Form::Log] {
        let spec = ObjectiveSpec::new(h.clone(), k, form)?;
        let d = concavity::second_directional_derivative(&spec, &a, &c, SECOND_DIFF_STEP)?;
        let g = Gap {
            lhs: d.value,
            rhs: 0.0,
            gap: d.value,
            scale: d.scale,
        };
        ctx.check(&format!("second-diff-{}", form_tag(form)), Expect::Nonpositive, 1e-6, g);
    }
    Ok(())
}

fn lieb_lemma_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 5);
    let a = ctx.rng.pd(n);
    let c = ctx.rng.hermitian(n);
    if n > 1 && ctx.rng.index(0, 9) == 0 {
        let rank = ctx.rng.index(1, n - 1);
        let b = ctx.rng.psd_rank(n, rank);
        ctx.check("lieb-lemma-psd", Expect::Nonpositive, 1e-8, concavity::lieb_lemma_gap(&a, &c, &b)?);
    } else {
        let b = ctx.rng.pd(n);
        ctx.check("lieb-lemma", Expect::Nonpositive, 1e-8, concavity::lieb_lemma_gap(&a, &c, &b)?);
    }
    Ok(())
}

fn trace_ineq_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 5);
    let k = ctx.pick_k(n, 3);
    let a = ctx.rng.pd(n);
    let b = ctx.rng.pd(n);
    let c = ctx.rng.hermitian(n);
    let g = concavity::trace_ineq_gap(&a, &b, &c, k)?;
    ctx.check("trace-ineq", Expect::Nonpositive, 1e-8, g);
    if k == 1 {
        let l = concavity::lieb_lemma_gap(&a, &c, &b)?;
        let scale = g.scale.max(l.scale);
        ctx.check("k1-reduction", Expect::Zero, 1e-10, normwise(g.gap, l.gap, (g.gap - l.gap).abs(), scale));
    }
    Ok(())
}

fn rel_gap(x: &HermitianMatrix, y: &HermitianMatrix) -> Gap {
    let (nx, ny) = (x.frobenius_norm(), y.frobenius_norm());
    normwise(nx, ny, (x - y).frobenius_norm(), nx.max(ny))
}

/// Central-difference steps: `T` from `ln` and `R` from `-T` along a
/// direction scaled to `λ_min(A)`, the `exp` derivative along a unit one.
const LN_STEP_FIRST: f64 = 1e-4;
const T_STEP: f64 = 1e-4;
const EXP_STEP: f64 = 1e-5;

fn tr_operators_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let a = ctx.rng.pd(n);
    let lmin = a.decompose()?.lambda_min();
    let c = ctx.rng.hermitian_unit(n).scale(lmin);
    let kernel = hermitian::LogDerivativeKernel::new(&a)?;
    let t = kernel.t(&c);
    let r = kernel.r(&c);
    ctx.check("t-quadrature", Expect::Zero, 1e-6, rel_gap(&t, &quadrature::t_operator_quadrature(&a, &c)?));
    ctx.check("r-quadrature", Expect::Zero, 1e-6, rel_gap(&r, &quadrature::r_operator_quadrature(&a, &c)?));

    let ln_at = |s: f64| a.lincomb(1.0, &c, s).ln();
    let h1 = LN_STEP_FIRST;
    let t_fd = (&ln_at(h1)? - &ln_at(-h1)?).scale(0.5 / h1);
    ctx.check("t-finite-difference", Expect::Zero, 1e-5, rel_gap(&t, &t_fd));
    let t_at = |s: f64| hermitian::t_operator(&a.lincomb(1.0, &c, s), &c);
    let h2 = T_STEP;
    let r_fd = (&t_at(h2)? - &t_at(-h2)?).scale(-0.5 / h2);
    ctx.check("r-finite-difference", Expect::Zero, 1e-5, rel_gap(&r, &r_fd));

    let x = ctx.rng.hermitian_unit(n);
    let xdot = ctx.rng.hermitian_unit(n);
    let de = hermitian::exp_derivative(&x, &xdot)?;
    let e_fd = (&x.lincomb(1.0, &xdot, EXP_STEP).exp()? - &x.lincomb(1.0, &xdot, -EXP_STEP).exp()?).scale(0.5 / EXP_STEP);
    ctx.check("exp-derivative", Expect::Zero, 1e-5, rel_gap(&de, &e_fd));
    Ok(())
}

fn homogeneity_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let k = ctx.pick_k(n, n);
    let h = ctx.rng.hermitian_unit(n);
    let a = ctx.rng.pd(n);
    let c = ctx.rng.uniform(0.1, 10.0);
    for form in [Form::Root, Form::Log] {
        let spec = ObjectiveSpec::new(h.clone(), k, form)?;
        ctx.check(
            &format!("homogeneity-{}", form_tag(form)),
            Expect::Zero,
            1e-10,
            concavity::homogeneity_check(&spec, &a, c)?,
        );
    }
    Ok(())
}

fn holder_suite(ctx: &mut Ctx) -> Result<()> {
    ctx.n = 1;
    let v: Vec<f64> = (0..4).map(|_| ctx.rng.uniform(0.0, 10.0)).collect();
    let s = ctx.rng.unit();
    ctx.check("holder", Expect::Nonnegative, 1e-12, concavity::scalar_holder_check(v[0], v[1], v[2], v[3], s)?);
    Ok(())
}

fn jensen_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 4);
    let k = ctx.pick_k(n, n);
    let m = ctx.rng.index(1, 3);
    let summands: Vec<Summand> = (0..m)
        .map(|_| {
            let p = ctx.rng.uniform(0.05, 0.95);
            Summand::from_pairs(vec![(p, ctx.rng.pd(n)), (1.0 - p, ctx.rng.pd(n))])
        })
        .collect();
    for form in [Form::Root, Form::Log] {
        ctx.check(
            &format!("jensen-{}", form_tag(form)),
            Expect::Nonnegative,
            1e-9,
            concavity::jensen_multiconcave_gap(&summands, k, form)?,
        );
    }
    Ok(())
}

/// Random ensemble of PSD atoms with spectral norm at most about 1.
fn random_psd_ensemble(ctx: &mut Ctx, n: usize, max_summands: usize, max_atoms: usize) -> Result<EnsembleSpec> {
    let m = ctx.rng.index(1, max_summands);
    let summands: Vec<Summand> = (0..m)
        .map(|_| {
            let atoms = ctx.rng.index(1, max_atoms);
            let weights: Vec<f64> = (0..atoms).map(|_| ctx.rng.uniform(0.1, 1.0)).collect();
            let total: f64 = weights.iter().sum();
            let pairs = weights
                .iter()
                .map(|w| {
                    let rank = ctx.rng.index(1, n);
                    (w / total, ctx.rng.psd_rank(n, rank).scale(1.0 / (2.0 * n as f64)))
                })
                .collect();
            Summand::from_pairs(pairs)
        })
        .collect();
    let probe = EnsembleSpec::new(n, summands.clone(), None)?;
    let c = probe.c_eff()?;
    EnsembleSpec::new(n, summands, Some(c))
}

/// Points in the tail-probability grid.
pub const TAIL_GRID_POINTS: usize = 20;

fn bounds_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 5);
    let k = ctx.pick_k(n, n);
    let e = random_psd_ensemble(ctx, n, 4, 3)?;
    let c = e.c_eff()?;
    let hi = k as f64 * e.m() as f64 * c * 1.05;
    let ts: Vec<f64> = (0..TAIL_GRID_POINTS)
        .map(|j| -0.25 + (hi + 0.25) * j as f64 / (TAIL_GRID_POINTS - 1) as f64)
        .collect();
    let exact = sim::exhaustive_expectations(&e, &[k], &ts)?;
    let ex = &exact.per_k[0];
    let (mean_top, mean_bottom) = sim::eigen_sums(&e.expectation().eigenvalues()?, k);
    let grid = ThetaGrid::default_master(&e)?;
    let upper = bounds::master_expectation_bound(&e, k, &grid, Branch::Max)?;
    let lower = bounds::master_expectation_bound(&e, k, &grid, Branch::Min)?;
    ctx.check("top-jensen", Expect::Nonnegative, 1e-9, Gap::signed(ex.top_mean, mean_top));
    ctx.check("top-master", Expect::Nonnegative, 1e-9, Gap::signed(upper.bound, ex.top_mean));
    ctx.check("bottom-jensen", Expect::Nonnegative, 1e-9, Gap::signed(mean_bottom, ex.bottom_mean));
    ctx.check("bottom-master", Expect::Nonnegative, 1e-9, Gap::signed(ex.bottom_mean, lower.bound));
    for (j, &t) in ts.iter().enumerate() {
        let up = bounds::master_tail_bound(&e, k, t, &grid, Branch::Max)?;
        ctx.check(&format!("top-tail t{j}"), Expect::Nonnegative, 1e-9, Gap::signed(up.bound, ex.top_tail[j]));
        let down = bounds::master_tail_bound(&e, k, t, &grid, Branch::Min)?;
        ctx.check(&format!("bottom-tail t{j}"), Expect::Nonnegative, 1e-9, Gap::signed(down.bound, ex.bottom_tail[j]));
    }
    Ok(())
}

fn relative(lhs: f64, rhs: f64) -> Gap {
    normwise(lhs, rhs, (lhs - rhs).abs(), lhs.abs().max(rhs.abs()))
}

fn chernoff_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(2, 8);
    let e = random_psd_ensemble(ctx, n, 6, 3)?;
    let c = e.require_c()?;
    let grid = ThetaGrid::default_chernoff();
    let (up1, low1) = bounds::chernoff_expectation_bounds(&e, 1, &grid)?;
    let (tup, tlow) = bounds::tropp_expectation_bounds(&e, &grid)?;
    ctx.check("k1-expectation-upper", Expect::Zero, 1e-12, relative(up1.bound, tup.bound));
    ctx.check("k1-expectation-lower", Expect::Zero, 1e-12, relative(low1.bound, tlow.bound));

    let eps = ctx.rng.uniform(0.05, 0.95);
    let (tu, tl) = bounds::chernoff_tail_bounds(&e, 1, eps, &grid)?;
    let (ru, rl) = bounds::tropp_tail_bounds(&e, eps)?;
    ctx.check("k1-tail-upper", Expect::Zero, 1e-12, relative(tu.raw_bound, ru));
    ctx.check("k1-tail-lower", Expect::Zero, 1e-12, relative(tl.raw_bound, rl));

    let k = ctx.pick_k(n, n);
    let (tu, tl) = bounds::chernoff_tail_bounds(&e, k, eps, &grid)?;
    for (name, r) in [("upper", &tu), ("lower", &tl)] {
        ctx.check(&format!("closed-vs-grid-{name}"), Expect::Zero, 1e-6, relative(r.raw_bound, r.grid_bound));
        let (lo, hi) = curve_range(&r.curve);
        if hi - lo <= FLAT_CURVE_TOL * lo.abs() {
            // every θ is a minimizer, θ* included
            ctx.check(&format!("theta-star-flat-{name}"), Expect::Zero, FLAT_CURVE_TOL, relative(hi, lo));
            continue;
        }
        let (theta_grid, step) = grid_argmin(&r.curve);
        let star = r.best_theta;
        let miss = (star * c).abs().ln() - (theta_grid * c).abs().ln();
        ctx.check(
            &format!("theta-star-{name}"),
            Expect::Zero,
            1.0,
            normwise(star, theta_grid, miss.abs(), step),
        );
    }
    Ok(())
}

/// Relative spread below which a tail curve counts as constant in θ.
const FLAT_CURVE_TOL: f64 = 1e-10;

fn curve_range(curve: &[bounds::CurvePoint]) -> (f64, f64) {
    curve
        .iter()
        .filter(|p| p.valid)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.value), hi.max(p.value)))
}

/// Grid argmin of a curve and the log spacing of the grid there.
fn grid_argmin(curve: &[bounds::CurvePoint]) -> (f64, f64) {
    let mut best = 0;
    for (i, p) in curve.iter().enumerate() {
        if p.valid && (!curve[best].valid || p.value < curve[best].value) {
            best = i;
        }
    }
    let at = |i: usize| curve[i].theta.abs().ln();
    let left = if best > 0 { (at(best) - at(best - 1)).abs() } else { 0.0 };
    let right = if best + 1 < curve.len() { (at(best + 1) - at(best)).abs() } else { 0.0 };
    (curve[best].theta, left.max(right))
}

fn mgf_dominance_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(1, 6);
    let e = random_psd_ensemble(ctx, n, 1, 4)?;
    let c = e.require_c()?;
    let theta = ctx.rng.uniform(0.01, 10.0) / c;
    let g = bounds::mgf_dominance_check(&e.summands[0], theta, c)?;
    ctx.check("mgf-dominance", Expect::Nonnegative, 1e-9, g);
    Ok(())
}

fn convexity_suite(ctx: &mut Ctx) -> Result<()> {
    let n = ctx.pick_n(2, 8);
    let k = ctx.pick_k(n, n);
    let (y1, y2) = (ctx.rng.hermitian(n), ctx.rng.hermitian(n));
    let tau = ctx.rng.unit();
    ctx.check("top-k-convexity", Expect::Nonpositive, 1e-10, bounds::top_k_convexity_gap(&y1, &y2, tau, k)?);
    Ok(())
}

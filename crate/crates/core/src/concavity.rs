//! Gap evaluators for the concavity of `A ↦ trace_k[exp(H + ln A)]^{1/k}`
//! (and its logarithm) and the inequalities that support it.
//!
//! Every evaluator is deterministic: s-integrals use fixed Gauss–Legendre
//! rules with deterministic doubling.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ensemble::Summand;
use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::hermitian::{gauss_legendre_unit, HermitianMatrix, LogDerivativeKernel, SpectralDecomposition};
use crate::ktrace::log_ktrace_exp;
use crate::linalg::{trace, CMatrix};
use crate::wedge::{m1, m2, SubsetBasis};

/// Initial and maximal node counts of the s-quadrature.
pub const S_NODES_START: usize = 32;
pub const S_NODES_MAX: usize = 256;
pub const S_REL_CHANGE: f64 = 1e-10;
/// Joint-support cap for the exhaustive Jensen check.
pub const JENSEN_ATOM_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    /// `trace_k[...]^{1/k}`.
    Root,
    /// `ln trace_k[...]`.
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub h: HermitianMatrix,
    pub k: usize,
    pub form: Form,
}

impl ObjectiveSpec {
    pub fn new(h: HermitianMatrix, k: usize, form: Form) -> Result<Self> {
        if k == 0 || k > h.dim() {
            return Err(Error::arg(format!("order k={k} outside 1..={}", h.dim())));
        }
        Ok(ObjectiveSpec { h, k, form })
    }
}

fn form_value(form: Form, log_value: f64, k: usize) -> f64 {
    match form {
        Form::Root => (log_value / k as f64).exp(),
        Form::Log => log_value,
    }
}

fn log_objective(spec: &ObjectiveSpec, a: &HermitianMatrix) -> Result<f64> {
    if a.dim() != spec.h.dim() {
        return Err(Error::Dimension {
            expected: spec.h.dim(),
            found: a.dim(),
        });
    }
    let inner = &spec.h + &a.ln()?;
    Ok(log_ktrace_exp(&inner.eigenvalues()?, spec.k))
}

/// `trace_k[exp(H + ln A)]^{1/k}` or `ln trace_k[exp(H + ln A)]`.
pub fn objective(spec: &ObjectiveSpec, a: &HermitianMatrix) -> Result<f64> {
    Ok(form_value(spec.form, log_objective(spec, a)?, spec.k))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChordCertificate {
    pub a1: HermitianMatrix,
    pub a2: HermitianMatrix,
    pub tau: f64,
    /// `f(τA1 + (1-τ)A2)`.
    pub lhs: f64,
    /// `τ f(A1) + (1-τ) f(A2)`.
    pub rhs: f64,
    pub gap: f64,
    pub scale: f64,
}

impl ChordCertificate {
    pub fn as_gap(&self) -> Gap {
        Gap::signed(self.lhs, self.rhs)
    }
}

pub fn chord_gap(spec: &ObjectiveSpec, a1: &HermitianMatrix, a2: &HermitianMatrix, tau: f64) -> Result<ChordCertificate> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::arg(format!("tau={tau} outside [0, 1]")));
    }
    let mid = a1.lincomb(tau, a2, 1.0 - tau);
    let lhs = objective(spec, &mid)?;
    let rhs = tau * objective(spec, a1)? + (1.0 - tau) * objective(spec, a2)?;
    let g = Gap::signed(lhs, rhs);
    Ok(ChordCertificate {
        a1: a1.clone(),
        a2: a2.clone(),
        tau,
        lhs,
        rhs,
        gap: g.gap,
        scale: g.scale,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondDifference {
    /// `(f(h) - 2 f(0) + f(-h)) / h^2` along `A + tC`.
    pub value: f64,
    /// `max(|f(-h)|, |f(0)|, |f(h)|, 1)`.
    pub scale: f64,
}

pub fn second_directional_derivative(
    spec: &ObjectiveSpec,
    a: &HermitianMatrix,
    c: &HermitianMatrix,
    h: f64,
) -> Result<SecondDifference> {
    if !(h > 0.0) {
        return Err(Error::arg("step h must be positive"));
    }
    let plus = a.lincomb(1.0, c, h);
    let minus = a.lincomb(1.0, c, -h);
    for end in [&plus, &minus] {
        let d = end.decompose()?;
        if !d.cone(None).is_pd() {
            return Err(Error::domain(
                format!("A ± hC leaves the positive definite cone at h={h:e}; use a smaller step"),
                d.lambda_min(),
            ));
        }
    }
    let f0 = objective(spec, a)?;
    let fp = objective(spec, &plus)?;
    let fm = objective(spec, &minus)?;
    Ok(SecondDifference {
        value: (fp - 2.0 * f0 + fm) / (h * h),
        scale: f0.abs().max(fp.abs()).max(fm.abs()).max(1.0),
    })
}

/// `∫_0^1 f(s) ds` by Gauss–Legendre, doubling from 32 nodes until the
/// relative change drops below `1e-10` or 256 nodes are reached.
pub fn integrate_s(f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let rule = |m: usize| -> Result<f64> {
        let (x, w) = gauss_legendre_unit(m);
        x.iter().zip(&w).map(|(&s, &wt)| Ok(wt * f(s)?)).sum()
    };
    let mut nodes = S_NODES_START;
    let mut prev = rule(nodes)?;
    while nodes < S_NODES_MAX {
        nodes *= 2;
        let next = rule(nodes)?;
        let change = (next - prev).abs();
        prev = next;
        if change <= S_REL_CHANGE * next.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Ok(prev)
}

fn psd_power(d: &SpectralDecomposition, s: f64) -> CMatrix {
    d.apply(|l| crate::hermitian::scalar_pow(l.max(0.0), s)).into_matrix()
}

fn checked_psd(b: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let d = b.decompose()?;
    d.require_psd("B")?;
    Ok(d)
}

/// `∫_0^1 tr[T B^s T B^{1-s}] ds - tr[R B]` with `T = T(A, C)`,
/// `R = R(A, C)`; nonpositive for PD `A` and PSD `B`.
pub fn lieb_lemma_gap(a: &HermitianMatrix, c: &HermitianMatrix, b: &HermitianMatrix) -> Result<Gap> {
    let kernel = LogDerivativeKernel::new(a)?;
    let t = kernel.t(c);
    let r = kernel.r(c);
    let db = checked_psd(b)?;
    // in B's eigenbasis the integrand is sum_ij |T'_ij|^2 b_j^s b_i^{1-s}
    let u = &db.eigenvectors;
    let tp = u.adjoint() * t.matrix() * u;
    let bvals: Vec<f64> = db.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let n = bvals.len();
    let lhs = integrate_s(|s| {
        let pw: Vec<f64> = bvals.iter().map(|&v| crate::hermitian::scalar_pow(v, s)).collect();
        let qw: Vec<f64> = bvals.iter().map(|&v| crate::hermitian::scalar_pow(v, 1.0 - s)).collect();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += tp[(i, j)].norm_sqr() * pw[j] * qw[i];
            }
        }
        Ok(acc)
    })?;
    let rhs = trace(&(r.matrix() * b.matrix())).re;
    Ok(Gap::signed(lhs, rhs))
}

/// `∫_0^1 tr[M1(TB^s;B^s) M1(TB^{1-s};B^{1-s})] ds - tr[M1(RB;B)]`
/// against `tr[M2(TB,TB;B)]`, as `lhs - rhs`.
pub fn trace_ineq_gap(a: &HermitianMatrix, b: &HermitianMatrix, c: &HermitianMatrix, k: usize) -> Result<Gap> {
    let n = a.dim();
    let basis = Arc::new(SubsetBasis::new(n, k)?);
    let kernel = LogDerivativeKernel::new(a)?;
    let t = kernel.t(c).into_matrix();
    let r = kernel.r(c).into_matrix();
    let db = checked_psd(b)?;
    let bm = b.matrix();
    let integral = integrate_s(|s| {
        let bs = psd_power(&db, s);
        let bq = psd_power(&db, 1.0 - s);
        let left = m1(&(&t * &bs), &bs, &basis)?;
        let right = m1(&(&t * &bq), &bq, &basis)?;
        Ok(left.compose(&right)?.trace().re)
    })?;
    let rb = m1(&(&r * bm), bm, &basis)?.trace().re;
    let tb = &t * bm;
    let rhs = m2(&tb, &tb, bm, &basis)?.trace().re;
    Ok(Gap::signed(integral - rb, rhs))
}

fn check_jensen_support(summands: &[Summand]) -> Result<u128> {
    if summands.is_empty() {
        return Err(Error::arg("no summands"));
    }
    let total = summands
        .iter()
        .map(|s| s.atoms.iter().filter(|a| a.p > 0.0).count() as u128)
        .try_fold(1u128, |acc, l| acc.checked_mul(l))
        .unwrap_or(u128::MAX);
    if total > JENSEN_ATOM_LIMIT {
        return Err(Error::Resource {
            what: "joint support of the Jensen check".into(),
            required: total,
            limit: JENSEN_ATOM_LIMIT,
            advice: "use fewer summands or atoms".into(),
        });
    }
    Ok(total)
}

/// `g(exp sum ln E A^(i)) - E g(exp sum ln A^(i))` for `g` the root or log
/// form of `trace_k`, by exhaustive enumeration of PD atoms.
pub fn jensen_multiconcave_gap(summands: &[Summand], k: usize, form: Form) -> Result<Gap> {
    let total = check_jensen_support(summands)?;
    let n = summands[0].atoms[0].matrix.dim();
    if k == 0 || k > n {
        return Err(Error::arg(format!("order k={k} outside 1..={n}")));
    }
    let logs: Vec<Vec<(f64, HermitianMatrix)>> = summands
        .iter()
        .map(|s| {
            s.atoms
                .iter()
                .filter(|a| a.p > 0.0)
                .map(|a| Ok((a.p, a.matrix.ln()?)))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let mut lhs = 0.0;
    for mut idx in 0..total as usize {
        let mut prob = 1.0;
        let mut acc = HermitianMatrix::zeros(n);
        for s in &logs {
            let (p, l) = &s[idx % s.len()];
            idx /= s.len();
            prob *= p;
            acc = &acc + l;
        }
        lhs += prob * form_value(form, log_ktrace_exp(&acc.eigenvalues()?, k), k);
    }
    let mut mean_logs = HermitianMatrix::zeros(n);
    for s in summands {
        mean_logs = &mean_logs + &s.mean().ln()?;
    }
    let rhs = form_value(form, log_ktrace_exp(&mean_logs.eigenvalues()?, k), k);
    Ok(Gap::signed(rhs, lhs))
}

/// Root form: `f(cA)` against `c f(A)`. Log form: `(f(cA) - f(A)) / k`
/// against `ln c`.
pub fn homogeneity_check(spec: &ObjectiveSpec, a: &HermitianMatrix, c: f64) -> Result<Gap> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::arg(format!("scale c={c} must be positive")));
    }
    let scaled = objective(spec, &a.scale(c))?;
    let base = objective(spec, a)?;
    Ok(match spec.form {
        Form::Root => Gap::signed(scaled, c * base),
        Form::Log => Gap::signed((scaled - base) / spec.k as f64, c.ln()),
    })
}

/// `(a+b)^s (c+d)^{1-s} - (a^s c^{1-s} + b^s d^{1-s})`, with `0^0 = 1`.
pub fn scalar_holder_check(a: f64, b: f64, c: f64, d: f64, s: f64) -> Result<Gap> {
    if [a, b, c, d].iter().any(|v| !(*v >= 0.0)) || !(0.0..=1.0).contains(&s) {
        return Err(Error::arg("Hölder check needs nonnegative inputs and s in [0, 1]"));
    }
    let pw = crate::hermitian::scalar_pow;
    let lhs = pw(a + b, s) * pw(c + d, 1.0 - s);
    let rhs = pw(a, s) * pw(c, 1.0 - s) + pw(b, s) * pw(d, 1.0 - s);
    Ok(Gap::signed(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ktrace::trace_k_eigen;
    use crate::random::InstanceRng;

    fn spec(h: HermitianMatrix, k: usize, form: Form) -> ObjectiveSpec {
        ObjectiveSpec::new(h, k, form).unwrap()
    }

    #[test]
    fn objective_special_cases() {
        let mut rng = InstanceRng::new(1, 0);
        let a = rng.pd(4);
        let t2 = trace_k_eigen(&a, 2).unwrap().value;
        let f = objective(&spec(HermitianMatrix::zeros(4), 2, Form::Root), &a).unwrap();
        assert!((f - t2.sqrt()).abs() < 1e-10 * f);
        let h = rng.hermitian_unit(4);
        let f = objective(&spec(h.clone(), 4, Form::Root), &a).unwrap();
        let det = a.eigenvalues().unwrap().iter().product::<f64>();
        let want = det.powf(0.25) * (h.trace() / 4.0).exp();
        assert!((f - want).abs() < 1e-10 * want);
        let f = objective(&spec(h.clone(), 2, Form::Root), &HermitianMatrix::identity(4)).unwrap();
        let want = trace_k_eigen(&h.exp().unwrap(), 2).unwrap().value.sqrt();
        assert!((f - want).abs() < 1e-12 * want);
        assert!(objective(&spec(h, 2, Form::Log), &HermitianMatrix::from_diagonal(&[1.0, 1.0, 1.0, -1.0])).is_err());
    }

    #[test]
    fn chord_trivial_cases() {
        let mut rng = InstanceRng::new(2, 0);
        let (a1, a2) = (rng.pd(3), rng.pd(3));
        let s = spec(rng.hermitian_unit(3), 2, Form::Root);
        for tau in [0.0, 1.0] {
            assert!(chord_gap(&s, &a1, &a2, tau).unwrap().as_gap().within(1e-13));
        }
        assert!(chord_gap(&s, &a1, &a1, 0.4).unwrap().as_gap().within(1e-13));
        assert!(chord_gap(&s, &a1, &a2, 0.4).unwrap().as_gap().nonnegative(1e-8));
    }

    #[test]
    fn second_difference_cases() {
        let mut rng = InstanceRng::new(3, 0);
        let a = rng.pd(4).lincomb(1.0, &HermitianMatrix::identity(4), 1.0);
        let s = spec(rng.hermitian_unit(4), 2, Form::Root);
        let z = second_directional_derivative(&s, &a, &HermitianMatrix::zeros(4), 1e-3).unwrap();
        assert_eq!(z.value, 0.0);
        let ray = second_directional_derivative(&s, &a, &a, 1e-3).unwrap();
        assert!(ray.value.abs() <= 1e-5 * ray.scale, "{ray:?}");
        let err = second_directional_derivative(&s, &HermitianMatrix::identity(4), &HermitianMatrix::identity(4), 2.0);
        assert!(matches!(err, Err(Error::Domain { .. })));
    }

    #[test]
    fn lieb_lemma_trivial_cases() {
        let mut rng = InstanceRng::new(4, 0);
        let a = rng.pd(3);
        let b = rng.psd_rank(3, 2);
        let g = lieb_lemma_gap(&a, &HermitianMatrix::zeros(3), &b).unwrap();
        assert_eq!((g.lhs, g.rhs), (0.0, 0.0));
        let id = HermitianMatrix::identity(3);
        let g = lieb_lemma_gap(&id, &id, &b).unwrap();
        assert!(g.within(1e-12), "{g:?}");
        assert!((g.rhs - b.trace()).abs() < 1e-12);
    }

    #[test]
    fn trace_ineq_reduces_at_grade_one() {
        let mut rng = InstanceRng::new(5, 0);
        let (a, b, c) = (rng.pd(3), rng.pd(3), rng.hermitian(3));
        let l = lieb_lemma_gap(&a, &c, &b).unwrap();
        let t = trace_ineq_gap(&a, &b, &c, 1).unwrap();
        assert!((l.gap - t.gap).abs() <= 1e-10 * l.scale);
        let z = trace_ineq_gap(&a, &b, &HermitianMatrix::zeros(3), 2).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        assert!(trace_ineq_gap(&a, &b, &c, 2).unwrap().nonpositive(1e-8));
    }

    #[test]
    fn jensen_cases() {
        let mut rng = InstanceRng::new(6, 0);
        let det: Vec<Summand> = (0..2).map(|_| Summand::point_mass(rng.pd(3))).collect();
        assert!(jensen_multiconcave_gap(&det, 2, Form::Root).unwrap().within(1e-12));
        let two = vec![Summand::from_pairs(vec![(0.5, rng.pd(3)), (0.5, rng.pd(3))])];
        assert!(jensen_multiconcave_gap(&two, 1, Form::Log).unwrap().nonnegative(0.0));
    }

    #[test]
    fn homogeneity_and_holder() {
        let mut rng = InstanceRng::new(7, 0);
        let a = rng.pd(4);
        for form in [Form::Root, Form::Log] {
            let s = spec(rng.hermitian_unit(4), 3, form);
            assert!(homogeneity_check(&s, &a, 1.0).unwrap().within(1e-14));
            assert!(homogeneity_check(&s, &a, 3.7).unwrap().within(1e-10));
        }
        assert!(scalar_holder_check(2.0, 0.0, 3.0, 0.0, 0.3).unwrap().within(1e-15));
        assert!(scalar_holder_check(2.0, 5.0, 2.0, 5.0, 0.7).unwrap().within(1e-14));
        assert!(scalar_holder_check(1.0, 2.0, 3.0, 4.0, 0.0).unwrap().within(1e-15));
        assert!(scalar_holder_check(-1.0, 2.0, 3.0, 4.0, 0.5).is_err());
    }
}

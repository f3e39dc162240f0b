//! The k-trace `trace_k[A]`, the k-th elementary symmetric polynomial of the
//! eigenvalues of `A`.
//!
//! Three independent routes are provided:
//!
//! * [`trace_k_eigen`]: eigenvalues, then the product-expansion recurrence
//!   `e_j <- e_j + λ e_{j-1}` (double-double compensated when the spectrum
//!   has mixed signs);
//! * [`trace_k_minors`]: the sum of all `k x k` principal minors;
//! * [`trace_k_charpoly`]: Faddeev–LeVerrier trace recurrence for the
//!   characteristic-polynomial coefficients, valid for non-Hermitian input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::linalg::{binomial, k_subsets, minor, trace, CMatrix, C64};

/// Maximum number of principal minors [`trace_k_minors`] will enumerate.
pub const MINOR_BUDGET: u128 = 1_000_000;

/// Condition estimate above which a warning is logged.
pub const CONDITION_WARNING: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTraceValue {
    pub n: usize,
    pub k: usize,
    pub value: f64,
    /// `e_k(|λ|) / |e_k(λ)|`; 1 for sign-definite spectra.
    pub condition: f64,
}

fn check_order(n: usize, k: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::arg(format!("k-trace order k={k} outside 1..={n}")));
    }
    Ok(())
}

// Double-double helpers (error-free transforms).
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Elementary symmetric polynomials `e_0, ..., e_n` of `values`.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mixed = values.iter().any(|&v| v < 0.0) && values.iter().any(|&v| v > 0.0);
    if !mixed {
        let mut e = vec![0.0; n + 1];
        e[0] = 1.0;
        for (i, &l) in values.iter().enumerate() {
            for j in (1..=i + 1).rev() {
                e[j] += l * e[j - 1];
            }
        }
        return e;
    }
    let mut hi = vec![0.0; n + 1];
    let mut lo = vec![0.0; n + 1];
    hi[0] = 1.0;
    for (i, &l) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            let (p, pe) = two_prod(l, hi[j - 1]);
            let pe = pe + l * lo[j - 1];
            let (s, se) = two_sum(hi[j], p);
            let tail = se + pe + lo[j];
            let (h, t) = two_sum(s, tail);
            hi[j] = h;
            lo[j] = t;
        }
    }
    hi.iter().zip(&lo).map(|(h, l)| h + l).collect()
}

/// `e_k(values)`, with `e_0 = 1` and `e_k = 0` for `k > len`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    if k > values.len() {
        return 0.0;
    }
    elementary_symmetric_all(values)[k]
}

/// `ln trace_k[exp(M)]` from the spectrum `mu` of `M`, shifted by `max(mu)`
/// so that large exponents stay finite.
pub fn log_ktrace_exp(mu: &[f64], k: usize) -> f64 {
    let top = mu.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = mu.iter().map(|m| (m - top).exp()).collect();
    k as f64 * top + elementary_symmetric(&shifted, k).ln()
}

/// k-trace from the spectrum `eigenvalues`.
pub fn ktrace_from_eigenvalues(eigenvalues: &[f64], k: usize) -> Result<KTraceValue> {
    let n = eigenvalues.len();
    check_order(n, k)?;
    let value = elementary_symmetric(eigenvalues, k);
    let abs: Vec<f64> = eigenvalues.iter().map(|v| v.abs()).collect();
    let magnitude = elementary_symmetric(&abs, k);
    let condition = if magnitude == 0.0 {
        1.0
    } else if value == 0.0 {
        f64::INFINITY
    } else {
        magnitude / value.abs()
    };
    if condition > CONDITION_WARNING {
        log::warn!("trace_{k} of an {n}x{n} matrix is ill-conditioned (condition {condition:.3e})");
    }
    Ok(KTraceValue {
        n,
        k,
        value,
        condition,
    })
}

pub fn trace_k_eigen(a: &HermitianMatrix, k: usize) -> Result<KTraceValue> {
    check_order(a.dim(), k)?;
    ktrace_from_eigenvalues(&a.eigenvalues()?, k)
}

/// Natural magnitude scale `e_k(|λ|)` for comparing k-trace routes.
pub fn ktrace_scale(a: &HermitianMatrix, k: usize) -> Result<f64> {
    check_order(a.dim(), k)?;
    let abs: Vec<f64> = a.eigenvalues()?.iter().map(|v| v.abs()).collect();
    Ok(elementary_symmetric(&abs, k))
}

fn check_square(a: &CMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            found: a.ncols(),
        });
    }
    Ok(())
}

/// Sum of all `k x k` principal minors.
pub fn trace_k_minors(a: &CMatrix, k: usize) -> Result<C64> {
    check_square(a)?;
    let n = a.nrows();
    check_order(n, k)?;
    let count = binomial(n, k);
    if count > MINOR_BUDGET {
        return Err(Error::Resource {
            what: format!("principal-minor enumeration C({n},{k})"),
            required: count,
            limit: MINOR_BUDGET,
            advice: "use trace_k_eigen".into(),
        });
    }
    let mut buf = Vec::with_capacity(k * k);
    Ok(k_subsets(n, k)
        .iter()
        .map(|s| minor(a, s, s, &mut buf))
        .sum())
}

/// `(-1)^k` times the degree-`(n-k)` coefficient of `det(λI - A)`, by the
/// Faddeev–LeVerrier recurrence.
pub fn trace_k_charpoly(a: &CMatrix, k: usize) -> Result<C64> {
    check_square(a)?;
    let n = a.nrows();
    check_order(n, k)?;
    let mut m = CMatrix::zeros(n, n);
    let mut coeff = C64::new(1.0, 0.0); // c_n
    for j in 1..=k {
        m = a * &m;
        for i in 0..n {
            m[(i, i)] += coeff;
        }
        coeff = -trace(&(a * &m)) / j as f64;
    }
    Ok(if k % 2 == 0 { coeff } else { -coeff })
}

/// `|trace_k[AB] - trace_k[BA]|` through the characteristic-polynomial route.
pub fn check_cyclic(a: &CMatrix, b: &CMatrix, k: usize) -> Result<f64> {
    check_square(a)?;
    check_square(b)?;
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension {
            expected: a.nrows(),
            found: b.nrows(),
        });
    }
    let ab = trace_k_charpoly(&(a * b), k)?;
    let ba = trace_k_charpoly(&(b * a), k)?;
    Ok((ab - ba).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTraceBrackets {
    /// `prod_{i<=k} λ_i(A)`.
    pub lower: f64,
    /// `C(n,k) * lower`.
    pub upper: f64,
    pub value: f64,
}

impl KTraceBrackets {
    /// Whether `lower <= value <= upper` holds up to `rel_tol` of `upper`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        let slack = rel_tol * self.upper.abs().max(self.value.abs());
        self.lower <= self.value + slack && self.value <= self.upper + slack
    }
}

/// Bracket `prod_{i<=k} λ_i <= trace_k[A] <= C(n,k) prod_{i<=k} λ_i` for PSD `A`.
pub fn ktrace_brackets(a: &HermitianMatrix, k: usize) -> Result<KTraceBrackets> {
    check_order(a.dim(), k)?;
    let d = a.decompose()?;
    d.require_psd("k-trace brackets")?;
    let ev: Vec<f64> = d.eigenvalues.iter().map(|v| v.max(0.0)).collect();
    let lower: f64 = ev[..k].iter().product();
    let upper = binomial(a.dim(), k) as f64 * lower;
    let value = ktrace_from_eigenvalues(&ev, k)?.value;
    Ok(KTraceBrackets { lower, upper, value })
}

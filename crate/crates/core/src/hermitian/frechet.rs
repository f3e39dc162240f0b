//! Closed forms of the resolvent integrals
//!
//! ```text
//! T = ∫_0^∞ (A+τ)^-1 C (A+τ)^-1 dτ
//! R = 2 ∫_0^∞ (A+τ)^-1 C (A+τ)^-1 C (A+τ)^-1 dτ
//! ```
//!
//! evaluated in the eigenbasis of `A` through divided differences of `ln`,
//! plus the Fréchet derivative of `exp`. In the eigenbasis `A = diag(a)`,
//! `T'_ij = ln[a_i, a_j] C'_ij` and
//! `R'_ij = 2 Σ_l C'_il C'_lj I3(a_i, a_l, a_j)` where
//! `I3(x, y, z) = ∫ dτ / ((x+τ)(y+τ)(z+τ)) = -ln[x, y, z]`.

use nalgebra::DMatrix;

use super::{decompose, HermitianMatrix, SpectralDecomposition};
use crate::error::Result;
use crate::linalg::{CMatrix, C64};

/// Relative gap below which first divided differences use a midpoint series.
const NEAR_DEGENERATE: f64 = 1e-8;
/// Relative spread below which the second divided difference uses a Taylor
/// expansion about the mean.
const CLUSTER_SPREAD: f64 = 1e-4;

/// `(ln a - ln b) / (a - b)`, with `1/a` on the diagonal. `a, b > 0`.
pub fn log_divided_difference(a: f64, b: f64) -> f64 {
    if a == b {
        return 1.0 / a;
    }
    let m = 0.5 * (a + b);
    let x = (a - b) / (a + b);
    if (a - b).abs() < NEAR_DEGENERATE * a.max(b) {
        // atanh(x)/x = 1 + x^2/3 + x^4/5 + ...
        let x2 = x * x;
        (1.0 + x2 / 3.0 + x2 * x2 / 5.0) / m
    } else if x.abs() < 0.5 {
        x.atanh() / (x * m)
    } else {
        (a.ln() - b.ln()) / (a - b)
    }
}

/// Second divided difference `ln[a, b, c]`, symmetric in its arguments.
pub fn log_second_divided_difference(a: f64, b: f64, c: f64) -> f64 {
    let mut x = [a, b, c];
    x.sort_by(f64::total_cmp);
    let [lo, mid, hi] = x;
    if hi - lo <= CLUSTER_SPREAD * hi {
        let m = (lo + mid + hi) / 3.0;
        let d = [lo - m, mid - m, hi - m];
        let p2: f64 = d.iter().map(|v| v * v).sum();
        let p3: f64 = d.iter().map(|v| v * v * v).sum();
        let m2 = m * m;
        return -0.5 / m2 - p2 / (8.0 * m2 * m2) + p3 / (15.0 * m2 * m2 * m);
    }
    (log_divided_difference(lo, mid) - log_divided_difference(mid, hi)) / (lo - hi)
}

/// `(e^a - e^b) / (a - b) = e^m sinh(δ)/δ` with `m` the midpoint and
/// `δ = (a - b)/2`.
pub fn exp_divided_difference(a: f64, b: f64) -> f64 {
    let m = 0.5 * (a + b);
    let delta = 0.5 * (a - b);
    let ratio = if delta.abs() < NEAR_DEGENERATE {
        1.0 + delta * delta / 6.0
    } else {
        delta.sinh() / delta
    };
    m.exp() * ratio
}

/// Precomputed eigen-data of a PD matrix `A` for repeated `T(A, C)` and
/// `R(A, C)` evaluation.
#[derive(Debug, Clone)]
pub struct LogDerivativeKernel {
    spectral: SpectralDecomposition,
    first: DMatrix<f64>,
    /// `I3(a_i, a_l, a_j)` stored at `[(i * n + l) * n + j]`.
    triple: Vec<f64>,
}

impl LogDerivativeKernel {
    pub fn new(a: &HermitianMatrix) -> Result<Self> {
        let spectral = decompose(a)?;
        spectral.require_pd("log-derivative operator")?;
        let ev = &spectral.eigenvalues;
        let n = ev.len();
        let first = DMatrix::from_fn(n, n, |i, j| log_divided_difference(ev[i], ev[j]));
        let mut triple = vec![0.0; n * n * n];
        for i in 0..n {
            for l in 0..n {
                for j in 0..n {
                    triple[(i * n + l) * n + j] = -log_second_divided_difference(ev[i], ev[l], ev[j]);
                }
            }
        }
        Ok(LogDerivativeKernel {
            spectral,
            first,
            triple,
        })
    }

    pub fn spectral(&self) -> &SpectralDecomposition {
        &self.spectral
    }

    fn to_eigenbasis(&self, c: &HermitianMatrix) -> CMatrix {
        let u = &self.spectral.eigenvectors;
        u.adjoint() * c.matrix() * u
    }

    fn from_eigenbasis(&self, m: CMatrix) -> HermitianMatrix {
        let u = &self.spectral.eigenvectors;
        HermitianMatrix::symmetrized(u * m * u.adjoint())
    }

    /// Direction-`C` derivative of `ln` at `A`.
    pub fn t(&self, c: &HermitianMatrix) -> HermitianMatrix {
        let mut cp = self.to_eigenbasis(c);
        for ((i, j), z) in indexed(&mut cp) {
            *z *= self.first[(i, j)];
        }
        self.from_eigenbasis(cp)
    }

    pub fn r(&self, c: &HermitianMatrix) -> HermitianMatrix {
        let cp = self.to_eigenbasis(c);
        let n = cp.nrows();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..n {
                    acc += cp[(i, l)] * cp[(l, j)] * self.triple[(i * n + l) * n + j];
                }
                out[(i, j)] = acc * 2.0;
            }
        }
        self.from_eigenbasis(out)
    }
}

fn indexed(m: &mut CMatrix) -> impl Iterator<Item = ((usize, usize), &mut C64)> {
    let nrows = m.nrows();
    m.iter_mut().enumerate().map(move |(idx, z)| ((idx % nrows, idx / nrows), z))
}

/// `T(A, C) = ∫_0^∞ (A+τI)^-1 C (A+τI)^-1 dτ`. `A` must be PD.
pub fn t_operator(a: &HermitianMatrix, c: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(LogDerivativeKernel::new(a)?.t(c))
}

/// `R(A, C) = 2 ∫_0^∞ (A+τI)^-1 C (A+τI)^-1 C (A+τI)^-1 dτ`. `A` must be PD.
pub fn r_operator(a: &HermitianMatrix, c: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(LogDerivativeKernel::new(a)?.r(c))
}

/// `d/dt exp(A + t Ȧ)|_0 = ∫_0^1 exp(sA) Ȧ exp((1-s)A) ds`.
pub fn exp_derivative(a: &HermitianMatrix, adot: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = decompose(a)?;
    let u = &d.eigenvectors;
    let ev = &d.eigenvalues;
    let mut m = u.adjoint() * adot.matrix() * u;
    for ((i, j), z) in indexed(&mut m) {
        *z *= exp_divided_difference(ev[i], ev[j]);
    }
    Ok(HermitianMatrix::symmetrized(u * m * u.adjoint()))
}

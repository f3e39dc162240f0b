use nalgebra::SymmetricEigen;
use serde::{Deserialize, Serialize};

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMatrix};

/// Reconstruction residual above which a decomposition is rejected.
const RECONSTRUCTION_REL_TOL: f64 = 1e-11;

/// Default PD/PSD classification tolerance, relative to the spectral radius.
pub const DEFAULT_CONE_REL_TOL: f64 = 1e-12;

/// Eigenvalues (descending) and unitary eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

pub fn decompose(a: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = a.dim();
    let m = a.matrix();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 0)
        .ok_or(Error::EigenSolve { residual: f64::INFINITY })?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |r, k| eig.eigenvectors[(r, order[k])]);
    let d = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };
    let scale = frobenius(m);
    if scale > 0.0 {
        let residual = frobenius(&(d.reconstruct_raw() - m)) / scale;
        if !(residual <= RECONSTRUCTION_REL_TOL) {
            return Err(Error::EigenSolve { residual });
        }
    }
    Ok(d)
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn lambda_min(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.lambda_max().abs().max(self.lambda_min().abs())
    }

    /// Sum of the `k` largest eigenvalues.
    pub fn top_k_sum(&self, k: usize) -> f64 {
        self.eigenvalues[..k].iter().sum()
    }

    /// Sum of the `k` smallest eigenvalues.
    pub fn bottom_k_sum(&self, k: usize) -> f64 {
        self.eigenvalues[self.dim() - k..].iter().sum()
    }

    fn reconstruct_raw(&self) -> CMatrix {
        self.weighted(|l| l)
    }

    /// `U diag(f(lambda)) U*`, without symmetrization.
    fn weighted(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (k, &l) in self.eigenvalues.iter().enumerate() {
            let w = f(l);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= w);
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.reconstruct_raw())
    }

    /// `f(A) = sum_i f(lambda_i) u_i u_i*` with no domain checks.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> HermitianMatrix {
        HermitianMatrix::symmetrized(self.weighted(f))
    }

    pub fn cone(&self, tol: Option<f64>) -> ConeTag {
        ConeTag::classify(self, tol)
    }

    /// Errors unless the spectrum is positive definite under the default tolerance.
    pub fn require_pd(&self, what: &str) -> Result<()> {
        let tag = self.cone(None);
        if tag.classification != Cone::PositiveDefinite {
            return Err(Error::domain(format!("{what} requires a positive definite matrix"), self.lambda_min()));
        }
        Ok(())
    }

    pub fn require_psd(&self, what: &str) -> Result<()> {
        let tag = self.cone(None);
        if tag.classification == Cone::Indefinite {
            return Err(Error::domain(format!("{what} requires a positive semidefinite matrix"), self.lambda_min()));
        }
        Ok(())
    }

    /// `A^s` for PSD `A`; eigenvalues inside the tolerance band are floored
    /// at zero and `0^s` is 0 for `s > 0`, 1 for `s = 0`.
    pub fn powf(&self, s: f64) -> Result<HermitianMatrix> {
        if s < 0.0 {
            self.require_pd("negative matrix power")?;
        } else {
            self.require_psd("matrix power")?;
        }
        Ok(self.apply(|l| scalar_pow(l.max(0.0), s)))
    }
}

/// `x^s` with `0^0 = 1` and `0^s = 0` for `s > 0`.
pub(crate) fn scalar_pow(x: f64, s: f64) -> f64 {
    if x == 0.0 {
        if s == 0.0 {
            1.0
        } else {
            0.0
        }
    } else {
        x.powf(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Cone {
    Indefinite,
    PositiveSemidefinite,
    PositiveDefinite,
}

/// Membership of a matrix in the PSD / PD cones under an explicit tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeTag {
    pub classification: Cone,
    pub tol: f64,
}

impl ConeTag {
    /// `tol` defaults to `1e-12 * spectral radius`.
    pub fn classify(d: &SpectralDecomposition, tol: Option<f64>) -> Self {
        let tol = tol.unwrap_or(DEFAULT_CONE_REL_TOL * d.spectral_radius());
        let lmin = d.lambda_min();
        let classification = if lmin > tol {
            Cone::PositiveDefinite
        } else if lmin >= -tol {
            Cone::PositiveSemidefinite
        } else {
            Cone::Indefinite
        };
        ConeTag { classification, tol }
    }

    pub fn is_psd(&self) -> bool {
        self.classification != Cone::Indefinite
    }

    pub fn is_pd(&self) -> bool {
        self.classification == Cone::PositiveDefinite
    }
}

/// `f(A)` for an arbitrary real scalar function.
pub fn matrix_fn(a: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    Ok(decompose(a)?.apply(f))
}

pub fn exp(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    matrix_fn(a, f64::exp)
}

pub fn ln(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = decompose(a)?;
    d.require_pd("matrix logarithm")?;
    Ok(d.apply(f64::ln))
}

pub fn powf(a: &HermitianMatrix, s: f64) -> Result<HermitianMatrix> {
    decompose(a)?.powf(s)
}

pub fn inverse(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = decompose(a)?;
    let tol = DEFAULT_CONE_REL_TOL * d.spectral_radius();
    if let Some(&l) = d.eigenvalues.iter().find(|l| l.abs() <= tol) {
        return Err(Error::domain("inverse of a singular matrix", l));
    }
    Ok(d.apply(|l| 1.0 / l))
}

impl HermitianMatrix {
    pub fn exp(&self) -> Result<HermitianMatrix> {
        exp(self)
    }

    pub fn ln(&self) -> Result<HermitianMatrix> {
        ln(self)
    }
}

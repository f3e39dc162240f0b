//! Hermitian matrices, their spectral decompositions, matrix functions and
//! the Fréchet-derivative operators of the matrix logarithm and exponential.

mod frechet;
pub mod quadrature;
mod spectral;

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, frobenius, CMatrix, C64};

pub use frechet::{
    exp_derivative, exp_divided_difference, log_divided_difference,
    log_second_divided_difference, r_operator, t_operator, LogDerivativeKernel,
};
pub use spectral::{
    decompose, exp, inverse, ln, matrix_fn, powf, Cone, ConeTag, SpectralDecomposition,
};
pub use quadrature::{gauss_legendre, gauss_legendre_unit};
pub(crate) use spectral::scalar_pow;

/// Relative Frobenius asymmetry accepted by [`HermitianMatrix::new`].
pub const HERMITIZATION_TOL: f64 = 1e-10;

/// Dense complex Hermitian matrix.
///
/// Construction symmetrizes the input as `(M + M*)/2`, so entry `(i, j)` is
/// exactly the conjugate of entry `(j, i)` afterwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Accepts `m` if `||M - M*||_F <= 1e-10 * ||M||_F`.
    pub fn new(m: CMatrix) -> Result<Self> {
        Self::with_tolerance(m, HERMITIZATION_TOL)
    }

    pub fn with_tolerance(m: CMatrix, rel_tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                found: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::arg("Hermitian matrix must have dimension >= 1"));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::arg("matrix has non-finite entries"));
        }
        let asymmetry = frobenius(&(&m - m.adjoint()));
        let tolerance = rel_tol * frobenius(&m);
        if asymmetry > tolerance {
            return Err(Error::NotHermitian {
                asymmetry,
                tolerance,
            });
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes unconditionally. For results of arithmetic on Hermitian
    /// values, where any asymmetry is rounding.
    pub(crate) fn symmetrized(m: CMatrix) -> Self {
        let n = m.nrows();
        let mut out = m.clone();
        for i in 0..n {
            out[(i, i)] = c(m[(i, i)].re);
            for j in i + 1..n {
                let v = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                out[(i, j)] = v;
                out[(j, i)] = v.conj();
            }
        }
        HermitianMatrix { m: out }
    }

    pub fn from_real(m: &DMatrix<f64>) -> Result<Self> {
        Self::new(m.map(c))
    }

    pub fn from_diagonal(d: &[f64]) -> Self {
        assert!(!d.is_empty(), "dimension must be >= 1");
        let n = d.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &v) in d.iter().enumerate() {
            m[(i, i)] = c(v);
        }
        HermitianMatrix { m }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_diagonal(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_diagonal(&vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.m[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.m)
    }

    pub fn scale(&self, s: f64) -> Self {
        HermitianMatrix { m: self.m.map(|z| z * s) }
    }

    /// `U H U*`.
    pub fn congruence(&self, u: &CMatrix) -> Self {
        Self::symmetrized(u * &self.m * u.adjoint())
    }

    /// `alpha * self + beta * other`.
    pub fn lincomb(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        self.check_dim(other);
        HermitianMatrix {
            m: self.m.map(|z| z * alpha) + other.m.map(|z| z * beta),
        }
    }

    pub fn decompose(&self) -> Result<SpectralDecomposition> {
        decompose(self)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(decompose(self)?.eigenvalues)
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "Hermitian operands differ in dimension");
    }
}

impl Add for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn add(self, rhs: Self) -> HermitianMatrix {
        self.check_dim(rhs);
        HermitianMatrix { m: &self.m + &rhs.m }
    }
}

impl Sub for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn sub(self, rhs: Self) -> HermitianMatrix {
        self.check_dim(rhs);
        HermitianMatrix { m: &self.m - &rhs.m }
    }
}

impl Mul<f64> for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn mul(self, s: f64) -> HermitianMatrix {
        self.scale(s)
    }
}

impl Neg for &HermitianMatrix {
    type Output = HermitianMatrix;
    fn neg(self) -> HermitianMatrix {
        self.scale(-1.0)
    }
}

/// On-disk matrix layout. Either `{"re": [[..]], "im": [[..]]}` (row-major,
/// `im` optional) or a row-major array of `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixJson {
    Split {
        re: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        im: Option<Vec<Vec<f64>>>,
    },
    Pairs(Vec<Vec<[f64; 2]>>),
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<CMatrix> {
        let rows: Vec<Vec<C64>> = match self {
            MatrixJson::Split { re, im } => {
                if let Some(im) = im {
                    if im.len() != re.len() {
                        return Err(Error::Dimension {
                            expected: re.len(),
                            found: im.len(),
                        });
                    }
                }
                re.iter()
                    .enumerate()
                    .map(|(i, row)| {
                        let imrow = im.as_ref().map(|m| &m[i]);
                        if let Some(ir) = imrow {
                            if ir.len() != row.len() {
                                return Err(Error::Dimension {
                                    expected: row.len(),
                                    found: ir.len(),
                                });
                            }
                        }
                        Ok(row
                            .iter()
                            .enumerate()
                            .map(|(j, &r)| C64::new(r, imrow.map_or(0.0, |ir| ir[j])))
                            .collect())
                    })
                    .collect::<Result<_>>()?
            }
            MatrixJson::Pairs(rows) => rows
                .iter()
                .map(|row| row.iter().map(|p| C64::new(p[0], p[1])).collect())
                .collect(),
        };
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

impl TryFrom<MatrixJson> for HermitianMatrix {
    type Error = Error;
    fn try_from(v: MatrixJson) -> Result<Self> {
        HermitianMatrix::new(v.to_matrix()?)
    }
}

impl From<HermitianMatrix> for MatrixJson {
    fn from(h: HermitianMatrix) -> Self {
        let n = h.dim();
        let re = (0..n).map(|i| (0..n).map(|j| h.m[(i, j)].re).collect()).collect();
        let im: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| h.m[(i, j)].im).collect()).collect();
        let im = if im.iter().flatten().all(|&v| v == 0.0) {
            None
        } else {
            Some(im)
        };
        MatrixJson::Split { re, im }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_symmetrizes_exactly() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = C64::new(1.0, 1e-14);
        m[(0, 1)] = C64::new(2.0, 1.0);
        m[(1, 0)] = C64::new(2.0 + 1e-13, -1.0);
        m[(1, 1)] = c(3.0);
        let h = HermitianMatrix::new(m).unwrap();
        assert_eq!(h.get(0, 1), h.get(1, 0).conj());
        assert_eq!(h.get(0, 0).im, 0.0);
    }

    #[test]
    fn rejects_asymmetric_input() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0), c(2.0), c(0.0), c(1.0)]);
        assert!(matches!(HermitianMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn rejects_non_square_and_empty() {
        assert!(HermitianMatrix::new(CMatrix::zeros(2, 3)).is_err());
        assert!(HermitianMatrix::new(CMatrix::zeros(0, 0)).is_err());
    }

    #[test]
    fn json_layouts() {
        let a: HermitianMatrix =
            serde_json::from_str(r#"{"re": [[1, 2], [2, 3]], "im": [[0, 1], [-1, 0]]}"#).unwrap();
        let b: HermitianMatrix =
            serde_json::from_str(r#"[[[1, 0], [2, 1]], [[2, -1], [3, 0]]]"#).unwrap();
        assert_eq!(a, b);
        let back: HermitianMatrix = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(a, back);
        let real: HermitianMatrix = serde_json::from_str(r#"{"re": [[1, 0], [0, 2]]}"#).unwrap();
        assert_eq!(real, HermitianMatrix::from_diagonal(&[1.0, 2.0]));
    }
}

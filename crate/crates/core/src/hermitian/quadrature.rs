//! Quadrature rules: Gauss–Legendre nodes and a globally adaptive 15-point
//! Gauss–Kronrod integrator for scalar and matrix-valued integrands.
//!
//! The resolvent-integral oracles here invert `A + τI` by LU factorization
//! and never touch an eigendecomposition of `A`, so they stay independent of
//! the divided-difference closed forms in [`super::LogDerivativeKernel`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul};

use super::HermitianMatrix;
use crate::error::{Error, Result};
use crate::linalg::{frobenius, CMatrix, C64};

/// Relative tolerance of the resolvent-integral oracles.
pub const ORACLE_REL_TOL: f64 = 1e-9;
const MAX_SUBDIVISIONS: usize = 4000;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre recurrence for P_n(x) and P_n'(x)
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss–Legendre rule mapped to `[0, 1]`.
pub fn gauss_legendre_unit(n: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    (
        x.iter().map(|v| 0.5 * (v + 1.0)).collect(),
        w.iter().map(|v| 0.5 * v).collect(),
    )
}

// QUADPACK qk15 abscissae and weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

trait QuadValue: Clone + Add<Output = Self> + Mul<f64, Output = Self> {
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

#[derive(Clone)]
struct MatValue(CMatrix);

impl Add for MatValue {
    type Output = MatValue;
    fn add(self, rhs: Self) -> Self {
        MatValue(self.0 + rhs.0)
    }
}

impl Mul<f64> for MatValue {
    type Output = MatValue;
    fn mul(self, s: f64) -> Self {
        MatValue(self.0 * C64::new(s, 0.0))
    }
}

impl QuadValue for MatValue {
    fn magnitude(&self) -> f64 {
        frobenius(&self.0)
    }
}

fn kronrod15<V: QuadValue>(f: &impl Fn(f64) -> V, a: f64, b: f64) -> (V, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = fc.clone() * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let s = f(center - dx) + f(center + dx);
        kron = kron + s.clone() * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    let err = (kron.clone() + gauss * -1.0).magnitude();
    (kron, err)
}

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    err: f64,
}

impl<V> PartialEq for Segment<V> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<V> Eq for Segment<V> {}
impl<V> PartialOrd for Segment<V> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V> Ord for Segment<V> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive bisection: split the segment with the largest error
/// estimate until the summed error drops below `rel_tol * |integral|`.
fn adaptive<V: QuadValue>(f: impl Fn(f64) -> V, a: f64, b: f64, rel_tol: f64) -> (V, f64) {
    let (value, err) = kronrod15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    for _ in 0..MAX_SUBDIVISIONS {
        let total = heap.iter().map(|s| s.value.clone()).reduce(|x, y| x + y).unwrap();
        let total_err: f64 = heap.iter().map(|s| s.err).sum();
        if total_err <= rel_tol * total.magnitude() || total_err <= 1e-300 {
            return (total, total_err);
        }
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.a + worst.b);
        let (lv, le) = kronrod15(&f, worst.a, mid);
        let (rv, re) = kronrod15(&f, mid, worst.b);
        heap.push(Segment { a: worst.a, b: mid, value: lv, err: le });
        heap.push(Segment { a: mid, b: worst.b, value: rv, err: re });
    }
    let total = heap.iter().map(|s| s.value.clone()).reduce(|x, y| x + y).unwrap();
    let total_err = heap.iter().map(|s| s.err).sum();
    (total, total_err)
}

/// Adaptive Gauss–Kronrod integral of a scalar function on `[a, b]`.
pub fn gauss_kronrod_scalar(f: impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    adaptive(f, a, b, rel_tol).0
}

/// Adaptive Gauss–Kronrod integral of a matrix-valued function, with the
/// achieved error estimate.
pub fn gauss_kronrod_matrix(f: impl Fn(f64) -> CMatrix, a: f64, b: f64, rel_tol: f64) -> (CMatrix, f64) {
    let (v, err) = adaptive(|x| MatValue(f(x)), a, b, rel_tol);
    (v.0, err)
}

fn shifted_inverse(a: &CMatrix, tau: f64) -> Result<CMatrix> {
    let n = a.nrows();
    let mut m = a.clone();
    for i in 0..n {
        m[(i, i)] += tau;
    }
    m.try_inverse()
        .ok_or_else(|| Error::domain("resolvent (A + τI) is singular", -tau))
}

/// Integrates `g((A+τI)^-1)` over `τ ∈ [0, ∞)` via `τ = (1-u)/u`.
fn resolvent_integral(
    a: &HermitianMatrix,
    integrand: impl Fn(&CMatrix) -> CMatrix,
) -> Result<HermitianMatrix> {
    let d = a.decompose()?;
    d.require_pd("resolvent integral")?;
    let am = a.matrix();
    let n = a.dim();
    let (value, _) = gauss_kronrod_matrix(
        |u| {
            let tau = (1.0 - u) / u;
            match shifted_inverse(am, tau) {
                Ok(res) => integrand(&res) * C64::new(1.0 / (u * u), 0.0),
                Err(_) => CMatrix::from_element(n, n, C64::new(f64::NAN, 0.0)),
            }
        },
        0.0,
        1.0,
        ORACLE_REL_TOL,
    );
    if value.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::domain("resolvent quadrature produced non-finite values", d.lambda_min()));
    }
    Ok(HermitianMatrix::symmetrized(value))
}

/// Quadrature evaluation of `T(A, C)`.
pub fn t_operator_quadrature(a: &HermitianMatrix, c: &HermitianMatrix) -> Result<HermitianMatrix> {
    let cm = c.matrix().clone();
    resolvent_integral(a, |res| res * &cm * res)
}

/// Quadrature evaluation of `R(A, C)`.
pub fn r_operator_quadrature(a: &HermitianMatrix, c: &HermitianMatrix) -> Result<HermitianMatrix> {
    let cm = c.matrix().clone();
    resolvent_integral(a, |res| (res * &cm * res * &cm * res) * C64::new(2.0, 0.0))
}

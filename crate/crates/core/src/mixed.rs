//! Mixed discriminants `D(A^1, ..., A^n)` and the Alexandrov–Fenchel family
//! of inequalities.

use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::hermitian::HermitianMatrix;
use crate::linalg::{det_in_place, factorial, CMatrix, C64, ZERO};
use crate::wedge::{mixed_operator, wedge_trace, SubsetBasis};

/// Largest dimension the permutation sum is attempted for.
pub const MAX_BRUTEFORCE_N: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedDiscriminantValue {
    pub n: usize,
    pub value: f64,
    /// Discarded imaginary part.
    pub imaginary: f64,
    /// Argument multiset, e.g. `[A1, A2, I x 3]`.
    pub arguments: String,
}

impl MixedDiscriminantValue {
    fn new(n: usize, z: C64, arguments: String) -> Self {
        if z.im.abs() > 1e-10 * z.re.abs().max(1e-300) && z.im.abs() > 1e-12 {
            log::debug!("mixed discriminant has imaginary residue {:e}", z.im);
        }
        MixedDiscriminantValue {
            n,
            value: z.re,
            imaginary: z.im,
            arguments,
        }
    }
}

fn describe(count: usize, identities: usize) -> String {
    let mut parts: Vec<String> = (1..=count).map(|i| format!("A{i}")).collect();
    if identities > 0 {
        parts.push(format!("I x {identities}"));
    }
    format!("[{}]", parts.join(", "))
}

fn check_square_family(mats: &[CMatrix], n: usize) -> Result<()> {
    for m in mats {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::Dimension {
                expected: n,
                found: m.nrows(),
            });
        }
    }
    Ok(())
}

/// `(1/n!) sum_σ det[A^{σ(1)}_{:,1} | ... | A^{σ(n)}_{:,n}]` as a complex number.
pub fn mixed_disc_complex(mats: &[CMatrix]) -> Result<C64> {
    let n = mats.len();
    if n == 0 {
        return Err(Error::arg("mixed discriminant of an empty family"));
    }
    check_square_family(mats, n)?;
    if n > MAX_BRUTEFORCE_N {
        return Err(Error::Resource {
            what: format!("permutation sum over S_{n}"),
            required: factorial(n) as u128,
            limit: factorial(MAX_BRUTEFORCE_N) as u128,
            advice: "use mixed_disc_via_wedge with identity padding".into(),
        });
    }
    let mut buf = vec![ZERO; n * n];
    let mut acc = ZERO;
    for perm in (0..n).permutations(n) {
        for (col, &src) in perm.iter().enumerate() {
            let m = &mats[src];
            for row in 0..n {
                buf[row * n + col] = m[(row, col)];
            }
        }
        acc += det_in_place(&mut buf, n);
    }
    Ok(acc / factorial(n))
}

pub fn mixed_disc_bruteforce(mats: &[CMatrix]) -> Result<MixedDiscriminantValue> {
    let z = mixed_disc_complex(mats)?;
    Ok(MixedDiscriminantValue::new(mats.len(), z, describe(mats.len(), 0)))
}

/// `mats` followed by identities up to length `n`.
pub fn pad_with_identity(mats: &[CMatrix], n: usize) -> Vec<CMatrix> {
    let mut out = mats.to_vec();
    out.resize(n.max(mats.len()), CMatrix::identity(n, n));
    out
}

/// `D(A^1, ..., A^k, I, ..., I) = (n-k)!/n! * tr M(A^1, ..., A^k)`.
pub fn mixed_disc_via_wedge(mats: &[CMatrix], n: usize) -> Result<MixedDiscriminantValue> {
    let k = mats.len();
    check_square_family(mats, n)?;
    let basis = Arc::new(SubsetBasis::new(n, k)?);
    let t = wedge_trace(&mixed_operator(mats, &basis)?);
    let z = t * (factorial(n - k) / factorial(n));
    Ok(MixedDiscriminantValue::new(n, z, describe(k, n - k)))
}

fn family(parts: &[(&HermitianMatrix, usize)], rest: &[HermitianMatrix]) -> Vec<CMatrix> {
    let mut out = Vec::new();
    for (m, count) in parts {
        for _ in 0..*count {
            out.push(m.matrix().clone());
        }
    }
    out.extend(rest.iter().map(|m| m.matrix().clone()));
    out
}

fn disc(parts: &[(&HermitianMatrix, usize)], rest: &[HermitianMatrix]) -> Result<f64> {
    Ok(mixed_disc_complex(&family(parts, rest))?.re)
}

/// `D(A,B,rest)^2 - D(A,A,rest) D(B,B,rest)`.
pub fn af_gap(a: &HermitianMatrix, b: &HermitianMatrix, rest: &[HermitianMatrix]) -> Result<Gap> {
    let ab = disc(&[(a, 1), (b, 1)], rest)?;
    let aa = disc(&[(a, 2)], rest)?;
    let bb = disc(&[(b, 2)], rest)?;
    Ok(Gap::signed(ab * ab, aa * bb))
}

/// `D(A[l], B[k-l], rest)^k - D(A[k], rest)^l D(B[k], rest)^(k-l)` with
/// `k = n - rest.len()`.
pub fn general_af_gap(a: &HermitianMatrix, b: &HermitianMatrix, rest: &[HermitianMatrix], l: usize) -> Result<Gap> {
    let n = a.dim();
    if rest.len() > n {
        return Err(Error::arg("more fixed arguments than the dimension"));
    }
    let k = n - rest.len();
    if l > k {
        return Err(Error::arg(format!("split l={l} exceeds k={k}")));
    }
    let mixed = disc(&[(a, l), (b, k - l)], rest)?;
    let da = disc(&[(a, k)], rest)?;
    let db = disc(&[(b, k)], rest)?;
    let lhs = mixed.powi(k as i32);
    let rhs = da.powi(l as i32) * db.powi((k - l) as i32);
    Ok(Gap::signed(lhs, rhs))
}

/// Chord gap of `A ↦ D(A[k], rest)^{1/k}` at `τA + (1-τ)B`.
pub fn bm_concavity_gap(a: &HermitianMatrix, b: &HermitianMatrix, rest: &[HermitianMatrix], tau: f64) -> Result<Gap> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::arg(format!("tau={tau} outside [0, 1]")));
    }
    let n = a.dim();
    if rest.len() >= n {
        return Err(Error::arg("need at least one free slot"));
    }
    let k = n - rest.len();
    let root = |v: f64| v.max(0.0).powf(1.0 / k as f64);
    let mid = a.lincomb(tau, b, 1.0 - tau);
    let lhs = root(disc(&[(&mid, k)], rest)?);
    let rhs = tau * root(disc(&[(a, k)], rest)?) + (1.0 - tau) * root(disc(&[(b, k)], rest)?);
    Ok(Gap::signed(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, determinant, trace};
    use crate::random::InstanceRng;

    #[test]
    fn diagonal_family_is_determinant() {
        let mut rng = InstanceRng::new(1, 0);
        let a = rng.square(4);
        let d = mixed_disc_complex(&vec![a.clone(); 4]).unwrap();
        assert!((d - determinant(&a)).norm() < 1e-12 * d.norm().max(1.0));
        let id = CMatrix::identity(5, 5);
        assert!((mixed_disc_complex(&vec![id; 5]).unwrap() - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn two_by_two_formula() {
        let mut rng = InstanceRng::new(2, 0);
        let (a, b) = (rng.square(2), rng.square(2));
        let want = (trace(&a) * trace(&b) - trace(&(&a * &b))) / 2.0;
        assert!((mixed_disc_complex(&[a, b]).unwrap() - want).norm() < 1e-14);
    }

    #[test]
    fn bruteforce_budget() {
        let id = CMatrix::identity(9, 9);
        assert!(matches!(mixed_disc_bruteforce(&vec![id; 9]), Err(Error::Resource { .. })));
    }

    #[test]
    fn wedge_route_matches_padded_bruteforce() {
        let mut rng = InstanceRng::new(3, 0);
        let mats: Vec<CMatrix> = (0..3).map(|_| rng.hermitian(5).into_matrix()).collect();
        let w = mixed_disc_via_wedge(&mats, 5).unwrap();
        let b = mixed_disc_bruteforce(&pad_with_identity(&mats, 5)).unwrap();
        assert!((w.value - b.value).abs() <= 1e-9 * b.value.abs().max(1e-300));
        assert_eq!(w.arguments, "[A1, A2, A3, I x 2]");
    }

    #[test]
    fn ktrace_relation() {
        let mut rng = InstanceRng::new(4, 0);
        let a = rng.pd(5);
        let d = mixed_disc_via_wedge(&vec![a.matrix().clone(); 2], 5).unwrap().value;
        let t = crate::ktrace::trace_k_eigen(&a, 2).unwrap().value;
        assert!((d * 10.0 - t).abs() <= 1e-10 * t);
    }

    #[test]
    fn af_equality_cases() {
        let mut rng = InstanceRng::new(5, 0);
        let a = rng.pd(4);
        let rest: Vec<HermitianMatrix> = (0..2).map(|_| rng.pd(4)).collect();
        let g = af_gap(&a, &a.scale(2.5), &rest).unwrap();
        assert!(g.within(1e-10), "{g:?}");
        let g = af_gap(&a, &HermitianMatrix::zeros(4), &rest).unwrap();
        assert_eq!((g.lhs, g.rhs), (0.0, 0.0));
        let b = rng.hermitian(4);
        assert!(af_gap(&a, &b, &rest).unwrap().nonnegative(1e-9));
    }

    #[test]
    fn general_af_and_bm() {
        let mut rng = InstanceRng::new(6, 0);
        let (a, b) = (rng.pd(4), rng.pd(4));
        let rest: Vec<HermitianMatrix> = (0..2).map(|_| rng.pd(4)).collect();
        assert!(general_af_gap(&a, &b, &rest, 2).unwrap().within(1e-12));
        assert!(general_af_gap(&a, &b, &rest, 0).unwrap().within(1e-12));
        assert!(general_af_gap(&a, &b, &rest, 1).unwrap().nonnegative(1e-9));
        for tau in [0.0, 1.0] {
            assert!(bm_concavity_gap(&a, &b, &rest, tau).unwrap().within(1e-12));
        }
        assert!(bm_concavity_gap(&a, &a, &rest, 0.3).unwrap().within(1e-12));
        assert!(bm_concavity_gap(&a, &b, &rest, 0.5).unwrap().nonnegative(1e-9));
        assert!(bm_concavity_gap(&a, &b, &rest, 1.5).is_err());
    }
}

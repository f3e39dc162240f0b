//! Operators on the k-th exterior power of `C^n`, in the basis of
//! lexicographically ordered k-subsets `e_{i_1} ∧ ... ∧ e_{i_k}`.
//!
//! Every operator here is assembled from the same primitive: for basis
//! subsets `I`, `J` and an assignment of one matrix to each slot `r`,
//! the entry contribution is `det[X_{s(r)}[i_a, j_r]]`.

use std::collections::HashMap;
use std::sync::Arc;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::hermitian::HermitianMatrix;
use crate::ktrace::elementary_symmetric;
use crate::linalg::{binomial, det_in_place, frobenius, k_subsets, trace, CMatrix, C64, ZERO};

pub const MAX_WEDGE_N: usize = 12;
pub const MAX_WEDGE_K: usize = 8;
/// Estimated flop budget for assembling one operator.
pub const WEDGE_WORK_BUDGET: u128 = 4_000_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetBasis {
    n: usize,
    k: usize,
    subsets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl SubsetBasis {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::arg(format!("wedge grade k={k} outside 1..={n}")));
        }
        if n > MAX_WEDGE_N || k > MAX_WEDGE_K {
            return Err(Error::Resource {
                what: format!("wedge space of grade {k} over dimension {n}"),
                required: binomial(n, k),
                limit: binomial(MAX_WEDGE_N, MAX_WEDGE_N / 2),
                advice: format!("keep n <= {MAX_WEDGE_N} and k <= {MAX_WEDGE_K}"),
            });
        }
        let subsets = k_subsets(n, k);
        let index = subsets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Ok(SubsetBasis { n, k, subsets, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.subsets.len()
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, i: usize) -> &[usize] {
        &self.subsets[i]
    }

    pub fn position(&self, subset: &[usize]) -> Option<usize> {
        self.index.get(subset).copied()
    }
}

/// Dense operator on the wedge space.
#[derive(Debug, Clone, PartialEq)]
pub struct WedgeOperator {
    basis: Arc<SubsetBasis>,
    entries: CMatrix,
}

impl WedgeOperator {
    pub fn from_entries(basis: Arc<SubsetBasis>, entries: CMatrix) -> Result<Self> {
        let d = basis.dim();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::Dimension {
                expected: d,
                found: entries.nrows(),
            });
        }
        Ok(WedgeOperator { basis, entries })
    }

    pub fn identity(basis: Arc<SubsetBasis>) -> Self {
        let d = basis.dim();
        WedgeOperator {
            basis,
            entries: CMatrix::identity(d, d),
        }
    }

    pub fn zeros(basis: Arc<SubsetBasis>) -> Self {
        let d = basis.dim();
        WedgeOperator {
            basis,
            entries: CMatrix::zeros(d, d),
        }
    }

    pub fn basis(&self) -> &Arc<SubsetBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[(i, j)]
    }

    fn same_basis(&self, other: &Self) -> Result<()> {
        if self.basis.n != other.basis.n || self.basis.k != other.basis.k {
            return Err(Error::Dimension {
                expected: self.basis.dim(),
                found: other.basis.dim(),
            });
        }
        Ok(())
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(WedgeOperator {
            basis: self.basis.clone(),
            entries: &self.entries * &other.entries,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(WedgeOperator {
            basis: self.basis.clone(),
            entries: &self.entries + &other.entries,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_basis(other)?;
        Ok(WedgeOperator {
            basis: self.basis.clone(),
            entries: &self.entries - &other.entries,
        })
    }

    pub fn scale(&self, s: C64) -> Self {
        WedgeOperator {
            basis: self.basis.clone(),
            entries: &self.entries * s,
        }
    }

    /// Adjoint with respect to the wedge inner product; the subset basis is
    /// orthonormal, so this is the conjugate transpose.
    pub fn adjoint(&self) -> Self {
        WedgeOperator {
            basis: self.basis.clone(),
            entries: self.entries.adjoint(),
        }
    }

    pub fn trace(&self) -> C64 {
        trace(&self.entries)
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.entries)
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.basis.dim();
        (0..d).all(|i| (0..d).all(|j| (self.entries[(i, j)] - self.entries[(j, i)].conj()).norm() <= tol))
    }

    /// Eigenvalues (descending) of a Hermitian operator.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        HermitianMatrix::new(self.entries.clone())?.eigenvalues()
    }
}

pub fn wedge_trace(f: &WedgeOperator) -> C64 {
    f.trace()
}

fn check_args(mats: &[&CMatrix], basis: &SubsetBasis) -> Result<()> {
    for m in mats {
        if m.nrows() != basis.n || m.ncols() != basis.n {
            return Err(Error::Dimension {
                expected: basis.n,
                found: if m.nrows() != basis.n { m.nrows() } else { m.ncols() },
            });
        }
    }
    Ok(())
}

fn check_work(basis: &SubsetBasis, assignments: usize) -> Result<()> {
    let d = basis.dim() as u128;
    let k = basis.k as u128;
    let work = d * d * assignments as u128 * (k * k * k / 3 + 1);
    if work > WEDGE_WORK_BUDGET {
        return Err(Error::Resource {
            what: format!("wedge operator assembly (n={}, k={})", basis.n, basis.k),
            required: work,
            limit: WEDGE_WORK_BUDGET,
            advice: "reduce n or k".into(),
        });
    }
    Ok(())
}

/// Entry `(I, J) = sum_s det[ mats[s[r]][i_a, j_r] ]_{a, r}`.
fn assemble(mats: &[&CMatrix], assignments: &[Vec<usize>], basis: &Arc<SubsetBasis>) -> Result<WedgeOperator> {
    check_args(mats, basis)?;
    check_work(basis, assignments.len())?;
    let d = basis.dim();
    let k = basis.k;
    let rows: Vec<Vec<C64>> = (0..d)
        .into_par_iter()
        .map(|ii| {
            let rows_i = basis.subset(ii);
            let mut buf = vec![ZERO; k * k];
            (0..d)
                .map(|jj| {
                    let cols = basis.subset(jj);
                    let mut acc = ZERO;
                    for slots in assignments {
                        for (r, &col) in cols.iter().enumerate() {
                            let m = mats[slots[r]];
                            for (a, &row) in rows_i.iter().enumerate() {
                                buf[a * k + r] = m[(row, col)];
                            }
                        }
                        acc += det_in_place(&mut buf, k);
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let entries = CMatrix::from_fn(d, d, |i, j| rows[i][j]);
    Ok(WedgeOperator {
        basis: basis.clone(),
        entries,
    })
}

/// The symmetrized operator `M(A^1, ..., A^k)`:
/// `v_1 ∧ ... ∧ v_k ↦ sum_σ A^{σ(1)} v_1 ∧ ... ∧ A^{σ(k)} v_k`,
/// evaluated by expanding every permutation term in the basis.
pub fn mixed_operator(mats: &[CMatrix], basis: &Arc<SubsetBasis>) -> Result<WedgeOperator> {
    if mats.len() != basis.k {
        return Err(Error::arg(format!(
            "mixed operator of grade {} needs {} matrices, got {}",
            basis.k,
            basis.k,
            mats.len()
        )));
    }
    let perms: Vec<Vec<usize>> = (0..basis.k).permutations(basis.k).collect();
    let refs: Vec<&CMatrix> = mats.iter().collect();
    assemble(&refs, &perms, basis)
}

/// k-th compound of `a`: entries are the minors `det a[I, J]`.
pub fn m0(a: &CMatrix, basis: &Arc<SubsetBasis>) -> Result<WedgeOperator> {
    assemble(&[a], &[vec![0; basis.k]], basis)
}

/// `M(A, B, ..., B) / (k-1)!`, i.e. the sum over which slot receives `A`.
pub fn m1(a: &CMatrix, b: &CMatrix, basis: &Arc<SubsetBasis>) -> Result<WedgeOperator> {
    let k = basis.k;
    let assignments: Vec<Vec<usize>> = (0..k)
        .map(|r| (0..k).map(|s| if s == r { 0 } else { 1 }).collect())
        .collect();
    assemble(&[a, b], &assignments, basis)
}

/// `M(A, B, C, ..., C) / (k-2)!`, the sum over ordered slot pairs receiving
/// `A` and `B`; zero at grade 1.
pub fn m2(a: &CMatrix, b: &CMatrix, c: &CMatrix, basis: &Arc<SubsetBasis>) -> Result<WedgeOperator> {
    let k = basis.k;
    let assignments: Vec<Vec<usize>> = (0..k)
        .flat_map(|r| (0..k).filter(move |&q| q != r).map(move |q| (r, q)))
        .map(|(r, q)| {
            (0..k)
                .map(|s| if s == r { 0 } else if s == q { 1 } else { 2 })
                .collect()
        })
        .collect();
    if assignments.is_empty() {
        check_args(&[a, b, c], basis)?;
        return Ok(WedgeOperator::zeros(basis.clone()));
    }
    assemble(&[a, b, c], &assignments, basis)
}

/// `p`, `d_i`, `g_ij` of a real vector: the elementary symmetric polynomial
/// of order `k` of all entries, of all entries but `i`, and of order `k-2`
/// of all entries but `i` and `j` (with `d` of order `k-1`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricForms {
    pub lambdas: Vec<f64>,
    pub k: usize,
    pub p: f64,
    pub d: Vec<f64>,
    /// Row-major `n x n`, zero diagonal.
    pub g: Vec<Vec<f64>>,
}

fn esym(values: &[f64], order: isize) -> f64 {
    if order < 0 {
        0.0
    } else {
        elementary_symmetric(values, order as usize)
    }
}

pub fn symmetric_forms(lambdas: &[f64], k: usize) -> Result<SymmetricForms> {
    if k == 0 {
        return Err(Error::arg("symmetric forms need k >= 1"));
    }
    let n = lambdas.len();
    let ki = k as isize;
    let p = esym(lambdas, ki);
    let mut rest = Vec::with_capacity(n);
    let d = (0..n)
        .map(|i| {
            rest.clear();
            rest.extend(lambdas.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, &v)| v));
            esym(&rest, ki - 1)
        })
        .collect();
    let g = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return 0.0;
                    }
                    let rest: Vec<f64> = lambdas
                        .iter()
                        .enumerate()
                        .filter(|&(l, _)| l != i && l != j)
                        .map(|(_, &v)| v)
                        .collect();
                    esym(&rest, ki - 2)
                })
                .collect()
        })
        .collect();
    Ok(SymmetricForms {
        lambdas: lambdas.to_vec(),
        k,
        p,
        d,
        g,
    })
}

impl SymmetricForms {
    /// Largest relative residual of `p^k = λ_i d_i^k + d_i^{k+1}` and
    /// `d_i^k = λ_j g_ij^k + g_ij^{k+1}` over all `i != j`.
    pub fn expansion_residual(&self) -> Result<f64> {
        let next = symmetric_forms(&self.lambdas, self.k + 1)?;
        let n = self.lambdas.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let rhs = self.lambdas[i] * self.d[i] + next.d[i];
            let scale = self.p.abs().max(rhs.abs()).max(1.0);
            worst = worst.max((self.p - rhs).abs() / scale);
            for j in 0..n {
                if i == j {
                    continue;
                }
                let rhs = self.lambdas[j] * self.g[i][j] + next.g[i][j];
                let scale = self.d[i].abs().max(rhs.abs()).max(1.0);
                worst = worst.max((self.d[i] - rhs).abs() / scale);
            }
        }
        Ok(worst)
    }
}

fn diagonal(lambdas: &[f64]) -> CMatrix {
    let n = lambdas.len();
    CMatrix::from_fn(n, n, |i, j| if i == j { C64::new(lambdas[i], 0.0) } else { ZERO })
}

fn complex_gap(lhs: C64, rhs: C64) -> Gap {
    Gap::norm(lhs.norm(), rhs.norm(), (lhs - rhs).norm())
}

/// Gaps `|wedge side - formula side|` for the three diagonal trace identities
/// `tr M0(Λ) = p`, `tr M1(A;Λ) = sum A_ii d_i`,
/// `tr M2(A,B;Λ) = sum (A_ii B_jj - A_ji B_ij) g_ij`.
pub fn verify_identities(a: &CMatrix, b: &CMatrix, lambdas: &[f64], k: usize) -> Result<[Gap; 3]> {
    let n = lambdas.len();
    let basis = Arc::new(SubsetBasis::new(n, k)?);
    let lam = diagonal(lambdas);
    let forms = symmetric_forms(lambdas, k)?;

    let w0 = m0(&lam, &basis)?.trace();
    let w1 = m1(a, &lam, &basis)?.trace();
    let w2 = m2(a, b, &lam, &basis)?.trace();

    let f0 = C64::new(forms.p, 0.0);
    let f1: C64 = (0..n).map(|i| a[(i, i)] * forms.d[i]).sum();
    let mut f2 = ZERO;
    for i in 0..n {
        for j in 0..n {
            f2 += (a[(i, i)] * b[(j, j)] - a[(j, i)] * b[(i, j)]) * forms.g[i][j];
        }
    }
    Ok([complex_gap(w0, f0), complex_gap(w1, f1), complex_gap(w2, f2)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyGaps {
    /// `M0(AB) = M0(A)M0(B)`, `M1(A;B)M0(C) = M1(AC;BC)`,
    /// `M0(C)M1(A;B) = M1(CA;CB)`, `M1(A;C)M1(B;D) = M2(AD,CB;CD) + M1(AB;CD)`.
    pub product: [Gap; 4],
    /// `d/dt M0(A(t)) = M1(A';A)` and
    /// `d/dt M1(A(t);B(t)) = M1(A';B) + M2(A,B';B)`, by central differences.
    pub derivative: [Gap; 2],
}

fn op_gap(lhs: &WedgeOperator, rhs: &WedgeOperator) -> Result<Gap> {
    Ok(Gap::norm(lhs.frobenius_norm(), rhs.frobenius_norm(), lhs.distance(rhs)?))
}

/// Product and derivative identities at grade `k`, with derivatives along
/// `A(t) = A + t Adot`, `B(t) = B + t Bdot` at `t = 0` and step `h`.
#[allow(clippy::too_many_arguments)]
pub fn verify_product_derivative_properties(
    a: &CMatrix,
    b: &CMatrix,
    c: &CMatrix,
    d: &CMatrix,
    adot: &CMatrix,
    bdot: &CMatrix,
    k: usize,
    h: f64,
) -> Result<PropertyGaps> {
    let basis = Arc::new(SubsetBasis::new(a.nrows(), k)?);
    let p1 = op_gap(&m0(&(a * b), &basis)?, &m0(a, &basis)?.compose(&m0(b, &basis)?)?)?;
    let p2 = op_gap(
        &m1(a, b, &basis)?.compose(&m0(c, &basis)?)?,
        &m1(&(a * c), &(b * c), &basis)?,
    )?;
    let p3 = op_gap(
        &m0(c, &basis)?.compose(&m1(a, b, &basis)?)?,
        &m1(&(c * a), &(c * b), &basis)?,
    )?;
    let cd = c * d;
    let p4 = op_gap(
        &m1(a, c, &basis)?.compose(&m1(b, d, &basis)?)?,
        &m2(&(a * d), &(c * b), &cd, &basis)?.add(&m1(&(a * b), &cd, &basis)?)?,
    )?;

    let hc = C64::new(h, 0.0);
    let inv2h = C64::new(0.5 / h, 0.0);
    let ap = a + adot * hc;
    let am = a - adot * hc;
    let bp = b + bdot * hc;
    let bm = b - bdot * hc;
    let fd0 = m0(&ap, &basis)?.sub(&m0(&am, &basis)?)?.scale(inv2h);
    let d1 = op_gap(&fd0, &m1(adot, a, &basis)?)?;
    let fd1 = m1(&ap, &bp, &basis)?.sub(&m1(&am, &bm, &basis)?)?.scale(inv2h);
    let want = m1(adot, b, &basis)?.add(&m2(a, bdot, b, &basis)?)?;
    let d2 = op_gap(&fd1, &want)?;
    Ok(PropertyGaps {
        product: [p1, p2, p3, p4],
        derivative: [d1, d2],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, factorial};
    use crate::random::InstanceRng;

    fn basis(n: usize, k: usize) -> Arc<SubsetBasis> {
        Arc::new(SubsetBasis::new(n, k).unwrap())
    }

    #[test]
    fn basis_layout() {
        let b = basis(4, 2);
        assert_eq!(b.dim(), 6);
        assert_eq!(b.subset(0), &[0, 1]);
        assert_eq!(b.subset(5), &[2, 3]);
        assert_eq!(b.position(&[1, 3]), Some(4));
        assert!(SubsetBasis::new(3, 0).is_err());
        assert!(SubsetBasis::new(3, 4).is_err());
        assert!(matches!(SubsetBasis::new(13, 2), Err(Error::Resource { .. })));
    }

    #[test]
    fn mixed_operator_of_identities() {
        let b = basis(4, 3);
        let id = CMatrix::identity(4, 4);
        let m = mixed_operator(&[id.clone(), id.clone(), id], &b).unwrap();
        let want = WedgeOperator::identity(b.clone()).scale(c(factorial(3)));
        assert!(m.distance(&want).unwrap() < 1e-14);
    }

    #[test]
    fn two_by_two_diagonal_mixed_operator() {
        let b = basis(2, 2);
        let a1 = diagonal(&[2.0, 3.0]);
        let a2 = diagonal(&[5.0, 7.0]);
        let m = mixed_operator(&[a1, a2], &b).unwrap();
        assert_eq!(m.entry(0, 0), c(2.0 * 7.0 + 3.0 * 5.0));
    }

    #[test]
    fn normalized_operators_match_definition() {
        let mut rng = InstanceRng::new(3, 0);
        let (a, bm, cm) = (rng.square(4), rng.square(4), rng.square(4));
        for k in 1..=4 {
            let b = basis(4, k);
            let full0 = mixed_operator(&vec![a.clone(); k], &b).unwrap().scale(c(1.0 / factorial(k)));
            assert!(m0(&a, &b).unwrap().distance(&full0).unwrap() < 1e-11);
            let mut args = vec![bm.clone(); k];
            args[0] = a.clone();
            let full1 = mixed_operator(&args, &b).unwrap().scale(c(1.0 / factorial(k - 1)));
            assert!(m1(&a, &bm, &b).unwrap().distance(&full1).unwrap() < 1e-11);
            if k >= 2 {
                let mut args = vec![cm.clone(); k];
                args[0] = a.clone();
                args[1] = bm.clone();
                let full2 = mixed_operator(&args, &b).unwrap().scale(c(1.0 / factorial(k - 2)));
                assert!(m2(&a, &bm, &cm, &b).unwrap().distance(&full2).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn grade_conventions() {
        let mut rng = InstanceRng::new(4, 0);
        let (a, bm, cm) = (rng.square(3), rng.square(3), rng.square(3));
        let b1 = basis(3, 1);
        assert_eq!(m2(&a, &bm, &cm, &b1).unwrap(), WedgeOperator::zeros(b1.clone()));
        assert!(m1(&a, &bm, &b1).unwrap().distance(&m0(&a, &b1).unwrap()).unwrap() < 1e-15);
        let b2 = basis(3, 2);
        assert!(m2(&a, &bm, &cm, &b2).unwrap().distance(&m1(&a, &bm, &b2).unwrap()).unwrap() < 1e-13);
    }

    #[test]
    fn compound_identity_and_inverse() {
        let b = basis(5, 2);
        let id = m0(&CMatrix::identity(5, 5), &b).unwrap();
        assert_eq!(id, WedgeOperator::identity(b.clone()));
        let mut rng = InstanceRng::new(5, 0);
        let a = rng.square(5);
        let inv = a.clone().try_inverse().unwrap();
        let prod = m0(&a, &b).unwrap().compose(&m0(&inv, &b).unwrap()).unwrap();
        assert!(prod.distance(&id).unwrap() < 1e-11);
    }

    #[test]
    fn compound_trace_is_ktrace() {
        let mut rng = InstanceRng::new(6, 0);
        let a = rng.hermitian(5);
        for k in 1..=5 {
            let t = wedge_trace(&m0(a.matrix(), &basis(5, k)).unwrap());
            let e = crate::ktrace::trace_k_eigen(&a, k).unwrap().value;
            let s = crate::ktrace::ktrace_scale(&a, k).unwrap();
            assert!((t.re - e).abs() <= 1e-11 * s.max(1.0), "k={k}");
        }
        assert_eq!(wedge_trace(&WedgeOperator::identity(basis(6, 3))), c(20.0));
    }

    #[test]
    fn symmetric_forms_by_hand() {
        let f = symmetric_forms(&[1.0, 2.0, 3.0], 2).unwrap();
        assert_eq!(f.p, 11.0);
        assert_eq!(f.d[0], 5.0);
        assert_eq!(f.g[0][1], 1.0);
        assert_eq!(f.g[1][1], 0.0);
        let f = symmetric_forms(&[1.0, 2.0, 3.0], 1).unwrap();
        assert_eq!(f.d, vec![1.0; 3]);
        assert!(f.g.iter().flatten().all(|&v| v == 0.0));
        let f = symmetric_forms(&[1.0, 2.0, 3.0], 4).unwrap();
        assert_eq!(f.p, 0.0);
        assert!(f.d.iter().all(|&v| v == 0.0));
        assert!(f.g.iter().flatten().all(|&v| v == 0.0));
        assert!(symmetric_forms(&[1.0], 0).is_err());
    }

    #[test]
    fn expansion_relations_hold() {
        let mut rng = InstanceRng::new(9, 0);
        let l: Vec<f64> = (0..6).map(|_| rng.gaussian()).collect();
        for k in 1..=7 {
            assert!(symmetric_forms(&l, k).unwrap().expansion_residual().unwrap() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn identities_on_identity_arguments() {
        let id = CMatrix::identity(4, 4);
        for k in 1..=4 {
            let g = verify_identities(&id, &id, &[1.0; 4], k).unwrap();
            assert_eq!(g[0].lhs, binomial(4, k) as f64);
            assert!(g.iter().all(|g| g.gap == 0.0), "k={k}");
        }
    }

    #[test]
    fn product_and_derivative_properties() {
        let mut rng = InstanceRng::new(10, 0);
        let m: Vec<CMatrix> = (0..6).map(|_| rng.square(4)).collect();
        for k in 1..=4 {
            let g = verify_product_derivative_properties(&m[0], &m[1], &m[2], &m[3], &m[4], &m[5], k, 1e-5).unwrap();
            for p in g.product {
                assert!(p.within(1e-10), "k={k} {p:?}");
            }
            for d in g.derivative {
                assert!(d.within(1e-5), "k={k} {d:?}");
            }
        }
        let id = CMatrix::identity(3, 3);
        let z = CMatrix::zeros(3, 3);
        let g = verify_product_derivative_properties(&id, &id, &id, &id, &z, &z, 2, 1e-5).unwrap();
        assert!(g.product.iter().chain(&g.derivative).all(|g| g.gap == 0.0));
    }
}

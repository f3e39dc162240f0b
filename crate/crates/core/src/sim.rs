//! Erdős–Rényi Laplacian ensembles, Monte Carlo sampling of `Y = sum X^(i)`,
//! and exhaustive enumeration over the joint support.
//!
//! Sample `s` draws from ChaCha stream `s` of the master seed, so statistics do
//! not depend on the worker count. Samples are processed in fixed chunks whose
//! partial statistics are merged in chunk order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleSpec, Summand};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::random::seed_bytes;

/// Joint-support cap for exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: u128 = 1_000_000;
/// Sample-count cap for Monte Carlo runs.
pub const MAX_SAMPLES: u64 = 100_000_000;
const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeWeight {
    pub p: f64,
    pub w: f64,
}

/// Unit-weight sub-Laplacian of edge `(i, j)`: `(e_i - e_j)(e_i - e_j)^T`.
pub fn edge_laplacian(n: usize, i: usize, j: usize) -> HermitianMatrix {
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    m[(i, i)] = 1.0;
    m[(j, j)] = 1.0;
    m[(i, j)] = -1.0;
    m[(j, i)] = -1.0;
    HermitianMatrix::from_real(&m).expect("edge Laplacian is symmetric")
}

/// One summand per vertex pair, weight `w` with probability `p` per atom.
pub fn er_weighted_ensemble(n: usize, weights: &[EdgeWeight]) -> Result<EnsembleSpec> {
    if n < 2 {
        return Err(Error::arg("a graph ensemble needs n >= 2"));
    }
    if weights.iter().any(|w| !(w.w.is_finite() && w.w >= 0.0)) {
        return Err(Error::arg("edge weights must be finite and nonnegative"));
    }
    let w_max = weights.iter().filter(|w| w.p > 0.0).map(|w| w.w).fold(0.0, f64::max);
    let mut summands = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let x = edge_laplacian(n, i, j);
            summands.push(Summand::from_pairs(
                weights.iter().filter(|w| w.p > 0.0).map(|w| (w.p, x.scale(w.w))).collect(),
            ));
        }
    }
    EnsembleSpec::new(n, summands, Some(2.0 * w_max))
}

/// Bernoulli(`p`) edges of weight `w_max`; `c = 2 w_max`.
pub fn er_laplacian_ensemble(n: usize, p: f64, w_max: f64) -> Result<EnsembleSpec> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::arg(format!("edge probability {p} outside [0, 1]")));
    }
    let mut spec = er_weighted_ensemble(n, &[EdgeWeight { p: 1.0 - p, w: 0.0 }, EdgeWeight { p, w: w_max }])?;
    spec.c = Some(2.0 * w_max);
    Ok(spec)
}

/// `(sum of the k largest, sum of the k smallest)` of a descending spectrum.
pub fn eigen_sums(desc: &[f64], k: usize) -> (f64, f64) {
    let top = desc[..k].iter().sum();
    let bottom = desc[desc.len() - k..].iter().sum();
    (top, bottom)
}

/// Running mean and centered second moment, mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1.0;
        let delta = x - self.mean;
        self.mean += delta / self.count;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0.0 {
            return other;
        }
        if other.count == 0.0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        Moments {
            count,
            mean: self.mean + delta * (other.count / count),
            m2: self.m2 + other.m2 + delta * delta * (self.count * other.count / count),
        }
    }

    fn stderr(&self) -> f64 {
        if self.count < 2.0 {
            0.0
        } else {
            (self.m2 / (self.count - 1.0) / self.count).sqrt()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KStats {
    pub k: usize,
    pub top_mean: f64,
    pub top_stderr: f64,
    pub bottom_mean: f64,
    pub bottom_stderr: f64,
    /// Frequency of `top-k sum >= t` per threshold.
    pub top_tail: Vec<f64>,
    /// Frequency of `bottom-k sum <= t` per threshold.
    pub bottom_tail: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SampleStats {
    pub sample_count: u64,
    pub seed: u64,
    pub thresholds: Vec<f64>,
    pub per_k: Vec<KStats>,
}

#[derive(Clone)]
struct Partial {
    top: Vec<Moments>,
    bottom: Vec<Moments>,
    top_hits: Vec<Vec<u64>>,
    bottom_hits: Vec<Vec<u64>>,
}

impl Partial {
    fn new(nk: usize, nt: usize) -> Self {
        Partial {
            top: vec![Moments::default(); nk],
            bottom: vec![Moments::default(); nk],
            top_hits: vec![vec![0; nt]; nk],
            bottom_hits: vec![vec![0; nt]; nk],
        }
    }

    fn merge(mut self, other: Partial) -> Partial {
        for q in 0..self.top.len() {
            self.top[q] = self.top[q].merge(other.top[q]);
            self.bottom[q] = self.bottom[q].merge(other.bottom[q]);
            for t in 0..self.top_hits[q].len() {
                self.top_hits[q][t] += other.top_hits[q][t];
                self.bottom_hits[q][t] += other.bottom_hits[q][t];
            }
        }
        self
    }
}

/// Pairwise merge in index order.
fn tree_merge(mut parts: Vec<Partial>) -> Partial {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

fn check_ks(n: usize, ks: &[usize]) -> Result<()> {
    if ks.is_empty() {
        return Err(Error::arg("no k values requested"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(Error::arg(format!("k={k} outside 1..={n}")));
    }
    Ok(())
}

fn draw(summand: &Summand, u: f64) -> &HermitianMatrix {
    let mut acc = 0.0;
    for atom in &summand.atoms {
        acc += atom.p;
        if u < acc {
            return &atom.matrix;
        }
    }
    // u landed in the rounding slack above the last cumulative sum
    &summand.atoms.iter().rev().find(|a| a.p > 0.0).unwrap_or(&summand.atoms[0]).matrix
}

/// Monte Carlo statistics of top-k / bottom-k eigenvalue sums of `Y`.
pub fn sample_sum(ensemble: &EnsembleSpec, seed: u64, count: u64, ks: &[usize], thresholds: &[f64]) -> Result<SampleStats> {
    if count == 0 {
        return Err(Error::arg("sample count must be at least 1"));
    }
    if count > MAX_SAMPLES {
        return Err(Error::Resource {
            what: "Monte Carlo sample count".into(),
            required: count as u128,
            limit: MAX_SAMPLES as u128,
            advice: "reduce --samples".into(),
        });
    }
    check_ks(ensemble.n, ks)?;
    let n = ensemble.n;
    let key = seed_bytes(seed);
    let chunks = (count as usize).div_ceil(CHUNK);
    let partials: Vec<Result<Partial>> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut part = Partial::new(ks.len(), thresholds.len());
            let start = chunk * CHUNK;
            let end = (start + CHUNK).min(count as usize);
            for s in start..end {
                let mut rng = ChaCha8Rng::from_seed(key);
                rng.set_stream(s as u64);
                let mut y = HermitianMatrix::zeros(n);
                for summand in &ensemble.summands {
                    let u: f64 = rng.random();
                    y = &y + draw(summand, u);
                }
                let eig = y.eigenvalues()?;
                for (q, &k) in ks.iter().enumerate() {
                    let (top, bottom) = eigen_sums(&eig, k);
                    part.top[q].push(top);
                    part.bottom[q].push(bottom);
                    for (ti, &t) in thresholds.iter().enumerate() {
                        part.top_hits[q][ti] += (top >= t) as u64;
                        part.bottom_hits[q][ti] += (bottom <= t) as u64;
                    }
                }
            }
            Ok(part)
        })
        .collect();
    let partials: Vec<Partial> = partials.into_iter().collect::<Result<_>>()?;
    let total = tree_merge(partials);
    let per_k = ks
        .iter()
        .enumerate()
        .map(|(q, &k)| KStats {
            k,
            top_mean: total.top[q].mean,
            top_stderr: total.top[q].stderr(),
            bottom_mean: total.bottom[q].mean,
            bottom_stderr: total.bottom[q].stderr(),
            top_tail: total.top_hits[q].iter().map(|&h| h as f64 / count as f64).collect(),
            bottom_tail: total.bottom_hits[q].iter().map(|&h| h as f64 / count as f64).collect(),
        })
        .collect();
    Ok(SampleStats {
        sample_count: count,
        seed,
        thresholds: thresholds.to_vec(),
        per_k,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExactKStats {
    pub k: usize,
    /// `E sum_{i<=k} λ_i(Y)`.
    pub top_mean: f64,
    /// `E sum_{i<=k} λ_{n-i+1}(Y)`.
    pub bottom_mean: f64,
    /// `P{top-k sum >= t}` per threshold.
    pub top_tail: Vec<f64>,
    /// `P{bottom-k sum <= t}` per threshold.
    pub bottom_tail: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ExactStats {
    pub joint_atoms: u128,
    pub thresholds: Vec<f64>,
    pub per_k: Vec<ExactKStats>,
}

/// Exact expectations and tail probabilities by enumerating every joint atom
/// with positive probability.
pub fn exhaustive_expectations(ensemble: &EnsembleSpec, ks: &[usize], thresholds: &[f64]) -> Result<ExactStats> {
    check_ks(ensemble.n, ks)?;
    let supports: Vec<Vec<(f64, &HermitianMatrix)>> = ensemble
        .summands
        .iter()
        .map(|s| s.atoms.iter().filter(|a| a.p > 0.0).map(|a| (a.p, &a.matrix)).collect())
        .collect();
    let total = supports
        .iter()
        .map(|s| s.len() as u128)
        .try_fold(1u128, |acc, l| acc.checked_mul(l))
        .unwrap_or(u128::MAX);
    if total > EXHAUSTIVE_LIMIT {
        return Err(Error::Resource {
            what: "exhaustive enumeration of the joint support".into(),
            required: total,
            limit: EXHAUSTIVE_LIMIT,
            advice: "use sample_sum for a Monte Carlo estimate".into(),
        });
    }
    let n = ensemble.n;
    let nk = ks.len();
    let nt = thresholds.len();
    // per joint atom: probability-weighted top/bottom sums and tail masses
    let zero = || (vec![0.0; nk], vec![0.0; nk], vec![vec![0.0; nt]; nk], vec![vec![0.0; nt]; nk]);
    let rows: Vec<Result<_>> = (0..total as usize)
        .into_par_iter()
        .with_min_len(256)
        .map(|mut idx| {
            let mut prob = 1.0;
            let mut y = HermitianMatrix::zeros(n);
            for s in &supports {
                let (p, m) = s[idx % s.len()];
                idx /= s.len();
                prob *= p;
                y = &y + m;
            }
            let eig = y.eigenvalues()?;
            let mut out = zero();
            for (q, &k) in ks.iter().enumerate() {
                let (top, bottom) = eigen_sums(&eig, k);
                out.0[q] = prob * top;
                out.1[q] = prob * bottom;
                for (ti, &t) in thresholds.iter().enumerate() {
                    if top >= t {
                        out.2[q][ti] = prob;
                    }
                    if bottom <= t {
                        out.3[q][ti] = prob;
                    }
                }
            }
            Ok(out)
        })
        .collect();
    let mut acc = zero();
    for row in rows {
        let row = row?;
        for q in 0..nk {
            acc.0[q] += row.0[q];
            acc.1[q] += row.1[q];
            for t in 0..nt {
                acc.2[q][t] += row.2[q][t];
                acc.3[q][t] += row.3[q][t];
            }
        }
    }
    let per_k = ks
        .iter()
        .enumerate()
        .map(|(q, &k)| ExactKStats {
            k,
            top_mean: acc.0[q],
            bottom_mean: acc.1[q],
            top_tail: acc.2[q].clone(),
            bottom_tail: acc.3[q].clone(),
        })
        .collect();
    Ok(ExactStats {
        joint_atoms: total,
        thresholds: thresholds.to_vec(),
        per_k,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_laplacian_spectrum() {
        let x = edge_laplacian(5, 1, 3);
        let e = x.eigenvalues().unwrap();
        assert!((e[0] - 2.0).abs() < 1e-14);
        assert!(e[1..].iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn er_expectation_is_scaled_complete_graph() {
        let e = er_laplacian_ensemble(6, 0.3, 1.5).unwrap();
        assert_eq!(e.m(), 15);
        assert_eq!(e.c, Some(3.0));
        let ev = e.expectation().eigenvalues().unwrap();
        for v in &ev[..5] {
            assert!((v - 6.0 * 0.3 * 1.5).abs() < 1e-12);
        }
        assert!(ev[5].abs() < 1e-12);
        let full = er_laplacian_ensemble(4, 1.0, 1.0).unwrap();
        assert!(full.summands.iter().all(|s| s.is_deterministic()));
    }

    #[test]
    fn bernoulli_projector_mean() {
        let p = 0.3;
        let proj = HermitianMatrix::from_diagonal(&[1.0, 0.0]);
        let e = EnsembleSpec::new(2, vec![Summand::from_pairs(vec![(p, proj), (1.0 - p, HermitianMatrix::zeros(2))])], Some(1.0))
            .unwrap();
        let x = exhaustive_expectations(&e, &[1], &[0.5]).unwrap();
        assert!((x.per_k[0].top_mean - p).abs() < 1e-15);
        assert!((x.per_k[0].top_tail[0] - p).abs() < 1e-15);
    }

    #[test]
    fn four_atom_hand_average() {
        // diag(1,0) and diag(0,1) each present with probability 1/2
        let s1 = Summand::from_pairs(vec![(0.5, HermitianMatrix::from_diagonal(&[1.0, 0.0])), (0.5, HermitianMatrix::zeros(2))]);
        let s2 = Summand::from_pairs(vec![(0.5, HermitianMatrix::from_diagonal(&[0.0, 1.0])), (0.5, HermitianMatrix::zeros(2))]);
        let e = EnsembleSpec::new(2, vec![s1, s2], Some(1.0)).unwrap();
        let x = exhaustive_expectations(&e, &[1, 2], &[]).unwrap();
        // λ_max is 0 w.p. 1/4 and 1 otherwise; λ_min is 1 w.p. 1/4
        assert_eq!(x.per_k[0].top_mean, 0.75);
        assert_eq!(x.per_k[0].bottom_mean, 0.25);
        assert_eq!(x.per_k[1].top_mean, 1.0);
    }

    #[test]
    fn deterministic_ensemble_has_zero_variance() {
        let e = er_laplacian_ensemble(4, 1.0, 1.0).unwrap();
        let s = sample_sum(&e, 1, 3000, &[1, 2], &[3.0, 5.0]).unwrap();
        assert_eq!(s.per_k[0].top_stderr, 0.0);
        assert!((s.per_k[0].top_mean - 4.0).abs() < 1e-12);
        assert!((s.per_k[1].bottom_mean - 4.0).abs() < 1e-12);
        assert_eq!(s.per_k[0].top_tail, vec![1.0, 0.0]);
    }

    #[test]
    fn sampling_is_worker_count_independent() {
        let e = er_laplacian_ensemble(5, 0.5, 1.0).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_sum(&e, 9, 5000, &[1, 2], &[4.0]).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn caps() {
        let e = er_laplacian_ensemble(8, 0.5, 1.0).unwrap();
        assert!(matches!(exhaustive_expectations(&e, &[1], &[]), Err(Error::Resource { .. })));
        assert!(sample_sum(&e, 1, 0, &[1], &[]).is_err());
        assert!(matches!(sample_sum(&e, 1, MAX_SAMPLES + 1, &[1], &[]), Err(Error::Resource { .. })));
        assert!(sample_sum(&e, 1, 10, &[9], &[]).is_err());
    }
}

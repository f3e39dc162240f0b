//! Finite sequences of independent random Hermitian matrices with explicit
//! finite support, and their JSON file format.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::hermitian::{HermitianMatrix, MatrixJson};
use crate::sim::{er_weighted_ensemble, EdgeWeight};

/// Tolerance on per-summand probability mass.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Tolerance on the spectral window `0 <= λ <= c`.
pub const SPECTRAL_BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub p: f64,
    pub matrix: HermitianMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summand {
    pub atoms: Vec<Atom>,
}

impl Summand {
    pub fn point_mass(matrix: HermitianMatrix) -> Self {
        Summand {
            atoms: vec![Atom { p: 1.0, matrix }],
        }
    }

    pub fn from_pairs(pairs: Vec<(f64, HermitianMatrix)>) -> Self {
        Summand {
            atoms: pairs.into_iter().map(|(p, matrix)| Atom { p, matrix }).collect(),
        }
    }

    pub fn mean(&self) -> HermitianMatrix {
        let n = self.atoms[0].matrix.dim();
        self.atoms
            .iter()
            .fold(HermitianMatrix::zeros(n), |acc, a| acc.lincomb(1.0, &a.matrix, a.p))
    }

    pub fn is_deterministic(&self) -> bool {
        self.atoms.iter().filter(|a| a.p > 0.0).count() <= 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub n: usize,
    pub summands: Vec<Summand>,
    /// Uniform bound `0 <= λ_n(X) <= λ_1(X) <= c` on every atom.
    pub c: Option<f64>,
    /// Whether every atom is PSD.
    pub psd: bool,
}

impl EnsembleSpec {
    /// Validates probabilities, dimensions and the optional spectral bound.
    pub fn new(n: usize, summands: Vec<Summand>, c: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::arg("ensemble dimension must be positive"));
        }
        if summands.is_empty() {
            return Err(Error::arg("ensemble has no summands"));
        }
        if let Some(c) = c {
            if !(c.is_finite() && c >= 0.0) {
                return Err(Error::arg(format!("spectral bound c={c} must be finite and nonnegative")));
            }
        }
        let mut psd = true;
        for (s, summand) in summands.iter().enumerate() {
            let bad = |atom: Option<usize>, message: String| Error::Validation {
                summand: s,
                atom,
                message,
            };
            if summand.atoms.is_empty() {
                return Err(bad(None, "summand has no atoms".into()));
            }
            let mut total = 0.0;
            for (a, atom) in summand.atoms.iter().enumerate() {
                if !(atom.p.is_finite() && atom.p >= 0.0) {
                    return Err(bad(Some(a), format!("probability {} is negative or not finite", atom.p)));
                }
                total += atom.p;
                if atom.matrix.dim() != n {
                    return Err(bad(
                        Some(a),
                        format!("matrix is {0}x{0}, ensemble dimension is {n}", atom.matrix.dim()),
                    ));
                }
                let d = atom.matrix.decompose().map_err(|e| bad(Some(a), e.to_string()))?;
                let tol = SPECTRAL_BOUND_TOL * c.unwrap_or(1.0).max(1.0);
                if d.lambda_min() < -tol {
                    psd = false;
                }
                if let Some(c) = c {
                    if d.lambda_min() < -tol || d.lambda_max() > c + tol {
                        return Err(bad(
                            Some(a),
                            format!(
                                "spectrum [{:e}, {:e}] leaves the window [0, c={c}]",
                                d.lambda_min(),
                                d.lambda_max()
                            ),
                        ));
                    }
                }
            }
            if (total - 1.0).abs() > PROBABILITY_TOL {
                return Err(bad(None, format!("probabilities sum to {total}, not 1")));
            }
        }
        Ok(EnsembleSpec { n, summands, c, psd })
    }

    pub fn m(&self) -> usize {
        self.summands.len()
    }

    /// Number of joint atoms, `prod_i |supp X^(i)|`.
    pub fn joint_support_size(&self) -> u128 {
        self.summands
            .iter()
            .map(|s| s.atoms.len() as u128)
            .try_fold(1u128, |acc, l| acc.checked_mul(l))
            .unwrap_or(u128::MAX)
    }

    /// `E Y = sum_i E X^(i)`, exact.
    pub fn expectation(&self) -> HermitianMatrix {
        self.summands
            .iter()
            .fold(HermitianMatrix::zeros(self.n), |acc, s| &acc + &s.mean())
    }

    /// Largest atom spectral norm.
    pub fn c_eff(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.summands {
            for a in &s.atoms {
                worst = worst.max(a.matrix.decompose()?.spectral_radius());
            }
        }
        Ok(worst)
    }

    pub fn require_c(&self) -> Result<f64> {
        match self.c {
            Some(c) if self.psd => Ok(c),
            Some(_) => Err(Error::arg("Chernoff bounds need PSD atoms")),
            None => Err(Error::arg("Chernoff bounds need the uniform spectral bound c")),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let file: EnsembleFile =
            serde_json::from_str(text).map_err(|e| Error::arg(format!("ensemble file does not parse: {e}")))?;
        file.into_spec()
    }

    pub fn to_file(&self) -> EnsembleFile {
        EnsembleFile {
            dimension: self.n,
            summands: self
                .summands
                .iter()
                .map(|s| SummandFile::Atoms {
                    atoms: s
                        .atoms
                        .iter()
                        .map(|a| AtomFile {
                            p: a.p,
                            matrix: serde_json::to_value(MatrixJson::from(a.matrix.clone()))
                                .expect("matrix serializes"),
                        })
                        .collect(),
                })
                .collect(),
            c: self.c,
        }
    }
}

/// On-disk ensemble:
/// `{dimension, summands: [{atoms: [{p, matrix}]} | {family, params}], c}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleFile {
    pub dimension: usize,
    pub summands: Vec<SummandFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SummandFile {
    Atoms { atoms: Vec<AtomFile> },
    Family { family: String, params: Value },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomFile {
    pub p: f64,
    pub matrix: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ErParams {
    n: usize,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    w_max: Option<f64>,
    #[serde(default)]
    weights: Option<Vec<EdgeWeight>>,
}

impl EnsembleFile {
    pub fn into_spec(self) -> Result<EnsembleSpec> {
        let n = self.dimension;
        let mut summands = Vec::new();
        let mut family_c: Option<f64> = None;
        for (s, entry) in self.summands.into_iter().enumerate() {
            let bad = |atom: Option<usize>, message: String| Error::Validation {
                summand: s,
                atom,
                message,
            };
            match entry {
                SummandFile::Atoms { atoms } => {
                    let mut out = Vec::with_capacity(atoms.len());
                    for (a, atom) in atoms.into_iter().enumerate() {
                        let layout: MatrixJson = serde_json::from_value(atom.matrix)
                            .map_err(|e| bad(Some(a), format!("matrix does not parse: {e}")))?;
                        let matrix = layout
                            .to_matrix()
                            .and_then(HermitianMatrix::new)
                            .map_err(|e| bad(Some(a), e.to_string()))?;
                        out.push(Atom { p: atom.p, matrix });
                    }
                    summands.push(Summand { atoms: out });
                }
                SummandFile::Family { family, params } => {
                    if family != "er_laplacian" {
                        return Err(bad(None, format!("unknown family {family:?}")));
                    }
                    let params: ErParams = serde_json::from_value(params)
                        .map_err(|e| bad(None, format!("er_laplacian params: {e}")))?;
                    if params.n != n {
                        return Err(bad(None, format!("family has n={}, file dimension is {n}", params.n)));
                    }
                    let weights = match (params.weights, params.p) {
                        (Some(w), None) => w,
                        (None, Some(p)) => {
                            let w = params.w_max.unwrap_or(1.0);
                            vec![EdgeWeight { p: 1.0 - p, w: 0.0 }, EdgeWeight { p, w }]
                        }
                        _ => return Err(bad(None, "er_laplacian needs exactly one of p or weights".into())),
                    };
                    let generated = er_weighted_ensemble(n, &weights).map_err(|e| bad(None, e.to_string()))?;
                    let c = generated.c.unwrap_or(0.0);
                    family_c = Some(family_c.map_or(c, |old: f64| old.max(c)));
                    summands.extend(generated.summands);
                }
            }
        }
        EnsembleSpec::new(n, summands, self.c.or(family_c))
    }
}

//! Layer-wise representation similarity: linear CKA and SVCCA.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedio::{LayerEmbeddings, TripleIndex};
use crate::error::{Error, Result};
use crate::linalg::{center_columns, singular_values, sorted_svd};

const ROUNDOFF: f64 = 1e-12;

/// Row `i` of `x` and `y` describe the same sentence in two languages.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedRepresentations {
    x: DMatrix<f64>,
    y: DMatrix<f64>,
}

impl PairedRepresentations {
    pub fn new(x: DMatrix<f64>, y: DMatrix<f64>) -> Result<Self> {
        if x.nrows() != y.nrows() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows vs {} rows",
                x.nrows(),
                y.nrows()
            )));
        }
        if x.nrows() < 2 {
            return Err(Error::DimensionMismatch("need at least 2 paired rows".into()));
        }
        if x.ncols() == 0 || y.ncols() == 0 {
            return Err(Error::DimensionMismatch("zero-width representation".into()));
        }
        if !x.iter().chain(y.iter()).all(|v| v.is_finite()) {
            return Err(Error::NonFinite { row: 0, col: 0 });
        }
        Ok(Self { x, y })
    }

    /// Pair two embedding sets in triple order.
    pub fn from_embeddings(a: &LayerEmbeddings, b: &LayerEmbeddings, index: &TripleIndex) -> Result<Self> {
        Self::new(a.aligned_matrix(index)?, b.aligned_matrix(index)?)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DMatrix<f64> {
        &self.y
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }
}

fn clamp_unit(v: f64) -> f64 {
    debug_assert!(
        v > -ROUNDOFF * 1e3 && v < 1.0 + ROUNDOFF * 1e3,
        "similarity {v} far outside [0, 1]"
    );
    v.clamp(0.0, 1.0)
}

/// `||X~ᵀ Y~||²_F / (||X~ᵀ X~||_F ||Y~ᵀ Y~||_F)` on column-centred inputs.
pub fn linear_cka(pair: &PairedRepresentations) -> Result<f64> {
    let xc = center_columns(&pair.x);
    let yc = center_columns(&pair.y);
    let cross = xc.tr_mul(&yc).norm_squared();
    let denom = xc.tr_mul(&xc).norm() * yc.tr_mul(&yc).norm();
    if denom == 0.0 || !denom.is_finite() {
        return Err(Error::DegenerateRepresentations(
            "zero variance after centering",
        ));
    }
    Ok(clamp_unit(cross / denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvccaOptions {
    /// Keep the fewest principal components explaining at least this
    /// fraction of variance.
    pub variance_threshold: f64,
    pub k_cap: Option<usize>,
}

impl Default for SvccaOptions {
    fn default() -> Self {
        Self {
            variance_threshold: 0.99,
            k_cap: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvccaResult {
    /// Mean canonical correlation.
    pub value: f64,
    /// Canonical correlations, descending.
    pub correlations: Vec<f64>,
    pub k_x: usize,
    pub k_y: usize,
}

/// Orthonormal basis of the retained principal subspace of `m`.
fn principal_basis(m: &DMatrix<f64>, opts: &SvccaOptions) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let centred = center_columns(m);
    let (u, s) = sorted_svd(&centred)?;
    let energy: Vec<f64> = s.iter().map(|v| v * v).collect();
    let total: f64 = energy.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateSubspace("zero total variance".into()));
    }
    let mut cum = 0.0;
    let mut k = energy.len();
    for (i, e) in energy.iter().enumerate() {
        cum += e;
        if cum / total >= opts.variance_threshold - ROUNDOFF {
            k = i + 1;
            break;
        }
    }
    let cap = opts
        .k_cap
        .unwrap_or(usize::MAX)
        .min(n - 1)
        .min(m.ncols());
    let k = k.min(cap);
    if k == 0 {
        return Err(Error::DegenerateSubspace("no components retained".into()));
    }
    if s[k - 1] <= s[0] * 1e-10 {
        return Err(Error::DegenerateSubspace(format!(
            "component {k} has singular value {:.3e} relative to {:.3e}",
            s[k - 1],
            s[0]
        )));
    }
    Ok(u.columns(0, k).into_owned())
}

/// PCA both sides, then CCA between the retained subspaces.
///
/// The canonical correlations are the singular values of `Uxᵀ Uy`, where
/// `Ux`, `Uy` are orthonormal bases of the retained principal subspaces.
pub fn svcca(pair: &PairedRepresentations, opts: &SvccaOptions) -> Result<SvccaResult> {
    if pair.n() < 3 {
        return Err(Error::DimensionMismatch("SVCCA needs at least 3 rows".into()));
    }
    if !(opts.variance_threshold > 0.0 && opts.variance_threshold <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "variance threshold must lie in (0, 1], got {}",
            opts.variance_threshold
        )));
    }
    if opts.k_cap == Some(0) {
        return Err(Error::InvalidConfig("k_cap must be positive".into()));
    }
    let ux = principal_basis(&pair.x, opts)?;
    let uy = principal_basis(&pair.y, opts)?;
    let m = ux.tr_mul(&uy);
    let k = ux.ncols().min(uy.ncols());
    let correlations: Vec<f64> = singular_values(&m)
        .into_iter()
        .take(k)
        .map(clamp_unit)
        .collect();
    let value = correlations.iter().sum::<f64>() / k as f64;
    Ok(SvccaResult {
        value,
        correlations,
        k_x: ux.ncols(),
        k_y: uy.ncols(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMetric {
    Cka,
    Svcca,
}

impl std::str::FromStr for SimilarityMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cka" => Ok(SimilarityMetric::Cka),
            "svcca" => Ok(SimilarityMetric::Svcca),
            other => Err(Error::InvalidConfig(format!("unknown metric {other:?}"))),
        }
    }
}

impl std::fmt::Display for SimilarityMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SimilarityMetric::Cka => "cka",
            SimilarityMetric::Svcca => "svcca",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub layer: u32,
    pub value: f64,
}

/// One similarity value per layer for two languages' embedding sets.
pub fn similarity_curve(
    metric: SimilarityMetric,
    xs: &[LayerEmbeddings],
    ys: &[LayerEmbeddings],
    index: &TripleIndex,
    opts: &SvccaOptions,
) -> Result<Vec<CurvePoint>> {
    let lx: Vec<u32> = xs.iter().map(|e| e.layer).collect();
    let ly: Vec<u32> = ys.iter().map(|e| e.layer).collect();
    if lx.is_empty() || lx != ly {
        return Err(Error::LayerMismatch(format!("{lx:?} vs {ly:?}")));
    }
    xs.par_iter()
        .zip(ys.par_iter())
        .map(|(a, b)| {
            let pair = PairedRepresentations::from_embeddings(a, b, index)?;
            let value = match metric {
                SimilarityMetric::Cka => linear_cka(&pair)?,
                SimilarityMetric::Svcca => svcca(&pair, opts)?.value,
            };
            Ok(CurvePoint {
                layer: a.layer,
                value,
            })
        })
        .collect()
}

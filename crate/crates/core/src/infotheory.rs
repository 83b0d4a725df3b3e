//! Gaussian entropy of code-mixed representations and its reduction when
//! conditioning on English, Hindi, or both.
//!
//! `H(X) = d/2 ln(2πe) + ½ ln det(Σ + εI)` with `Σ` the sample covariance.
//! Conditional entropies are the entropy of ridge-regression residuals, and
//! both terms of a reduction share the ε derived from the unconditioned
//! covariance, so `ΔH = ½ (ln det(Σ_x + εI) − ln det(Σ_r + εI))`.

use std::f64::consts::{E, PI};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedio::{Language, LayerEmbeddings, TripleIndex};
use crate::error::{Error, Result};
use crate::linalg::{center_columns, covariance, spd_log_det};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditioningSet {
    members: Vec<Language>,
}

impl ConditioningSet {
    pub fn new(mut members: Vec<Language>) -> Result<Self> {
        members.sort();
        members.dedup();
        if members.is_empty() {
            return Err(Error::InvalidConfig("conditioning set is empty".into()));
        }
        if members.contains(&Language::Cm) {
            return Err(Error::InvalidConfig(
                "conditioning set may only contain EN and HI".into(),
            ));
        }
        Ok(Self { members })
    }

    pub fn en() -> Self {
        Self { members: vec![Language::En] }
    }

    pub fn hi() -> Self {
        Self { members: vec![Language::Hi] }
    }

    pub fn joint() -> Self {
        Self {
            members: vec![Language::En, Language::Hi],
        }
    }

    pub fn members(&self) -> &[Language] {
        &self.members
    }

    /// `en`, `hi` or `joint`.
    pub fn label(&self) -> &'static str {
        match self.members.as_slice() {
            [Language::En] => "en",
            [Language::Hi] => "hi",
            _ => "joint",
        }
    }

    /// Column-concatenate the member matrices (EN before HI).
    pub fn design(&self, en: &DMatrix<f64>, hi: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        match self.members.as_slice() {
            [Language::En] => Ok(en.clone()),
            [Language::Hi] => Ok(hi.clone()),
            _ => {
                if en.nrows() != hi.nrows() {
                    return Err(Error::DimensionMismatch("EN and HI row counts differ".into()));
                }
                let mut z = DMatrix::zeros(en.nrows(), en.ncols() + hi.ncols());
                z.columns_mut(0, en.ncols()).copy_from(en);
                z.columns_mut(en.ncols(), hi.ncols()).copy_from(hi);
                Ok(z)
            }
        }
    }
}

impl std::str::FromStr for ConditioningSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" => Ok(Self::en()),
            "hi" => Ok(Self::hi()),
            "joint" | "en+hi" | "hi+en" => Ok(Self::joint()),
            other => Err(Error::InvalidConfig(format!("unknown condition {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EntropyConfig {
    pub ridge_lambda: f64,
    /// ε = scale · mean diagonal of the covariance (scale · 1 when that is 0).
    pub cov_epsilon_scale: f64,
    /// Optional shared PCA reduction applied to every language before fitting.
    pub pca_dim: Option<usize>,
}

impl Default for EntropyConfig {
    fn default() -> Self {
        Self {
            ridge_lambda: 1.0,
            cov_epsilon_scale: 1e-6,
            pca_dim: None,
        }
    }
}

impl EntropyConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ridge_lambda > 0.0 && self.ridge_lambda.is_finite()) {
            return Err(Error::InvalidConfig("ridge_lambda must be > 0".into()));
        }
        if !(self.cov_epsilon_scale >= 0.0 && self.cov_epsilon_scale.is_finite()) {
            return Err(Error::InvalidConfig("cov_epsilon_scale must be >= 0".into()));
        }
        if self.pca_dim == Some(0) {
            return Err(Error::InvalidConfig("pca_dim must be positive".into()));
        }
        Ok(())
    }

    /// Covariance floor for a given covariance matrix.
    pub fn epsilon_for(&self, cov: &DMatrix<f64>) -> f64 {
        let mean_diag = cov.diagonal().mean();
        let reference = if mean_diag > 0.0 { mean_diag } else { 1.0 };
        self.cov_epsilon_scale * reference
    }
}

/// `ln det(Σ + εI)`.
pub fn log_det_regularized(cov: &DMatrix<f64>, eps: f64) -> Result<f64> {
    let mut a = cov.clone();
    for i in 0..a.nrows() {
        a[(i, i)] += eps;
    }
    spd_log_det(&a).map_err(|_| {
        Error::Factorization(format!(
            "covariance ({}x{}) not positive definite after ε = {eps:e}",
            a.nrows(),
            a.ncols()
        ))
    })
}

/// Gaussian entropy in nats for a covariance and floor.
pub fn entropy_from_covariance(cov: &DMatrix<f64>, eps: f64) -> Result<f64> {
    let d = cov.nrows() as f64;
    Ok(0.5 * d * (2.0 * PI * E).ln() + 0.5 * log_det_regularized(cov, eps)?)
}

pub fn gaussian_entropy(x: &DMatrix<f64>, cfg: &EntropyConfig) -> Result<f64> {
    cfg.validate()?;
    if x.nrows() < 2 {
        return Err(Error::DimensionMismatch("entropy needs at least 2 samples".into()));
    }
    let cov = covariance(x);
    entropy_from_covariance(&cov, cfg.epsilon_for(&cov))
}

/// Residuals `X − Z B` of the ridge fit `B = (ZᵀZ + λI)⁻¹ ZᵀX` on centred data.
pub fn ridge_residuals(x: &DMatrix<f64>, z: &DMatrix<f64>, lambda: f64) -> Result<DMatrix<f64>> {
    if x.nrows() != z.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} rows, conditioning matrix {}",
            x.nrows(),
            z.nrows()
        )));
    }
    let xc = center_columns(x);
    let zc = center_columns(z);
    let mut gram = zc.tr_mul(&zc);
    for i in 0..gram.nrows() {
        gram[(i, i)] += lambda;
    }
    let chol = gram.cholesky().ok_or_else(|| {
        Error::Factorization("ridge normal equations are ill-conditioned".into())
    })?;
    let coef = chol.solve(&zc.tr_mul(&xc));
    Ok(xc - zc * coef)
}

/// `H(X | Z)` as the entropy of ridge residuals, floored with ε from `cov(X)`.
pub fn conditional_entropy(x: &DMatrix<f64>, z: &DMatrix<f64>, cfg: &EntropyConfig) -> Result<f64> {
    cfg.validate()?;
    if x.nrows() < z.ncols() + 2 {
        return Err(Error::DimensionMismatch(format!(
            "{} samples cannot support {} regressors (need n >= m + 2)",
            x.nrows(),
            z.ncols()
        )));
    }
    let eps = cfg.epsilon_for(&covariance(x));
    let resid = ridge_residuals(x, z, cfg.ridge_lambda)?;
    entropy_from_covariance(&covariance(&resid), eps)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReduction {
    pub layer: u32,
    pub h_cm: f64,
    pub h_cm_given_en: f64,
    pub h_cm_given_hi: f64,
    pub h_cm_given_joint: f64,
    pub delta_en: f64,
    pub delta_hi: f64,
    pub delta_joint: f64,
}

impl UncertaintyReduction {
    pub fn delta(&self, cond: &ConditioningSet) -> f64 {
        match cond.label() {
            "en" => self.delta_en,
            "hi" => self.delta_hi,
            _ => self.delta_joint,
        }
    }
}

/// Project all three languages onto the top `p` principal axes of their
/// stacked, individually centred rows.
fn shared_pca(
    cm: &DMatrix<f64>,
    en: &DMatrix<f64>,
    hi: &DMatrix<f64>,
    p: usize,
) -> Result<[DMatrix<f64>; 3]> {
    let d = cm.ncols();
    if en.ncols() != d || hi.ncols() != d {
        return Err(Error::DimensionMismatch("shared PCA needs equal widths".into()));
    }
    if p > d || p >= cm.nrows() {
        return Err(Error::InvalidConfig(format!(
            "pca_dim {p} must be <= d ({d}) and < n ({})",
            cm.nrows()
        )));
    }
    let parts = [center_columns(cm), center_columns(en), center_columns(hi)];
    let mut scatter = DMatrix::zeros(d, d);
    for m in &parts {
        scatter += m.tr_mul(m);
    }
    let eig = scatter.symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let basis = DMatrix::from_fn(d, p, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(parts.map(|m| m * &basis))
}

/// ΔH for EN, HI and joint conditioning on one layer's matrices.
pub fn layer_uncertainty(
    layer: u32,
    cm: &DMatrix<f64>,
    en: &DMatrix<f64>,
    hi: &DMatrix<f64>,
    cfg: &EntropyConfig,
) -> Result<UncertaintyReduction> {
    cfg.validate()?;
    let reduced;
    let (cm, en, hi) = match cfg.pca_dim {
        Some(p) => {
            reduced = shared_pca(cm, en, hi, p)?;
            (&reduced[0], &reduced[1], &reduced[2])
        }
        None => (cm, en, hi),
    };
    let h_cm = gaussian_entropy(cm, cfg)?;
    let cond = |set: ConditioningSet| -> Result<f64> {
        conditional_entropy(cm, &set.design(en, hi)?, cfg)
    };
    let h_en = cond(ConditioningSet::en())?;
    let h_hi = cond(ConditioningSet::hi())?;
    let h_joint = cond(ConditioningSet::joint())?;
    Ok(UncertaintyReduction {
        layer,
        h_cm,
        h_cm_given_en: h_en,
        h_cm_given_hi: h_hi,
        h_cm_given_joint: h_joint,
        delta_en: h_cm - h_en,
        delta_hi: h_cm - h_hi,
        delta_joint: h_cm - h_joint,
    })
}

/// Per-layer uncertainty reduction of CM given EN, HI and both.
pub fn uncertainty_reduction(
    cm: &[LayerEmbeddings],
    en: &[LayerEmbeddings],
    hi: &[LayerEmbeddings],
    index: &TripleIndex,
    cfg: &EntropyConfig,
) -> Result<Vec<UncertaintyReduction>> {
    let layers = |s: &[LayerEmbeddings]| s.iter().map(|e| e.layer).collect::<Vec<_>>();
    let lc = layers(cm);
    if lc.is_empty() || lc != layers(en) || lc != layers(hi) {
        return Err(Error::LayerMismatch(format!(
            "cm {lc:?}, en {:?}, hi {:?}",
            layers(en),
            layers(hi)
        )));
    }
    (0..cm.len())
        .into_par_iter()
        .map(|i| {
            layer_uncertainty(
                cm[i].layer,
                &cm[i].aligned_matrix(index)?,
                &en[i].aligned_matrix(index)?,
                &hi[i].aligned_matrix(index)?,
                cfg,
            )
        })
        .collect()
}

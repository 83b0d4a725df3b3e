//! Small dense helpers shared by the similarity and entropy code.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Subtract each column's mean.
pub fn center_columns(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    let n = m.nrows() as f64;
    for mut col in out.column_iter_mut() {
        let mean = col.sum() / n;
        col.add_scalar_mut(-mean);
    }
    out
}

/// Sample covariance with divisor `n - 1`.
pub fn covariance(m: &DMatrix<f64>) -> DMatrix<f64> {
    let c = center_columns(m);
    let mut cov = c.tr_mul(&c);
    cov /= (m.nrows() - 1) as f64;
    cov
}

/// Thin SVD with singular values sorted descending and `U` columns permuted
/// to match.
pub fn sorted_svd(m: &DMatrix<f64>) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let svd = m.clone().svd(true, false);
    let u = svd
        .u
        .ok_or_else(|| Error::Factorization("SVD did not return U".into()))?;
    let s = svd.singular_values;
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |i, j| u[(i, order[j])]);
    let s_sorted = DVector::from_iterator(order.len(), order.iter().map(|&k| s[k]));
    Ok((u_sorted, s_sorted))
}

/// Singular values only, descending.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// `ln det(a)` of a symmetric positive-definite matrix via Cholesky.
pub fn spd_log_det(a: &DMatrix<f64>) -> Result<f64> {
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Factorization("matrix is not positive definite".into()))?;
    Ok(2.0 * chol.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

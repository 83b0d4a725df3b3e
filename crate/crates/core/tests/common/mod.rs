//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod reference;

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use xlign_core::embedio::{Language, LayerEmbeddings, Pooling, RetrievalConfig, TripleIndex};
use xlign_core::embedio::SamplerKind;
use xlign_core::retrieval::{sample_negatives_simweighted, simweighted_weights, Direction, DirectionalResult};
use xlign_core::rng::stream;
use xlign_core::synthgen::synthetic_id;

pub fn gaussian(n: usize, d: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = stream(&[0x7e57, seed]);
    DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng))
}

pub fn random_orthogonal(d: usize, seed: u64) -> DMatrix<f64> {
    gaussian(d, d, seed ^ 0x0f0f).qr().q()
}

/// Row-major f32 embeddings of `m` under the synthetic ids of `lang`.
pub fn embeddings(lang: Language, layer: u32, m: &DMatrix<f64>) -> LayerEmbeddings {
    let rows: Vec<Vec<f32>> = (0..m.nrows())
        .map(|i| m.row(i).iter().map(|&v| v as f32).collect())
        .collect();
    let ids = (0..m.nrows()).map(|i| synthetic_id(lang, i)).collect();
    LayerEmbeddings::from_rows("oracle", lang, layer, Pooling::Cls, &rows, ids).unwrap()
}

/// Centring matrix `I - 11ᵀ/n`.
fn centring(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64)
}

fn hsic(k: &DMatrix<f64>, l: &DMatrix<f64>) -> f64 {
    let h = centring(k.nrows());
    let kc = &h * k * &h;
    let lc = &h * l * &h;
    (kc * lc).trace() / ((k.nrows() - 1) as f64).powi(2)
}

/// Linear CKA through sample-space Gram matrices.
pub fn gram_cka(x: &DMatrix<f64>, y: &DMatrix<f64>) -> f64 {
    let k = x * x.transpose();
    let l = y * y.transpose();
    hsic(&k, &l) / (hsic(&k, &k) * hsic(&l, &l)).sqrt()
}

fn centred(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    out
}

fn inv_sqrt_spd(m: &DMatrix<f64>) -> DMatrix<f64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Canonical correlations, descending, from the eigenvalues of
/// `Σxx^{-1/2} Σxy Σyy^{-1} Σyx Σxx^{-1/2}` (= ρ²).
pub fn eigen_cca(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Vec<f64> {
    let (xc, yc) = (centred(x), centred(y));
    let sxx = xc.tr_mul(&xc);
    let syy = yc.tr_mul(&yc);
    let sxy = xc.tr_mul(&yc);
    let a = inv_sqrt_spd(&sxx);
    let syy_inv = syy.try_inverse().unwrap();
    let m = &a * &sxy * syy_inv * sxy.transpose() * &a;
    let sym = (&m + m.transpose()) * 0.5;
    let mut rho: Vec<f64> = sym
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .map(|&v| v.max(0.0).sqrt())
        .collect();
    rho.sort_by(|a, b| b.total_cmp(a));
    rho.truncate(x.ncols().min(y.ncols()));
    rho
}

/// Mid-rank percentiles by pairwise comparison.
pub fn brute_percentiles(lengths: &[u32]) -> Vec<f64> {
    let n = lengths.len() as f64;
    lengths
        .iter()
        .map(|&v| {
            let less = lengths.iter().filter(|&&x| x < v).count() as f64;
            let equal = lengths.iter().filter(|&&x| x == v).count() as f64;
            100.0 * (less + 0.5 * equal) / n
        })
        .collect()
}

/// Window half-width and eligible target ordinals, recomputed by a linear scan.
/// `src`, `tgt` are the brute-force percentiles of the two languages.
pub fn brute_window(
    src: &[f64],
    tgt: &[f64],
    query: usize,
    cfg: &RetrievalConfig,
) -> Option<(f64, HashSet<usize>)> {
    let p = src[query];
    let mut w = cfg.percentile_window;
    loop {
        let pool: HashSet<usize> = (0..tgt.len())
            .filter(|&t| t != query && (tgt[t] - p).abs() <= w + 1e-9)
            .collect();
        if pool.len() >= cfg.num_negatives {
            return Some((w, pool));
        }
        if w >= 100.0 {
            return None;
        }
        w = (w + 5.0).min(100.0);
    }
}

fn find_row(emb: &LayerEmbeddings, id: &str) -> usize {
    emb.sentence_ids().iter().position(|s| s == id).expect("id present")
}

/// Rescores every recorded candidate list by a plain loop and checks the
/// success flags, the positive, negative validity and the accuracy.
/// Returns the number of disagreements.
pub fn naive_retrieval_mismatches(
    src: &LayerEmbeddings,
    tgt: &LayerEmbeddings,
    index: &TripleIndex,
    cfg: &RetrievalConfig,
    result: &DirectionalResult,
) -> usize {
    let dir = result.direction;
    let mut bad = 0;
    let mut hits = 0;
    if result.outcomes.len() != index.len() {
        return usize::MAX;
    }
    for (q, out) in result.outcomes.iter().enumerate() {
        let triple = &index.triples()[q];
        let positive = triple.id(dir.target);
        if out.query_id != triple.id(dir.source) || out.candidate_ids[0] != positive {
            bad += 1;
            continue;
        }
        if out.candidate_ids.len() != cfg.num_negatives + 1 {
            bad += 1;
        }
        let negs: HashSet<&String> = out.candidate_ids[1..].iter().collect();
        if negs.len() != cfg.num_negatives || negs.iter().any(|n| n.as_str() == positive) {
            bad += 1;
        }
        let qrow = src.row(find_row(src, &out.query_id));
        let mut scores = Vec::new();
        for id in &out.candidate_ids {
            let trow = tgt.row(find_row(tgt, id));
            let mut s = 0.0f64;
            for t in 0..qrow.len() {
                s += f64::from(qrow[t]) * f64::from(trow[t]);
            }
            scores.push(s);
        }
        let success = (1..scores.len()).all(|j| scores[0] > scores[j]);
        if scores != out.scores || success != out.success {
            bad += 1;
        }
        hits += usize::from(success);
    }
    if hits as f64 / index.len() as f64 != result.accuracy {
        bad += 1;
    }
    bad
}

/// Draw 3 SIM_WEIGHTED negatives for one query `draws` times (one seed per
/// draw) from 30 unit vectors at angles spread over (0, π] and count how
/// often each target ordinal is picked. Ordinal i has angle πi/30 from the
/// query, so similarity decreases with i; ordinal 0 is the positive.
pub fn simweighted_frequencies(draws: u64) -> Vec<usize> {
    let n = 31;
    let index = xlign_core::synthgen::synthetic_index(
        n,
        &xlign_core::synthgen::LengthDistribution::Constant { value: 10 },
        0,
        1,
    )
    .unwrap();
    let dir = Direction::new(Language::En, Language::Cm).unwrap();
    let angle = |i: usize| std::f64::consts::PI * i as f64 / (n - 1) as f64;
    let tgt_m = DMatrix::from_fn(n, 2, |i, j| if j == 0 { angle(i).cos() } else { angle(i).sin() });
    let tgt = embeddings(Language::Cm, 0, &tgt_m);
    let query = [1.0f32, 0.0];
    let cands: Vec<&[f32]> = (1..n).map(|i| tgt.row(i)).collect();
    let w = simweighted_weights(&query, &cands).unwrap();
    assert!(w.windows(2).all(|p| p[0] < p[1]), "weights not increasing with angle");

    let mut freq = vec![0usize; n];
    for s in 0..draws {
        let cfg = RetrievalConfig {
            num_negatives: 3,
            sampler: SamplerKind::SimWeighted,
            seed: s,
            percentile_window: 100.0,
            similarity_layer: None,
        };
        let negs =
            sample_negatives_simweighted(index.id(0, dir.source), &query, &tgt, dir, 0, &cfg, &index).unwrap();
        for id in negs {
            freq[index.ordinal_of(Language::Cm, &id).unwrap()] += 1;
        }
    }
    freq
}

/// One-sided statistics for "frequency rises as similarity falls":
/// a two-proportion z between the least- and most-similar terciles, and the
/// t-like statistic `ρ√(m−2)` of the Spearman correlation between angle rank
/// and frequency. Both exceed 2.326 at p < 0.01.
pub fn monotonicity_statistics(freq: &[usize]) -> (f64, f64) {
    let m = freq.len() - 1;
    let third = m / 3;
    let draws: usize = freq.iter().sum::<usize>() / 3;
    let similar: usize = freq[1..=third].iter().sum();
    let dissimilar: usize = freq[freq.len() - third..].iter().sum();
    let trials = (draws * third) as f64;
    let p = (similar + dissimilar) as f64 / (2.0 * trials);
    let z = (dissimilar as f64 - similar as f64) / trials / (p * (1.0 - p) * 2.0 / trials).sqrt();
    let xs: Vec<f64> = (1..=m).map(|i| i as f64).collect();
    let ys: Vec<f64> = freq[1..].iter().map(|&f| f as f64).collect();
    (z, spearman(&xs, &ys) * ((m - 2) as f64).sqrt())
}

fn mid_ranks(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&x| {
            let less = v.iter().filter(|&&y| y < x).count() as f64;
            let eq = v.iter().filter(|&&y| y == x).count() as f64;
            less + (eq + 1.0) / 2.0
        })
        .collect()
}

pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let (ra, rb) = (mid_ranks(a), mid_ranks(b));
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (ma, mb) = (mean(&ra), mean(&rb));
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum();
    cov / (va * vb).sqrt()
}

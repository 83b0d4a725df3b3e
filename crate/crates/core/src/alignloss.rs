//! Trilingual cosine alignment objective, its gradient, and a free-embedding
//! optimizer.
//!
//! For aligned rows `e_i, h_i, c_i` with unit versions `u = x / ‖x‖`,
//! `L = (1/3B) Σ_i Σ_{(a,b)} (1 − u_aᵀu_b)` over the pairs (e,h), (e,c), (h,c).
//! Every term touches a single triple, so the gradient for row `i` depends
//! only on row `i` of each matrix.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedio::{Language, LayerEmbeddings, Pooling, RetrievalConfig, SamplerKind, TripleIndex};
use crate::error::{Error, Result};
use crate::retrieval::{directional_accuracy, Direction};
use crate::rng::{stream, TAG_OPTIM};
use crate::scores::{clas, ClasBreakdown, PairAccuracies};

pub const MAX_HALVINGS: usize = 20;

/// Raw embeddings of `B` aligned triples, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleBatch {
    b: usize,
    d: usize,
    // [en, hi, cm], each b*d
    mats: [Vec<f64>; 3],
}

impl TripleBatch {
    pub fn new(e: &DMatrix<f64>, h: &DMatrix<f64>, c: &DMatrix<f64>) -> Result<Self> {
        if e.shape() != h.shape() || e.shape() != c.shape() {
            return Err(Error::DimensionMismatch(format!(
                "batch shapes differ: E {:?}, H {:?}, C {:?}",
                e.shape(),
                h.shape(),
                c.shape()
            )));
        }
        let to_rows = |m: &DMatrix<f64>| m.transpose().as_slice().to_vec();
        Self::from_row_major(e.nrows(), e.ncols(), [to_rows(e), to_rows(h), to_rows(c)])
    }

    pub fn from_row_major(b: usize, d: usize, mats: [Vec<f64>; 3]) -> Result<Self> {
        if b == 0 || d == 0 {
            return Err(Error::EmptyInput("triple batch"));
        }
        for (m, lang) in mats.iter().zip(Language::ALL) {
            if m.len() != b * d {
                return Err(Error::DimensionMismatch(format!(
                    "{lang} block has {} values, expected {b}x{d}",
                    m.len()
                )));
            }
            for i in 0..b {
                let row = &m[i * d..(i + 1) * d];
                if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                    return Err(Error::NonFinite { row: i, col });
                }
                if norm(row) == 0.0 {
                    return Err(Error::ZeroNorm(format!("{lang} row {i}")));
                }
            }
        }
        Ok(Self { b, d, mats })
    }

    pub fn batch_size(&self) -> usize {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, lang: Language, i: usize) -> &[f64] {
        let m = &self.mats[lang_slot(lang)];
        &m[i * self.d..(i + 1) * self.d]
    }

    pub fn matrix(&self, lang: Language) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.b, self.d, &self.mats[lang_slot(lang)])
    }

    /// The rows of one language as embeddings keyed by the index's ids.
    pub fn to_embeddings(&self, lang: Language, index: &TripleIndex) -> Result<LayerEmbeddings> {
        if index.len() != self.b {
            return Err(Error::DimensionMismatch(format!(
                "index has {} triples, batch has {}",
                index.len(),
                self.b
            )));
        }
        let data = self.mats[lang_slot(lang)].iter().map(|&v| v as f32).collect();
        let ids = index.ids(lang).map(str::to_string).collect();
        LayerEmbeddings::new("align-demo", lang, 0, Pooling::Cls, self.d, data, ids)
    }
}

fn lang_slot(lang: Language) -> usize {
    match lang {
        Language::En => 0,
        Language::Hi => 1,
        Language::Cm => 2,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeight {
    pub lambda: f64,
}

impl Default for LossWeight {
    fn default() -> Self {
        Self { lambda: 0.05 }
    }
}

impl LossWeight {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidConfig(format!("lambda must be >= 0, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    /// `task + λ · align`.
    pub fn combine(&self, task_loss: f64, align_loss: f64) -> f64 {
        task_loss + self.lambda * align_loss
    }
}

/// Gradients with the same layout as the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignGradient {
    pub e: DMatrix<f64>,
    pub h: DMatrix<f64>,
    pub c: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PairCosines {
    pub en_hi: f64,
    pub en_cm: f64,
    pub hi_cm: f64,
}

impl PairCosines {
    pub fn mean(&self) -> f64 {
        (self.en_hi + self.en_cm + self.hi_cm) / 3.0
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

struct RowTerms {
    cos: [f64; 3],
    grad: [Vec<f64>; 3],
}

/// Cosines (eh, ec, hc) and the unscaled gradient `Σ_pairs ∂(1 − uᵀv)/∂x` for each row.
fn row_terms(rows: [&[f64]; 3], with_grad: bool) -> RowTerms {
    let norms = rows.map(norm);
    let units: [Vec<f64>; 3] = [0, 1, 2].map(|k| rows[k].iter().map(|v| v / norms[k]).collect());
    let cos = [
        dot(&units[0], &units[1]),
        dot(&units[0], &units[2]),
        dot(&units[1], &units[2]),
    ];
    if !with_grad {
        return RowTerms { cos, grad: Default::default() };
    }
    // cosine shared by languages (k, j)
    let pair_cos = |k: usize, j: usize| match (k.min(j), k.max(j)) {
        (0, 1) => cos[0],
        (0, 2) => cos[1],
        _ => cos[2],
    };
    let grad = [0usize, 1, 2].map(|k| {
        let d = units[k].len();
        let mut g = vec![0.0; d];
        for j in (0..3).filter(|&j| j != k) {
            let c = pair_cos(k, j);
            for t in 0..d {
                g[t] -= (units[j][t] - c * units[k][t]) / norms[k];
            }
        }
        g
    });
    RowTerms { cos, grad }
}

fn evaluate(batch: &TripleBatch, with_grad: bool) -> (f64, PairCosines, Option<[Vec<f64>; 3]>) {
    let terms: Vec<RowTerms> = (0..batch.b)
        .into_par_iter()
        .map(|i| {
            row_terms(
                [
                    batch.row(Language::En, i),
                    batch.row(Language::Hi, i),
                    batch.row(Language::Cm, i),
                ],
                with_grad,
            )
        })
        .collect();
    let b = batch.b as f64;
    let mut sums = [0.0; 3];
    for t in &terms {
        for (sum, c) in sums.iter_mut().zip(t.cos) {
            *sum += c;
        }
    }
    let cosines = PairCosines {
        en_hi: sums[0] / b,
        en_cm: sums[1] / b,
        hi_cm: sums[2] / b,
    };
    let loss = (3.0 * b - sums.iter().sum::<f64>()) / (3.0 * b);
    let grads = with_grad.then(|| {
        let scale = 1.0 / (3.0 * b);
        [0usize, 1, 2].map(|k| {
            terms
                .iter()
                .flat_map(|t| t.grad[k].iter().map(|g| g * scale))
                .collect()
        })
    });
    (loss, cosines, grads)
}

pub fn align_loss(batch: &TripleBatch) -> f64 {
    evaluate(batch, false).0
}

pub fn pair_cosines(batch: &TripleBatch) -> PairCosines {
    evaluate(batch, false).1
}

pub fn align_loss_grad(batch: &TripleBatch) -> AlignGradient {
    loss_and_grad(batch).1
}

pub fn loss_and_grad(batch: &TripleBatch) -> (f64, AlignGradient) {
    let (loss, _, grads) = evaluate(batch, true);
    let [e, h, c] = grads.expect("gradient requested");
    let m = |v: Vec<f64>| DMatrix::from_row_slice(batch.b, batch.d, &v);
    (loss, AlignGradient { e: m(e), h: m(h), c: m(c) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub loss: f64,
    /// Step size accepted at this step (0 for the initial record).
    pub lr: f64,
    pub halvings: usize,
    pub cosines: PairCosines,
}

#[derive(Debug, Clone)]
pub struct Optimization {
    /// Record 0 is the initial point; record `k` follows step `k`.
    pub trajectory: Vec<StepRecord>,
    pub batch: TripleBatch,
}

impl Optimization {
    pub fn final_loss(&self) -> f64 {
        self.trajectory.last().expect("non-empty").loss
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Parse { path: "<trajectory>".into(), message: e.to_string() };
        w.write_record(["step", "loss", "lr", "halvings", "cos_en_hi", "cos_en_cm", "cos_hi_cm"])
            .map_err(io)?;
        for r in &self.trajectory {
            w.write_record([
                r.step.to_string(),
                format!("{:.12e}", r.loss),
                format!("{}", r.lr),
                r.halvings.to_string(),
                format!("{:.12}", r.cosines.en_hi),
                format!("{:.12}", r.cosines.en_cm),
                format!("{:.12}", r.cosines.hi_cm),
            ])
            .map_err(io)?;
        }
        w.flush().map_err(|e| Error::io("<trajectory>", e))
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

/// Standard-normal start for every triple in `index`; row `i` of language
/// `l` is drawn from its own stream so the start does not depend on `n`.
pub fn initial_batch(index: &TripleIndex, d: usize, seed: u64) -> Result<TripleBatch> {
    if index.is_empty() {
        return Err(Error::EmptyInput("triple index"));
    }
    if d == 0 {
        return Err(Error::InvalidConfig("d must be positive".into()));
    }
    let mats = Language::ALL.map(|lang| {
        (0..index.len())
            .flat_map(|i| {
                let mut rng = stream(&[TAG_OPTIM, seed, lang.code(), i as u64]);
                (0..d).map(move |_| StandardNormal.sample(&mut rng)).collect::<Vec<f64>>()
            })
            .collect()
    });
    TripleBatch::from_row_major(index.len(), d, mats)
}

/// Full-batch descent on `align_loss` with per-triple step `lr`.
///
/// The mean over `B` triples shrinks each row's gradient by `1/B`; the update
/// multiplies it back so `lr` acts on each triple's own objective and the
/// dynamics do not depend on batch size. A trial step that raises the loss
/// is retried with half the step, up to [`MAX_HALVINGS`] times; each step
/// starts again from `lr`.
pub fn optimize_embeddings(
    index: &TripleIndex,
    d: usize,
    steps: usize,
    lr: f64,
    seed: u64,
) -> Result<Optimization> {
    if steps == 0 {
        return Err(Error::InvalidConfig("steps ≥ 1".into()));
    }
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidConfig(format!("lr > 0 required, got {lr}")));
    }
    let mut batch = initial_batch(index, d, seed)?;
    let (mut loss, cos0, _) = evaluate(&batch, false);
    let mut trajectory = Vec::with_capacity(steps + 1);
    trajectory.push(StepRecord { step: 0, loss, lr: 0.0, halvings: 0, cosines: cos0 });
    let scale = batch.b as f64;

    for step in 1..=steps {
        let (_, _, grads) = evaluate(&batch, true);
        let grads = grads.expect("gradient requested");
        let mut eta = lr;
        let mut accepted = None;
        for halvings in 0..=MAX_HALVINGS {
            let mats = [0usize, 1, 2].map(|k| {
                batch.mats[k]
                    .iter()
                    .zip(&grads[k])
                    .map(|(x, g)| x - eta * scale * g)
                    .collect::<Vec<f64>>()
            });
            let trial = TripleBatch { b: batch.b, d: batch.d, mats };
            let (trial_loss, trial_cos, _) = evaluate(&trial, false);
            let valid = trial.mats.iter().all(|m| m.iter().all(|v| v.is_finite()));
            if valid && trial_loss <= loss {
                accepted = Some((trial, trial_loss, trial_cos, halvings));
                break;
            }
            eta *= 0.5;
        }
        let Some((trial, trial_loss, trial_cos, halvings)) = accepted else {
            return Err(Error::Divergence { step, halvings: MAX_HALVINGS });
        };
        batch = trial;
        loss = trial_loss;
        trajectory.push(StepRecord { step, loss, lr: eta, halvings, cosines: trial_cos });
    }
    Ok(Optimization { trajectory, batch })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionAccuracy {
    pub direction: Direction,
    /// Fraction in [0, 1].
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemoEvaluation {
    pub directions: Vec<DirectionAccuracy>,
    pub clas: ClasBreakdown,
}

impl DemoEvaluation {
    pub fn min_accuracy(&self) -> f64 {
        self.directions.iter().map(|d| d.accuracy).fold(f64::INFINITY, f64::min)
    }
}

/// Cosine retrieval on the batch: rows are unit-normalized before scoring,
/// negatives come from the length-percentile sampler.
pub fn evaluate_alignment(
    batch: &TripleBatch,
    index: &TripleIndex,
    num_negatives: usize,
    seed: u64,
) -> Result<DemoEvaluation> {
    let embs = Language::ALL
        .iter()
        .map(|&l| batch.to_embeddings(l, index)?.normalized())
        .collect::<Result<Vec<_>>>()?;
    let by_lang = |l: Language| &embs[lang_slot(l)];
    let cfg = RetrievalConfig {
        num_negatives,
        sampler: SamplerKind::Percentile,
        seed,
        ..RetrievalConfig::default()
    };
    let directions = Direction::CLAS_ORDER
        .iter()
        .map(|&dir| {
            let r = directional_accuracy(by_lang(dir.source), by_lang(dir.target), dir, &cfg, index, None)?;
            Ok(DirectionAccuracy { direction: dir, accuracy: r.accuracy })
        })
        .collect::<Result<Vec<_>>>()?;
    let pct: Vec<f64> = directions.iter().map(|d| 100.0 * d.accuracy).collect();
    let clas = clas(&PairAccuracies::from_slice(&pct)?);
    Ok(DemoEvaluation { directions, clas })
}

//! Parallel-sentence retrieval with length-matched negatives.
//!
//! For every triple `i` the source sentence is scored by raw dot product
//! against its parallel target sentence and `k` sampled negatives; the query
//! succeeds only when the positive scores strictly above every negative.
//! Negatives come from a window of token-length percentile ranks around the
//! query, widened in steps of 5 points when it holds fewer than `k`
//! candidates. The similarity-weighted sampler draws from the same window but
//! favours candidates that are less cosine-similar to the query.

use std::io::Write;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedio::{Language, LayerEmbeddings, RetrievalConfig, SamplerKind, TripleIndex};
use crate::error::{Error, Result};
use crate::rng;

/// Step by which an underfilled percentile window is widened.
pub const WINDOW_STEP: f64 = 5.0;
/// Weight floor of the similarity-weighted sampler.
pub const SIM_WEIGHT_FLOOR: f64 = 1e-6;

const WINDOW_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub source: Language,
    pub target: Language,
}

impl Direction {
    /// Forward/backward pairs in CLAS column order:
    /// EN->CM, CM->EN, EN->HI, HI->EN, HI->CM, CM->HI.
    pub const CLAS_ORDER: [Direction; 6] = [
        Direction { source: Language::En, target: Language::Cm },
        Direction { source: Language::Cm, target: Language::En },
        Direction { source: Language::En, target: Language::Hi },
        Direction { source: Language::Hi, target: Language::En },
        Direction { source: Language::Hi, target: Language::Cm },
        Direction { source: Language::Cm, target: Language::Hi },
    ];

    pub fn new(source: Language, target: Language) -> Result<Self> {
        if source == target {
            return Err(Error::InvalidConfig(format!(
                "direction needs two different languages, got {source}->{target}"
            )));
        }
        Ok(Self { source, target })
    }

    pub fn code(self) -> u64 {
        self.source.code() * 3 + self.target.code()
    }

    pub fn reversed(self) -> Self {
        Self {
            source: self.target,
            target: self.source,
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}->{}", self.source, self.target)
    }
}

/// Mid-rank percentile of each value: `100 * (#less + 0.5 * #equal) / n`.
pub fn length_percentiles(lengths: &[u32]) -> Result<Vec<f64>> {
    if lengths.is_empty() {
        return Err(Error::EmptyInput("length list"));
    }
    let mut sorted = lengths.to_vec();
    sorted.sort_unstable();
    let n = sorted.len() as f64;
    Ok(lengths
        .iter()
        .map(|&v| {
            let less = sorted.partition_point(|&x| x < v);
            let upto = sorted.partition_point(|&x| x <= v);
            100.0 * (less as f64 + 0.5 * (upto - less) as f64) / n
        })
        .collect())
}

/// Length-percentile structure for one direction.
#[derive(Debug, Clone)]
pub struct PercentilePool {
    direction: Direction,
    source_pct: Vec<f64>,
    /// (percentile, target ordinal), ascending.
    target_sorted: Vec<(f64, usize)>,
}

/// The eligible candidates of one query: a contiguous run of
/// `target_sorted` minus the query's own positive.
#[derive(Debug, Clone, Copy)]
struct Window {
    lo: usize,
    hi: usize,
    skip: Option<usize>,
    width: f64,
}

impl Window {
    fn len(&self) -> usize {
        self.hi - self.lo - usize::from(self.skip.is_some())
    }

    /// Position in `target_sorted` of the `i`-th eligible candidate.
    fn position(&self, i: usize) -> usize {
        let p = self.lo + i;
        match self.skip {
            Some(s) if p >= s => p + 1,
            _ => p,
        }
    }
}

impl PercentilePool {
    pub fn new(index: &TripleIndex, direction: Direction) -> Result<Self> {
        let source_pct = length_percentiles(&index.lengths(direction.source))?;
        let target_pct = length_percentiles(&index.lengths(direction.target))?;
        let mut target_sorted: Vec<(f64, usize)> =
            target_pct.into_iter().enumerate().map(|(i, p)| (p, i)).collect();
        target_sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok(Self {
            direction,
            source_pct,
            target_sorted,
        })
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn query_percentile(&self, query: usize) -> f64 {
        self.source_pct[query]
    }

    fn window(&self, query: usize, cfg: &RetrievalConfig) -> Result<Window> {
        let p = self.source_pct[query];
        let mut width = cfg.percentile_window;
        loop {
            let lo = self
                .target_sorted
                .partition_point(|&(t, _)| t < p - width - WINDOW_SLACK);
            let hi = self
                .target_sorted
                .partition_point(|&(t, _)| t <= p + width + WINDOW_SLACK);
            let skip = (lo..hi).find(|&i| self.target_sorted[i].1 == query);
            let w = Window { lo, hi, skip, width };
            if w.len() >= cfg.num_negatives {
                return Ok(w);
            }
            if width >= 100.0 {
                return Err(Error::PoolTooSmall {
                    available: w.len(),
                    requested: cfg.num_negatives,
                });
            }
            width = (width + WINDOW_STEP).min(100.0);
        }
    }

    /// Target ordinals eligible as negatives for `query` together with the
    /// window half-width that was finally used.
    pub fn eligible(&self, query: usize, cfg: &RetrievalConfig) -> Result<(f64, Vec<usize>)> {
        let w = self.window(query, cfg)?;
        let ords = (0..w.len())
            .map(|i| self.target_sorted[w.position(i)].1)
            .collect();
        Ok((w.width, ords))
    }

    /// Uniform draw of `k` distinct negatives from the window.
    pub fn sample_uniform<R: Rng + ?Sized>(
        &self,
        query: usize,
        cfg: &RetrievalConfig,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let w = self.window(query, cfg)?;
        Ok(index::sample(rng, w.len(), cfg.num_negatives)
            .into_iter()
            .map(|i| self.target_sorted[w.position(i)].1)
            .collect())
    }

    /// Draw `k` distinct negatives from the window with probability
    /// proportional to `max(eps, 1 - s_hat)`, where `s_hat` is the
    /// min-max normalized cosine similarity between `query_vec` and the
    /// candidate's row in `target` (rows addressed by `target_rows`).
    pub fn sample_weighted<R: Rng + ?Sized>(
        &self,
        query: usize,
        query_vec: &[f32],
        target: &LayerEmbeddings,
        target_rows: &[usize],
        cfg: &RetrievalConfig,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        let (_, pool) = self.eligible(query, cfg)?;
        let cands: Vec<&[f32]> = pool.iter().map(|&o| target.row(target_rows[o])).collect();
        let weights = similarity_weights(query_vec, &cands).map_err(|e| match e {
            WeightFailure::Query => Error::ZeroNorm(format!("query #{query}")),
            WeightFailure::Candidate(j) => {
                Error::ZeroNorm(target.sentence_ids()[target_rows[pool[j]]].clone())
            }
        })?;
        let picked = index::sample_weighted(rng, pool.len(), |i| weights[i], cfg.num_negatives)
            .map_err(|e| Error::InvalidConfig(format!("weighted sampling failed: {e}")))?;
        debug_assert_eq!(picked.len(), cfg.num_negatives);
        Ok(picked.into_iter().map(|i| pool[i]).collect())
    }
}

#[derive(Debug)]
enum WeightFailure {
    Query,
    Candidate(usize),
}

fn dot(a: &[f32], b: &[f32]) -> f64 {
    a.iter().zip(b).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum()
}

fn norm(a: &[f32]) -> f64 {
    dot(a, a).sqrt()
}

fn similarity_weights(query: &[f32], cands: &[&[f32]]) -> Result<Vec<f64>, WeightFailure> {
    let qn = norm(query);
    if qn == 0.0 {
        return Err(WeightFailure::Query);
    }
    let sims = cands
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let cn = norm(c);
            if cn == 0.0 {
                Err(WeightFailure::Candidate(j))
            } else {
                Ok(dot(query, c) / (qn * cn))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let (lo, hi) = sims
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let span = hi - lo;
    Ok(sims
        .iter()
        .map(|&s| {
            let s_hat = if span > 0.0 { (s - lo) / span } else { 0.0 };
            (1.0 - s_hat).max(SIM_WEIGHT_FLOOR)
        })
        .collect())
}

/// Unnormalized draw weights `max(eps, 1 - s_hat)` for a candidate pool.
pub fn simweighted_weights(query: &[f32], candidates: &[&[f32]]) -> Result<Vec<f64>> {
    similarity_weights(query, candidates).map_err(|e| match e {
        WeightFailure::Query => Error::ZeroNorm("query".into()),
        WeightFailure::Candidate(j) => Error::ZeroNorm(format!("candidate #{j}")),
    })
}

/// The stream used for one query of one (direction, layer).
pub fn query_rng(seed: u64, direction: Direction, layer: u32, query: usize) -> rand_chacha::ChaCha8Rng {
    rng::stream(&[
        rng::TAG_RETRIEVAL,
        seed,
        direction.code(),
        u64::from(layer),
        query as u64,
    ])
}

fn source_ordinal(index: &TripleIndex, dir: Direction, query_id: &str) -> Result<usize> {
    index
        .ordinal_of(dir.source, query_id)
        .ok_or_else(|| Error::MissingId(query_id.to_string()))
}

/// Percentile-window negatives for `query_id` (a source-language id).
pub fn sample_negatives_percentile(
    query_id: &str,
    dir: Direction,
    layer: u32,
    cfg: &RetrievalConfig,
    index: &TripleIndex,
) -> Result<Vec<String>> {
    cfg.validate()?;
    let q = source_ordinal(index, dir, query_id)?;
    let pool = PercentilePool::new(index, dir)?;
    let mut rng = query_rng(cfg.seed, dir, layer, q);
    let negs = pool.sample_uniform(q, cfg, &mut rng)?;
    Ok(negs.into_iter().map(|o| index.id(o, dir.target).to_string()).collect())
}

/// Similarity-weighted negatives for `query_id`, scored against `query_vec`.
pub fn sample_negatives_simweighted(
    query_id: &str,
    query_vec: &[f32],
    target_emb: &LayerEmbeddings,
    dir: Direction,
    layer: u32,
    cfg: &RetrievalConfig,
    index: &TripleIndex,
) -> Result<Vec<String>> {
    cfg.validate()?;
    let q = source_ordinal(index, dir, query_id)?;
    let pool = PercentilePool::new(index, dir)?;
    let rows = resolve_rows(target_emb, index, dir.target)?;
    let mut rng = query_rng(cfg.seed, dir, layer, q);
    let negs = pool.sample_weighted(q, query_vec, target_emb, &rows, cfg, &mut rng)?;
    Ok(negs.into_iter().map(|o| index.id(o, dir.target).to_string()).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalOutcome {
    pub query_id: String,
    /// Positive first, then negatives in draw order.
    pub candidate_ids: Vec<String>,
    pub scores: Vec<f64>,
    pub success: bool,
}

impl RetrievalOutcome {
    pub fn positive_score(&self) -> f64 {
        self.scores[0]
    }

    pub fn max_negative_score(&self) -> f64 {
        self.scores[1..].iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionalResult {
    pub direction: Direction,
    pub layer: u32,
    pub accuracy: f64,
    pub outcomes: Vec<RetrievalOutcome>,
}

/// Vectors used by the similarity-weighted sampler (usually the last layer).
#[derive(Debug, Clone, Copy)]
pub struct SimilarityRef<'a> {
    pub source: &'a LayerEmbeddings,
    pub target: &'a LayerEmbeddings,
}

fn resolve_rows(emb: &LayerEmbeddings, index: &TripleIndex, lang: Language) -> Result<Vec<usize>> {
    if emb.language != lang {
        return Err(Error::DimensionMismatch(format!(
            "expected {lang} embeddings, got {}",
            emb.language
        )));
    }
    index
        .ids(lang)
        .map(|id| emb.row_of(id).ok_or_else(|| Error::MissingId(id.to_string())))
        .collect()
}

/// Retrieval accuracy of `src -> tgt` over every triple in `index`.
///
/// Queries run in parallel on the current rayon pool; the per-query random
/// stream depends only on (seed, direction, layer, ordinal), so the result is
/// the same for any thread count.
pub fn directional_accuracy(
    src: &LayerEmbeddings,
    tgt: &LayerEmbeddings,
    dir: Direction,
    cfg: &RetrievalConfig,
    index: &TripleIndex,
    sim: Option<SimilarityRef<'_>>,
) -> Result<DirectionalResult> {
    cfg.validate()?;
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source d={} vs target d={}",
            src.dim(),
            tgt.dim()
        )));
    }
    let src_rows = resolve_rows(src, index, dir.source)?;
    let tgt_rows = resolve_rows(tgt, index, dir.target)?;
    let pool = PercentilePool::new(index, dir)?;

    let sim = sim.unwrap_or(SimilarityRef {
        source: src,
        target: tgt,
    });
    let sim_rows = match cfg.sampler {
        SamplerKind::SimWeighted => {
            if sim.source.dim() != sim.target.dim() {
                return Err(Error::DimensionMismatch("similarity layer dims differ".into()));
            }
            Some((
                resolve_rows(sim.source, index, dir.source)?,
                resolve_rows(sim.target, index, dir.target)?,
            ))
        }
        SamplerKind::Percentile => None,
    };

    let layer = src.layer;
    let outcomes = (0..index.len())
        .into_par_iter()
        .map(|q| {
            let mut rng = query_rng(cfg.seed, dir, layer, q);
            let negatives = match &sim_rows {
                None => pool.sample_uniform(q, cfg, &mut rng)?,
                Some((s_rows, t_rows)) => pool.sample_weighted(
                    q,
                    sim.source.row(s_rows[q]),
                    sim.target,
                    t_rows,
                    cfg,
                    &mut rng,
                )?,
            };
            let query = src.row(src_rows[q]);
            let mut candidate_ids = Vec::with_capacity(negatives.len() + 1);
            let mut scores = Vec::with_capacity(negatives.len() + 1);
            for o in std::iter::once(q).chain(negatives) {
                candidate_ids.push(index.id(o, dir.target).to_string());
                scores.push(dot(query, tgt.row(tgt_rows[o])));
            }
            let success = scores[1..].iter().all(|&s| scores[0] > s);
            Ok(RetrievalOutcome {
                query_id: index.id(q, dir.source).to_string(),
                candidate_ids,
                scores,
                success,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let hits = outcomes.iter().filter(|o| o.success).count();
    Ok(DirectionalResult {
        direction: dir,
        layer,
        accuracy: hits as f64 / outcomes.len() as f64,
        outcomes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerCurve {
    pub direction: Direction,
    pub layers: Vec<u32>,
    pub accuracies: Vec<f64>,
    pub mean: f64,
}

impl LayerCurve {
    pub fn last(&self) -> f64 {
        *self.accuracies.last().expect("curve has at least one layer")
    }
}

/// Accuracy per layer plus the mean over layers.
pub fn layer_curve(
    src_set: &[LayerEmbeddings],
    tgt_set: &[LayerEmbeddings],
    dir: Direction,
    cfg: &RetrievalConfig,
    index: &TripleIndex,
) -> Result<LayerCurve> {
    layer_curve_with_outcomes(src_set, tgt_set, dir, cfg, index).map(|(c, _)| c)
}

pub fn layer_curve_with_outcomes(
    src_set: &[LayerEmbeddings],
    tgt_set: &[LayerEmbeddings],
    dir: Direction,
    cfg: &RetrievalConfig,
    index: &TripleIndex,
) -> Result<(LayerCurve, Vec<DirectionalResult>)> {
    let layers: Vec<u32> = src_set.iter().map(|e| e.layer).collect();
    let tgt_layers: Vec<u32> = tgt_set.iter().map(|e| e.layer).collect();
    if layers.is_empty() || layers != tgt_layers {
        return Err(Error::LayerMismatch(format!(
            "source layers {layers:?} vs target layers {tgt_layers:?}"
        )));
    }
    let sim = match cfg.sampler {
        SamplerKind::Percentile => None,
        SamplerKind::SimWeighted => {
            let wanted = cfg
                .similarity_layer
                .unwrap_or_else(|| *layers.iter().max().unwrap());
            let pos = layers.iter().position(|&l| l == wanted).ok_or_else(|| {
                Error::LayerMismatch(format!("similarity layer {wanted} not loaded"))
            })?;
            Some(SimilarityRef {
                source: &src_set[pos],
                target: &tgt_set[pos],
            })
        }
    };
    let results = src_set
        .iter()
        .zip(tgt_set)
        .map(|(s, t)| directional_accuracy(s, t, dir, cfg, index, sim))
        .collect::<Result<Vec<_>>>()?;
    let accuracies: Vec<f64> = results.iter().map(|r| r.accuracy).collect();
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    Ok((
        LayerCurve {
            direction: dir,
            layers,
            accuracies,
            mean,
        },
        results,
    ))
}

/// Per-query CSV: `query_id,success,positive_score,max_negative_score`.
pub fn write_outcomes_csv<W: Write>(outcomes: &[RetrievalOutcome], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let wrap = |e: csv::Error| Error::parse("<outcomes csv>", e);
    w.write_record(["query_id", "success", "positive_score", "max_negative_score"])
        .map_err(wrap)?;
    for o in outcomes {
        w.write_record([
            o.query_id.clone(),
            o.success.to_string(),
            o.positive_score().to_string(),
            o.max_negative_score().to_string(),
        ])
        .map_err(wrap)?;
    }
    w.flush().map_err(|e| Error::io("<outcomes csv>", e))
}

pub fn write_outcomes_csv_file(outcomes: &[RetrievalOutcome], path: &Path) -> Result<()> {
    let f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_outcomes_csv(outcomes, std::io::BufWriter::new(f))
}

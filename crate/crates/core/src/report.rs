//! Run configuration, report assembly and CSV outputs for a full analysis run.
//!
//! A run reads one embedding directory and triple manifest, executes the
//! enabled analyses in dependency order (retrieval before CLAS), and writes
//! `report.json` plus one CSV per curve into the output directory. Every CSV
//! row carries the run seed. On the first failing analysis the run stops and
//! writes a report whose `status` is `partial`.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::embedio::{
    load_triple_index, EmbeddingStore, Language, LayerEmbeddings, LayerSelection, Pooling,
    RetrievalConfig, SamplerKind, TripleIndex,
};
use crate::error::{Error, Result};
use crate::infotheory::{uncertainty_reduction, EntropyConfig, UncertaintyReduction};
use crate::repsim::{similarity_curve, CurvePoint, SimilarityMetric, SvccaOptions};
use crate::retrieval::{layer_curve_with_outcomes, write_outcomes_csv_file, Direction, LayerCurve};
use crate::rng::{stream, TAG_TSNE};
use crate::saliency::{language_saliency, read_attributions, SaliencySummary};
use crate::scores::{clas_with, consistency_with, ClasBreakdown, PairAccuracies, StdDivisor};

pub const TOOLKIT_NAME: &str = "xlign";
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const REPORT_FILE: &str = "report.json";

/// JSON Schema describing `report.json`.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

fn default_layers() -> String {
    "all".into()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub embeddings_dir: Option<PathBuf>,
    pub triples: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetrievalAnalysis {
    pub num_negatives: usize,
    pub percentile_window: f64,
    pub sampler: SamplerKind,
    pub similarity_layer: Option<u32>,
    /// Also write one per-query CSV per direction and layer.
    pub write_outcomes: bool,
}

impl Default for RetrievalAnalysis {
    fn default() -> Self {
        let base = RetrievalConfig::default();
        Self {
            num_negatives: base.num_negatives,
            percentile_window: base.percentile_window,
            sampler: base.sampler,
            similarity_layer: None,
            write_outcomes: false,
        }
    }
}

impl RetrievalAnalysis {
    fn config(&self, seed: u64) -> RetrievalConfig {
        RetrievalConfig {
            num_negatives: self.num_negatives,
            percentile_window: self.percentile_window,
            sampler: self.sampler,
            seed,
            similarity_layer: self.similarity_layer,
        }
    }
}

fn default_metrics() -> Vec<SimilarityMetric> {
    vec![SimilarityMetric::Cka, SimilarityMetric::Svcca]
}

fn default_pairs() -> Vec<(Language, Language)> {
    vec![
        (Language::En, Language::Cm),
        (Language::Hi, Language::Cm),
        (Language::En, Language::Hi),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepsimAnalysis {
    #[serde(default = "default_metrics")]
    pub metrics: Vec<SimilarityMetric>,
    #[serde(default = "default_pairs")]
    pub pairs: Vec<(Language, Language)>,
    #[serde(default)]
    pub svcca: SvccaOptions,
}

impl Default for RepsimAnalysis {
    fn default() -> Self {
        Self { metrics: default_metrics(), pairs: default_pairs(), svcca: SvccaOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SaliencyAnalysis {
    pub attributions: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClasAnalysis {
    /// Literal accuracies; when absent the retrieval results are used.
    pub accuracies: Option<PairAccuracies>,
    pub divisor: StdDivisor,
}

fn sample_divisor() -> StdDivisor {
    StdDivisor::Sample
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyRow {
    pub label: String,
    pub scores: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyAnalysis {
    pub rows: Vec<ConsistencyRow>,
    #[serde(default = "sample_divisor")]
    pub divisor: StdDivisor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsneAnalysis {
    pub sample_size: usize,
    /// Defaults to the last loaded layer.
    #[serde(default)]
    pub layer: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analyses {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval: Option<RetrievalAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clas: Option<ClasAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repsim: Option<RepsimAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<EntropyConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saliency: Option<SaliencyAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency: Option<ConsistencyAnalysis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tsne: Option<TsneAnalysis>,
}

impl Analyses {
    fn enabled(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! push {
            ($($f:ident),*) => { $(if self.$f.is_some() { v.push(stringify!($f)); })* };
        }
        push!(retrieval, clas, repsim, entropy, saliency, consistency, tsne);
        v
    }

    fn needs_embeddings(&self) -> bool {
        self.retrieval.is_some() || self.repsim.is_some() || self.entropy.is_some() || self.tsne.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    pub output_dir: PathBuf,
    #[serde(default)]
    pub inputs: Inputs,
    #[serde(default)]
    pub pooling: Pooling,
    /// `all`, `12`, `0,6,12` or `0-12`.
    #[serde(default = "default_layers")]
    pub layers: String,
    pub analyses: Analyses,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse("<config>", e))
    }

    /// Read a config file; relative paths inside it resolve against the
    /// file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: Self = serde_json::from_str(&text).map_err(|e| Error::parse(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.output_dir);
        if let Some(p) = cfg.inputs.embeddings_dir.as_mut() {
            fix(p);
        }
        if let Some(p) = cfg.inputs.triples.as_mut() {
            fix(p);
        }
        if let Some(s) = cfg.analyses.saliency.as_mut() {
            fix(&mut s.attributions);
        }
        Ok(cfg)
    }

    pub fn layer_selection(&self) -> Result<LayerSelection> {
        self.layers.parse()
    }

    pub fn validate(&self) -> Result<()> {
        let a = &self.analyses;
        if a.enabled().is_empty() {
            return Err(Error::InvalidConfig("no analyses enabled".into()));
        }
        self.layer_selection()?;
        let must_exist = |p: &Path, what: &str| {
            if p.exists() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{what} {} does not exist", p.display())))
            }
        };
        if a.needs_embeddings() {
            let dir = self.inputs.embeddings_dir.as_deref().ok_or_else(|| {
                Error::InvalidConfig("inputs.embeddings_dir is required by the enabled analyses".into())
            })?;
            must_exist(dir, "embeddings_dir")?;
            let triples = self.inputs.triples.as_deref().ok_or_else(|| {
                Error::InvalidConfig("inputs.triples is required by the enabled analyses".into())
            })?;
            must_exist(triples, "triples manifest")?;
        }
        if let Some(r) = &a.retrieval {
            r.config(self.seed).validate()?;
        }
        if let Some(c) = &a.clas {
            if c.accuracies.is_none() && a.retrieval.is_none() {
                return Err(Error::InvalidConfig(
                    "clas needs literal accuracies or an enabled retrieval analysis".into(),
                ));
            }
        }
        if let Some(r) = &a.repsim {
            if r.metrics.is_empty() || r.pairs.is_empty() {
                return Err(Error::InvalidConfig("repsim needs at least one metric and pair".into()));
            }
            if let Some((x, _)) = r.pairs.iter().find(|(x, y)| x == y) {
                return Err(Error::InvalidConfig(format!("repsim pair {x}/{x} compares a language with itself")));
            }
        }
        if let Some(e) = &a.entropy {
            e.validate()?;
        }
        if let Some(s) = &a.saliency {
            must_exist(&s.attributions, "attribution file")?;
        }
        if let Some(c) = &a.consistency {
            if c.rows.is_empty() {
                return Err(Error::InvalidConfig("consistency needs at least one row".into()));
            }
        }
        if let Some(t) = &a.tsne {
            if t.sample_size == 0 {
                return Err(Error::InvalidConfig("tsne sample_size must be >= 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Complete,
    Partial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RetrievalSection {
    pub seed: u64,
    pub curves: Vec<LayerCurve>,
    /// Percent accuracies at the last layer, in CLAS column order.
    pub last_layer: PairAccuracies,
    /// Percent accuracies averaged over layers, in CLAS column order.
    pub layer_mean: PairAccuracies,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelledClas {
    pub label: String,
    pub accuracies: PairAccuracies,
    pub breakdown: ClasBreakdown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimilaritySeries {
    pub metric: SimilarityMetric,
    pub pair: (Language, Language),
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConsistencyResult {
    pub label: String,
    pub scores: [f64; 3],
    pub consistency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TsneSection {
    pub file: String,
    pub layer: u32,
    pub sample_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisFailure {
    pub analysis: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlignmentReport {
    pub toolkit: String,
    pub version: String,
    pub seed: u64,
    pub status: ReportStatus,
    pub config: RunConfig,
    pub model_ids: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retrieval: Option<RetrievalSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clas: Option<Vec<LabelledClas>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repsim: Option<Vec<SimilaritySeries>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entropy: Option<Vec<UncertaintyReduction>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saliency: Option<SaliencySummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency: Option<Vec<ConsistencyResult>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tsne: Option<TsneSection>,
    /// Files written next to the report, relative to the output directory.
    pub files: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<AnalysisFailure>,
}

impl AlignmentReport {
    fn new(config: &RunConfig) -> Self {
        Self {
            toolkit: TOOLKIT_NAME.into(),
            version: TOOLKIT_VERSION.into(),
            seed: config.seed,
            status: ReportStatus::Partial,
            config: config.clone(),
            model_ids: Vec::new(),
            retrieval: None,
            clas: None,
            repsim: None,
            entropy: None,
            saliency: None,
            consistency: None,
            tsne: None,
            files: Vec::new(),
            failure: None,
        }
    }

    fn has_section(&self, name: &str) -> bool {
        match name {
            "retrieval" => self.retrieval.is_some(),
            "clas" => self.clas.is_some(),
            "repsim" => self.repsim.is_some(),
            "entropy" => self.entropy.is_some(),
            "saliency" => self.saliency.is_some(),
            "consistency" => self.consistency.is_some(),
            "tsne" => self.tsne.is_some(),
            _ => false,
        }
    }

    /// Structural checks beyond the schema: a complete report holds a
    /// section for every enabled analysis and nothing else.
    pub fn check(&self) -> Result<()> {
        let enabled = self.config.analyses.enabled();
        for name in ["retrieval", "clas", "repsim", "entropy", "saliency", "consistency", "tsne"] {
            let want = enabled.contains(&name);
            let has = self.has_section(name);
            if has && !want {
                return Err(Error::InvalidConfig(format!("report has {name} but it was not enabled")));
            }
            if want && !has && self.status == ReportStatus::Complete {
                return Err(Error::InvalidConfig(format!("complete report lacks {name}")));
            }
        }
        match (self.status, &self.failure) {
            (ReportStatus::Complete, Some(_)) => {
                Err(Error::InvalidConfig("complete report carries a failure".into()))
            }
            (ReportStatus::Partial, None) => {
                Err(Error::InvalidConfig("partial report lacks a failure record".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Parse and check a `report.json` document.
pub fn validate_report(text: &str) -> Result<AlignmentReport> {
    let report: AlignmentReport =
        serde_json::from_str(text).map_err(|e| Error::parse(REPORT_FILE, e))?;
    report.check()?;
    Ok(report)
}

#[derive(Debug, thiserror::Error)]
#[error("analysis `{analysis}` failed: {source}")]
pub struct RunError {
    pub analysis: String,
    pub report: Box<AlignmentReport>,
    #[source]
    pub source: Error,
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::parse(path, e)
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Sorted, distinct triple ordinals for a t-SNE export.
pub fn tsne_sample(n: usize, sample_size: usize, seed: u64) -> Result<Vec<usize>> {
    if sample_size == 0 {
        return Err(Error::InvalidConfig("sample_size must be >= 1".into()));
    }
    if sample_size > n {
        return Err(Error::InvalidConfig(format!(
            "t-SNE sample_size {sample_size} exceeds the {n} available triples"
        )));
    }
    if sample_size == n {
        return Ok((0..n).collect());
    }
    let mut rng = stream(&[TAG_TSNE, seed, n as u64, sample_size as u64]);
    let mut picks = index::sample(&mut rng, n, sample_size).into_vec();
    picks.sort_unstable();
    Ok(picks)
}

/// Write `language,sentence_id,x0..x{d-1}` for the same sampled triples in
/// every given language. Returns the number of sampled triples.
pub fn emit_tsne_input<W: Write>(
    sets: &[&LayerEmbeddings],
    index: &TripleIndex,
    sample_size: usize,
    seed: u64,
    out: W,
) -> Result<usize> {
    let first = sets.first().ok_or(Error::EmptyInput("t-SNE embedding sets"))?;
    let d = first.dim();
    if sets.iter().any(|e| e.dim() != d) {
        return Err(Error::DimensionMismatch("t-SNE sets have different d".into()));
    }
    let picks = tsne_sample(index.len(), sample_size, seed)?;
    let path = Path::new("<tsne csv>");
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["language".to_string(), "sentence_id".to_string()];
    header.extend((0..d).map(|j| format!("x{j}")));
    w.write_record(&header).map_err(csv_err(path))?;
    for emb in sets {
        for &o in &picks {
            let id = index.id(o, emb.language);
            let row = emb.vector(id)?;
            let mut rec = vec![emb.language.to_string(), id.to_string()];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(csv_err(path))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(picks.len())
}

struct Loaded {
    index: TripleIndex,
    sets: [Vec<LayerEmbeddings>; 3],
}

impl Loaded {
    fn lang(&self, l: Language) -> &[LayerEmbeddings] {
        &self.sets[Language::ALL.iter().position(|&x| x == l).unwrap()]
    }
}

fn load_inputs(cfg: &RunConfig) -> Result<(Loaded, Vec<String>)> {
    let dir = cfg.inputs.embeddings_dir.as_deref().expect("validated");
    let triples = cfg.inputs.triples.as_deref().expect("validated");
    let index = load_triple_index(triples)?;
    let store = EmbeddingStore::scan(dir)?;
    let sel = cfg.layer_selection()?;
    let sets = Language::ALL
        .map(|l| store.load_layers(l, cfg.pooling, &sel))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut ids: Vec<String> = store.model_ids().map(str::to_string).collect();
    ids.sort();
    let [en, hi, cm]: [Vec<LayerEmbeddings>; 3] = sets.try_into().expect("three languages");
    Ok((Loaded { index, sets: [en, hi, cm] }, ids))
}

fn pct(values: impl Iterator<Item = f64>) -> Result<PairAccuracies> {
    let v: Vec<f64> = values.map(|a| 100.0 * a).collect();
    PairAccuracies::from_slice(&v)
}

fn lang_pair_label(p: &(Language, Language)) -> String {
    format!("{}-{}", p.0, p.1)
}

/// Execute every enabled analysis and write the report and CSVs.
pub fn run(config: &RunConfig) -> std::result::Result<AlignmentReport, RunError> {
    let mut report = AlignmentReport::new(config);
    let fail = |report: &mut AlignmentReport, analysis: &str, source: Error| -> RunError {
        report.status = ReportStatus::Partial;
        report.failure = Some(AnalysisFailure { analysis: analysis.into(), message: source.to_string() });
        if std::fs::create_dir_all(&config.output_dir).is_ok() {
            // best effort: the original error is what the caller needs
            let _ = std::fs::write(config.output_dir.join(REPORT_FILE), report.to_json());
        }
        RunError { analysis: analysis.into(), report: Box::new(report.clone()), source }
    };
    macro_rules! step {
        ($name:expr, $e:expr) => {{
            let res = $e;
            match res {
                Ok(v) => v,
                Err(err) => return Err(fail(&mut report, $name, err)),
            }
        }};
    }

    step!("config", config.validate());
    let out = &config.output_dir;
    step!("config", std::fs::create_dir_all(out).map_err(|e| Error::io(out, e)));
    let a = &config.analyses;
    let seed = config.seed;
    let seed_s = seed.to_string();

    let loaded = if a.needs_embeddings() {
        let (l, ids) = step!("inputs", load_inputs(config));
        report.model_ids = ids;
        Some(l)
    } else {
        None
    };
    let data = || loaded.as_ref().expect("inputs loaded");

    if let Some(r) = &a.retrieval {
        let section = step!("retrieval", (|| {
            let cfg = r.config(seed);
            let d = data();
            let mut curves = Vec::with_capacity(6);
            for dir in Direction::CLAS_ORDER {
                let (curve, results) =
                    layer_curve_with_outcomes(d.lang(dir.source), d.lang(dir.target), dir, &cfg, &d.index)?;
                if r.write_outcomes {
                    for res in &results {
                        let name = format!("retrieval_{}_{}_layer{:02}.csv", dir.source, dir.target, res.layer);
                        write_outcomes_csv_file(&res.outcomes, &out.join(&name))?;
                        report.files.push(name);
                    }
                }
                curves.push(curve);
            }
            let name = "retrieval_curves.csv";
            write_csv(
                &out.join(name),
                &["seed", "direction", "layer", "accuracy"],
                curves.iter().flat_map(|c| {
                    c.layers.iter().zip(&c.accuracies).map(|(l, acc)| {
                        vec![seed_s.clone(), c.direction.to_string(), l.to_string(), acc.to_string()]
                    })
                }),
            )?;
            report.files.push(name.into());
            Ok(RetrievalSection {
                seed,
                last_layer: pct(curves.iter().map(LayerCurve::last))?,
                layer_mean: pct(curves.iter().map(|c| c.mean))?,
                curves,
            })
        })());
        report.retrieval = Some(section);
    }

    if let Some(c) = &a.clas {
        let rows = step!("clas", (|| {
            let inputs: Vec<(String, PairAccuracies)> = match (&c.accuracies, &report.retrieval) {
                (Some(acc), _) => vec![("literal".into(), *acc)],
                (None, Some(r)) => vec![("last_layer".into(), r.last_layer), ("layer_mean".into(), r.layer_mean)],
                (None, None) => {
                    return Err(Error::InvalidConfig("clas has no accuracies".into()));
                }
            };
            let rows: Vec<LabelledClas> = inputs
                .into_iter()
                .map(|(label, accuracies)| LabelledClas {
                    breakdown: clas_with(&accuracies, c.divisor),
                    label,
                    accuracies,
                })
                .collect();
            let name = "clas.csv";
            write_csv(
                &out.join(name),
                &["seed", "label", "mean_acc", "dir_bias", "setup_std", "clas"],
                rows.iter().map(|r| {
                    let b = r.breakdown;
                    vec![
                        seed_s.clone(),
                        r.label.clone(),
                        b.mean_acc.to_string(),
                        b.dir_bias.to_string(),
                        b.setup_std.to_string(),
                        b.clas.to_string(),
                    ]
                }),
            )?;
            report.files.push(name.into());
            Ok(rows)
        })());
        report.clas = Some(rows);
    }

    if let Some(r) = &a.repsim {
        let series = step!("repsim", (|| {
            let d = data();
            let mut series = Vec::new();
            for pair in &r.pairs {
                for &metric in &r.metrics {
                    let points = similarity_curve(metric, d.lang(pair.0), d.lang(pair.1), &d.index, &r.svcca)?;
                    series.push(SimilaritySeries { metric, pair: *pair, points });
                }
            }
            let name = "repsim.csv";
            write_csv(
                &out.join(name),
                &["seed", "metric", "pair", "layer", "value"],
                series.iter().flat_map(|s| {
                    s.points.iter().map(|p| {
                        vec![
                            seed_s.clone(),
                            s.metric.to_string(),
                            lang_pair_label(&s.pair),
                            p.layer.to_string(),
                            p.value.to_string(),
                        ]
                    })
                }),
            )?;
            report.files.push(name.into());
            Ok(series)
        })());
        report.repsim = Some(series);
    }

    if let Some(e) = &a.entropy {
        let rows = step!("entropy", (|| {
            let d = data();
            let rows = uncertainty_reduction(
                d.lang(Language::Cm),
                d.lang(Language::En),
                d.lang(Language::Hi),
                &d.index,
                e,
            )?;
            let name = "entropy.csv";
            write_csv(
                &out.join(name),
                &["seed", "layer", "condition", "h_cm", "h_conditional", "delta_h"],
                rows.iter().flat_map(|u| {
                    [
                        ("en", u.h_cm_given_en, u.delta_en),
                        ("hi", u.h_cm_given_hi, u.delta_hi),
                        ("joint", u.h_cm_given_joint, u.delta_joint),
                    ]
                    .map(|(cond, h, dh)| {
                        vec![
                            seed_s.clone(),
                            u.layer.to_string(),
                            cond.to_string(),
                            u.h_cm.to_string(),
                            h.to_string(),
                            dh.to_string(),
                        ]
                    })
                }),
            )?;
            report.files.push(name.into());
            Ok(rows)
        })());
        report.entropy = Some(rows);
    }

    if let Some(s) = &a.saliency {
        let summary = step!("saliency", read_attributions(&s.attributions).map(|r| language_saliency(&r)));
        report.saliency = Some(summary);
    }

    if let Some(c) = &a.consistency {
        let rows = step!("consistency", c
            .rows
            .iter()
            .map(|row| {
                Ok(ConsistencyResult {
                    label: row.label.clone(),
                    scores: row.scores,
                    consistency: consistency_with(row.scores, c.divisor)?,
                })
            })
            .collect::<Result<Vec<_>>>());
        report.consistency = Some(rows);
    }

    if let Some(t) = &a.tsne {
        let section = step!("tsne", (|| {
            let d = data();
            let en = d.lang(Language::En);
            let layer = t.layer.unwrap_or_else(|| en.last().expect("loaded").layer);
            let pick = |l: Language| {
                d.lang(l)
                    .iter()
                    .find(|e| e.layer == layer)
                    .ok_or_else(|| Error::LayerMismatch(format!("t-SNE layer {layer} not loaded")))
            };
            let sets = [pick(Language::En)?, pick(Language::Hi)?, pick(Language::Cm)?];
            let name = "tsne_input.csv";
            let path = out.join(name);
            let f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let n = emit_tsne_input(&sets, &d.index, t.sample_size, seed, std::io::BufWriter::new(f))?;
            report.files.push(name.into());
            Ok(TsneSection { file: name.into(), layer, sample_size: n })
        })());
        report.tsne = Some(section);
    }

    report.status = ReportStatus::Complete;
    let path = out.join(REPORT_FILE);
    step!("report", std::fs::write(&path, report.to_json()).map_err(|e| Error::io(&path, e)));
    Ok(report)
}

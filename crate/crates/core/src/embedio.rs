//! On-disk embedding format, corpus manifests and the in-memory data model.
//!
//! An embedding file (`*.xeb`) holds one `n x d` matrix of 32-bit floats for a
//! single (model, language, layer, pooling) tuple:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "XEB1"
//! 4       4     version, u32 LE (= 1)
//! 8       8     n, u64 LE
//! 16      8     d, u64 LE
//! 24      1     dtype, u8 (1 = f32)
//! 25      4nd   payload, f32 LE, row-major
//! ```
//!
//! Row metadata lives in a JSON sidecar next to it (`foo.xeb` ->
//! `foo.manifest.json`). The triple manifest that aligns sentence ids across
//! the three languages is a JSON array of
//! `{id_en, id_hi, id_cm, len_en, len_hi, len_cm}` rows.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"XEB1";
pub const FORMAT_VERSION: u32 = 1;
pub const DTYPE_F32: u8 = 1;
pub const HEADER_LEN: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Language {
    #[serde(rename = "EN", alias = "en")]
    En,
    #[serde(rename = "HI", alias = "hi")]
    Hi,
    #[serde(rename = "CM", alias = "cm")]
    Cm,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::En, Language::Hi, Language::Cm];

    pub fn code(self) -> u64 {
        match self {
            Language::En => 0,
            Language::Hi => 1,
            Language::Cm => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::En => "en",
            Language::Hi => "hi",
            Language::Cm => "cm",
        }
    }

    fn slot(self) -> usize {
        self.code() as usize
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "en" => Ok(Language::En),
            "hi" => Ok(Language::Hi),
            "cm" => Ok(Language::Cm),
            other => Err(Error::InvalidConfig(format!("unknown language {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub enum Pooling {
    #[default]
    #[serde(rename = "CLS", alias = "cls")]
    Cls,
    #[serde(rename = "MEAN", alias = "mean")]
    Mean,
}

impl fmt::Display for Pooling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pooling::Cls => "cls",
            Pooling::Mean => "mean",
        })
    }
}

impl FromStr for Pooling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cls" => Ok(Pooling::Cls),
            "mean" => Ok(Pooling::Mean),
            other => Err(Error::InvalidConfig(format!("unknown pooling {other:?}"))),
        }
    }
}

/// Sentence vectors for one (model, language, layer, pooling) tuple.
///
/// Layer 0 is the embedding-layer output; 1..=L are transformer layers.
/// Construction validates that ids are unique, that there is at least one row
/// and one column, and that every entry is finite. Instances are immutable.
#[derive(Debug, Clone)]
pub struct LayerEmbeddings {
    pub model_id: String,
    pub language: Language,
    pub layer: u32,
    pub pooling: Pooling,
    rows: usize,
    dim: usize,
    data: Vec<f32>,
    sentence_ids: Vec<String>,
    id_to_row: HashMap<String, usize>,
}

impl LayerEmbeddings {
    pub fn new(
        model_id: impl Into<String>,
        language: Language,
        layer: u32,
        pooling: Pooling,
        dim: usize,
        data: Vec<f32>,
        sentence_ids: Vec<String>,
    ) -> Result<Self> {
        let rows = sentence_ids.len();
        if rows == 0 {
            return Err(Error::EmptyEmbeddingSet);
        }
        if dim == 0 {
            return Err(Error::DimensionMismatch("d must be positive".into()));
        }
        if data.len() != rows * dim {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {rows} ids x {dim} columns",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        let mut id_to_row = HashMap::with_capacity(rows);
        for (i, id) in sentence_ids.iter().enumerate() {
            if id_to_row.insert(id.clone(), i).is_some() {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        Ok(Self {
            model_id: model_id.into(),
            language,
            layer,
            pooling,
            rows,
            dim,
            data,
            sentence_ids,
            id_to_row,
        })
    }

    /// Build from nested rows; mostly for tests and fixtures.
    pub fn from_rows(
        model_id: impl Into<String>,
        language: Language,
        layer: u32,
        pooling: Pooling,
        rows: &[Vec<f32>],
        sentence_ids: Vec<String>,
    ) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        if rows.len() != sentence_ids.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows for {} ids",
                rows.len(),
                sentence_ids.len()
            )));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(model_id, language, layer, pooling, dim, data, sentence_ids)
    }

    pub fn n(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn sentence_ids(&self) -> &[String] {
        &self.sentence_ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_of(&self, id: &str) -> Option<usize> {
        self.id_to_row.get(id).copied()
    }

    pub fn vector(&self, id: &str) -> Result<&[f32]> {
        self.row_of(id)
            .map(|i| self.row(i))
            .ok_or_else(|| Error::MissingId(id.to_string()))
    }

    /// The same embeddings with every row scaled to unit length.
    pub fn normalized(&self) -> Result<Self> {
        let mut data = self.data.clone();
        for (i, row) in data.chunks_mut(self.dim).enumerate() {
            let norm = row.iter().map(|&v| f64::from(v).powi(2)).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::ZeroNorm(self.sentence_ids[i].clone()));
            }
            row.iter_mut().for_each(|v| *v = (f64::from(*v) / norm) as f32);
        }
        Self::new(
            self.model_id.clone(),
            self.language,
            self.layer,
            self.pooling,
            self.dim,
            data,
            self.sentence_ids.clone(),
        )
    }

    /// An `n x d` f64 matrix whose row `i` is the sentence of triple `i`.
    pub fn aligned_matrix(&self, index: &TripleIndex) -> Result<DMatrix<f64>> {
        let rows = index
            .ids(self.language)
            .map(|id| self.row_of(id).ok_or_else(|| Error::MissingId(id.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(DMatrix::from_fn(rows.len(), self.dim, |i, j| {
            f64::from(self.data[rows[i] * self.dim + j])
        }))
    }
}

impl PartialEq for LayerEmbeddings {
    fn eq(&self, other: &Self) -> bool {
        self.model_id == other.model_id
            && self.language == other.language
            && self.layer == other.layer
            && self.pooling == other.pooling
            && self.dim == other.dim
            && self.sentence_ids == other.sentence_ids
            && self.data.len() == other.data.len()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// JSON sidecar written next to every `.xeb` file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingManifest {
    pub model_id: String,
    pub language: Language,
    pub layer: u32,
    pub pooling: Pooling,
    pub sentence_ids: Vec<String>,
    pub corpus_sha256: String,
}

pub fn manifest_path(path: &Path) -> PathBuf {
    path.with_extension("manifest.json")
}

/// SHA-256 over the newline-joined id list; used when no corpus hash is supplied.
pub fn ids_sha256<S: AsRef<str>>(ids: &[S]) -> String {
    let mut hasher = Sha256::new();
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            hasher.update(b"\n");
        }
        hasher.update(id.as_ref().as_bytes());
    }
    hex::encode(hasher.finalize())
}

pub fn encode_xeb(emb: &LayerEmbeddings) -> Vec<u8> {
    let mut buf = Vec::with_capacity(HEADER_LEN + emb.data.len() * 4);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(emb.rows as u64).to_le_bytes());
    buf.extend_from_slice(&(emb.dim as u64).to_le_bytes());
    buf.push(DTYPE_F32);
    for v in &emb.data {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf
}

/// Parse an XEB1 byte buffer into `(n, d, values)`.
pub fn decode_xeb(bytes: &[u8]) -> Result<(usize, usize, Vec<f32>)> {
    if bytes.len() < 4 {
        return Err(Error::TruncatedHeader {
            found: bytes.len(),
            needed: HEADER_LEN,
        });
    }
    if &bytes[..4] != MAGIC {
        let mut found = [0u8; 4];
        found.copy_from_slice(&bytes[..4]);
        return Err(Error::BadMagic { found });
    }
    if bytes.len() < HEADER_LEN {
        return Err(Error::TruncatedHeader {
            found: bytes.len(),
            needed: HEADER_LEN,
        });
    }
    let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
    let u64_at = |o: usize| u64::from_le_bytes(bytes[o..o + 8].try_into().unwrap());
    let version = u32_at(4);
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            expected: FORMAT_VERSION,
            found: version,
        });
    }
    let n = u64_at(8);
    let d = u64_at(16);
    let dtype = bytes[24];
    if dtype != DTYPE_F32 {
        return Err(Error::UnsupportedDtype(dtype));
    }
    let expected = n
        .checked_mul(d)
        .and_then(|e| e.checked_mul(4))
        .ok_or_else(|| Error::DimensionMismatch(format!("header n={n}, d={d} overflows")))?;
    let found = (bytes.len() - HEADER_LEN) as u64;
    if found < expected {
        return Err(Error::TruncatedPayload { expected, found });
    }
    if found > expected {
        return Err(Error::SizeMismatch { expected, found });
    }
    let values = bytes[HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok((n as usize, d as usize, values))
}

pub fn write_embeddings(emb: &LayerEmbeddings, path: &Path) -> Result<()> {
    write_embeddings_with_hash(emb, path, &ids_sha256(&emb.sentence_ids))
}

/// Write the `.xeb` payload and its sidecar, recording `corpus_sha256`.
pub fn write_embeddings_with_hash(
    emb: &LayerEmbeddings,
    path: &Path,
    corpus_sha256: &str,
) -> Result<()> {
    let manifest = EmbeddingManifest {
        model_id: emb.model_id.clone(),
        language: emb.language,
        layer: emb.layer,
        pooling: emb.pooling,
        sentence_ids: emb.sentence_ids.clone(),
        corpus_sha256: corpus_sha256.to_string(),
    };
    fs::write(path, encode_xeb(emb)).map_err(|e| Error::io(path, e))?;
    let mpath = manifest_path(path);
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| Error::parse(&mpath, e))?;
    fs::write(&mpath, json).map_err(|e| Error::io(&mpath, e))
}

pub fn read_manifest(path: &Path) -> Result<EmbeddingManifest> {
    let mpath = manifest_path(path);
    let text = fs::read(&mpath).map_err(|e| Error::io(&mpath, e))?;
    serde_json::from_slice(&text).map_err(|e| Error::parse(&mpath, e))
}

pub fn read_embeddings(path: &Path) -> Result<LayerEmbeddings> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let (n, d, data) = decode_xeb(&bytes)?;
    let manifest = read_manifest(path)?;
    if manifest.sentence_ids.len() != n {
        return Err(Error::ManifestMismatch(format!(
            "manifest lists {} ids, header says n={n}",
            manifest.sentence_ids.len()
        )));
    }
    LayerEmbeddings::new(
        manifest.model_id,
        manifest.language,
        manifest.layer,
        manifest.pooling,
        d,
        data,
        manifest.sentence_ids,
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Triple {
    pub en: String,
    pub hi: String,
    pub cm: String,
}

impl Triple {
    pub fn id(&self, lang: Language) -> &str {
        match lang {
            Language::En => &self.en,
            Language::Hi => &self.hi,
            Language::Cm => &self.cm,
        }
    }
}

/// One row of the triple manifest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleRow {
    pub id_en: String,
    pub id_hi: String,
    pub id_cm: String,
    pub len_en: u32,
    pub len_hi: u32,
    pub len_cm: u32,
}

#[derive(Deserialize)]
struct RawTripleRow {
    id_en: Option<String>,
    id_hi: Option<String>,
    id_cm: Option<String>,
    len_en: Option<i64>,
    len_hi: Option<i64>,
    len_cm: Option<i64>,
}

/// Sentence ids aligned across EN/HI/CM plus per-language token lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleIndex {
    triples: Vec<Triple>,
    lengths: [HashMap<String, u32>; 3],
    ordinals: [HashMap<String, usize>; 3],
}

impl TripleIndex {
    pub fn new(triples: Vec<Triple>, lengths: [HashMap<String, u32>; 3]) -> Result<Self> {
        if triples.is_empty() {
            return Err(Error::EmptyInput("triple index"));
        }
        let mut ordinals: [HashMap<String, usize>; 3] = Default::default();
        for (i, t) in triples.iter().enumerate() {
            for lang in Language::ALL {
                let id = t.id(lang);
                if ordinals[lang.slot()].insert(id.to_string(), i).is_some() {
                    return Err(Error::DuplicateId(id.to_string()));
                }
                match lengths[lang.slot()].get(id) {
                    None => {
                        return Err(Error::InvalidLength {
                            id: id.to_string(),
                            length: 0,
                        })
                    }
                    Some(0) => {
                        return Err(Error::InvalidLength {
                            id: id.to_string(),
                            length: 0,
                        })
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(Self {
            triples,
            lengths,
            ordinals,
        })
    }

    pub fn from_rows(rows: &[TripleRow]) -> Result<Self> {
        let mut lengths: [HashMap<String, u32>; 3] = Default::default();
        let mut triples = Vec::with_capacity(rows.len());
        for r in rows {
            for (lang, id, len) in [
                (Language::En, &r.id_en, r.len_en),
                (Language::Hi, &r.id_hi, r.len_hi),
                (Language::Cm, &r.id_cm, r.len_cm),
            ] {
                if len < 1 {
                    return Err(Error::InvalidLength {
                        id: id.clone(),
                        length: i64::from(len),
                    });
                }
                if lengths[lang.slot()].insert(id.clone(), len).is_some() {
                    return Err(Error::DuplicateId(id.clone()));
                }
            }
            triples.push(Triple {
                en: r.id_en.clone(),
                hi: r.id_hi.clone(),
                cm: r.id_cm.clone(),
            });
        }
        Self::new(triples, lengths)
    }

    pub fn rows(&self) -> Vec<TripleRow> {
        self.triples
            .iter()
            .map(|t| TripleRow {
                id_en: t.en.clone(),
                id_hi: t.hi.clone(),
                id_cm: t.cm.clone(),
                len_en: self.lengths[0][&t.en],
                len_hi: self.lengths[1][&t.hi],
                len_cm: self.lengths[2][&t.cm],
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn id(&self, ordinal: usize, lang: Language) -> &str {
        self.triples[ordinal].id(lang)
    }

    /// Ids of one language in triple order.
    pub fn ids(&self, lang: Language) -> impl Iterator<Item = &str> + '_ {
        self.triples.iter().map(move |t| t.id(lang))
    }

    pub fn ordinal_of(&self, lang: Language, id: &str) -> Option<usize> {
        self.ordinals[lang.slot()].get(id).copied()
    }

    pub fn token_length(&self, lang: Language, id: &str) -> Option<u32> {
        self.lengths[lang.slot()].get(id).copied()
    }

    /// Token lengths of one language in triple order.
    pub fn lengths(&self, lang: Language) -> Vec<u32> {
        self.ids(lang).map(|id| self.lengths[lang.slot()][id]).collect()
    }
}

pub fn load_triple_index(path: &Path) -> Result<TripleIndex> {
    let text = fs::read(path).map_err(|e| Error::io(path, e))?;
    let raw: Vec<RawTripleRow> = serde_json::from_slice(&text).map_err(|e| Error::parse(path, e))?;
    let rows = raw
        .into_iter()
        .map(|r| {
            let id_en = r.id_en.ok_or(Error::MissingColumn("id_en"))?;
            let id_hi = r.id_hi.ok_or(Error::MissingColumn("id_hi"))?;
            let id_cm = r.id_cm.ok_or(Error::MissingColumn("id_cm"))?;
            let len = |v: Option<i64>, col: &'static str, id: &str| -> Result<u32> {
                let v = v.ok_or(Error::MissingColumn(col))?;
                u32::try_from(v)
                    .ok()
                    .filter(|&l| l >= 1)
                    .ok_or_else(|| Error::InvalidLength {
                        id: id.to_string(),
                        length: v,
                    })
            };
            Ok(TripleRow {
                len_en: len(r.len_en, "len_en", &id_en)?,
                len_hi: len(r.len_hi, "len_hi", &id_hi)?,
                len_cm: len(r.len_cm, "len_cm", &id_cm)?,
                id_en,
                id_hi,
                id_cm,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    TripleIndex::from_rows(&rows)
}

pub fn write_triple_index(index: &TripleIndex, path: &Path) -> Result<()> {
    let json = serde_json::to_vec_pretty(&index.rows()).map_err(|e| Error::parse(path, e))?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerKind {
    #[default]
    Percentile,
    SimWeighted,
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "percentile" => Ok(SamplerKind::Percentile),
            "sim_weighted" | "simweighted" => Ok(SamplerKind::SimWeighted),
            other => Err(Error::InvalidConfig(format!("unknown sampler {other:?}"))),
        }
    }
}

/// Parameters of one retrieval run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RetrievalConfig {
    pub num_negatives: usize,
    /// Half-width of the length-percentile window, in percentile points.
    pub percentile_window: f64,
    pub sampler: SamplerKind,
    pub seed: u64,
    /// Layer whose vectors drive similarity-weighted sampling; `None` = last.
    pub similarity_layer: Option<u32>,
}

impl Default for RetrievalConfig {
    fn default() -> Self {
        Self {
            num_negatives: 10,
            percentile_window: 5.0,
            sampler: SamplerKind::Percentile,
            seed: 0,
            similarity_layer: None,
        }
    }
}

impl RetrievalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_negatives < 1 {
            return Err(Error::InvalidConfig("num_negatives must be >= 1".into()));
        }
        if !(self.percentile_window > 0.0 && self.percentile_window <= 100.0) {
            return Err(Error::InvalidConfig(format!(
                "percentile_window must lie in (0, 100], got {}",
                self.percentile_window
            )));
        }
        Ok(())
    }
}

/// Which layers an analysis should touch.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LayerSelection {
    #[default]
    All,
    List(Vec<u32>),
}

impl LayerSelection {
    pub fn contains(&self, layer: u32) -> bool {
        match self {
            LayerSelection::All => true,
            LayerSelection::List(v) => v.contains(&layer),
        }
    }
}

impl FromStr for LayerSelection {
    type Err = Error;

    /// Accepts `all`, a single layer, a comma list and `a-b` ranges.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("all") {
            return Ok(LayerSelection::All);
        }
        let bad = || Error::InvalidConfig(format!("bad layer selection {s:?}"));
        let mut layers = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if let Some((a, b)) = part.split_once('-') {
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let b: u32 = b.trim().parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                layers.extend(a..=b);
            } else {
                layers.push(part.parse().map_err(|_| bad())?);
            }
        }
        layers.sort_unstable();
        layers.dedup();
        Ok(LayerSelection::List(layers))
    }
}

/// Directory of `.xeb` files indexed by the (language, layer, pooling) in
/// their sidecars.
#[derive(Debug, Clone, Default)]
pub struct EmbeddingStore {
    files: BTreeMap<(Language, Pooling, u32), PathBuf>,
    model_ids: HashSet<String>,
}

impl EmbeddingStore {
    pub fn scan(dir: &Path) -> Result<Self> {
        let mut store = Self::default();
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut paths: Vec<PathBuf> = entries
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "xeb"))
            .collect();
        paths.sort();
        for path in paths {
            let m = read_manifest(&path)?;
            let key = (m.language, m.pooling, m.layer);
            if let Some(prev) = store.files.insert(key, path.clone()) {
                return Err(Error::ManifestMismatch(format!(
                    "{} and {} both hold {} layer {} {}",
                    prev.display(),
                    path.display(),
                    m.language,
                    m.layer,
                    m.pooling
                )));
            }
            store.model_ids.insert(m.model_id);
        }
        Ok(store)
    }

    pub fn model_ids(&self) -> impl Iterator<Item = &str> {
        self.model_ids.iter().map(String::as_str)
    }

    /// Layers present for a language and pooling, ascending.
    pub fn layers(&self, lang: Language, pooling: Pooling) -> Vec<u32> {
        self.files
            .keys()
            .filter(|(l, p, _)| *l == lang && *p == pooling)
            .map(|&(_, _, layer)| layer)
            .collect()
    }

    pub fn load(&self, lang: Language, pooling: Pooling, layer: u32) -> Result<LayerEmbeddings> {
        let path = self.files.get(&(lang, pooling, layer)).ok_or_else(|| {
            Error::LayerMismatch(format!("no {lang} {pooling} embeddings for layer {layer}"))
        })?;
        read_embeddings(path)
    }

    /// Load the selected layers of one language, ascending by layer.
    pub fn load_layers(
        &self,
        lang: Language,
        pooling: Pooling,
        selection: &LayerSelection,
    ) -> Result<Vec<LayerEmbeddings>> {
        let available = self.layers(lang, pooling);
        let wanted: Vec<u32> = match selection {
            LayerSelection::All => available.clone(),
            LayerSelection::List(v) => v.clone(),
        };
        if wanted.is_empty() {
            return Err(Error::LayerMismatch(format!("no {lang} {pooling} layers available")));
        }
        wanted.into_iter().map(|l| self.load(lang, pooling, l)).collect()
    }
}

/// Canonical file name used by fixture writers: `cm_layer03_cls.xeb`.
pub fn canonical_file_name(lang: Language, layer: u32, pooling: Pooling) -> String {
    format!("{lang}_layer{layer:02}_{pooling}.xeb")
}

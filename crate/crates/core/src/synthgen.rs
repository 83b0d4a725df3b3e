//! Synthetic trilingual embeddings with planted code-mixing structure.
//!
//! EN and HI vectors are i.i.d. standard normal. On aligned layers the CM
//! vector is `w_en·en + w_hi·hi + σ·ε`; on other layers it is an independent
//! standard normal draw. Every row of every layer has its own random stream,
//! so a corpus of size `n` is a prefix of any larger corpus with the same seed.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedio::{
    canonical_file_name, ids_sha256, write_embeddings_with_hash, write_triple_index, Language,
    LayerEmbeddings, LayerSelection, Pooling, Triple, TripleIndex,
};
use crate::error::{Error, Result};
use crate::rng::{stream, TAG_SYNTH};

pub const SYNTH_MODEL_ID: &str = "synthetic-planted";

/// Integer token-length law for each triple's base length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LengthDistribution {
    Constant { value: u32 },
    Uniform { min: u32, max: u32 },
    /// Mixture of two uniform ranges; `p_short` is the weight of the first.
    Bimodal { short: (u32, u32), long: (u32, u32), p_short: f64 },
}

impl Default for LengthDistribution {
    fn default() -> Self {
        LengthDistribution::Uniform { min: 5, max: 40 }
    }
}

impl LengthDistribution {
    fn validate(&self) -> Result<()> {
        let range_ok = |lo: u32, hi: u32| lo >= 1 && lo <= hi;
        let ok = match *self {
            LengthDistribution::Constant { value } => value >= 1,
            LengthDistribution::Uniform { min, max } => range_ok(min, max),
            LengthDistribution::Bimodal { short, long, p_short } => {
                range_ok(short.0, short.1) && range_ok(long.0, long.1) && (0.0..=1.0).contains(&p_short)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad length distribution {self:?}")))
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match *self {
            LengthDistribution::Constant { value } => value,
            LengthDistribution::Uniform { min, max } => rng.random_range(min..=max),
            LengthDistribution::Bimodal { short, long, p_short } => {
                let (lo, hi) = if rng.random_bool(p_short) { short } else { long };
                rng.random_range(lo..=hi)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantedModel {
    pub n: usize,
    pub d: usize,
    pub w_en: f64,
    pub w_hi: f64,
    pub sigma: f64,
    /// Layers `0..num_layers` are generated.
    pub num_layers: u32,
    pub aligned_layers: LayerSelection,
    pub lengths: LengthDistribution,
    /// Per-language lengths are the base length plus a uniform offset in
    /// `[-length_jitter, length_jitter]`, floored at 1.
    pub length_jitter: u32,
    pub pooling: Pooling,
}

impl Default for PlantedModel {
    fn default() -> Self {
        Self {
            n: 1000,
            d: 64,
            w_en: 0.9,
            w_hi: 0.1,
            sigma: 0.1,
            num_layers: 1,
            aligned_layers: LayerSelection::All,
            lengths: LengthDistribution::default(),
            length_jitter: 2,
            pooling: Pooling::Cls,
        }
    }
}

impl PlantedModel {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.d == 0 || self.num_layers == 0 {
            return Err(Error::InvalidConfig("n, d and num_layers must be >= 1".into()));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("sigma must be >= 0, got {}", self.sigma)));
        }
        if !(self.w_en.is_finite() && self.w_hi.is_finite()) {
            return Err(Error::InvalidConfig("mixing weights must be finite".into()));
        }
        self.lengths.validate()
    }

    pub fn is_aligned(&self, layer: u32) -> bool {
        self.aligned_layers.contains(layer)
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub en: Vec<LayerEmbeddings>,
    pub hi: Vec<LayerEmbeddings>,
    pub cm: Vec<LayerEmbeddings>,
    pub index: TripleIndex,
}

impl SyntheticCorpus {
    pub fn layers(&self, lang: Language) -> &[LayerEmbeddings] {
        match lang {
            Language::En => &self.en,
            Language::Hi => &self.hi,
            Language::Cm => &self.cm,
        }
    }

    /// Write every layer under its canonical name plus `triples.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let hash = corpus_hash(&self.index);
        for lang in Language::ALL {
            for emb in self.layers(lang) {
                let path = dir.join(canonical_file_name(lang, emb.layer, emb.pooling));
                write_embeddings_with_hash(emb, &path, &hash)?;
            }
        }
        write_triple_index(&self.index, &dir.join("triples.json"))
    }
}

fn corpus_hash(index: &TripleIndex) -> String {
    let all: Vec<&str> = Language::ALL.iter().flat_map(|&l| index.ids(l)).collect();
    ids_sha256(&all)
}

pub fn synthetic_id(lang: Language, i: usize) -> String {
    format!("{lang}-{i:06}")
}

/// Triple index with ids `en-000000`, ... and lengths drawn from `lengths`.
pub fn synthetic_index(
    n: usize,
    lengths: &LengthDistribution,
    length_jitter: u32,
    seed: u64,
) -> Result<TripleIndex> {
    if n == 0 {
        return Err(Error::EmptyInput("synthetic corpus"));
    }
    lengths.validate()?;
    let mut triples = Vec::with_capacity(n);
    let mut maps: [HashMap<String, u32>; 3] = Default::default();
    for i in 0..n {
        let mut rng = stream(&[TAG_SYNTH, seed, u64::MAX, i as u64]);
        let base = lengths.sample(&mut rng) as i64;
        let j = i64::from(length_jitter);
        let ids = Language::ALL.map(|l| synthetic_id(l, i));
        for (k, id) in ids.iter().enumerate() {
            let len = (base + rng.random_range(-j..=j)).max(1) as u32;
            maps[k].insert(id.clone(), len);
        }
        let [en, hi, cm] = ids;
        triples.push(Triple { en, hi, cm });
    }
    TripleIndex::new(triples, maps)
}

fn gaussian_row(d: usize, words: &[u64]) -> Vec<f64> {
    let mut rng = stream(words);
    (0..d).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn generate(model: &PlantedModel, seed: u64) -> Result<SyntheticCorpus> {
    model.validate()?;
    let index = synthetic_index(model.n, &model.lengths, model.length_jitter, seed)?;
    let (n, d) = (model.n, model.d);
    let per_layer: Vec<[LayerEmbeddings; 3]> = (0..model.num_layers)
        .into_par_iter()
        .map(|layer| {
            let l = u64::from(layer);
            let mut blocks = [Vec::with_capacity(n * d), Vec::with_capacity(n * d), Vec::with_capacity(n * d)];
            for i in 0..n {
                let key = |lang: Language| [TAG_SYNTH, seed, l, lang.code(), i as u64];
                let en = gaussian_row(d, &key(Language::En));
                let hi = gaussian_row(d, &key(Language::Hi));
                let cm_draw = gaussian_row(d, &key(Language::Cm));
                let cm: Vec<f64> = if model.is_aligned(layer) {
                    (0..d)
                        .map(|t| model.w_en * en[t] + model.w_hi * hi[t] + model.sigma * cm_draw[t])
                        .collect()
                } else {
                    cm_draw
                };
                for (block, row) in blocks.iter_mut().zip([en, hi, cm]) {
                    block.extend(row.into_iter().map(|v| v as f32));
                }
            }
            let mut out = Vec::with_capacity(3);
            for (lang, data) in Language::ALL.into_iter().zip(blocks) {
                let ids = index.ids(lang).map(str::to_string).collect();
                out.push(LayerEmbeddings::new(SYNTH_MODEL_ID, lang, layer, model.pooling, d, data, ids)?);
            }
            let [a, b, c]: [LayerEmbeddings; 3] = out.try_into().expect("three languages");
            Ok([a, b, c])
        })
        .collect::<Result<_>>()?;
    let (mut en, mut hi, mut cm) = (Vec::new(), Vec::new(), Vec::new());
    for [a, b, c] in per_layer {
        en.push(a);
        hi.push(b);
        cm.push(c);
    }
    Ok(SyntheticCorpus { en, hi, cm, index })
}

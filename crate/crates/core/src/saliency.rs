//! Rank-inverse token saliency and its language-wise aggregation.
//!
//! Within a sentence, tokens are ranked by descending |attribution| (earlier
//! position wins ties) and scored `1 / rank`. Tokens tagged `OTHER` (special
//! tokens, punctuation) are dropped before ranking. The language score is the
//! mean RI over every EN (or HI) token in the corpus.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::embedio::Language;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenTag {
    #[serde(rename = "EN")]
    En,
    #[serde(rename = "HI")]
    Hi,
    #[serde(rename = "OTHER")]
    Other,
}

impl TokenTag {
    fn language(self) -> Option<Language> {
        match self {
            TokenTag::En => Some(Language::En),
            TokenTag::Hi => Some(Language::Hi),
            TokenTag::Other => None,
        }
    }
}

impl FromStr for TokenTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "EN" => Ok(TokenTag::En),
            "HI" => Ok(TokenTag::Hi),
            "OTHER" => Ok(TokenTag::Other),
            other => Err(Error::InvalidConfig(format!("unknown token tag {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionRecord {
    pub sentence_id: String,
    pub tokens: Vec<String>,
    pub scores: Vec<f64>,
    pub tags: Vec<TokenTag>,
}

impl AttributionRecord {
    pub fn new(
        sentence_id: impl Into<String>,
        tokens: Vec<String>,
        scores: Vec<f64>,
        tags: Vec<TokenTag>,
    ) -> Result<Self> {
        let sentence_id = sentence_id.into();
        if tokens.len() != scores.len() || tokens.len() != tags.len() {
            return Err(Error::DimensionMismatch(format!(
                "record {sentence_id:?}: {} tokens, {} scores, {} tags",
                tokens.len(),
                scores.len(),
                tags.len()
            )));
        }
        if let Some(col) = scores.iter().position(|s| !s.is_finite()) {
            return Err(Error::NonFinite { row: 0, col });
        }
        Ok(Self {
            sentence_id,
            tokens,
            scores,
            tags,
        })
    }

    /// RI for each token (None for `OTHER` tokens).
    pub fn rank_inverse(&self) -> Vec<Option<f64>> {
        let kept: Vec<usize> = (0..self.tags.len())
            .filter(|&i| self.tags[i] != TokenTag::Other)
            .collect();
        let mut out = vec![None; self.tags.len()];
        if kept.is_empty() {
            return out;
        }
        let scores: Vec<f64> = kept.iter().map(|&i| self.scores[i]).collect();
        let ri = rank_inverse(&scores).expect("non-empty");
        for (&i, r) in kept.iter().zip(ri) {
            out[i] = Some(r);
        }
        out
    }
}

pub fn rank_inverse(scores: &[f64]) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("attribution scores"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // stable sort keeps earlier positions first among equal magnitudes
    order.sort_by(|&a, &b| scores[b].abs().total_cmp(&scores[a].abs()));
    let mut ri = vec![0.0; scores.len()];
    for (rank0, &i) in order.iter().enumerate() {
        ri[i] = 1.0 / (rank0 + 1) as f64;
    }
    Ok(ri)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SaliencySummary {
    /// Mean RI per language; a language with no tokens is absent.
    pub means: BTreeMap<Language, f64>,
    pub token_counts: BTreeMap<Language, usize>,
    pub sentences: usize,
    pub warnings: Vec<String>,
}

pub fn language_saliency(records: &[AttributionRecord]) -> SaliencySummary {
    let mut sums: BTreeMap<Language, f64> = BTreeMap::new();
    let mut counts: BTreeMap<Language, usize> = BTreeMap::new();
    for rec in records {
        for (tag, ri) in rec.tags.iter().zip(rec.rank_inverse()) {
            if let (Some(lang), Some(ri)) = (tag.language(), ri) {
                *sums.entry(lang).or_default() += ri;
                *counts.entry(lang).or_default() += 1;
            }
        }
    }
    let mut warnings = Vec::new();
    for lang in [Language::En, Language::Hi] {
        if !counts.contains_key(&lang) {
            warnings.push(format!("no {} tokens; omitted from saliency means", lang.as_str().to_uppercase()));
        }
    }
    let means = sums
        .iter()
        .map(|(&lang, &s)| (lang, s / counts[&lang] as f64))
        .collect();
    SaliencySummary {
        means,
        token_counts: counts,
        sentences: records.len(),
        warnings,
    }
}

/// Tokens, scores and tags of one sentence, in file order.
type TokenColumns = (Vec<String>, Vec<f64>, Vec<TokenTag>);

/// Parse tab-separated `sentence_id, token, score, tag` rows, grouping tokens
/// by sentence in order of first appearance. A leading `sentence_id` header
/// row is skipped.
pub fn read_attributions(path: &Path) -> Result<Vec<AttributionRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .quoting(false)
        .comment(None)
        .from_path(path)
        .map_err(|e| Error::parse(path, e))?;
    let mut order: Vec<String> = Vec::new();
    let mut groups: HashMap<String, TokenColumns> = HashMap::new();
    for (line, row) in reader.records().enumerate() {
        let row = row.map_err(|e| Error::parse(path, e))?;
        if row.len() != 4 {
            return Err(Error::parse(
                path,
                format!("line {}: expected 4 fields, found {}", line + 1, row.len()),
            ));
        }
        if line == 0 && &row[0] == "sentence_id" {
            continue;
        }
        let score: f64 = row[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, format!("line {}: bad score {:?}", line + 1, &row[2])))?;
        let tag: TokenTag = row[3].parse()?;
        let entry = groups.entry(row[0].to_string()).or_insert_with(|| {
            order.push(row[0].to_string());
            Default::default()
        });
        entry.0.push(row[1].to_string());
        entry.1.push(score);
        entry.2.push(tag);
    }
    order
        .into_iter()
        .map(|id| {
            let (tokens, scores, tags) = groups.remove(&id).unwrap();
            AttributionRecord::new(id, tokens, scores, tags)
        })
        .collect()
}

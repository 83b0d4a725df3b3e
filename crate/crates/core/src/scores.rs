//! CLAS and Consistency composite scores.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Six directional accuracies in percent, ordered
/// `(en→cm, cm→en, en→hi, hi→en, hi→cm, cm→hi)`: three pairs, forward then
/// backward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 6]", into = "[f64; 6]")]
pub struct PairAccuracies([f64; 6]);

impl PairAccuracies {
    pub fn new(values: [f64; 6]) -> Result<Self> {
        for (i, &v) in values.iter().enumerate() {
            if !(0.0..=100.0).contains(&v) {
                return Err(Error::OutOfRange(format!(
                    "accuracy #{i} = {v} is outside [0, 100]"
                )));
            }
        }
        Ok(Self(values))
    }

    pub fn from_slice(values: &[f64]) -> Result<Self> {
        let arr: [f64; 6] = values.try_into().map_err(|_| {
            Error::InvalidConfig(format!("expected 6 accuracies, found {}", values.len()))
        })?;
        Self::new(arr)
    }

    pub fn values(&self) -> [f64; 6] {
        self.0
    }

    /// `(forward, backward)` for each of the three pairs.
    pub fn pairs(&self) -> [(f64, f64); 3] {
        let a = self.0;
        [(a[0], a[1]), (a[2], a[3]), (a[4], a[5])]
    }
}

impl TryFrom<[f64; 6]> for PairAccuracies {
    type Error = Error;
    fn try_from(v: [f64; 6]) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PairAccuracies> for [f64; 6] {
    fn from(p: PairAccuracies) -> Self {
        p.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StdDivisor {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n - 1`.
    Sample,
}

impl StdDivisor {
    pub fn std(self, xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let ss: f64 = xs.iter().map(|x| (x - mean).powi(2)).sum();
        let denom = match self {
            StdDivisor::Population => n,
            StdDivisor::Sample => n - 1.0,
        };
        (ss / denom).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClasBreakdown {
    pub mean_acc: f64,
    pub dir_bias: f64,
    pub setup_std: f64,
    pub clas: f64,
}

pub fn clas(acc: &PairAccuracies) -> ClasBreakdown {
    clas_with(acc, StdDivisor::Population)
}

pub fn clas_with(acc: &PairAccuracies, divisor: StdDivisor) -> ClasBreakdown {
    let pairs = acc.pairs();
    let mean_acc = acc.0.iter().sum::<f64>() / 6.0;
    let dir_bias = pairs.iter().map(|(f, b)| (f - b).abs()).sum::<f64>() / 3.0;
    let pair_means = pairs.map(|(f, b)| (f + b) / 2.0);
    let setup_std = divisor.std(&pair_means);
    ClasBreakdown {
        mean_acc,
        dir_bias,
        setup_std,
        clas: mean_acc - dir_bias - setup_std,
    }
}

/// Mean minus sample standard deviation of three macro-F1 scores.
pub fn consistency(s1: f64, s2: f64, s3: f64) -> Result<f64> {
    consistency_with([s1, s2, s3], StdDivisor::Sample)
}

pub fn consistency_with(scores: [f64; 3], divisor: StdDivisor) -> Result<f64> {
    for (i, &s) in scores.iter().enumerate() {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfRange(format!(
                "score #{i} = {s} is outside [0, 1]"
            )));
        }
    }
    let mean = scores.iter().sum::<f64>() / 3.0;
    Ok(mean - divisor.std(&scores))
}

//! Nearest-community rule: the class whose labeled training users are, on
//! average, most similar to the query vector.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use super::prediction::{Prediction, PredictionSource};
use crate::data::{Stance, TweetDataset};
use crate::error::{Error, Result};
use crate::math;
use crate::relemb::RelationalEmbedding;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Similarity {
    #[default]
    Cosine,
    NegativeEuclidean,
}

impl Similarity {
    pub fn eval(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Similarity::Cosine => math::cosine(a, b),
            Similarity::NegativeEuclidean => -libm::sqrt(math::sq_dist(a, b)),
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Similarity::Cosine => "cosine",
            Similarity::NegativeEuclidean => "negative-euclidean",
        })
    }
}

impl FromStr for Similarity {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "cosine" => Ok(Similarity::Cosine),
            "negative-euclidean" => Ok(Similarity::NegativeEuclidean),
            _ => Err(()),
        }
    }
}

/// Per-class banks of author vectors, one entry per labeled training tweet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistanceModel {
    pub version: u32,
    pub similarity: Similarity,
    pub dim: usize,
    banks: [Vec<Vec<f64>>; 3],
}

impl ClassDistanceModel {
    /// Projects every TRAIN tweet with a known author onto its author's
    /// vector. Unknown authors (and all-zero rows) are skipped.
    pub fn fit(train: &TweetDataset, emb: &RelationalEmbedding, similarity: Similarity) -> Result<Self> {
        let mut banks: [Vec<Vec<f64>>; 3] = Default::default();
        for t in train.train() {
            if let Some(row) = emb.row(&t.author) {
                if row.iter().any(|&v| v != 0.0) {
                    banks[t.stance.index()].push(row.to_vec());
                }
            }
        }
        Self::from_banks(banks, emb.dim(), similarity)
    }

    pub fn from_banks(banks: [Vec<Vec<f64>>; 3], dim: usize, similarity: Similarity) -> Result<Self> {
        if banks.iter().all(Vec::is_empty) {
            return Err(Error::EmptyBanks);
        }
        for v in banks.iter().flatten() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            if v.iter().all(|&x| x == 0.0) {
                return Err(Error::ZeroQuery);
            }
        }
        Ok(Self {
            version: crate::MODEL_FORMAT_VERSION,
            similarity,
            dim,
            banks,
        })
    }

    pub fn bank(&self, class: Stance) -> &[Vec<f64>] {
        &self.banks[class.index()]
    }

    pub fn bank_sizes(&self) -> [usize; 3] {
        [self.banks[0].len(), self.banks[1].len(), self.banks[2].len()]
    }

    /// Mean similarity to each non-empty bank; argmax with the fixed tie order.
    pub fn predict(&self, query: &[f64]) -> Result<Prediction> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: query.len(),
            });
        }
        if query.iter().all(|&x| x == 0.0) {
            return Err(Error::ZeroQuery);
        }
        let mut scores = [None; 3];
        for (c, bank) in self.banks.iter().enumerate() {
            if bank.is_empty() {
                continue;
            }
            let total: f64 = bank.iter().map(|u| self.similarity.eval(query, u)).sum();
            scores[c] = Some(total / bank.len() as f64);
        }
        Ok(Prediction::from_scores(scores, PredictionSource::Relational).expect("a bank is non-empty"))
    }
}

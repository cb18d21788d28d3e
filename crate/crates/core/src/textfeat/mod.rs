//! Textual features for tweets.

mod avgvec;
mod tfidf;
mod tokenize;

pub use avgvec::avg_word_vectors;
pub use tfidf::TfIdfModel;
pub use tokenize::{tokenize, URL_TOKEN};

use alloc::vec::Vec;

use crate::data::WordVectorTable;
use crate::features::FeatureVector;

/// A fitted text-to-vector map.
#[derive(Debug, Clone)]
pub enum Featurizer<'a> {
    TfIdf(TfIdfModel),
    AvgVec(&'a WordVectorTable),
}

impl Featurizer<'_> {
    pub fn dim(&self) -> usize {
        match self {
            Featurizer::TfIdf(m) => m.dim(),
            Featurizer::AvgVec(t) => t.dim(),
        }
    }

    pub fn featurize(&self, text: &str) -> FeatureVector {
        let tokens = tokenize(text);
        match self {
            Featurizer::TfIdf(m) => FeatureVector::Sparse(m.transform(&tokens)),
            Featurizer::AvgVec(t) => FeatureVector::Dense(avg_word_vectors(&tokens, t).0),
        }
    }

    pub fn featurize_all<'t, I: IntoIterator<Item = &'t str>>(&self, texts: I) -> Vec<FeatureVector> {
        texts.into_iter().map(|t| self.featurize(t)).collect()
    }
}

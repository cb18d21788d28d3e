use alloc::vec::Vec;

use super::cdist::ClassDistanceModel;
use super::prediction::{Prediction, PredictionSource};
use super::svm::{SvmModel, SvmParams};
use crate::data::{LabeledTweet, TweetDataset};
use crate::error::Result;
use crate::relemb::RelationalEmbedding;
use crate::textfeat::Featurizer;

/// Anything that labels a tweet from its text alone.
pub trait TextClassifier {
    fn predict_text(&self, text: &str) -> Result<Prediction>;
}

/// A featurizer followed by an SVM.
#[derive(Debug, Clone)]
pub struct TextSvm<'a> {
    pub featurizer: Featurizer<'a>,
    pub svm: SvmModel,
}

impl<'a> TextSvm<'a> {
    /// Fits the SVM on the TRAIN split of `data`.
    pub fn fit(data: &TweetDataset, featurizer: Featurizer<'a>, params: SvmParams) -> Result<Self> {
        data.require_train()?;
        let (x, y): (Vec<_>, Vec<_>) = data
            .train()
            .map(|t| (featurizer.featurize(&t.text), t.stance))
            .unzip();
        let svm = SvmModel::fit(&x, &y, params)?;
        Ok(Self { featurizer, svm })
    }
}

impl TextClassifier for TextSvm<'_> {
    fn predict_text(&self, text: &str) -> Result<Prediction> {
        self.svm
            .predict_as(&self.featurizer.featurize(text), PredictionSource::Textual)
    }
}

/// Relational rule for authors with interactions, the textual model for
/// everyone else. Zero vectors never reach the relational side.
pub fn backoff_predict(
    rel: &ClassDistanceModel,
    txt: &dyn TextClassifier,
    tweet: &LabeledTweet,
    emb: &RelationalEmbedding,
) -> Result<Prediction> {
    match emb.row(&tweet.author) {
        Some(row) => rel.predict(row),
        None => {
            let mut p = txt.predict_text(&tweet.text)?;
            p.source = PredictionSource::TextualBackoff;
            Ok(p)
        }
    }
}

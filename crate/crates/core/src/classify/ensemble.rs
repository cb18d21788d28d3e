use alloc::vec::Vec;

use super::prediction::{Prediction, PredictionSource};
use super::svm::{SvmModel, SvmParams};
use crate::data::{LabeledTweet, TweetDataset};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, SparseVector};
use crate::relemb::RelationalEmbedding;
use crate::textfeat::Featurizer;

/// Appends the relational vector (or `dim` zeros when absent) to the
/// textual vector. Output dimension is always `text.dim() + dim`.
///
/// Sparse text stays sparse; the appended block is stored as explicit
/// entries, which is numerically identical to densifying.
pub fn concat_features(text: &FeatureVector, rel: Option<&[f64]>, dim: usize) -> Result<FeatureVector> {
    if !text.is_finite() {
        return Err(Error::NonFinite("text feature vector"));
    }
    if let Some(r) = rel {
        if r.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: r.len(),
            });
        }
    }
    let zeros;
    let rel = match rel {
        Some(r) => r,
        None => {
            zeros = alloc::vec![0.0; dim];
            &zeros
        }
    };
    Ok(match text {
        FeatureVector::Dense(t) => {
            let mut out = Vec::with_capacity(t.len() + dim);
            out.extend_from_slice(t);
            out.extend_from_slice(rel);
            FeatureVector::Dense(out)
        }
        FeatureVector::Sparse(s) => {
            let offset = s.dim();
            let entries = s
                .entries()
                .iter()
                .copied()
                .chain(rel.iter().enumerate().map(|(i, &v)| (offset + i, v)))
                .collect();
            FeatureVector::Sparse(SparseVector::from_entries(offset + dim, entries)?)
        }
    })
}

/// SVM over concatenated textual and relational features.
#[derive(Debug, Clone)]
pub struct EnsembleModel<'a> {
    pub featurizer: Featurizer<'a>,
    pub svm: SvmModel,
    pub rel_dim: usize,
}

impl<'a> EnsembleModel<'a> {
    fn features(featurizer: &Featurizer<'_>, tweet: &LabeledTweet, emb: &RelationalEmbedding) -> Result<FeatureVector> {
        concat_features(&featurizer.featurize(&tweet.text), emb.row(&tweet.author), emb.dim())
    }

    /// `featurizer` must already be fitted on TRAIN texts only.
    pub fn fit(
        data: &TweetDataset,
        featurizer: Featurizer<'a>,
        emb: &RelationalEmbedding,
        params: SvmParams,
    ) -> Result<Self> {
        data.require_train()?;
        let mut x = Vec::new();
        let mut y = Vec::new();
        for t in data.train() {
            x.push(Self::features(&featurizer, t, emb)?);
            y.push(t.stance);
        }
        let svm = SvmModel::fit(&x, &y, params)?;
        Ok(Self {
            featurizer,
            svm,
            rel_dim: emb.dim(),
        })
    }

    pub fn feature_dim(&self) -> usize {
        self.featurizer.dim() + self.rel_dim
    }

    pub fn predict(&self, tweet: &LabeledTweet, emb: &RelationalEmbedding) -> Result<Prediction> {
        let x = Self::features(&self.featurizer, tweet, emb)?;
        self.svm.predict_as(&x, PredictionSource::Ensemble)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn concat_examples() {
        let t = FeatureVector::Dense(vec![0.5, 0.5]);
        assert_eq!(
            concat_features(&t, Some(&[1.0, 2.0]), 2).unwrap(),
            FeatureVector::Dense(vec![0.5, 0.5, 1.0, 2.0])
        );
        assert_eq!(
            concat_features(&t, None, 2).unwrap(),
            FeatureVector::Dense(vec![0.5, 0.5, 0.0, 0.0])
        );
        assert!(concat_features(&t, Some(&[1.0]), 2).is_err());
    }

    #[test]
    fn sparse_concat_matches_dense_concat() {
        let s = SparseVector::from_entries(4, vec![(1, 0.6), (3, 0.8)]).unwrap();
        let sparse = concat_features(&FeatureVector::Sparse(s.clone()), Some(&[0.0, -1.5, 2.0]), 3).unwrap();
        let dense = concat_features(&FeatureVector::Dense(s.to_dense()), Some(&[0.0, -1.5, 2.0]), 3).unwrap();
        assert_eq!(sparse.dim(), 7);
        assert_eq!(sparse.to_dense(), dense.to_dense());
        let none = concat_features(&FeatureVector::Sparse(s), None, 3).unwrap();
        assert_eq!(none.dim(), 7);
    }
}

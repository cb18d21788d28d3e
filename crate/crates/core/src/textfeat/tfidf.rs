use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseVector;

/// Raw-count × smoothed-idf weighting with L2 normalization.
///
/// `idf(t) = ln((1 + N) / (1 + df(t))) + 1`. Column indices follow the
/// lexicographic order of the retained tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfIdfModel {
    pub version: u32,
    vocabulary: BTreeMap<String, usize>,
    idf: Vec<f64>,
    n_docs: usize,
    max_features: Option<usize>,
}

impl TfIdfModel {
    pub fn fit<S: AsRef<str>>(corpus: &[Vec<S>], max_features: Option<usize>) -> Result<Self> {
        if corpus.is_empty() {
            return Err(Error::EmptyInput("tf-idf corpus"));
        }
        if max_features == Some(0) {
            return Err(Error::InvalidConfig("max_features must be positive".into()));
        }
        // token -> (document frequency, corpus frequency)
        let mut stats: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
        for doc in corpus {
            let mut seen: BTreeMap<&str, ()> = BTreeMap::new();
            for tok in doc {
                let tok = tok.as_ref();
                let e = stats.entry(tok).or_default();
                e.1 += 1;
                if seen.insert(tok, ()).is_none() {
                    e.0 += 1;
                }
            }
        }
        let mut kept: Vec<&str> = stats.keys().copied().collect();
        if let Some(m) = max_features {
            if kept.len() > m {
                kept.sort_by(|a, b| stats[b].1.cmp(&stats[a].1).then_with(|| a.cmp(b)));
                kept.truncate(m);
                kept.sort_unstable();
            }
        }
        let n = corpus.len();
        let vocabulary = kept.iter().enumerate().map(|(i, t)| ((*t).into(), i)).collect();
        let idf = kept
            .iter()
            .map(|t| libm::log((1.0 + n as f64) / (1.0 + stats[t].0 as f64)) + 1.0)
            .collect();
        Ok(Self {
            version: crate::MODEL_FORMAT_VERSION,
            vocabulary,
            idf,
            n_docs: n,
            max_features,
        })
    }

    pub fn dim(&self) -> usize {
        self.idf.len()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn column(&self, token: &str) -> Option<usize> {
        self.vocabulary.get(token).copied()
    }

    pub fn idf(&self, token: &str) -> Option<f64> {
        self.column(token).map(|c| self.idf[c])
    }

    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.vocabulary.keys().map(String::as_str)
    }

    /// Out-of-vocabulary tokens are ignored; an all-OOV document maps to the
    /// zero vector.
    pub fn transform<S: AsRef<str>>(&self, tokens: &[S]) -> SparseVector {
        let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
        for t in tokens {
            if let Some(c) = self.column(t.as_ref()) {
                *counts.entry(c).or_default() += 1.0;
            }
        }
        let mut entries: Vec<(usize, f64)> =
            counts.into_iter().map(|(c, n)| (c, n * self.idf[c])).collect();
        let norm = libm::sqrt(entries.iter().map(|e| e.1 * e.1).sum());
        if norm > 0.0 {
            for e in &mut entries {
                e.1 /= norm;
            }
        }
        SparseVector::from_entries(self.dim(), entries).expect("columns are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn ab_ac() -> Vec<Vec<&'static str>> {
        vec![vec!["a", "b"], vec!["a", "c"]]
    }

    #[test]
    fn smoothed_idf_hand_values() {
        let m = TfIdfModel::fit(&ab_ac(), None).unwrap();
        assert_eq!(m.idf("a"), Some(1.0));
        assert!((m.idf("b").unwrap() - (libm::log(1.5) + 1.0)).abs() < 1e-15);
        assert!((m.idf("b").unwrap() - 1.4055).abs() < 1e-4);
        let min = ["a", "b", "c"].iter().map(|t| m.idf(t).unwrap()).fold(f64::MAX, f64::min);
        assert_eq!(min, m.idf("a").unwrap());
    }

    #[test]
    fn transform_hand_example() {
        let m = TfIdfModel::fit(&ab_ac(), None).unwrap();
        let v = m.transform(&["a", "b"]);
        assert_eq!(v.dim(), 3);
        assert!((v.get(0) - 0.5797).abs() < 1e-4);
        assert!((v.get(1) - 0.8148).abs() < 1e-4);
        assert_eq!(v.get(2), 0.0);
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn max_features_keeps_most_frequent() {
        let m = TfIdfModel::fit(&ab_ac(), Some(1)).unwrap();
        assert_eq!(m.vocabulary().collect::<Vec<_>>(), ["a"]);
        // b and c tie on frequency; lexicographic order keeps b
        let m2 = TfIdfModel::fit(&ab_ac(), Some(2)).unwrap();
        assert_eq!(m2.vocabulary().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn oov_and_errors() {
        let m = TfIdfModel::fit(&ab_ac(), None).unwrap();
        let before = m.clone();
        let z = m.transform(&["zzz", "yyy"]);
        assert!(z.is_zero());
        assert_eq!(z.dim(), 3);
        assert_eq!(m, before);
        let empty: Vec<Vec<&str>> = Vec::new();
        assert!(TfIdfModel::fit(&empty, None).is_err());
    }
}

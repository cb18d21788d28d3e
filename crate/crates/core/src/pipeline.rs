//! End-to-end systems: fit on TRAIN, predict and score TEST.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::classify::{
    backoff_predict, ClassDistanceModel, EnsembleModel, Prediction, PredictionSource, Similarity,
    SvmModel, SvmParams, TextClassifier, TextSvm,
};
use crate::data::{Stance, TweetDataset, WordVectorTable};
use crate::error::{Error, Result};
use crate::eval::{f1_favor_against, EvalReport};
use crate::features::FeatureVector;
use crate::relemb::RelationalEmbedding;
use crate::textfeat::{tokenize, Featurizer, TfIdfModel};

/// Text-only base systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TextSystem {
    /// TF-IDF bag of words.
    TfidfSvm,
    /// Averaged pre-trained word vectors.
    FtembSvm,
}

impl TextSystem {
    pub fn as_str(self) -> &'static str {
        match self {
            TextSystem::TfidfSvm => "tfidf-svm",
            TextSystem::FtembSvm => "ftemb-svm",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum System {
    RelembSvm,
    Text(TextSystem),
    Backoff(TextSystem),
    Ensemble(TextSystem),
}

impl System {
    pub fn needs_embedding(self) -> bool {
        !matches!(self, System::Text(_))
    }

    pub fn needs_word_vectors(self) -> bool {
        matches!(
            self,
            System::Text(TextSystem::FtembSvm)
                | System::Backoff(TextSystem::FtembSvm)
                | System::Ensemble(TextSystem::FtembSvm)
        )
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            System::RelembSvm => f.write_str("relemb-svm"),
            System::Text(t) => f.write_str(t.as_str()),
            System::Backoff(t) => write!(f, "backoff:{}", t.as_str()),
            System::Ensemble(t) => write!(f, "ensemble:{}", t.as_str()),
        }
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let text = |t: &str| match t {
            "tfidf-svm" => Ok(TextSystem::TfidfSvm),
            "ftemb-svm" => Ok(TextSystem::FtembSvm),
            _ => Err(Error::InvalidConfig(format!("unknown system `{s}`"))),
        };
        let s_lower = s.to_ascii_lowercase();
        match s_lower.split_once(':') {
            None if s_lower == "relemb-svm" => Ok(System::RelembSvm),
            None => text(&s_lower).map(System::Text),
            Some(("backoff", t)) => text(t).map(System::Backoff),
            Some(("ensemble", t)) => text(t).map(System::Ensemble),
            Some(_) => Err(Error::InvalidConfig(format!("unknown system `{s}`"))),
        }
    }
}

impl From<System> for String {
    fn from(s: System) -> String {
        format!("{s}")
    }
}

impl TryFrom<String> for System {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemParams {
    pub svm: SvmParams,
    /// Cap on the TF-IDF vocabulary, most frequent terms kept.
    pub max_features: Option<usize>,
    /// Similarity of the back-off relational rule.
    pub similarity: Similarity,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            svm: SvmParams::default(),
            max_features: None,
            similarity: Similarity::Cosine,
        }
    }
}

/// Inputs beyond the tweets themselves.
#[derive(Debug, Clone, Copy, Default)]
pub struct Resources<'a> {
    pub embedding: Option<&'a RelationalEmbedding>,
    pub word_vectors: Option<&'a WordVectorTable>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TweetPrediction {
    pub tweet_id: String,
    pub label: Stance,
    pub source: PredictionSource,
}

/// Fitted models kept for inspection or serialization.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub tfidf: Option<TfIdfModel>,
    pub svm: Option<SvmModel>,
    pub class_distance: Option<ClassDistanceModel>,
}

#[derive(Debug, Clone)]
pub struct SystemRun {
    pub system: System,
    pub predictions: Vec<TweetPrediction>,
    pub gold: Vec<Stance>,
    pub report: EvalReport,
    pub artifacts: Artifacts,
}

impl SystemRun {
    /// `tweet_id<TAB>label<TAB>source` lines.
    pub fn predictions_tsv(&self) -> String {
        let mut s = String::new();
        for p in &self.predictions {
            s.push_str(&format!("{}\t{}\t{}\n", p.tweet_id, p.label, p.source));
        }
        s
    }
}

/// Fits the text featurizer on TRAIN texts only.
pub fn fit_featurizer<'a>(
    system: TextSystem,
    data: &TweetDataset,
    res: &Resources<'a>,
    max_features: Option<usize>,
) -> Result<Featurizer<'a>> {
    match system {
        TextSystem::TfidfSvm => {
            let docs: Vec<Vec<String>> = data.train().map(|t| tokenize(&t.text)).collect();
            Ok(Featurizer::TfIdf(TfIdfModel::fit(&docs, max_features)?))
        }
        TextSystem::FtembSvm => res
            .word_vectors
            .map(Featurizer::AvgVec)
            .ok_or(Error::MissingInput("word vectors")),
    }
}

fn tfidf_of(f: &Featurizer<'_>) -> Option<TfIdfModel> {
    match f {
        Featurizer::TfIdf(m) => Some(m.clone()),
        Featurizer::AvgVec(_) => None,
    }
}

/// Trains `system` on the TRAIN split and evaluates it on the TEST split.
pub fn run_system(
    system: System,
    data: &TweetDataset,
    res: &Resources<'_>,
    params: &SystemParams,
) -> Result<SystemRun> {
    data.require_train()?;
    let embedding = || res.embedding.ok_or(Error::MissingInput("relational embedding"));
    let mut artifacts = Artifacts::default();
    let preds: Vec<Prediction> = match system {
        System::RelembSvm => {
            let emb = embedding()?;
            let row = |a: &str| FeatureVector::Dense(emb.lookup(a));
            let (x, y): (Vec<_>, Vec<_>) = data.train().map(|t| (row(&t.author), t.stance)).unzip();
            let svm = SvmModel::fit(&x, &y, params.svm)?;
            let out = data
                .test()
                .map(|t| svm.predict_as(&row(&t.author), PredictionSource::Relational))
                .collect::<Result<_>>()?;
            artifacts.svm = Some(svm);
            out
        }
        System::Text(ts) => {
            let f = fit_featurizer(ts, data, res, params.max_features)?;
            artifacts.tfidf = tfidf_of(&f);
            let model = TextSvm::fit(data, f, params.svm)?;
            let out = data
                .test()
                .map(|t| model.predict_text(&t.text))
                .collect::<Result<_>>()?;
            artifacts.svm = Some(model.svm);
            out
        }
        System::Backoff(ts) => {
            let emb = embedding()?;
            let f = fit_featurizer(ts, data, res, params.max_features)?;
            artifacts.tfidf = tfidf_of(&f);
            let text = TextSvm::fit(data, f, params.svm)?;
            let rel = match ClassDistanceModel::fit(data, emb, params.similarity) {
                Ok(m) => Some(m),
                // nobody in TRAIN has interactions; only usable if nobody
                // in TEST does either
                Err(Error::EmptyBanks) if !data.test().any(|t| emb.is_known(&t.author)) => None,
                Err(e) => return Err(e),
            };
            let out = data
                .test()
                .map(|t| match &rel {
                    Some(rel) => backoff_predict(rel, &text, t, emb),
                    None => text.predict_text(&t.text).map(|mut p| {
                        p.source = PredictionSource::TextualBackoff;
                        p
                    }),
                })
                .collect::<Result<_>>()?;
            artifacts.svm = Some(text.svm);
            artifacts.class_distance = rel;
            out
        }
        System::Ensemble(ts) => {
            let emb = embedding()?;
            let f = fit_featurizer(ts, data, res, params.max_features)?;
            artifacts.tfidf = tfidf_of(&f);
            let model = EnsembleModel::fit(data, f, emb, params.svm)?;
            let out = data
                .test()
                .map(|t| model.predict(t, emb))
                .collect::<Result<_>>()?;
            artifacts.svm = Some(model.svm);
            out
        }
    };

    let gold: Vec<Stance> = data.test().map(|t| t.stance).collect();
    let labels: Vec<Stance> = preds.iter().map(|p| p.label).collect();
    let report = f1_favor_against(&gold, &labels)?;
    let predictions = data
        .test()
        .zip(&preds)
        .map(|(t, p)| TweetPrediction {
            tweet_id: t.tweet_id.clone(),
            label: p.label,
            source: p.source,
        })
        .collect();
    Ok(SystemRun {
        system,
        predictions,
        gold,
        report,
        artifacts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_names_round_trip() {
        for s in [
            "relemb-svm",
            "tfidf-svm",
            "ftemb-svm",
            "backoff:tfidf-svm",
            "backoff:ftemb-svm",
            "ensemble:tfidf-svm",
            "ensemble:ftemb-svm",
        ] {
            let sys: System = s.parse().unwrap();
            assert_eq!(sys.to_string(), s);
        }
        assert!("backoff:relemb-svm".parse::<System>().is_err());
        assert!("svm".parse::<System>().is_err());
        assert!(System::Ensemble(TextSystem::FtembSvm).needs_word_vectors());
        assert!(!System::Text(TextSystem::TfidfSvm).needs_embedding());
    }
}

use core::fmt;

use serde::{Deserialize, Serialize};

use crate::data::Stance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PredictionSource {
    #[serde(rename = "RELATIONAL")]
    Relational,
    #[serde(rename = "TEXTUAL")]
    Textual,
    #[serde(rename = "TEXTUAL-BACKOFF")]
    TextualBackoff,
    #[serde(rename = "ENSEMBLE")]
    Ensemble,
}

impl PredictionSource {
    pub fn as_str(self) -> &'static str {
        match self {
            PredictionSource::Relational => "RELATIONAL",
            PredictionSource::Textual => "TEXTUAL",
            PredictionSource::TextualBackoff => "TEXTUAL-BACKOFF",
            PredictionSource::Ensemble => "ENSEMBLE",
        }
    }
}

impl fmt::Display for PredictionSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub label: Stance,
    pub source: PredictionSource,
    /// Indexed by [`Stance::index`]; `None` for classes the model cannot emit.
    pub scores: [Option<f64>; 3],
}

impl Prediction {
    /// Picks the argmax; `None` if no class has a score.
    pub fn from_scores(scores: [Option<f64>; 3], source: PredictionSource) -> Option<Self> {
        argmax_stance(&scores).map(|label| Prediction {
            label,
            source,
            scores,
        })
    }
}

/// Highest score wins; on exact ties the earlier class in
/// `AGAINST < FAVOR < NONE` wins.
pub fn argmax_stance(scores: &[Option<f64>; 3]) -> Option<Stance> {
    let mut best: Option<(Stance, f64)> = None;
    for s in Stance::ALL {
        if let Some(v) = scores[s.index()] {
            match best {
                Some((_, b)) if v <= b => {}
                _ => best = Some((s, v)),
            }
        }
    }
    best.map(|b| b.0)
}

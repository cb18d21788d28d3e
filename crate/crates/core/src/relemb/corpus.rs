use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::InteractionSet;
use crate::error::{Error, Result};

/// Which interaction sets feed the trainer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusMode {
    Retweet,
    Friends,
    Mixed,
}

impl CorpusMode {
    pub const ALL: [CorpusMode; 3] = [CorpusMode::Retweet, CorpusMode::Friends, CorpusMode::Mixed];

    pub fn as_str(self) -> &'static str {
        match self {
            CorpusMode::Retweet => "retweet",
            CorpusMode::Friends => "friends",
            CorpusMode::Mixed => "mixed",
        }
    }
}

impl fmt::Display for CorpusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorpusMode {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s.to_ascii_lowercase().as_str() {
            "retweet" | "retweets" => Ok(CorpusMode::Retweet),
            "friends" | "friend" => Ok(CorpusMode::Friends),
            "mixed" => Ok(CorpusMode::Mixed),
            _ => Err(()),
        }
    }
}

/// Selects the training corpus. `Mixed` is the multiset union, retweets first.
pub fn build_corpus(
    retweets: &InteractionSet,
    friends: &InteractionSet,
    mode: CorpusMode,
) -> Result<InteractionSet> {
    let out: InteractionSet = match mode {
        CorpusMode::Retweet => retweets.clone(),
        CorpusMode::Friends => friends.clone(),
        CorpusMode::Mixed => retweets.iter().chain(friends.iter()).cloned().collect(),
    };
    if out.is_empty() {
        return Err(Error::EmptyInput(match mode {
            CorpusMode::Retweet => "no retweet pairs",
            CorpusMode::Friends => "no friend pairs",
            CorpusMode::Mixed => "no interaction pairs",
        }));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{InteractionKind, InteractionPair};

    fn set(kind: InteractionKind, edges: &[(&str, &str)]) -> InteractionSet {
        edges
            .iter()
            .map(|(s, t)| InteractionPair::new(*s, *t, kind).unwrap())
            .collect()
    }

    #[test]
    fn modes_select_and_union() {
        let rt = set(InteractionKind::Retweet, &[("a", "b"), ("b", "c"), ("c", "a")]);
        let fr = set(InteractionKind::Friend, &[("a", "b"), ("d", "a")]);
        assert_eq!(build_corpus(&rt, &fr, CorpusMode::Mixed).unwrap().len(), 5);
        assert_eq!(build_corpus(&rt, &fr, CorpusMode::Retweet).unwrap(), rt);
        assert_eq!(build_corpus(&rt, &fr, CorpusMode::Friends).unwrap(), fr);
        let mixed = build_corpus(&rt, &fr, CorpusMode::Mixed).unwrap();
        let ab = mixed.iter().filter(|p| p.source == "a" && p.target == "b").count();
        assert_eq!(ab, 2);
    }

    #[test]
    fn empty_selected_source_is_error() {
        let rt = set(InteractionKind::Retweet, &[("a", "b")]);
        let empty = InteractionSet::new();
        assert!(build_corpus(&empty, &rt, CorpusMode::Retweet).is_err());
        assert!(build_corpus(&rt, &empty, CorpusMode::Retweet).is_ok());
        assert!(build_corpus(&empty, &empty, CorpusMode::Mixed).is_err());
    }
}

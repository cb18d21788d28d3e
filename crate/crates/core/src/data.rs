//! Data model shared by every stage: interaction pairs, labeled tweets and
//! pre-trained word vectors.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stance label. The declaration order is the tie-break order used by every
/// argmax in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Stance {
    Against,
    Favor,
    None,
}

impl Stance {
    pub const ALL: [Stance; 3] = [Stance::Against, Stance::Favor, Stance::None];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Stance> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Stance::Against => "AGAINST",
            Stance::Favor => "FAVOR",
            Stance::None => "NONE",
        }
    }
}

impl fmt::Display for Stance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stance {
    type Err = ();

    /// `NEUTRAL` is accepted as an alias of `NONE`.
    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "AGAINST" => Ok(Stance::Against),
            "FAVOR" => Ok(Stance::Favor),
            "NONE" | "NEUTRAL" => Ok(Stance::None),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "TRAIN",
            Split::Test => "TEST",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        match s {
            "TRAIN" => Ok(Split::Train),
            "TEST" => Ok(Split::Test),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum InteractionKind {
    Retweet,
    Friend,
}

impl InteractionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            InteractionKind::Retweet => "RETWEET",
            InteractionKind::Friend => "FRIEND",
        }
    }
}

impl fmt::Display for InteractionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InteractionKind {
    type Err = ();

    fn from_str(s: &str) -> core::result::Result<Self, ()> {
        if s.eq_ignore_ascii_case("RETWEET") {
            Ok(InteractionKind::Retweet)
        } else if s.eq_ignore_ascii_case("FRIEND") || s.eq_ignore_ascii_case("FRIENDS") {
            Ok(InteractionKind::Friend)
        } else {
            Err(())
        }
    }
}

/// One directed social action: `source` acted on `target`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InteractionPair {
    pub source: String,
    pub target: String,
    pub kind: InteractionKind,
}

impl InteractionPair {
    pub fn new(
        source: impl Into<String>,
        target: impl Into<String>,
        kind: InteractionKind,
    ) -> Result<Self> {
        let source = source.into();
        let target = target.into();
        if source.is_empty() {
            return Err(Error::InvalidId("empty source user id"));
        }
        if target.is_empty() {
            return Err(Error::InvalidId("empty target user id"));
        }
        Ok(Self {
            source,
            target,
            kind,
        })
    }
}

/// Ordered multiset of interaction pairs. Duplicates are kept: repeated
/// interactions are separate training instances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InteractionSet {
    pairs: Vec<InteractionPair>,
    retweets: usize,
    friends: usize,
}

impl InteractionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, pair: InteractionPair) {
        match pair.kind {
            InteractionKind::Retweet => self.retweets += 1,
            InteractionKind::Friend => self.friends += 1,
        }
        self.pairs.push(pair);
    }

    pub fn pairs(&self) -> &[InteractionPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn count(&self, kind: InteractionKind) -> usize {
        match kind {
            InteractionKind::Retweet => self.retweets,
            InteractionKind::Friend => self.friends,
        }
    }

    pub fn iter(&self) -> core::slice::Iter<'_, InteractionPair> {
        self.pairs.iter()
    }

    /// Pairs of a single kind, order preserved.
    pub fn filter_kind(&self, kind: InteractionKind) -> InteractionSet {
        self.iter().filter(|p| p.kind == kind).cloned().collect()
    }
}

impl FromIterator<InteractionPair> for InteractionSet {
    fn from_iter<I: IntoIterator<Item = InteractionPair>>(iter: I) -> Self {
        let mut set = InteractionSet::new();
        set.extend(iter);
        set
    }
}

impl Extend<InteractionPair> for InteractionSet {
    fn extend<I: IntoIterator<Item = InteractionPair>>(&mut self, iter: I) {
        for p in iter {
            self.push(p);
        }
    }
}

impl<'a> IntoIterator for &'a InteractionSet {
    type Item = &'a InteractionPair;
    type IntoIter = core::slice::Iter<'a, InteractionPair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledTweet {
    pub tweet_id: String,
    pub author: String,
    pub text: String,
    pub stance: Stance,
    pub split: Split,
}

/// Label counts indexed `[split][stance]`.
pub type LabelHistogram = [[usize; 3]; 2];

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TweetDataset {
    records: Vec<LabeledTweet>,
    histogram: LabelHistogram,
}

impl TweetDataset {
    /// Builds a dataset, rejecting duplicate tweet ids.
    pub fn new(records: Vec<LabeledTweet>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut histogram = [[0usize; 3]; 2];
        for r in &records {
            if seen.insert(r.tweet_id.as_str(), ()).is_some() {
                return Err(Error::DuplicateId(r.tweet_id.clone()));
            }
            histogram[r.split as usize][r.stance.index()] += 1;
        }
        Ok(Self { records, histogram })
    }

    pub fn records(&self) -> &[LabeledTweet] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn histogram(&self) -> &LabelHistogram {
        &self.histogram
    }

    pub fn count(&self, split: Split, stance: Stance) -> usize {
        self.histogram[split as usize][stance.index()]
    }

    pub fn split_len(&self, split: Split) -> usize {
        self.histogram[split as usize].iter().sum()
    }

    pub fn split(&self, split: Split) -> impl Iterator<Item = &LabeledTweet> {
        self.records.iter().filter(move |r| r.split == split)
    }

    pub fn train(&self) -> impl Iterator<Item = &LabeledTweet> {
        self.split(Split::Train)
    }

    pub fn test(&self) -> impl Iterator<Item = &LabeledTweet> {
        self.split(Split::Test)
    }

    /// Re-labels the split of each record: indices in `held_out` become
    /// TEST, every other TRAIN record stays TRAIN. Used by cross-validation
    /// over the training portion.
    pub fn with_held_out(&self, train_idx: &[usize], held_out: &[usize]) -> TweetDataset {
        let mut records = Vec::with_capacity(train_idx.len() + held_out.len());
        for &i in train_idx {
            let mut r = self.records[i].clone();
            r.split = Split::Train;
            records.push(r);
        }
        for &i in held_out {
            let mut r = self.records[i].clone();
            r.split = Split::Test;
            records.push(r);
        }
        TweetDataset::new(records).expect("ids already unique")
    }

    /// Fails unless at least one TRAIN record exists.
    pub fn require_train(&self) -> Result<()> {
        if self.split_len(Split::Train) == 0 {
            return Err(Error::EmptyInput("dataset has no TRAIN records"));
        }
        Ok(())
    }
}

/// Pre-trained word vectors. Loaded, never trained here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordVectorTable {
    dim: usize,
    entries: BTreeMap<String, Vec<f64>>,
}

impl WordVectorTable {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("word vector dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            entries: BTreeMap::new(),
        })
    }

    /// Inserts or overwrites a word vector.
    pub fn insert(&mut self, word: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: vector.len(),
            });
        }
        self.entries.insert(word.into(), vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.entries.get(word).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Split, TweetDataset};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FoldMode {
    /// Tweets dealt to folds, stratified by label.
    #[default]
    ByTweet,
    /// Authors dealt to folds; no author on both sides of a fold.
    ByUser,
}

/// Record indices (into `dataset.records()`) for one fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: Vec<usize>,
    pub validation: Vec<usize>,
}

/// Partitions the TRAIN records into `k` folds.
pub fn kfold_split(dataset: &TweetDataset, k: usize, seed: u64, mode: FoldMode) -> Result<Vec<Fold>> {
    if k < 2 {
        return Err(Error::InvalidConfig("at least two folds are needed".into()));
    }
    let records = dataset.records();
    let train: Vec<usize> = (0..records.len()).filter(|&i| records[i].split == Split::Train).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![usize::MAX; records.len()];
    match mode {
        FoldMode::ByTweet => {
            if k > train.len() {
                return Err(Error::TooManyFolds { k, groups: train.len() });
            }
            let mut by_label: [Vec<usize>; 3] = Default::default();
            for &i in &train {
                by_label[records[i].stance.index()].push(i);
            }
            let mut next = 0usize;
            for group in &mut by_label {
                group.shuffle(&mut rng);
                for &i in group.iter() {
                    assignment[i] = next % k;
                    next += 1;
                }
            }
        }
        FoldMode::ByUser => {
            let mut users: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
            for &i in &train {
                users.entry(records[i].author.as_str()).or_default().push(i);
            }
            if k > users.len() {
                return Err(Error::TooManyFolds { k, groups: users.len() });
            }
            let mut groups: Vec<Vec<usize>> = users.into_values().collect();
            groups.shuffle(&mut rng);
            for (g, members) in groups.iter().enumerate() {
                for &i in members {
                    assignment[i] = g % k;
                }
            }
        }
    }
    Ok((0..k)
        .map(|f| Fold {
            train: train.iter().copied().filter(|&i| assignment[i] != f).collect(),
            validation: train.iter().copied().filter(|&i| assignment[i] == f).collect(),
        })
        .collect())
}

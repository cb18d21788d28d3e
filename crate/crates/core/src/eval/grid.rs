use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::kfold::{kfold_split, FoldMode};
use crate::classify::SvmParams;
use crate::data::{InteractionSet, TweetDataset, WordVectorTable};
use crate::error::{Error, Result};
use crate::pipeline::{run_system, Resources, System, SystemParams};
use crate::relemb::{build_corpus, train, CorpusMode, RelationalEmbedding, TrainConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridSpec {
    pub dims: Vec<usize>,
    pub cs: Vec<f64>,
    pub gammas: Vec<f64>,
    pub folds: usize,
    pub seed: u64,
    pub fold_mode: FoldMode,
    /// Interaction sets tried by systems that use an embedding.
    pub modes: Vec<CorpusMode>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dims: vec![10, 20],
            cs: vec![1.0, 10.0],
            gammas: vec![0.1, 1.0],
            folds: 5,
            seed: 0,
            fold_mode: FoldMode::ByTweet,
            modes: CorpusMode::ALL.to_vec(),
        }
    }
}

impl GridSpec {
    pub fn validate(&self, system: System) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.cs.is_empty() || self.gammas.is_empty() {
            return bad("grid needs at least one C and one gamma");
        }
        if self.cs.iter().chain(&self.gammas).any(|v| !(v.is_finite() && *v > 0.0)) {
            return bad("C and gamma values must be positive");
        }
        if system.needs_embedding() {
            if self.dims.is_empty() || self.dims.contains(&0) {
                return bad("grid needs at least one positive dim");
            }
            if self.modes.is_empty() {
                return bad("grid needs at least one corpus mode");
            }
        }
        if self.folds < 2 {
            return bad("at least two folds are needed");
        }
        Ok(())
    }
}

/// One grid cell. `mode` and `dim` are absent for text-only systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvRow {
    pub mode: Option<CorpusMode>,
    pub dim: Option<usize>,
    pub c: f64,
    pub gamma: f64,
    pub fold_f1: Vec<f64>,
    pub mean_f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub system: System,
    pub rows: Vec<CvRow>,
    /// Index into `rows`.
    pub best: usize,
}

impl GridResult {
    pub fn best_row(&self) -> &CvRow {
        &self.rows[self.best]
    }

    /// Aligned plain-text table; the selected row is starred.
    pub fn to_table(&self) -> String {
        let mut s = format!(
            "  {:<8} {:>4} {:>10} {:>10} {:>8}  folds\n",
            "mode", "dim", "C", "gamma", "mean_f1"
        );
        for (i, r) in self.rows.iter().enumerate() {
            let folds: Vec<String> = r.fold_f1.iter().map(|f| format!("{f:.4}")).collect();
            s.push_str(&format!(
                "{} {:<8} {:>4} {:>10} {:>10} {:>8.4}  {}\n",
                if i == self.best { '*' } else { ' ' },
                r.mode.map_or("-", |m| m.as_str()),
                r.dim.map_or(String::from("-"), |d| format!("{d}")),
                r.c,
                r.gamma,
                r.mean_f1,
                folds.join(" ")
            ));
        }
        s
    }
}

fn mode_rank(m: Option<CorpusMode>) -> usize {
    m.map_or(0, |m| m as usize)
}

/// Better mean first; ties go to the smaller dim, C, gamma, then mode order.
fn prefer(a: &CvRow, b: &CvRow) -> Ordering {
    b.mean_f1
        .partial_cmp(&a.mean_f1)
        .unwrap_or(Ordering::Equal)
        .then(a.dim.cmp(&b.dim))
        .then(a.c.partial_cmp(&b.c).unwrap_or(Ordering::Equal))
        .then(a.gamma.partial_cmp(&b.gamma).unwrap_or(Ordering::Equal))
        .then(mode_rank(a.mode).cmp(&mode_rank(b.mode)))
}

/// [`grid_search_with`] using the sequential embedding trainer.
#[allow(clippy::too_many_arguments)]
pub fn grid_search(
    dataset: &TweetDataset,
    retweets: &InteractionSet,
    friends: &InteractionSet,
    grid: &GridSpec,
    system: System,
    emb_config: &TrainConfig,
    params: &SystemParams,
    word_vectors: Option<&WordVectorTable>,
) -> Result<GridResult> {
    grid_search_with(
        dataset,
        retweets,
        friends,
        grid,
        system,
        emb_config,
        params,
        word_vectors,
        &mut |corpus, cfg| train(corpus, cfg),
    )
}

/// k-fold cross-validation over the TRAIN split for every grid cell.
///
/// Embeddings are learned without labels, once per (mode, dim), from the
/// full interaction sets. Modes whose interaction set is empty are skipped.
/// Every cell sees the same folds.
#[allow(clippy::too_many_arguments)]
pub fn grid_search_with(
    dataset: &TweetDataset,
    retweets: &InteractionSet,
    friends: &InteractionSet,
    grid: &GridSpec,
    system: System,
    emb_config: &TrainConfig,
    params: &SystemParams,
    word_vectors: Option<&WordVectorTable>,
    trainer: &mut dyn FnMut(&InteractionSet, &TrainConfig) -> Result<RelationalEmbedding>,
) -> Result<GridResult> {
    grid.validate(system)?;
    dataset.require_train()?;
    let folds = kfold_split(dataset, grid.folds, grid.seed, grid.fold_mode)?;
    let fold_data: Vec<TweetDataset> = folds
        .iter()
        .map(|f| dataset.with_held_out(&f.train, &f.validation))
        .collect();

    let mut rows = Vec::new();
    let mut evaluate = |emb: Option<&RelationalEmbedding>, mode, dim| -> Result<()> {
        let res = Resources {
            embedding: emb,
            word_vectors,
        };
        for &c in &grid.cs {
            for &gamma in &grid.gammas {
                let p = SystemParams {
                    svm: SvmParams {
                        c,
                        gamma,
                        ..params.svm
                    },
                    ..*params
                };
                let fold_f1 = fold_data
                    .iter()
                    .map(|d| run_system(system, d, &res, &p).map(|r| r.report.f1_avg))
                    .collect::<Result<Vec<f64>>>()?;
                let mean_f1 = fold_f1.iter().sum::<f64>() / fold_f1.len() as f64;
                rows.push(CvRow {
                    mode,
                    dim,
                    c,
                    gamma,
                    fold_f1,
                    mean_f1,
                });
            }
        }
        Ok(())
    };

    if system.needs_embedding() {
        for &mode in &grid.modes {
            let corpus = match build_corpus(retweets, friends, mode) {
                Ok(c) => c,
                Err(Error::EmptyInput(_)) => continue,
                Err(e) => return Err(e),
            };
            for &dim in &grid.dims {
                let cfg = TrainConfig {
                    dim,
                    ..emb_config.clone()
                };
                let emb = trainer(&corpus, &cfg)?;
                evaluate(Some(&emb), Some(mode), Some(dim))?;
            }
        }
        if rows.is_empty() {
            return Err(Error::EmptyInput("no interaction pairs for any corpus mode"));
        }
    } else {
        evaluate(None, None, None)?;
    }

    let best = (0..rows.len())
        .min_by(|&a, &b| prefer(&rows[a], &rows[b]))
        .expect("grid is non-empty");
    Ok(GridResult { system, rows, best })
}

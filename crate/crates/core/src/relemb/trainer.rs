use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sgns::{pair_coefficients, step_with, Scratch};
use super::{subsample_discount, NegativeTable, RelationalEmbedding, SubsampleUnit, TrainerState, Vocab};
use crate::data::InteractionSet;
use crate::error::{Error, Result};

/// Maximum draws spent trying to find a negative different from the target.
pub const NEGATIVE_RETRIES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub dim: usize,
    pub epochs: usize,
    pub initial_lr: f64,
    pub min_lr: f64,
    pub negatives_k: usize,
    pub subsample_t: f64,
    pub subsample_unit: SubsampleUnit,
    pub ns_power: f64,
    pub seed: u64,
    pub threads: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dim: 20,
            epochs: 15,
            initial_lr: 0.025,
            min_lr: 1e-4,
            negatives_k: 5,
            subsample_t: 1e-3,
            subsample_unit: SubsampleUnit::Target,
            ns_power: 0.75,
            seed: 1,
            threads: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.dim < 1 {
            return fail("dim must be >= 1");
        }
        if self.epochs < 1 {
            return fail("epochs must be >= 1");
        }
        if !(self.initial_lr > 0.0) || !self.initial_lr.is_finite() {
            return fail("initial_lr must be > 0");
        }
        if !(self.min_lr >= 0.0 && self.min_lr <= self.initial_lr) {
            return fail("min_lr must lie in [0, initial_lr]");
        }
        if self.negatives_k < 1 {
            return fail("negatives_k must be >= 1");
        }
        if !(self.subsample_t > 0.0 && self.subsample_t <= 1.0) {
            return fail("subsample_t must lie in (0, 1]");
        }
        if !(0.0..=1.0).contains(&self.ns_power) {
            return fail("ns_power must lie in [0, 1]");
        }
        if self.threads < 1 {
            return fail("threads must be >= 1");
        }
        Ok(())
    }
}

/// Everything derived from the corpus before any weight moves: the user
/// index, negative table, per-instance keep probabilities and the learning
/// rate schedule. Shared by the sequential and the parallel trainers.
#[derive(Debug, Clone)]
pub struct TrainingPlan {
    pub vocab: Vocab,
    pub table: NegativeTable,
    /// `(source, target)` rows in corpus order.
    pub pairs: Vec<(usize, usize)>,
    /// Keep probability for each entry of `pairs`.
    pub keep: Vec<f64>,
    pub config: TrainConfig,
}

impl TrainingPlan {
    pub fn new(corpus: &InteractionSet, config: &TrainConfig) -> Result<Self> {
        config.validate()?;
        let vocab = Vocab::build(corpus)?;
        let table = NegativeTable::new(&vocab, config.ns_power);
        let pairs: Vec<(usize, usize)> = corpus
            .iter()
            .map(|p| (vocab.id(&p.source).unwrap(), vocab.id(&p.target).unwrap()))
            .collect();
        let t = config.subsample_t;
        let keep = match config.subsample_unit {
            SubsampleUnit::Target => {
                let total = vocab.total_target() as f64;
                pairs
                    .iter()
                    .map(|&(_, tgt)| subsample_discount(vocab.target_freq(tgt) as f64 / total, t))
                    .collect()
            }
            SubsampleUnit::Pair => {
                let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
                for p in &pairs {
                    *counts.entry(*p).or_default() += 1;
                }
                let total = pairs.len() as f64;
                pairs
                    .iter()
                    .map(|p| subsample_discount(counts[p] as f64 / total, t))
                    .collect()
            }
        };
        Ok(Self {
            vocab,
            table,
            pairs,
            keep,
            config: config.clone(),
        })
    }

    pub fn total_steps(&self) -> u64 {
        (self.pairs.len() * self.config.epochs) as u64
    }

    /// Linear decay from `initial_lr` at step 0 to `min_lr` at the last step.
    pub fn lr_at(&self, step: u64) -> f64 {
        let c = &self.config;
        let total = self.total_steps().max(1) as f64;
        let frac = (step as f64 / total).min(1.0);
        c.initial_lr - (c.initial_lr - c.min_lr) * frac
    }

    /// Draws up to `negatives_k` rows different from `target` into `out`.
    pub fn draw_negatives<R: Rng>(&self, target: usize, rng: &mut R, out: &mut Vec<usize>) {
        draw_negatives(&self.table, self.config.negatives_k, target, rng, out);
    }
}

fn draw_negatives<R: Rng>(
    table: &NegativeTable,
    k: usize,
    target: usize,
    rng: &mut R,
    out: &mut Vec<usize>,
) {
    out.clear();
    for _ in 0..k {
        for _ in 0..NEGATIVE_RETRIES {
            let n = table.sample(rng.gen::<f64>());
            if n != target {
                out.push(n);
                break;
            }
        }
    }
}

/// Per-epoch progress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    /// Mean pre-update loss over the pairs trained this epoch (NaN if none).
    pub mean_loss: f64,
    /// Learning rate at the end of the epoch.
    pub lr: f64,
    pub trained: usize,
    pub dropped: usize,
}

/// Sequential, bit-reproducible trainer.
#[derive(Debug)]
pub struct Trainer {
    plan: TrainingPlan,
    state: TrainerState,
    rng: ChaCha8Rng,
    order: Vec<usize>,
    epoch: usize,
    position: u64,
    negatives: Vec<usize>,
    scratch: Scratch,
}

impl Trainer {
    pub fn new(corpus: &InteractionSet, config: &TrainConfig) -> Result<Self> {
        let plan = TrainingPlan::new(corpus, config)?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let state = TrainerState::init(plan.vocab.len(), config.dim, &mut rng)?;
        let order = (0..plan.pairs.len()).collect();
        Ok(Self {
            plan,
            state,
            rng,
            order,
            epoch: 0,
            position: 0,
            negatives: Vec::with_capacity(config.negatives_k),
            scratch: Scratch::default(),
        })
    }

    pub fn plan(&self) -> &TrainingPlan {
        &self.plan
    }

    pub fn vocab(&self) -> &Vocab {
        &self.plan.vocab
    }

    pub fn state(&self) -> &TrainerState {
        &self.state
    }

    pub fn epochs_done(&self) -> usize {
        self.epoch
    }

    pub fn is_finished(&self) -> bool {
        self.epoch >= self.plan.config.epochs
    }

    pub fn run_epoch(&mut self) -> Result<EpochStats> {
        self.order.shuffle(&mut self.rng);
        let mut loss_sum = 0.0;
        let mut trained = 0usize;
        let mut dropped = 0usize;
        for k in 0..self.order.len() {
            let idx = self.order[k];
            let lr = self.plan.lr_at(self.position);
            self.position += 1;
            let keep = self.plan.keep[idx];
            if keep < 1.0 && self.rng.gen::<f64>() >= keep {
                dropped += 1;
                continue;
            }
            let (src, tgt) = self.plan.pairs[idx];
            self.plan.draw_negatives(tgt, &mut self.rng, &mut self.negatives);
            loss_sum += step_with(
                &mut self.state,
                src,
                tgt,
                &self.negatives,
                lr,
                &mut self.scratch,
            )?;
            trained += 1;
        }
        self.epoch += 1;
        Ok(EpochStats {
            epoch: self.epoch,
            mean_loss: if trained == 0 { f64::NAN } else { loss_sum / trained as f64 },
            lr: self.plan.lr_at(self.position),
            trained,
            dropped,
        })
    }

    /// Mean pair loss under the current weights, see [`mean_loss`].
    pub fn mean_loss(&self, corpus: &InteractionSet, seed: u64) -> Result<f64> {
        mean_loss(&self.state, &self.plan.vocab, corpus, &self.plan.config, seed)
    }

    pub fn into_embedding(self) -> RelationalEmbedding {
        let dim = self.state.dim();
        let users = self.plan.vocab.users().to_vec();
        RelationalEmbedding::new(users, self.state.into_input_matrix(), dim)
            .expect("trainer keeps finite weights")
    }
}

/// Trains sequentially and returns the input matrix as the embedding.
pub fn train(corpus: &InteractionSet, config: &TrainConfig) -> Result<RelationalEmbedding> {
    train_with_progress(corpus, config, |_| {})
}

pub fn train_with_progress<F: FnMut(&EpochStats)>(
    corpus: &InteractionSet,
    config: &TrainConfig,
    mut progress: F,
) -> Result<RelationalEmbedding> {
    let mut trainer = Trainer::new(corpus, config)?;
    while !trainer.is_finished() {
        let stats = trainer.run_epoch()?;
        progress(&stats);
    }
    Ok(trainer.into_embedding())
}

/// Average pair loss with freshly drawn negatives from a ChaCha stream
/// seeded with `seed`. No weights change.
pub fn mean_loss(
    state: &TrainerState,
    vocab: &Vocab,
    corpus: &InteractionSet,
    config: &TrainConfig,
    seed: u64,
) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput("mean loss of an empty pair list"));
    }
    let table = NegativeTable::new(vocab, config.ns_power);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut negatives = Vec::new();
    let mut coeffs = Vec::new();
    let mut total = 0.0;
    for p in corpus {
        let lookup = |u: &str| {
            vocab
                .id(u)
                .ok_or_else(|| Error::InvalidConfig(format!("user `{u}` not in vocabulary")))
        };
        let (src, tgt) = (lookup(&p.source)?, lookup(&p.target)?);
        draw_negatives(&table, config.negatives_k, tgt, &mut rng, &mut negatives);
        let outs: Vec<&[f64]> = core::iter::once(tgt)
            .chain(negatives.iter().copied())
            .map(|r| state.out_row(r))
            .collect();
        coeffs.clear();
        coeffs.resize(outs.len(), 0.0);
        total += pair_coefficients(state.row(src), &outs, &mut coeffs)?;
    }
    Ok(total / corpus.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{InteractionKind, InteractionPair};

    fn corpus(edges: &[(&str, &str)]) -> InteractionSet {
        edges
            .iter()
            .map(|(s, t)| InteractionPair::new(*s, *t, InteractionKind::Retweet).unwrap())
            .collect()
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        let bad = [
            TrainConfig { epochs: 0, ..Default::default() },
            TrainConfig { dim: 0, ..Default::default() },
            TrainConfig { negatives_k: 0, ..Default::default() },
            TrainConfig { subsample_t: 0.0, ..Default::default() },
            TrainConfig { subsample_t: 1.5, ..Default::default() },
            TrainConfig { ns_power: 1.5, ..Default::default() },
            TrainConfig { initial_lr: 0.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn lr_decays_linearly() {
        let c = corpus(&[("a", "b"), ("b", "c")]);
        let cfg = TrainConfig { epochs: 2, ..Default::default() };
        let plan = TrainingPlan::new(&c, &cfg).unwrap();
        assert_eq!(plan.total_steps(), 4);
        assert_eq!(plan.lr_at(0), 0.025);
        assert!((plan.lr_at(2) - (0.025 + 1e-4) / 2.0).abs() < 1e-15);
        assert!((plan.lr_at(4) - 1e-4).abs() < 1e-15);
    }

    #[test]
    fn zero_output_matrix_gives_ln2_loss() {
        let c = corpus(&[("a", "b"), ("b", "c"), ("c", "a"), ("a", "c")]);
        let cfg = TrainConfig { negatives_k: 3, dim: 4, ..Default::default() };
        let t = Trainer::new(&c, &cfg).unwrap();
        let loss = t.mean_loss(&c, 9).unwrap();
        assert!((loss - 4.0 * core::f64::consts::LN_2).abs() < 1e-12);
        assert!(t.mean_loss(&InteractionSet::new(), 9).is_err());
    }

    #[test]
    fn negatives_skip_the_target() {
        // one target user only: every draw hits it and is skipped
        let c = corpus(&[("a", "b"), ("c", "b")]);
        let plan = TrainingPlan::new(&c, &TrainConfig::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut out = Vec::new();
        plan.draw_negatives(plan.vocab.id("b").unwrap(), &mut rng, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn deterministic_with_fixed_seed() {
        let c = corpus(&[("a", "b"), ("b", "c"), ("c", "a"), ("a", "c"), ("d", "a")]);
        let cfg = TrainConfig { dim: 3, epochs: 4, ..Default::default() };
        let e1 = train(&c, &cfg).unwrap();
        let e2 = train(&c, &cfg).unwrap();
        assert_eq!(e1, e2);
        let e3 = train(&c, &TrainConfig { seed: 2, ..cfg }).unwrap();
        assert_ne!(e1, e3);
    }

    #[test]
    fn subsample_pair_unit_drops_frequent_pairs() {
        let mut edges = alloc::vec![("a", "b"); 50];
        edges.push(("c", "d"));
        let c = corpus(&edges);
        let cfg = TrainConfig {
            subsample_t: 1e-2,
            subsample_unit: SubsampleUnit::Pair,
            ..Default::default()
        };
        let plan = TrainingPlan::new(&c, &cfg).unwrap();
        assert!(plan.keep[0] < 0.2);
        assert_eq!(plan.keep[50], 1.0);
    }
}

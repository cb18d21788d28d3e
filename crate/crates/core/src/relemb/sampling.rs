use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Vocab;

/// Which frequency drives the subsampling discount.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsampleUnit {
    /// Relative frequency of the target user among all target slots.
    #[default]
    Target,
    /// Relative frequency of the exact (source, target) pair.
    Pair,
}

/// `min(1, sqrt(t/f) + t/f)`.
pub fn subsample_discount(f: f64, t: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    let r = t / f;
    (libm::sqrt(r) + r).min(1.0)
}

/// Probability of keeping a pair whose target is `user`.
pub fn keep_probability(user: usize, vocab: &Vocab, t: f64) -> f64 {
    let f = vocab.target_freq(user) as f64 / vocab.total_target() as f64;
    subsample_discount(f, t)
}

/// Unigram^α distribution over target users, sampled by inverse CDF.
#[derive(Debug, Clone)]
pub struct NegativeTable {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl NegativeTable {
    /// Users that never appear as a target get probability zero, even for α = 0.
    pub fn new(vocab: &Vocab, power: f64) -> Self {
        let weights: Vec<f64> = vocab
            .target_freqs()
            .iter()
            .map(|&f| if f == 0 { 0.0 } else { libm::pow(f as f64, power) })
            .collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc / total
            })
            .collect();
        Self { probs, cumulative }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Maps a uniform draw in `[0, 1)` to a user row.
    pub fn sample(&self, u: f64) -> usize {
        let i = self.cumulative.partition_point(|&c| c <= u);
        // guard against the last cumulative value rounding below 1
        let i = i.min(self.cumulative.len() - 1);
        if self.probs[i] == 0.0 {
            // zero-weight rows sit on plateaus; move to the next row with mass
            return (i..self.probs.len())
                .chain(0..i)
                .find(|&j| self.probs[j] > 0.0)
                .unwrap_or(i);
        }
        i
    }
}

//! 2-D projections of user vectors and their scatter plots.

mod pca;
mod svg;

pub use pca::PcaModel;
pub use svg::{emit_scatter, palette};

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::data::{Split, Stance, TweetDataset};

/// One stance per author: the most frequent label among their tweets in the
/// requested split (all splits when `split` is `None`), ties resolved by the
/// class order. Sorted by user id.
pub fn user_labels(data: &TweetDataset, split: Option<Split>) -> Vec<(String, Stance)> {
    let mut counts: BTreeMap<&str, [usize; 3]> = BTreeMap::new();
    for t in data.records() {
        if split.map_or(true, |s| s == t.split) {
            counts.entry(t.author.as_str()).or_default()[t.stance.index()] += 1;
        }
    }
    counts
        .into_iter()
        .map(|(u, c)| {
            let mut best = Stance::Against;
            for s in Stance::ALL {
                if c[s.index()] > c[best.index()] {
                    best = s;
                }
            }
            (u.into(), best)
        })
        .collect()
}

//! Relational embeddings for stance detection.
//!
//! Users are embedded from raw one-to-one interaction pairs (retweets,
//! follows) with a skip-gram style objective that predicts the receiving
//! user from the acting one. The learned vectors feed several stance
//! classifiers: an RBF-kernel SVM over the author vector, a nearest-community
//! rule that backs off to a textual model for users without interactions, and
//! a concatenation ensemble of textual and relational features.
//!
//! This crate is `no_std` and only needs `alloc`. File formats, the parallel
//! trainer and the command-line driver live in the `relstance` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod classify;
pub mod data;
pub mod error;
pub mod eval;
pub mod features;
pub(crate) mod math;
pub mod pipeline;
pub mod relemb;
pub mod synth;
pub mod textfeat;
pub mod viz;

pub use data::{
    InteractionKind, InteractionPair, InteractionSet, LabeledTweet, Split, Stance, TweetDataset,
    WordVectorTable,
};
pub use error::{Error, Result};
pub use features::{FeatureVector, SparseVector};
pub use relemb::{RelationalEmbedding, TrainConfig};

/// Version string stamped into serialized models.
pub const MODEL_FORMAT_VERSION: u32 = 1;

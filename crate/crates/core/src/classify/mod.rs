//! Stance classifiers and the ways of combining relational and textual
//! evidence.

mod backoff;
mod cdist;
mod ensemble;
mod kernel;
mod prediction;
mod smo;
mod svm;

pub use backoff::{backoff_predict, TextClassifier, TextSvm};
pub use cdist::{ClassDistanceModel, Similarity};
pub use ensemble::{concat_features, EnsembleModel};
pub use kernel::{rbf_kernel, RbfKernel};
pub use prediction::{argmax_stance, Prediction, PredictionSource};
pub use smo::{KernelCache, SmoConfig, SmoSolution, DEFAULT_CACHE_BYTES};
pub use svm::{BinaryMachine, SvmModel, SvmParams};

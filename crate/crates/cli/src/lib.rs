//! File formats, a lock-free parallel embedding trainer, run manifests and
//! the `relstance` command line, on top of `relstance-core`.

pub mod app;
pub mod formats;
pub mod manifest;
pub mod parallel;

pub use formats::FormatError;
pub use manifest::RunManifest;
pub use parallel::train_parallel;

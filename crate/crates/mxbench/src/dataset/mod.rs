//! Trajectory dataset construction: planning (which network, which class,
//! which initial-condition seed, per split), materialization (running the
//! simulator and writing the on-disk formats), split-leakage checks and
//! evaluation metrics.

pub mod builder;
pub mod formats;
pub mod leak;
pub mod manifest;
pub mod metrics;

pub use builder::{
    derive_seed, materialize, plan_dataset, DatasetPlan, DatasetSpec, SamplePlan, SplitPlan,
};
pub use manifest::{
    BuildMethod, DatasetManifest, ExtrapolationAxis, ExtrapolationMode, SplitCounts,
    SplitSummary, MANIFEST_FILE, SCHEMA_VERSION, SPLIT_NAMES,
};

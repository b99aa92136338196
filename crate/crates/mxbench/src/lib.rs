//! Exact isomorphism-class bookkeeping for small multiplex networks, plus the
//! machinery built on top of it: class-aware network samplers with exact
//! class probabilities, a 2-D particle-dynamics simulator, trajectory dataset
//! builders with leakage checks, and an error-proportional priority sampler
//! for training loops.
//!
//! A multiplex network here is an ordered stack of layers over one shared
//! vertex set. Layers are either arbitrary simple graphs (`pairwise`) or
//! cliques on a charged vertex subset (`collective`). Two stacks are
//! isomorphic when a single vertex relabeling maps every layer onto its
//! counterpart; all enumeration, sampling and dataset logic is organized
//! around those joint classes rather than around labeled graphs.

pub mod canon;
pub mod cli;
pub mod dataset;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod multiplex;
pub mod perm;
pub mod priority;
pub mod sampling;

pub use canon::{automorphisms, canonical_form, is_isomorphic, CanonicalForm};
pub use error::{Error, Result};
pub use graph::{GraphKind, LabeledGraph};
pub use multiplex::{IsoClass, IsoClassCatalog, MultiplexNetwork};
pub use perm::{AutomorphismGroup, Permutation};

/// Version string recorded in generated artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

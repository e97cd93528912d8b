//! Accordant clustering: k-means-style partitioning constrained so that at
//! least `r` of the input groups each have a `t` fraction of their members
//! inside a single cluster.
//!
//! The crate provides:
//!
//! - [`GroupedDataset`]: points plus a predefined group label per point.
//! - [`kmeans`]: the unconstrained Lloyd baseline sharing its iteration
//!   machinery with the constrained engine.
//! - [`akmeans`]: the penalty-driven constrained engine, its feasibility
//!   test, and a constructive feasibility witness.
//! - [`analysis`]: SSE, silhouette, Davies-Bouldin, optimal-matching
//!   clustering distance, and cluster cores.
//! - [`oracle`]: exhaustive optimal-clustering search on tiny instances.
//! - [`io`]: CSV ingestion, synthetic benchmark generation, and a JSON
//!   result schema.
//!
//! Engines are generic over the input scalar (f32 or f64); all distance
//! arithmetic accumulates in f64 regardless of the input precision, so the
//! same data yields the same clustering in either representation.

pub mod akmeans;
pub mod analysis;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod io;
pub mod kmeans;
pub mod oracle;
pub mod params;
pub mod scalar;

pub use clustering::{accordance_report, is_rt_accordant, AccordantGroup, Clustering};
pub use dataset::GroupedDataset;
pub use error::Error;
pub use params::{AccordanceParams, InitMode, RunControls};
pub use scalar::Scalar;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Dataset over double-precision features (the default everywhere).
pub type Dataset = GroupedDataset<f64>;
/// Dataset over single-precision features.
pub type Dataset32 = GroupedDataset<f32>;

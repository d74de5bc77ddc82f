//! Text-enhanced graph anomaly detection.
//!
//! The pipeline turns each node's topology into a short narrative, embeds the
//! narratives, and feeds the standardized embeddings alongside the raw node
//! attributes into a gated dual-branch graph-convolutional autoencoder. Nodes
//! are ranked by their joint structure/attribute reconstruction error.

pub mod dataset;
pub mod embed;
pub mod error;
pub mod features;
pub mod graph;
pub mod metrics;
pub mod model;
pub mod narrate;
pub mod perturb;
pub mod pipeline;
pub mod plot;
mod rng;
pub mod synth;

pub use dataset::{load_dataset, save_dataset, Dataset};
pub use error::{Error, Result, Stage};
pub use graph::{normalize_adjacency, Graph, NormalizedAdjacency};

//! Shortest-path power metrics on Euclidean point sets.
//!
//! Given points in `R^d`, the edge-squared metric `d_2` is the shortest-path
//! closure of the complete graph whose edge weights are squared Euclidean
//! lengths; replacing the exponent gives the general p-power family and, in
//! the normalized limit, the minimax (bottleneck) distance. This crate
//! computes those closures exactly, builds the proximity graphs that stay
//! faithful to them (Gabriel, k-NN, Euclidean MST, critical edge sets),
//! and assembles sparse (1+eps)-spanners from a fair split tree and a
//! well-separated pair decomposition.
//!
//! The supporting cast: an isometric lifting map onto box vertices in `R^n`,
//! adversarial lower-bound and H-tree instances, a greedy doubling-dimension
//! estimator, seeded sampling experiments for the k-NN 1-spanner claim, and
//! intrinsic Cech filtration probes.
//!
//! Everything is deterministic given a seed; parallel sections merge in
//! index order.

pub mod constructions;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod persistence;
pub mod proximity;
pub mod spanner;
pub mod tol;
pub mod wspd;

pub use metrics::{minimax_distance, power_metric, stretch, MetricParams, StretchReport};
pub use model::{euclidean, DistanceMatrix, Edge, PointSet, WeightedGraph};

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point set must contain at least one point")]
    EmptyPointSet,
    #[error("row {row}: {reason}")]
    InvalidRow { row: usize, reason: String },
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn row(row: usize, reason: impl Into<String>) -> Self {
        Error::InvalidRow { row, reason: reason.into() }
    }
}

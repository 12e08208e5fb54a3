//! Nearest-neighbor classification with per-prototype weights.
//!
//! A weighted condensed set assigns each kept sample `p` a weight `w(p)`;
//! a query `q` takes the label of the prototype minimizing `d(q, p) / w(p)`.
//! Weighting every prototype by the distance to its nearest sample of
//! another class lets far fewer prototypes reproduce the training labels
//! than the plain nearest-neighbor rule needs.
//!
//! The crate provides the metric layer, the classifier, greedy and baseline
//! condensers, exact branch-and-bound solvers, a sample-compression codec,
//! a navigating net for approximate weighted search, and data utilities.

pub mod classifier;
pub mod compression;
pub mod condense;
pub mod data;
pub mod dataset;
pub mod error;
pub mod exact;
pub mod metric;
pub mod navnet;

pub use classifier::{classify, consistency_check, generalization_bound, CondensedSet, ConsistencyReport, WnnClassifier};
pub use condense::{greedy_wnn, hart_cnn, mss, rss, GreedyTrace};
pub use dataset::{enemy_distances, nearest_enemy, nearest_enemy_distance, Dataset, Label, LabeledPoint};
pub use error::{Error, Result};
pub use exact::{exact_nn_condense, exact_wnn_condense, ExactSolution, SolveStatus};
pub use metric::{decision_boundary, distance, weighted_distance, Boundary, Circle, Metric, Point};
pub use navnet::{NavigatingNet, QueryResult};

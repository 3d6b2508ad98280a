//! Many-versus-many similarity scoring for vector datasets.
//!
//! The pipeline: load a labeled vector dataset (IDX image/label files or a
//! CSV of embeddings), L2-normalize each class's vectors, walk banded rows of
//! the per-class dissimilarity matrix `D = 1 - V Vᵀ`, and summarize every row
//! with a Gini coefficient. High-Gini items are the most similar to the rest
//! of their class (exemplars); low-Gini items are the most unique.
//!
//! On top of the scores sit five training-subset selection strategies
//! (random, highest-Gini, lowest-Gini, KDE distribution matching, EMD
//! minimization) and a one-vs-rest linear SVM harness that turns selections
//! into accuracy-versus-samples-per-class curves.
//!
//! All randomness flows from explicit 64-bit seeds through a splitmix
//! generator, and all reductions run in fixed order, so every result is
//! bit-reproducible regardless of thread count.

pub mod cli;
pub mod dataset;
pub mod eval;
pub mod gini;
pub mod matrix;
pub mod numfmt;
pub mod rng;
pub mod sampling;
pub mod similarity;
pub mod tags;

pub use dataset::{ClassView, IdxTensor, VectorDataset};
pub use gini::{GiniScoreSet, RankDirection, RankQuery};
pub use matrix::Matrix;
pub use sampling::{SelectionConfig, SelectionPlan, Strategy};
pub use similarity::{SimilarityBlock, UnitMatrix};

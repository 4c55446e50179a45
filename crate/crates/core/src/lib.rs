//! Exact random length sequences of edge-weighted trees.
//!
//! Sampling the leaves of a tree uniformly without replacement and recording
//! the length of the subtree spanned by the first `k` leaves yields the
//! random length sequence `(W_2, ..., W_n)`. This crate computes its joint
//! law exactly and recovers trees (or laws over tree shapes) from that law
//! for several tree families.

pub mod classgen;
pub mod error;
pub mod rational;
pub mod reconstruct;
pub mod splitseq;
pub mod lengthseq;
pub mod tree;

pub use error::{Error, Result};
pub use rational::{Probability, Rational};
pub use reconstruct::{reconstruct, TreeClass, TreeMixture};
pub use splitseq::SplitSequence;
pub use lengthseq::{LengthDistribution, LengthSequence};
pub use tree::{CanonicalCode, DistanceMatrix, Mark, TreeBuilder, VertexId, WeightedTree};

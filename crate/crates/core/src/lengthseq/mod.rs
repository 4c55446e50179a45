//! Laws of random length sequences.

mod chains;
mod distribution;
mod format;

pub use chains::{
    exact_distribution, exact_distribution_with, marked_distribution, marked_distribution_with,
    ChainOptions, DEFAULT_MAX_LEAVES, HARD_MAX_LEAVES,
};
pub use distribution::{Constraint, LengthDistribution, LengthSequence};
pub use format::{read_distribution, write_distribution};

pub use crate::tree::{pairwise_distance_multiset, triple_length_multiset};

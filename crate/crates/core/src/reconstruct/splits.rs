use crate::error::{Error, Result};
use crate::lengthseq::LengthDistribution;
use crate::splitseq::{min_down_split_in_support, min_up_split_in_support};
use crate::tree::WeightedTree;

/// `(k+1)`-valent combinatorial tree from the `≺`-least down-split
/// sequence in the support.
pub fn reconstruct_k_valent(dist: &LengthDistribution, k: usize) -> Result<WeightedTree> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    let s = min_down_split_in_support(dist, k).ok_or_else(|| {
        Error::class("down-split-support", "no down-split sequence in the support")
    })?;
    Ok(s.to_tree()?.unmarked())
}

/// Rooted `k`-ary combinatorial tree from the `≪`-least up-split sequence
/// among `(0, W_2, ..., W_n)`.
pub fn reconstruct_k_ary(dist: &LengthDistribution, k: usize) -> Result<WeightedTree> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    let s = min_up_split_in_support(dist, k)
        .ok_or_else(|| Error::class("up-split-support", "no up-split sequence in the support"))?;
    s.to_tree()
}

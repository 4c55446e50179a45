//! Exact enumeration of the law of `(W_2, ..., W_n)`.
//!
//! A uniformly random leaf ordering induces a chain of leaf sets
//! `{y1, y2} ⊂ {y1, y2, y3} ⊂ ... ⊂ L`. Every chain is realised by exactly two
//! orderings (the first two leaves can swap), and the length sequence depends
//! only on the chain. The chains are built level by level; two partial chains
//! that reach the same leaf set with the same length prefix have identical
//! futures, so they are merged and their counts added.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use super::distribution::LengthDistribution;
use crate::error::{Error, Result};
use crate::rational::{common_denominator, factorial, scaled};
use crate::tree::WeightedTree;

/// Leaf-count cap applied when no other cap is given.
pub const DEFAULT_MAX_LEAVES: usize = 10;

/// Absolute ceiling regardless of configuration (leaf sets are `u32` masks).
pub const HARD_MAX_LEAVES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChainOptions {
    pub max_leaves: usize,
}

impl Default for ChainOptions {
    fn default() -> Self {
        ChainOptions {
            max_leaves: DEFAULT_MAX_LEAVES,
        }
    }
}

type Level = HashMap<u32, FxHashMap<Box<[i64]>, u128>>;

/// Steiner length (scaled) of every leaf subset, indexed by bitmask over the
/// tree's leaves in [`WeightedTree::leaves`] order.
fn subset_lengths(tree: &WeightedTree, scale: i64) -> Vec<i64> {
    let leaves = tree.leaves();
    let n = leaves.len();
    let mut bit = vec![0u32; tree.n_vertices()];
    for (i, &l) in leaves.iter().enumerate() {
        bit[l] = 1 << i;
    }
    let (parent, order) = tree.rooted_order(0);
    let mut below = bit.clone();
    let mut sides: Vec<(u32, i64)> = Vec::with_capacity(tree.edges().len());
    for &v in order.iter().rev() {
        if let Some((p, e)) = parent[v] {
            below[p] |= below[v];
            sides.push((below[v], scaled(&tree.edges()[e].weight, scale)));
        }
    }
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    (0..=full)
        .into_par_iter()
        .map(|mask| {
            sides
                .iter()
                .filter(|&&(side, _)| mask & side != 0 && mask & !side & full != 0)
                .map(|&(_, w)| w)
                .sum()
        })
        .collect()
}

fn check_size(tree: &WeightedTree, opts: &ChainOptions) -> Result<usize> {
    let n = tree.n_leaves();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "length sequences need at least two leaves, tree has {n}"
        )));
    }
    let cap = opts.max_leaves.min(HARD_MAX_LEAVES);
    if n > cap {
        return Err(Error::Infeasible(format!(
            "tree has {n} leaves, exact enumeration is capped at {cap}"
        )));
    }
    Ok(n)
}

/// Where the chains begin: every unordered leaf pair (each realised by two
/// orderings), or a single fixed first leaf.
enum Seed {
    Pairs,
    Leaf(usize),
}

fn run_chains(tree: &WeightedTree, seed: Seed, total: u128) -> LengthDistribution {
    let n = tree.n_leaves();
    let scale = common_denominator(tree.edges().iter().map(|e| &e.weight));
    let len = subset_lengths(tree, scale);
    let full: u32 = (1u32 << n) - 1;
    let mut level: Level = HashMap::new();
    match seed {
        Seed::Pairs => {
            for i in 0..n {
                for j in i + 1..n {
                    let mask = (1u32 << i) | (1u32 << j);
                    let mut m = FxHashMap::default();
                    m.insert(Box::<[i64]>::from([len[mask as usize]]), 2u128);
                    level.insert(mask, m);
                }
            }
        }
        Seed::Leaf(i) => {
            let mut m = FxHashMap::default();
            m.insert(Box::<[i64]>::from([]), 1u128);
            level.insert(1u32 << i, m);
        }
    }
    while !(level.len() == 1 && level.contains_key(&full)) {
        let mut targets: Vec<u32> = level
            .keys()
            .flat_map(|&m| (0..n).filter(move |&t| m & (1 << t) == 0).map(move |t| m | (1 << t)))
            .collect();
        targets.sort_unstable();
        targets.dedup();
        level = targets
            .into_par_iter()
            .map(|target| {
                let w = len[target as usize];
                let mut out: FxHashMap<Box<[i64]>, u128> = FxHashMap::default();
                for t in 0..n {
                    if target & (1 << t) == 0 {
                        continue;
                    }
                    if let Some(prev) = level.get(&(target & !(1 << t))) {
                        for (prefix, &c) in prev {
                            let mut key = Vec::with_capacity(prefix.len() + 1);
                            key.extend_from_slice(prefix);
                            key.push(w);
                            *out.entry(key.into_boxed_slice()).or_insert(0) += c;
                        }
                    }
                }
                (target, out)
            })
            .collect();
    }
    let entries: BTreeMap<Box<[i64]>, u128> = level
        .remove(&full)
        .expect("final level holds the full leaf set")
        .into_iter()
        .collect();
    LengthDistribution::from_scaled(n, scale, entries, total)
}

/// Exact law of `(W_2, ..., W_n)` under a uniform leaf ordering, default cap.
pub fn exact_distribution(tree: &WeightedTree) -> Result<LengthDistribution> {
    exact_distribution_with(tree, &ChainOptions::default())
}

pub fn exact_distribution_with(
    tree: &WeightedTree,
    opts: &ChainOptions,
) -> Result<LengthDistribution> {
    let n = check_size(tree, opts)?;
    Ok(run_chains(tree, Seed::Pairs, factorial(n)))
}

/// Law of `(W_2, ..., W_n)` conditioned on the first sampled leaf being
/// `mark`; counts sum to `(n-1)!`.
pub fn marked_distribution(tree: &WeightedTree, mark: &str) -> Result<LengthDistribution> {
    marked_distribution_with(tree, mark, &ChainOptions::default())
}

pub fn marked_distribution_with(
    tree: &WeightedTree,
    mark: &str,
    opts: &ChainOptions,
) -> Result<LengthDistribution> {
    let v = tree.vertex_of(mark)?;
    let n = check_size(tree, opts)?;
    let idx = tree
        .leaves()
        .iter()
        .position(|&l| l == v)
        .expect("labelled vertex is a leaf");
    Ok(run_chains(tree, Seed::Leaf(idx), factorial(n - 1)))
}

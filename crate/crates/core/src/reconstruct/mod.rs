//! Recovering a tree, or a law over trees, from a length-sequence
//! distribution when the tree family is known in advance.
//!
//! Every reconstructor consumes a [`LengthDistribution`] (or a statistic
//! derived from one) and never sees the tree that produced it.

mod caterpillar;
mod distances;
mod mixture;
mod signature;
mod simple;
mod splits;
mod ultrametric;

use std::fmt;
use std::str::FromStr;

pub use caterpillar::{
    caterpillar_statistics, caterpillar_statistics_from, detect_caterpillar,
    reconstruct_caterpillar, solve_caterpillar, CaterpillarStatistics,
    DEFAULT_CATERPILLAR_SEARCH_CAP,
};
pub use distances::{general_position_distances, reconstruct_general_position, tree_from_distances};
pub use mixture::{recover_mixture, TreeMixture};
pub use signature::hat_signature;
pub use simple::{reconstruct_small_n, reconstruct_star};
pub use splits::{reconstruct_k_ary, reconstruct_k_valent};
pub use ultrametric::{
    reconstruct_ultrametric, reconstruct_ultrametric_from, ultrametric_diagnostics,
    UltrametricDiagnostics,
};

use crate::error::{Error, Result};
use crate::lengthseq::LengthDistribution;
use crate::tree::{caterpillar, WeightedTree};

/// A tree family known a priori.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TreeClass {
    Star,
    SmallN,
    GeneralPosition,
    Ultrametric,
    Caterpillar,
    /// `(k+1)`-valent combinatorial trees.
    KValent(usize),
    /// Rooted `k`-ary combinatorial trees.
    KAry(usize),
    /// Simple combinatorial trees (recovered through hat weights).
    CombinatorialHat,
}

impl TreeClass {
    /// Builds a class from its name; `k` is used by the parametrised classes.
    pub fn from_name(name: &str, k: usize) -> Result<Self> {
        let name = name.trim().to_ascii_lowercase().replace('-', "_");
        Ok(match name.as_str() {
            "star" => TreeClass::Star,
            "small_n" | "small" => TreeClass::SmallN,
            "general_position" | "gp" => TreeClass::GeneralPosition,
            "ultrametric" => TreeClass::Ultrametric,
            "caterpillar" => TreeClass::Caterpillar,
            "k_valent" | "valent" => TreeClass::KValent(k),
            "k_ary" | "ary" => TreeClass::KAry(k),
            "combinatorial_hat" | "simple_combinatorial" | "simple" => TreeClass::CombinatorialHat,
            _ => return Err(Error::parse(0, format!("unknown tree class `{name}`"))),
        })
    }

    pub fn k(&self) -> Option<usize> {
        match *self {
            TreeClass::KValent(k) | TreeClass::KAry(k) => Some(k),
            _ => None,
        }
    }
}

impl fmt::Display for TreeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeClass::Star => f.write_str("star"),
            TreeClass::SmallN => f.write_str("small_n"),
            TreeClass::GeneralPosition => f.write_str("general_position"),
            TreeClass::Ultrametric => f.write_str("ultrametric"),
            TreeClass::Caterpillar => f.write_str("caterpillar"),
            TreeClass::KValent(k) => write!(f, "k_valent({k})"),
            TreeClass::KAry(k) => write!(f, "k_ary({k})"),
            TreeClass::CombinatorialHat => f.write_str("combinatorial_hat"),
        }
    }
}

impl FromStr for TreeClass {
    type Err = Error;

    /// Accepts the [`Display`](fmt::Display) forms; `k_valent` and `k_ary`
    /// without a parameter default to `k = 2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((name, rest)) = s.split_once('(') {
            let k = rest
                .strip_suffix(')')
                .and_then(|k| k.trim().parse().ok())
                .ok_or_else(|| Error::parse(name.len(), format!("bad class parameter in `{s}`")))?;
            return TreeClass::from_name(name, k);
        }
        TreeClass::from_name(s, 2)
    }
}

/// Runs the reconstructor for `class`.
///
/// Caterpillars come back as the combinatorial caterpillar of the recovered
/// composition; hat-weighted classes come back combinatorial.
pub fn reconstruct(dist: &LengthDistribution, class: TreeClass) -> Result<WeightedTree> {
    match class {
        TreeClass::Star => reconstruct_star(dist),
        TreeClass::SmallN => reconstruct_small_n(dist),
        TreeClass::GeneralPosition => reconstruct_general_position(dist),
        TreeClass::Ultrametric => reconstruct_ultrametric_from(dist),
        TreeClass::Caterpillar => caterpillar(&reconstruct_caterpillar(dist)?),
        TreeClass::KValent(k) => reconstruct_k_valent(dist, k),
        TreeClass::KAry(k) => reconstruct_k_ary(dist, k),
        TreeClass::CombinatorialHat => Ok(reconstruct_ultrametric_from(dist)?.combinatorial()),
    }
}

//! Shared fixtures for the benchmarks.

use treelen::classgen::{random_tree, WeightScheme};
use treelen::tree::caterpillar;
use treelen::{TreeClass, WeightedTree};

/// Random general-position tree with `n` leaves (seed fixed).
pub fn general_position(n: usize) -> WeightedTree {
    random_tree(TreeClass::GeneralPosition, n, 17, WeightScheme::GeneralPosition)
        .expect("valid generator arguments")
}

/// Random ultrametric tree with `n` leaves (seed fixed).
pub fn ultrametric(n: usize) -> WeightedTree {
    random_tree(TreeClass::Ultrametric, n, 17, WeightScheme::Ultrametric)
        .expect("valid generator arguments")
}

/// Combinatorial caterpillar with the given composition.
pub fn spine(composition: &[usize]) -> WeightedTree {
    caterpillar(composition).expect("valid composition")
}

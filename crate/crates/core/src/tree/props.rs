use std::collections::HashSet;

use num_traits::One;

use super::metrics::distance_matrix;
use super::{Mark, WeightedTree};
use crate::error::{Error, Result};
use crate::rational::{common_denominator, scaled};

pub const DEFAULT_GENERAL_POSITION_EDGE_CAP: usize = 20;

/// No vertex has degree two.
pub fn is_simple(tree: &WeightedTree) -> bool {
    (0..tree.n_vertices()).all(|v| tree.degree(v) != 2)
}

/// Every edge has weight one.
pub fn is_combinatorial(tree: &WeightedTree) -> bool {
    tree.edges().iter().all(|e| e.weight.is_one())
}

/// Every vertex has degree `k + 1` or one (and there is at least one edge).
pub fn is_k_valent(tree: &WeightedTree, k: usize) -> bool {
    tree.n_vertices() >= 2
        && (0..tree.n_vertices()).all(|v| tree.degree(v) == 1 || tree.degree(v) == k + 1)
}

/// Rooted tree whose root has degree `k` and whose other vertices have
/// degree `k + 1` or one. The one-vertex rooted tree qualifies.
pub fn is_k_ary(tree: &WeightedTree, k: usize) -> bool {
    let Mark::Root(root) = tree.mark() else {
        return false;
    };
    if tree.n_vertices() == 1 {
        return true;
    }
    tree.degree(root) == k
        && (0..tree.n_vertices())
            .filter(|&v| v != root)
            .all(|v| tree.degree(v) == 1 || tree.degree(v) == k + 1)
}

/// Leaf counts `(n_0, ..., n_l)` along the spine when deleting the leaves
/// leaves a non-empty path; `None` otherwise. The orientation starts at the
/// end whose reading is lexicographically smaller.
pub fn is_caterpillar_structural(tree: &WeightedTree) -> Option<Vec<usize>> {
    let nv = tree.n_vertices();
    let interior: Vec<usize> = (0..nv).filter(|&v| !tree.is_leaf(v)).collect();
    if interior.is_empty() {
        return None;
    }
    let inner_degree = |v: usize| {
        tree.neighbors(v)
            .iter()
            .filter(|&&(w, _)| !tree.is_leaf(w))
            .count()
    };
    if interior.iter().any(|&v| inner_degree(v) > 2) {
        return None;
    }
    let start = *interior
        .iter()
        .find(|&&v| inner_degree(v) <= 1)
        .expect("interior of a tree is a tree");
    let mut spine = vec![start];
    let mut prev = usize::MAX;
    let mut cur = start;
    loop {
        let next = tree
            .neighbors(cur)
            .iter()
            .map(|&(w, _)| w)
            .find(|&w| w != prev && !tree.is_leaf(w));
        match next {
            Some(w) => {
                prev = cur;
                cur = w;
                spine.push(w);
            }
            None => break,
        }
    }
    let comp: Vec<usize> = spine
        .iter()
        .map(|&v| tree.neighbors(v).iter().filter(|&&(w, _)| tree.is_leaf(w)).count())
        .collect();
    let rev: Vec<usize> = comp.iter().rev().copied().collect();
    Some(comp.min(rev))
}

/// Three-point condition on the leaf metric.
pub fn is_ultrametric(tree: &WeightedTree) -> bool {
    distance_matrix(tree).is_ultrametric()
}

/// All `2^|E|` edge-subset sums are distinct; default edge cap.
pub fn is_general_position(tree: &WeightedTree) -> Result<bool> {
    is_general_position_capped(tree, DEFAULT_GENERAL_POSITION_EDGE_CAP)
}

pub fn is_general_position_capped(tree: &WeightedTree, cap: usize) -> Result<bool> {
    let m = tree.edges().len();
    if m > cap || m >= 63 {
        return Err(Error::Infeasible(format!(
            "general-position check over {m} edges exceeds the cap of {cap}"
        )));
    }
    let scale = common_denominator(tree.edges().iter().map(|e| &e.weight));
    let w: Vec<i64> = tree.edges().iter().map(|e| scaled(&e.weight, scale)).collect();
    let mut sums = vec![0i64; 1 << m];
    let mut seen = HashSet::with_capacity(1 << m);
    seen.insert(0i64);
    for mask in 1usize..(1 << m) {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] + w[low];
        if !seen.insert(sums[mask]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use crate::tree::{caterpillar, parse_tree, star};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn simplicity_and_valence() {
        let q = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap();
        assert!(is_simple(&q));
        assert!(is_k_valent(&q, 2));
        assert!(!is_k_valent(&q, 3));
        assert!(is_combinatorial(&q));
        let path = parse_tree("(a:1,b:1);").unwrap();
        assert!(!is_simple(&path));
        let rooted = parse_tree("(a:1,(b:1,c:1):1);@root").unwrap();
        assert!(is_k_ary(&rooted, 2));
        assert!(!is_k_ary(&rooted.unmarked(), 2));
        assert!(is_k_ary(&parse_tree("a;@root").unwrap(), 2));
    }

    #[test]
    fn caterpillar_detection() {
        let t = caterpillar(&[2, 11, 12]).unwrap();
        assert_eq!(is_caterpillar_structural(&t), Some(vec![2, 11, 12]));
        let t = caterpillar(&[3, 0, 1]).unwrap();
        assert_eq!(is_caterpillar_structural(&t), Some(vec![1, 0, 3]));
        let s = star(&[r(1); 4]).unwrap();
        assert_eq!(is_caterpillar_structural(&s), Some(vec![4]));
        let spider = parse_tree("((a:1):1,(b:1):1,(c:1):1);").unwrap();
        assert_eq!(is_caterpillar_structural(&spider), None);
        let edge = parse_tree("(a:1)b;").unwrap();
        assert_eq!(is_caterpillar_structural(&edge), None);
    }

    #[test]
    fn ultrametric_examples() {
        assert!(is_ultrametric(&parse_tree("(a:1)b;").unwrap()));
        assert!(is_ultrametric(&star(&[r(1); 3]).unwrap()));
        let q = parse_tree("((a:1,b:2):1,(c:4,d:8):1);").unwrap();
        // d(a,b) = 3, d(a,c) = 7, d(b,c) = 8 > max(3, 7).
        assert!(!is_ultrametric(&q));
    }

    #[test]
    fn general_position_examples() {
        let t = star(&[r(1), r(2), r(4)]).unwrap();
        assert!(is_general_position(&t).unwrap());
        let t = star(&[r(1), r(2), r(3)]).unwrap();
        assert!(!is_general_position(&t).unwrap());
        let q = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap();
        assert!(!is_general_position(&q).unwrap());
        let big = star(&vec![r(1); 21]).unwrap();
        assert!(matches!(is_general_position(&big), Err(Error::Infeasible(_))));
    }
}

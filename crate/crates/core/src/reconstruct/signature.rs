use crate::error::{Error, Result};
use crate::lengthseq::{exact_distribution_with, ChainOptions, LengthSequence, HARD_MAX_LEAVES};
use crate::tree::{hat_weights, is_combinatorial, is_simple, Mark, WeightedTree};

/// Isomorphism invariant of a simple combinatorial tree: root it at a
/// center, apply hat weights, and take the lexicographically least length
/// sequence. With two centers the smaller of the two results is used.
pub fn hat_signature(tree: &WeightedTree) -> Result<LengthSequence> {
    if !is_simple(tree) || !is_combinatorial(tree) {
        return Err(Error::class("hat-signature", "tree is not simple and combinatorial"));
    }
    let opts = ChainOptions {
        max_leaves: HARD_MAX_LEAVES,
    };
    if tree.n_leaves() == 2 {
        return Ok(exact_distribution_with(tree, &opts)?.min_lex());
    }
    let mut best: Option<LengthSequence> = None;
    for c in tree.centers() {
        let hat = hat_weights(&tree.with_mark(Mark::Root(c))?)?;
        let s = exact_distribution_with(&hat, &opts)?.min_lex();
        if best.as_ref().is_none_or(|b| s < *b) {
            best = Some(s);
        }
    }
    Ok(best.expect("a tree has at least one center"))
}

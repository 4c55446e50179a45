use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lengthseq::{exact_distribution_with, ChainOptions, LengthDistribution, DEFAULT_MAX_LEAVES};
use crate::rational::{Probability, Rational};
use crate::tree::{canonical_code, star, TreeBuilder, WeightedTree};

/// Multiset of pendant lengths read off the law of `W_n - W_{n-1}`, sorted.
pub(super) fn pendant_lengths(dist: &LengthDistribution, step: &'static str) -> Result<Vec<Rational>> {
    let n = dist.n();
    let mut out = Vec::with_capacity(n);
    for (len, p) in dist.pendant_increment_law() {
        let mult = p * Probability::from_integer(BigInt::from(n));
        if !mult.is_integer() || len <= Rational::zero() {
            return Err(Error::class(
                step,
                format!("pendant length {len} has probability inconsistent with {n} leaves"),
            ));
        }
        let mult = mult.to_integer().to_usize().expect("bounded by n");
        out.extend(std::iter::repeat_n(len, mult));
    }
    Ok(out)
}

/// The single value of `W_k`, or a class violation naming `step`.
pub(super) fn constant_coordinate(
    dist: &LengthDistribution,
    k: usize,
    step: &'static str,
) -> Result<Rational> {
    let law = dist.marginal(k)?;
    match law.len() {
        1 => Ok(*law.keys().next().expect("one point")),
        _ => Err(Error::class(step, format!("W_{k} is not almost surely constant"))),
    }
}

/// Forward-checks a candidate against the input law when enumeration is cheap.
pub(super) fn verify(dist: &LengthDistribution, tree: &WeightedTree, step: &'static str) -> Result<()> {
    if dist.n() > DEFAULT_MAX_LEAVES {
        return Ok(());
    }
    let forward = exact_distribution_with(tree, &ChainOptions { max_leaves: dist.n() })?;
    if forward.same_law(dist) {
        Ok(())
    } else {
        Err(Error::class(step, "reconstructed tree does not reproduce the distribution"))
    }
}

/// Star whose pendant lengths are the atoms of `W_n - W_{n-1}`, each with
/// multiplicity `n P{W_n - W_{n-1} = l}`.
pub fn reconstruct_star(dist: &LengthDistribution) -> Result<WeightedTree> {
    let n = dist.n();
    if n < 3 {
        return Err(Error::Precondition(format!("a star needs at least 3 leaves, got {n}")));
    }
    let lengths = pendant_lengths(dist, "star-pendants")?;
    let total = constant_coordinate(dist, n, "star-total")?;
    let sum: Rational = lengths.iter().sum();
    if sum != total {
        return Err(Error::class(
            "star-total",
            format!("pendant lengths sum to {sum} but W_{n} = {total}"),
        ));
    }
    let tree = star(&lengths)?;
    verify(dist, &tree, "star-verify")?;
    Ok(tree)
}

fn quartet(p: [Rational; 4], e: Rational) -> Result<WeightedTree> {
    let mut b = TreeBuilder::new();
    let u = b.add_vertex();
    let v = b.add_vertex();
    b.add_edge(u, v, e);
    b.add_child_leaf(u, "x1", p[0]);
    b.add_child_leaf(u, "x2", p[1]);
    b.add_child_leaf(v, "x3", p[2]);
    b.add_child_leaf(v, "x4", p[3]);
    b.build()
}

/// `W_2` law of the quartet whose cherries are `pairing` (indices into `p`).
fn quartet_pair_law(
    p: &[Rational; 4],
    e: Rational,
    pairing: [[usize; 2]; 2],
) -> BTreeMap<Rational, Probability> {
    let side = |i: usize| usize::from(!pairing[0].contains(&i));
    let mut law: BTreeMap<Rational, Probability> = BTreeMap::new();
    let sixth = Probability::new(BigInt::one(), BigInt::from(6));
    for i in 0..4 {
        for j in i + 1..4 {
            let d = p[i] + p[j] + if side(i) == side(j) { Rational::zero() } else { e };
            *law.entry(d).or_insert_with(Probability::zero) += sixth.clone();
        }
    }
    law
}

/// Reconstruction for simple trees with two to four leaves.
///
/// For four leaves: pendant lengths come from `W_4 - W_3`; the tree is a
/// star when they sum to `W_4`, and otherwise a quartet with interior
/// length `W_4 - sum`. The cherry pairing is the unique one whose predicted
/// `W_2` law matches; several matching shapes are reported as an error.
pub fn reconstruct_small_n(dist: &LengthDistribution) -> Result<WeightedTree> {
    match dist.n() {
        2 => {
            let w = constant_coordinate(dist, 2, "edge-length")?;
            let mut b = TreeBuilder::new();
            let x = b.add_leaf("x1");
            b.add_child_leaf(x, "x2", w);
            b.build()
        }
        3 => reconstruct_star(dist),
        4 => {
            let p = pendant_lengths(dist, "quartet-pendants")?;
            let total = constant_coordinate(dist, 4, "quartet-total")?;
            let sum: Rational = p.iter().sum();
            if sum == total {
                let tree = star(&p)?;
                verify(dist, &tree, "quartet-verify")?;
                return Ok(tree);
            }
            let e = total - sum;
            if e <= Rational::zero() {
                return Err(Error::class(
                    "quartet-interior",
                    format!("pendant lengths {sum} exceed the total length {total}"),
                ));
            }
            let p: [Rational; 4] = [p[0], p[1], p[2], p[3]];
            let observed = dist.marginal(2)?;
            let mut seen = BTreeSet::new();
            let mut matches = Vec::new();
            for pairing in [[[0, 1], [2, 3]], [[0, 2], [1, 3]], [[0, 3], [1, 2]]] {
                let order = [pairing[0][0], pairing[0][1], pairing[1][0], pairing[1][1]];
                let candidate = quartet(order.map(|i| p[i]), e)?;
                if !seen.insert(canonical_code(&candidate)) {
                    continue;
                }
                if quartet_pair_law(&p, e, pairing) == observed {
                    matches.push(candidate);
                }
            }
            match matches.len() {
                1 => {
                    let tree = matches.pop().expect("one match");
                    verify(dist, &tree, "quartet-verify")?;
                    Ok(tree)
                }
                0 => Err(Error::class("quartet-pairing", "no cherry pairing matches the W_2 law")),
                m => Err(Error::class(
                    "quartet-pairing",
                    format!("{m} non-isomorphic pairings match the W_2 law"),
                )),
            }
        }
        n => Err(Error::Precondition(format!(
            "small-n reconstruction handles 2 to 4 leaves, got {n}"
        ))),
    }
}

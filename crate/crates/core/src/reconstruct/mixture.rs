use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::classgen::enumerate_class;
use crate::error::{Error, Result};
use crate::lengthseq::{exact_distribution, LengthDistribution, DEFAULT_MAX_LEAVES};
use crate::rational::{Probability, Rational};
use crate::reconstruct::TreeClass;
use crate::splitseq::{
    cmp_planted, cmp_rooted, min_down_split_in_support, min_up_split_in_support, SplitSequence,
};
use crate::tree::{canonical_code, CanonicalCode, WeightedTree};

/// Recovered mixing weights over the isomorphism types of one class.
#[derive(Clone, Debug)]
pub struct TreeMixture {
    pub class: TreeClass,
    pub n: usize,
    /// Positive weights keyed by canonical code.
    pub weights: BTreeMap<CanonicalCode, Probability>,
    /// One representative per key of `weights`.
    pub trees: BTreeMap<CanonicalCode, WeightedTree>,
}

impl TreeMixture {
    pub fn weight(&self, tree: &WeightedTree) -> Probability {
        self.weights
            .get(&canonical_code(tree))
            .cloned()
            .unwrap_or_else(Probability::zero)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// One line per type: `code<TAB>p/q`.
impl fmt::Display for TreeMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (code, p) in &self.weights {
            writeln!(f, "{code}\t{}/{}", p.numer(), p.denom())?;
        }
        Ok(())
    }
}

fn as_rationals(values: &[i64]) -> Vec<Rational> {
    values.iter().map(|&v| Rational::from_integer(v)).collect()
}

/// Mixing weights `x_T` with `dist = sum_T x_T P_T`, over all types of a
/// k-valent or k-ary class with `dist.n()` leaves.
///
/// Types are ordered by their minimal split sequence. The probability of a
/// type's minimal sequence under any other type is zero unless that type
/// comes earlier, so the weights solve a lower-triangular system. The
/// solution is checked for non-negativity and by rebuilding the mixture.
pub fn recover_mixture(dist: &LengthDistribution, class: TreeClass) -> Result<TreeMixture> {
    let n = dist.n();
    let (k, up) = match class {
        TreeClass::KValent(k) => (k, false),
        TreeClass::KAry(k) => (k, true),
        other => {
            return Err(Error::Precondition(format!(
                "mixtures are recovered for k_valent and k_ary classes, not {other}"
            )))
        }
    };
    if n > DEFAULT_MAX_LEAVES {
        return Err(Error::Infeasible(format!(
            "mixture recovery enumerates laws, capped at {DEFAULT_MAX_LEAVES} leaves; got {n}"
        )));
    }
    let types = enumerate_class(class, n)?.items;
    let mut rows: Vec<(WeightedTree, LengthDistribution, SplitSequence)> = types
        .into_par_iter()
        .map(|t| {
            let law = exact_distribution(&t)?;
            let split = if up {
                min_up_split_in_support(&law, k)
            } else {
                min_down_split_in_support(&law, k)
            }
            .ok_or_else(|| Error::Inconsistent("a class member has no split sequence".into()))?;
            Ok((t, law, split))
        })
        .collect::<Result<_>>()?;
    if up {
        let keys: Vec<_> = rows.iter().map(|r| r.2.rooted()).collect::<Result<_>>()?;
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        idx.sort_by(|&a, &b| cmp_rooted(&keys[a], &keys[b]));
        rows = reorder(rows, &idx);
    } else {
        let keys: Vec<_> = rows.iter().map(|r| r.2.planted()).collect::<Result<_>>()?;
        let mut idx: Vec<usize> = (0..rows.len()).collect();
        idx.sort_by(|&a, &b| cmp_planted(&keys[a], &keys[b]));
        rows = reorder(rows, &idx);
    }
    let points: Vec<Vec<Rational>> = rows
        .iter()
        .map(|(_, _, s)| {
            let v = s.values();
            as_rationals(if up { &v[1..] } else { v })
        })
        .collect();

    let mut x: Vec<Probability> = Vec::with_capacity(rows.len());
    for (i, point) in points.iter().enumerate() {
        let mut rhs = dist.probability(point);
        for (j, xj) in x.iter().enumerate() {
            rhs -= xj * rows[j].1.probability(point);
        }
        let diag = rows[i].1.probability(point);
        let xi = rhs / diag;
        if xi < Probability::zero() {
            return Err(Error::NotInModel(format!(
                "weight of type {i} would be negative ({xi})"
            )));
        }
        x.push(xi);
    }
    let sum: Probability = x.iter().sum();
    if sum != Probability::one() {
        return Err(Error::NotInModel(format!("recovered weights sum to {sum}")));
    }
    let parts: Vec<(Probability, &LengthDistribution)> =
        x.iter().cloned().zip(rows.iter().map(|r| &r.1)).collect();
    if !LengthDistribution::mix(&parts)?.same_law(dist) {
        return Err(Error::NotInModel(
            "the recovered weights do not reproduce the distribution".into(),
        ));
    }
    let mut weights = BTreeMap::new();
    let mut trees = BTreeMap::new();
    for (xi, (t, _, _)) in x.into_iter().zip(rows) {
        if !xi.is_zero() {
            let code = canonical_code(&t);
            weights.insert(code.clone(), xi);
            trees.insert(code, t);
        }
    }
    Ok(TreeMixture {
        class,
        n,
        weights,
        trees,
    })
}

fn reorder<T>(items: Vec<T>, idx: &[usize]) -> Vec<T> {
    let mut slots: Vec<Option<T>> = items.into_iter().map(Some).collect();
    idx.iter()
        .map(|&i| slots[i].take().expect("permutation"))
        .collect()
}

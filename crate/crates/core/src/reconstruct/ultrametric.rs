use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lengthseq::LengthDistribution;
use crate::rational::{binomial, Probability, Rational};
use crate::tree::{Edge, Mark, WeightedTree};

/// Ultrametric real tree grown one leaf at a time; heights are measured up
/// from the leaves.
struct Dendrogram {
    parent: Vec<Option<usize>>,
    height: Vec<Rational>,
    leaf: Vec<bool>,
    root: usize,
}

impl Dendrogram {
    fn add(&mut self, height: Rational, leaf: bool, parent: Option<usize>) -> usize {
        self.parent.push(parent);
        self.height.push(height);
        self.leaf.push(leaf);
        self.parent.len() - 1
    }

    /// Point at height `h` on the arc from `x` up to the root, creating a
    /// vertex there if needed.
    fn point_above(&mut self, x: usize, h: Rational) -> usize {
        let mut cur = x;
        loop {
            let p = self.parent[cur].expect("the root is higher than h");
            if self.height[p] == h {
                return p;
            }
            if self.height[p] > h {
                let mid = self.add(h, false, Some(p));
                self.parent[cur] = Some(mid);
                return mid;
            }
            cur = p;
        }
    }
}

/// Ultrametric tree from the lexicographically minimal length sequence.
///
/// Starting from two leaves below a root at height `l_2 / 2`, leaf `k+1`
/// either sits under a new root at height `(d + h_k) / 2` when the increment
/// `d = l_{k+1} - l_k` is at least the current height `h_k`, or hangs at
/// height `d` from the arc joining the root to leaf `k`. A degree-two root
/// is suppressed; leaves are labelled `x1..xn` in sequence order.
pub fn reconstruct_ultrametric(minseq: &[Rational]) -> Result<WeightedTree> {
    let Some(&l2) = minseq.first() else {
        return Err(Error::Precondition("empty length sequence".into()));
    };
    if l2 <= Rational::zero() {
        return Err(Error::class("ultrametric-start", format!("W_2 = {l2} is not positive")));
    }
    let two = Rational::from_integer(2);
    let mut t = Dendrogram {
        parent: Vec::new(),
        height: Vec::new(),
        leaf: Vec::new(),
        root: 0,
    };
    let root = t.add(l2 / two, false, None);
    t.root = root;
    t.add(Rational::zero(), true, Some(root));
    let mut last = t.add(Rational::zero(), true, Some(root));
    for (k, w) in minseq.windows(2).enumerate() {
        let d = w[1] - w[0];
        if d <= Rational::zero() {
            return Err(Error::class(
                "ultrametric-increment",
                format!("W_{} - W_{} = {d} is not positive", k + 3, k + 2),
            ));
        }
        let h = t.height[t.root];
        let at = if d > h {
            let new_root = t.add((d + h) / two, false, None);
            t.parent[t.root] = Some(new_root);
            t.root = new_root;
            new_root
        } else if d == h {
            t.root
        } else {
            t.point_above(last, d)
        };
        last = t.add(Rational::zero(), true, Some(at));
    }
    let nv = t.parent.len();
    let mut children = vec![0usize; nv];
    for p in t.parent.iter().flatten() {
        children[*p] += 1;
    }
    let skip = (children[t.root] == 2).then_some(t.root);
    let mut labels = Vec::with_capacity(nv);
    let mut id = vec![usize::MAX; nv];
    let mut next_leaf = 0;
    for v in (0..nv).filter(|&v| Some(v) != skip) {
        id[v] = labels.len();
        labels.push(t.leaf[v].then(|| {
            next_leaf += 1;
            format!("x{next_leaf}")
        }));
    }
    let mut edges = Vec::with_capacity(nv);
    let mut root_kids = Vec::new();
    for v in 0..nv {
        let Some(p) = t.parent[v] else { continue };
        let weight = t.height[p] - t.height[v];
        if Some(p) == skip {
            root_kids.push((id[v], weight));
        } else {
            edges.push(Edge { u: id[p], v: id[v], weight });
        }
    }
    if let [(a, wa), (c, wc)] = root_kids[..] {
        edges.push(Edge { u: a, v: c, weight: wa + wc });
    }
    WeightedTree::from_parts(labels, edges, Mark::None)
}

/// Convenience wrapper taking the full law and using its minimal point.
pub fn reconstruct_ultrametric_from(dist: &LengthDistribution) -> Result<WeightedTree> {
    reconstruct_ultrametric(&dist.min_lex())
}

/// Quantities read off the law around the deepest leaves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltrametricDiagnostics {
    /// Half the largest leaf-to-leaf distance.
    pub r_star: Rational,
    /// Largest `j` with `P{W_2 = 2r*, ..., W_j = j r*} > 0`.
    pub ell: usize,
    /// `(j, p_j)` for `2 <= j <= ell`: normalised elementary symmetric
    /// values of the deepest-group sizes.
    pub p_values: Vec<(usize, Probability)>,
}

pub fn ultrametric_diagnostics(dist: &LengthDistribution) -> UltrametricDiagnostics {
    let n = dist.n();
    let w2 = dist.marginal(2).expect("n >= 2");
    let r_star = *w2.keys().next_back().expect("non-empty support") / Rational::from_integer(2);
    let at = |j: usize| r_star * Rational::from_integer(j as i64);
    let mut probs: Vec<(usize, Probability)> = Vec::new();
    for j in 2..=n {
        let p = dist.probability_where(|s| (2..=j).all(|i| s[i - 2] == at(i)));
        if p.is_zero() {
            break;
        }
        probs.push((j, p));
    }
    let ell = probs.last().map_or(1, |&(j, _)| j);
    let p_values = probs
        .into_iter()
        .map(|(j, p)| {
            let falling: BigInt = (0..j).map(|i| BigInt::from(n - i)).product();
            let fact: BigInt = (1..=j).map(BigInt::from).product();
            let scale = Probability::new(falling, fact * BigInt::from(binomial(ell, j)));
            (j, p * scale)
        })
        .collect();
    UltrametricDiagnostics {
        r_star,
        ell,
        p_values,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengthseq::exact_distribution;
    use crate::rational::big_ratio;
    use crate::tree::{distance_matrix, is_isomorphic, is_ultrametric, parse_tree, star};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn three_leaf_example() {
        let t = reconstruct_ultrametric(&[r(2), r(5)]).unwrap();
        assert_eq!(t.n_leaves(), 3);
        let dm = distance_matrix(&t);
        let mut d = vec![dm.get(0, 1), dm.get(0, 2), dm.get(1, 2)];
        d.sort();
        assert_eq!(d, vec![r(2), r(4), r(4)]);
        assert!(is_ultrametric(&t));
        let forward = exact_distribution(&t).unwrap();
        assert_eq!(forward.min_lex(), vec![r(2), r(5)]);
    }

    #[test]
    fn unit_star_and_degenerate_sequences() {
        let t = reconstruct_ultrametric(&[r(2), r(3)]).unwrap();
        assert!(is_isomorphic(&t, &star(&[r(1); 3]).unwrap()));
        assert!(reconstruct_ultrametric(&[r(2), r(2)]).is_err());
        assert!(reconstruct_ultrametric(&[r(0)]).is_err());
        assert!(reconstruct_ultrametric(&[]).is_err());
    }

    #[test]
    fn round_trips_on_handmade_trees() {
        for text in [
            "((a:1,b:1):2,c:3);",
            "((a:1,b:1):1,(c:1,d:1):1);",
            "(((a:1,b:1):1,c:2):1,d:3,e:3);",
            "((a:1/2,b:1/2,c:1/2):3/2,(d:3/2,e:3/2):1/2);",
        ] {
            let t = parse_tree(text).unwrap();
            let t = crate::tree::subtree_restriction(&t, &t.leaf_labels(), true).unwrap();
            assert!(is_ultrametric(&t), "{text}");
            let back = reconstruct_ultrametric_from(&exact_distribution(&t).unwrap()).unwrap();
            assert!(is_isomorphic(&back, &t), "{text}");
        }
    }

    #[test]
    fn diagnostics_on_a_unit_star() {
        let d = exact_distribution(&star(&[r(1); 3]).unwrap()).unwrap();
        let diag = ultrametric_diagnostics(&d);
        assert_eq!(diag.r_star, r(1));
        assert_eq!(diag.ell, 3);
        assert_eq!(diag.p_values, vec![(2, big_ratio(1, 1)), (3, big_ratio(1, 1))]);
    }

    #[test]
    fn diagnostics_count_deepest_groups() {
        // root children: a cherry of depth 2 and a leaf of depth 2, plus a
        // shallow leaf; deepest groups have sizes 2 and 1.
        let t = parse_tree("((a:1,b:1):1,c:2,d:1);").unwrap();
        let diag = ultrametric_diagnostics(&exact_distribution(&t).unwrap());
        assert_eq!(diag.r_star, r(2));
        assert_eq!(diag.ell, 2);
        // p_2 = n_1 n_2 / binom(2,2) = 2
        assert_eq!(diag.p_values, vec![(2, big_ratio(2, 1))]);
        // a binary ultrametric tree has exactly two deepest groups
        let t = parse_tree("((a:1,b:1):1,(c:1,d:1):1);").unwrap();
        let diag = ultrametric_diagnostics(&exact_distribution(&t).unwrap());
        assert_eq!(diag.ell, 2);
        assert_eq!(diag.p_values, vec![(2, big_ratio(4, 1))]);
    }
}

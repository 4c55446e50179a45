use std::collections::BTreeMap;

use num_traits::Zero;

use super::simple::{constant_coordinate, pendant_lengths, reconstruct_small_n, verify};
use crate::error::{Error, Result};
use crate::lengthseq::{Constraint, LengthDistribution};
use crate::rational::{binomial, big_ratio, Probability, Rational};
use crate::tree::{DistanceMatrix, TreeBuilder, WeightedTree};

/// Mutable tree used while inserting leaves one at a time.
struct Growing {
    adj: Vec<Vec<(usize, Rational)>>,
}

impl Growing {
    fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    fn connect(&mut self, u: usize, v: usize, w: Rational) {
        self.adj[u].push((v, w));
        self.adj[v].push((u, w));
    }

    fn disconnect(&mut self, u: usize, v: usize) {
        self.adj[u].retain(|&(x, _)| x != v);
        self.adj[v].retain(|&(x, _)| x != u);
    }

    /// Vertices along the path from `a` to `b`, each with the weight of the
    /// edge towards `b`.
    fn path(&self, a: usize, b: usize) -> Vec<(usize, Rational)> {
        let mut parent: Vec<Option<(usize, Rational)>> = vec![None; self.adj.len()];
        let mut seen = vec![false; self.adj.len()];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(x) = stack.pop() {
            for &(y, w) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some((x, w));
                    stack.push(y);
                }
            }
        }
        let mut out = vec![(b, Rational::zero())];
        let mut cur = b;
        while let Some((p, w)) = parent[cur] {
            out.push((p, w));
            cur = p;
        }
        out.reverse();
        out
    }
}

/// The unique simple edge-weighted tree realising a tree metric.
///
/// Leaves are inserted one at a time: the new leaf hangs off the path
/// between the two placed leaves minimising its Gromov product, at the
/// point fixed by the three distances. The result is checked against every
/// entry of `dm`.
pub fn tree_from_distances(dm: &DistanceMatrix) -> Result<WeightedTree> {
    let n = dm.len();
    if n < 2 {
        return Err(Error::Precondition("a tree metric needs at least two leaves".into()));
    }
    if !dm.satisfies_four_point() {
        return Err(Error::NotATreeMetric("four-point condition fails".into()));
    }
    let two = Rational::from_integer(2);
    let mut g = Growing { adj: Vec::new() };
    let leaf: Vec<usize> = (0..n).map(|_| g.add_vertex()).collect();
    if dm.get(0, 1) <= Rational::zero() {
        return Err(Error::NotATreeMetric("zero distance between distinct leaves".into()));
    }
    g.connect(leaf[0], leaf[1], dm.get(0, 1));
    for k in 2..n {
        let mut best: Option<(Rational, usize, usize)> = None;
        for i in 0..k {
            for j in i + 1..k {
                let gp = (dm.get(i, k) + dm.get(j, k) - dm.get(i, j)) / two;
                if best.is_none_or(|(b, _, _)| gp < b) {
                    best = Some((gp, i, j));
                }
            }
        }
        let (pendant, i, j) = best.expect("at least one placed pair");
        if pendant <= Rational::zero() {
            return Err(Error::NotATreeMetric(format!(
                "leaf `{}` would have a non-positive pendant edge",
                dm.labels()[k]
            )));
        }
        let mut along = dm.get(i, k) - pendant;
        let path = g.path(leaf[i], leaf[j]);
        let mut attach = None;
        for w in path.windows(2) {
            let ((x, len), (y, _)) = (w[0], w[1]);
            if along.is_zero() {
                attach = Some(x);
                break;
            }
            if along < len {
                let mid = g.add_vertex();
                g.disconnect(x, y);
                g.connect(x, mid, along);
                g.connect(mid, y, len - along);
                attach = Some(mid);
                break;
            }
            along -= len;
        }
        let at = attach.ok_or_else(|| {
            Error::NotATreeMetric(format!("leaf `{}` attaches beyond a leaf", dm.labels()[k]))
        })?;
        if at == leaf[i] || at == leaf[j] {
            return Err(Error::NotATreeMetric(format!(
                "leaf `{}` attaches at another leaf",
                dm.labels()[k]
            )));
        }
        g.connect(at, leaf[k], pendant);
    }
    let mut b = TreeBuilder::new();
    for v in 0..g.adj.len() {
        if v < n {
            b.add_leaf(dm.labels()[v].clone());
        } else {
            b.add_vertex();
        }
    }
    for u in 0..g.adj.len() {
        for &(v, w) in &g.adj[u] {
            if u < v {
                b.add_edge(u, v, w);
            }
        }
    }
    let tree = b.build()?;
    let back = crate::tree::distance_matrix(&tree);
    for a in 0..n {
        for c in 0..n {
            let (ia, ic) = (back.index_of(&dm.labels()[a])?, back.index_of(&dm.labels()[c])?);
            if back.get(ia, ic) != dm.get(a, c) {
                return Err(Error::NotATreeMetric(format!(
                    "distance between `{}` and `{}` is not realised",
                    dm.labels()[a],
                    dm.labels()[c]
                )));
            }
        }
    }
    Ok(tree)
}

fn atoms_with_probability(
    law: &BTreeMap<Rational, Probability>,
    count: u128,
    step: &'static str,
) -> Result<Vec<Rational>> {
    let expected = big_ratio(1, count);
    if law.len() as u128 != count || law.values().any(|p| *p != expected) {
        return Err(Error::class(
            step,
            format!("expected {count} equiprobable atoms, found {}", law.len()),
        ));
    }
    Ok(law.keys().copied().collect())
}

/// Leaf-to-leaf distances recovered from the law of a simple tree in
/// general position (`n >= 4`). Leaves are named `x1..xn`: `x1, x2` is a
/// cherry and `x3..xn` are sorted by distance to the cherry's vertex.
pub fn general_position_distances(dist: &LengthDistribution) -> Result<DistanceMatrix> {
    let n = dist.n();
    if n < 4 {
        return Err(Error::Precondition(format!(
            "distance recovery needs at least 4 leaves, got {n}"
        )));
    }
    let c = pendant_lengths(dist, "pendant-set")?;
    if c.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::class("pendant-set", "pendant lengths are not distinct"));
    }
    constant_coordinate(dist, n, "total-length")?;
    let w2 = dist.marginal(2)?;
    let pair_prob = big_ratio(1, binomial(n, 2));
    let mut sibling = None;
    'outer: for (a, &la) in c.iter().enumerate() {
        for &lb in &c[a + 1..] {
            if let Some(p) = w2.get(&(la + lb)) {
                if *p != pair_prob {
                    return Err(Error::class(
                        "sibling-pair",
                        format!("P{{W_2 = {}}} = {p}, expected {pair_prob}", la + lb),
                    ));
                }
                sibling = Some((la, lb));
                break 'outer;
            }
        }
    }
    let (l1, l2) = sibling
        .ok_or_else(|| Error::class("sibling-pair", "no pair of pendant lengths is a cherry"))?;
    let given = dist.conditional(&[Constraint::Equals { k: 2, value: l1 + l2 }])?;
    let d_law = given.pushforward(|s| LengthDistribution::coordinate(s, 3) - LengthDistribution::coordinate(s, 2));
    let d = atoms_with_probability(&d_law, (n - 2) as u128, "third-leaf-set")?;
    let e_law = given.marginal(4)?;
    let e_set = atoms_with_probability(&e_law, binomial(n - 2, 2), "fourth-length-set")?;

    let index_of = |len: Rational| d.iter().position(|&x| x == len);
    let mut r = vec![vec![None::<Rational>; n - 2]; n - 2];
    for w4 in e_set {
        let both = given.conditional(&[Constraint::Equals { k: 4, value: w4 }])?;
        let steps = both.pushforward(|s| {
            let w2 = LengthDistribution::coordinate(s, 2);
            let w3 = LengthDistribution::coordinate(s, 3);
            (w3 - w2, LengthDistribution::coordinate(s, 4) - w3)
        });
        let half = big_ratio(1, 2);
        let pts: Vec<(Rational, Rational)> = steps.keys().copied().collect();
        if pts.len() != 2 || steps.values().any(|p| *p != half) {
            return Err(Error::class(
                "pair-identification",
                format!("W_4 = {w4} does not split into two equally likely orders"),
            ));
        }
        let ((li, dj), (lj, di)) = (pts[0], pts[1]);
        let e = lj - dj;
        if e != li - di || e < Rational::zero() {
            return Err(Error::class(
                "pair-identification",
                format!("W_4 = {w4} gives inconsistent offsets"),
            ));
        }
        let (Some(i), Some(j)) = (index_of(li), index_of(lj)) else {
            return Err(Error::class("pair-identification", "step length outside the third-leaf set"));
        };
        if i == j || r[i][j].is_some() {
            return Err(Error::class("pair-identification", "leaf pair identified twice"));
        }
        let dist_ij = li + lj - e - e;
        r[i][j] = Some(dist_ij);
        r[j][i] = Some(dist_ij);
    }
    let labels: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    let mut m = vec![vec![Rational::zero(); n]; n];
    m[0][1] = l1 + l2;
    m[1][0] = l1 + l2;
    for (k, &lk) in d.iter().enumerate() {
        m[0][k + 2] = l1 + lk;
        m[k + 2][0] = l1 + lk;
        m[1][k + 2] = l2 + lk;
        m[k + 2][1] = l2 + lk;
        for (j, rj) in r[k].iter().enumerate() {
            if j != k {
                m[k + 2][j + 2] = rj.ok_or_else(|| {
                    Error::class("pair-identification", "some leaf pair was never identified")
                })?;
            }
        }
    }
    DistanceMatrix::new(labels, m)
}

/// Reconstruction for simple trees whose edge weights are in general
/// position; fewer than four leaves are delegated to the small-tree case.
pub fn reconstruct_general_position(dist: &LengthDistribution) -> Result<WeightedTree> {
    if dist.n() < 4 {
        return reconstruct_small_n(dist);
    }
    let dm = general_position_distances(dist)?;
    let tree = tree_from_distances(&dm).map_err(|e| match e {
        Error::NotATreeMetric(msg) => Error::class("tree-metric", msg),
        other => other,
    })?;
    verify(dist, &tree, "general-position-verify")?;
    Ok(tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengthseq::exact_distribution;
    use crate::rational::big_ratio;
    use crate::tree::{distance_matrix, is_isomorphic, parse_tree};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn two_leaves() {
        let dm = DistanceMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![r(0), r(5)], vec![r(5), r(0)]],
        )
        .unwrap();
        let t = tree_from_distances(&dm).unwrap();
        assert_eq!(t.edges().len(), 1);
        assert_eq!(t.edges()[0].weight, r(5));
    }

    #[test]
    fn quartet_weights_come_back_exactly() {
        let q = parse_tree("((a:1,b:2):16,c:4,d:8);").unwrap();
        let t = tree_from_distances(&distance_matrix(&q)).unwrap();
        assert!(is_isomorphic(&t, &q));
        let mut w: Vec<Rational> = t.edges().iter().map(|e| e.weight).collect();
        w.sort();
        assert_eq!(w, vec![r(1), r(2), r(4), r(8), r(16)]);
    }

    #[test]
    fn round_trips_on_assorted_trees() {
        for text in [
            "((a:1/2,b:3):2,(c:1,d:5/3):1/4,e:7);",
            "(a:1,b:2,c:3,d:4,e:5);",
            "((a:1,b:1):1,(c:1,d:1):1,(e:1,f:1):1);",
            "(((a:2,b:1):3,c:1/3):1,(d:1,(e:1,f:2,g:3):1):2,h:1);",
        ] {
            let t = parse_tree(text).unwrap();
            let back = tree_from_distances(&distance_matrix(&t)).unwrap();
            assert!(is_isomorphic(&back, &t), "{text}");
        }
    }

    #[test]
    fn non_tree_metrics_are_rejected() {
        let labels: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
        // four-cycle metric
        let d = vec![
            vec![r(0), r(1), r(2), r(1)],
            vec![r(1), r(0), r(1), r(2)],
            vec![r(2), r(1), r(0), r(1)],
            vec![r(1), r(2), r(1), r(0)],
        ];
        let dm = DistanceMatrix::new(labels, d).unwrap();
        assert!(matches!(tree_from_distances(&dm), Err(Error::NotATreeMetric(_))));
    }

    #[test]
    fn general_position_recovers_the_distance_matrix() {
        let t = parse_tree("((a:1,b:2):16,c:4,d:8);").unwrap();
        let dist = exact_distribution(&t).unwrap();
        let dm = general_position_distances(&dist).unwrap();
        let truth = distance_matrix(&t);
        // leaves are identified by their distinct pendant lengths
        let pendant = |tree: &WeightedTree, l: &str| {
            let v = tree.vertex_of(l).unwrap();
            tree.edges()[tree.neighbors(v)[0].1].weight
        };
        let rebuilt = tree_from_distances(&dm).unwrap();
        let mut map = BTreeMap::new();
        for l in rebuilt.leaf_labels() {
            let p = pendant(&rebuilt, l);
            let orig = t.leaf_labels().into_iter().find(|&o| pendant(&t, o) == p).unwrap();
            map.insert(l.to_string(), orig.to_string());
        }
        for a in dm.labels() {
            for b in dm.labels() {
                let got = dm.get(dm.index_of(a).unwrap(), dm.index_of(b).unwrap());
                let want = truth.get(
                    truth.index_of(&map[a]).unwrap(),
                    truth.index_of(&map[b]).unwrap(),
                );
                assert_eq!(got, want);
            }
        }
        assert!(is_isomorphic(&reconstruct_general_position(&dist).unwrap(), &t));
    }

    #[test]
    fn sibling_and_third_leaf_probabilities() {
        let t = parse_tree("((a:1,b:2):32,(c:4,d:8):64,e:16);").unwrap();
        let dist = exact_distribution(&t).unwrap();
        assert_eq!(dist.marginal(2).unwrap()[&r(3)], big_ratio(1, 10));
        let given = dist.conditional(&[Constraint::Equals { k: 2, value: r(3) }]).unwrap();
        let law = given.pushforward(|s| s[1] - s[0]);
        assert_eq!(law.len(), 3);
        assert!(law.values().all(|p| *p == big_ratio(1, 3)));
        assert!(is_isomorphic(&reconstruct_general_position(&dist).unwrap(), &t));
    }

    #[test]
    fn coincident_weights_are_reported() {
        let t = parse_tree("((a:1,b:1):1,c:1,(d:1,e:1):1);").unwrap();
        let err = reconstruct_general_position(&exact_distribution(&t).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ClassViolation { step: "pendant-set", .. }));
    }
}

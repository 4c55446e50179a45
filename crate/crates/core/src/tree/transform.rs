use num_traits::Zero;

use super::metrics::DistanceMatrix;
use super::{Edge, Mark, VertexId, WeightedTree};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Farris transform of the leaf metric with respect to vertex `a`:
/// `c + (r(i,j) - r(a,i) - r(a,j)) / 2` off the diagonal.
///
/// Requires `c >= max_i r(a,i)`; the result is an ultrametric.
pub fn farris_transform(tree: &WeightedTree, a: VertexId, c: Rational) -> Result<DistanceMatrix> {
    if a >= tree.n_vertices() {
        return Err(Error::Precondition(format!("vertex {a} does not exist")));
    }
    let leaves = tree.leaves();
    let from_a = tree.distances_from(a);
    let reach = leaves.iter().map(|&l| from_a[l]).max().unwrap_or_default();
    if c < reach {
        return Err(Error::Precondition(format!(
            "Farris constant {c} is below the largest distance {reach} from vertex {a}"
        )));
    }
    let two = Rational::from_integer(2);
    let d = leaves
        .iter()
        .map(|&i| {
            let from_i = tree.distances_from(i);
            leaves
                .iter()
                .map(|&j| {
                    if i == j {
                        Rational::zero()
                    } else {
                        c + (from_i[j] - from_a[i] - from_a[j]) / two
                    }
                })
                .collect()
        })
        .collect();
    let labels = tree.leaf_labels().into_iter().map(str::to_string).collect();
    DistanceMatrix::new(labels, d)
}

/// Reweights a rooted simple tree so that the edge from `x` down to `y`
/// gets `(desc(x) - desc(y)) / 2`, where `desc` counts strictly descendant
/// leaves. The leaf metric then equals `desc(mrca(i, j))`.
pub fn hat_weights(tree: &WeightedTree) -> Result<WeightedTree> {
    let Mark::Root(root) = tree.mark() else {
        return Err(Error::Precondition("hat weights need a rooted tree".into()));
    };
    if tree.degree(root) < 2 {
        return Err(Error::Precondition("root must have at least two children".into()));
    }
    if (0..tree.n_vertices()).any(|v| v != root && tree.degree(v) == 2) {
        return Err(Error::Precondition("hat weights need a simple tree".into()));
    }
    let (parent, order) = tree.rooted_order(root);
    let mut desc = vec![0i64; tree.n_vertices()];
    for &v in order.iter().rev() {
        if let Some((p, _)) = parent[v] {
            desc[p] += if tree.is_leaf(v) { 1 } else { desc[v] };
        }
    }
    tree.reweighted(|e| {
        let (x, y) = if parent[e.v].map(|(p, _)| p) == Some(e.u) {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        };
        Rational::new(desc[x] - desc[y], 2)
    })
}

/// Subtree spanned by the leaves with the given labels.
///
/// With `suppress`, degree-two vertices are removed and their two edge
/// weights summed (a root vertex is kept). Leaf labels are preserved.
pub fn subtree_restriction(
    tree: &WeightedTree,
    labels: &[&str],
    suppress: bool,
) -> Result<WeightedTree> {
    let set: Vec<VertexId> = labels.iter().map(|l| tree.vertex_of(l)).collect::<Result<_>>()?;
    let Some(&start) = set.first() else {
        return Err(Error::Precondition("restriction needs at least one leaf".into()));
    };
    let nv = tree.n_vertices();
    let mut inside = vec![false; nv];
    for &v in &set {
        inside[v] = true;
    }
    let (parent, order) = tree.rooted_order(start);
    for &v in order.iter().rev() {
        if let Some((p, _)) = parent[v] {
            if inside[v] {
                inside[p] = true;
            }
        }
    }
    let root = match tree.mark() {
        Mark::Root(r) if inside[r] => Some(r),
        _ => None,
    };
    let sub_degree = |v: VertexId| {
        tree.neighbors(v)
            .iter()
            .filter(|&&(w, _)| inside[w])
            .count()
    };
    let keep: Vec<bool> = (0..nv)
        .map(|v| inside[v] && (!suppress || sub_degree(v) != 2 || Some(v) == root))
        .collect();
    let mut new_id = vec![usize::MAX; nv];
    let mut new_labels = Vec::new();
    for v in 0..nv {
        if keep[v] {
            new_id[v] = new_labels.len();
            let is_leaf = sub_degree(v) <= 1;
            new_labels.push(if is_leaf { tree.labels()[v].clone() } else { None });
        }
    }
    let mut edges = Vec::new();
    for u in (0..nv).filter(|&u| keep[u]) {
        for &(first, e0) in tree.neighbors(u) {
            if !inside[first] {
                continue;
            }
            let mut weight = tree.edges()[e0].weight;
            let (mut prev, mut cur) = (u, first);
            while !keep[cur] {
                let &(next, e) = tree
                    .neighbors(cur)
                    .iter()
                    .find(|&&(w, _)| inside[w] && w != prev)
                    .expect("suppressed vertex has two subtree neighbours");
                weight += tree.edges()[e].weight;
                prev = cur;
                cur = next;
            }
            if u < cur {
                edges.push(Edge {
                    u: new_id[u],
                    v: new_id[cur],
                    weight,
                });
            }
        }
    }
    let mark = match tree.mark() {
        Mark::Leaf(v) if keep[v] => Mark::Leaf(new_id[v]),
        Mark::Root(r) if root == Some(r) => Mark::Root(new_id[r]),
        _ => Mark::None,
    };
    WeightedTree::from_parts(new_labels, edges, mark)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{
        caterpillar, distance_matrix, is_isomorphic, is_ultrametric, parse_tree, steiner_length,
    };

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    #[test]
    fn farris_examples() {
        let edge = parse_tree("(a:2)b;").unwrap();
        let a = edge.vertex_of("a").unwrap();
        let m = farris_transform(&edge, a, r(2)).unwrap();
        assert_eq!(m.get(0, 1), r(2));
        assert_eq!(m.get(0, 0), r(0));
        assert!(farris_transform(&edge, a, r(1)).is_err());

        let q = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap();
        let inner = (0..q.n_vertices()).find(|&v| q.degree(v) == 3).unwrap();
        let m = farris_transform(&q, inner, r(2)).unwrap();
        assert!(m.is_ultrametric());
        for i in 0..4 {
            assert_eq!(m.get(i, i), r(0));
        }
    }

    #[test]
    fn hat_weights_on_a_cherry() {
        let t = parse_tree("(a:1,b:1);@root").unwrap();
        let h = hat_weights(&t).unwrap();
        assert!(h.edges().iter().all(|e| e.weight == r(1)));
        assert_eq!(distance_matrix(&h).get(0, 1), r(2));
    }

    #[test]
    fn hat_weights_match_mrca_counts() {
        let t = parse_tree("(a:1,(b:1,(c:1,d:1):1):1);@root").unwrap();
        let h = hat_weights(&t).unwrap();
        let dm = distance_matrix(&h);
        // mrca(c,d) has 2 descendants, mrca(b,c) 3, mrca(a,*) is the root with 4.
        let idx = |l: &str| dm.index_of(l).unwrap();
        assert_eq!(dm.get(idx("c"), idx("d")), r(2));
        assert_eq!(dm.get(idx("b"), idx("c")), r(3));
        assert_eq!(dm.get(idx("a"), idx("d")), r(4));
        assert!(is_ultrametric(&h));
        assert!(hat_weights(&t.unmarked()).is_err());
        let non_simple = parse_tree("(a:1,((b:1,c:1):1):1);@root").unwrap();
        assert!(hat_weights(&non_simple).is_err());
    }

    #[test]
    fn restriction_examples() {
        let q = parse_tree("((a:1,b:2):1,c:1,d:1);").unwrap();
        let s = subtree_restriction(&q, &["a", "b"], true).unwrap();
        assert_eq!(s.n_vertices(), 2);
        assert_eq!(s.edges()[0].weight, r(3));

        let t = caterpillar(&[2, 11, 12]).unwrap();
        let s = subtree_restriction(&t, &["p0_1", "p2_3"], true).unwrap();
        assert_eq!(s.edges().len(), 1);
        assert_eq!(s.edges()[0].weight, r(4));

        let all = subtree_restriction(&q, &["a", "b", "c", "d"], true).unwrap();
        assert!(is_isomorphic(&all, &q));

        let kept = subtree_restriction(&q, &["a", "c"], false).unwrap();
        assert_eq!(kept.edges().len(), 3);
        assert_eq!(kept.total_length(), steiner_length(&q, &["a", "c"]).unwrap());
    }
}

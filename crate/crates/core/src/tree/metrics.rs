use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{VertexId, WeightedTree};
use crate::error::{Error, Result};
use crate::rational::{to_big, Rational};

/// Symmetric matrix of leaf-to-leaf distances.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    d: Vec<Vec<Rational>>,
}

impl DistanceMatrix {
    /// Validates symmetry, a zero diagonal and positive off-diagonal entries.
    pub fn new(labels: Vec<String>, d: Vec<Vec<Rational>>) -> Result<Self> {
        let n = labels.len();
        if d.len() != n || d.iter().any(|row| row.len() != n) {
            return Err(Error::Precondition("distance matrix is not square".into()));
        }
        for i in 0..n {
            if !d[i][i].is_zero() {
                return Err(Error::Precondition(format!("non-zero diagonal at {i}")));
            }
            for j in 0..i {
                if d[i][j] != d[j][i] {
                    return Err(Error::Precondition(format!("asymmetric at ({i},{j})")));
                }
                if d[i][j] <= Rational::zero() {
                    return Err(Error::Precondition(format!("non-positive entry at ({i},{j})")));
                }
            }
        }
        Ok(DistanceMatrix { labels, d })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.d[i][j]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.d
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Three-point condition: `d(i,k) <= max(d(i,j), d(j,k))` for all triples.
    pub fn is_ultrametric(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.d[i][k] > self.d[i][j].max(self.d[j][k]) {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Four-point condition: of the three pair sums over any four points,
    /// the two largest are equal.
    pub fn satisfies_four_point(&self) -> bool {
        let n = self.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for e in c + 1..n {
                        let mut s = [
                            self.d[a][b] + self.d[c][e],
                            self.d[a][c] + self.d[b][e],
                            self.d[a][e] + self.d[b][c],
                        ];
                        s.sort();
                        if s[1] != s[2] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

fn vertices_of(tree: &WeightedTree, labels: &[&str]) -> Result<Vec<VertexId>> {
    labels.iter().map(|l| tree.vertex_of(l)).collect()
}

/// Total edge weight of the smallest subtree spanning the given vertices.
pub(crate) fn steiner_length_of(tree: &WeightedTree, set: &[VertexId]) -> Rational {
    let Some(&root) = set.first() else {
        return Rational::zero();
    };
    let mut inside = vec![false; tree.n_vertices()];
    for &v in set {
        inside[v] = true;
    }
    let (parent, order) = tree.rooted_order(root);
    let mut total = Rational::zero();
    for &v in order.iter().rev() {
        if let Some((p, e)) = parent[v] {
            if inside[v] {
                total += tree.edges()[e].weight;
                inside[p] = true;
            }
        }
    }
    total
}

/// Length of the Steiner subtree spanned by the leaves with the given labels.
pub fn steiner_length(tree: &WeightedTree, labels: &[&str]) -> Result<Rational> {
    if labels.is_empty() {
        return Err(Error::Precondition("Steiner length needs at least one leaf".into()));
    }
    Ok(steiner_length_of(tree, &vertices_of(tree, labels)?))
}

pub fn leaf_distance(tree: &WeightedTree, x: &str, y: &str) -> Result<Rational> {
    let (vx, vy) = (tree.vertex_of(x)?, tree.vertex_of(y)?);
    Ok(tree.distances_from(vx)[vy])
}

/// Leaf distance matrix, rows in [`WeightedTree::leaves`] order.
pub fn distance_matrix(tree: &WeightedTree) -> DistanceMatrix {
    let leaves = tree.leaves();
    let d = leaves
        .iter()
        .map(|&a| {
            let dist = tree.distances_from(a);
            leaves.iter().map(|&b| dist[b]).collect()
        })
        .collect();
    let labels = tree.leaf_labels().into_iter().map(str::to_string).collect();
    DistanceMatrix { labels, d }
}

/// Sum over unordered leaf pairs of `h(x,y) r(x,y)`, where `h(x,y)` is the
/// product of `1/(deg(v)-1)` over the interior vertices `v` of the path.
///
/// For every tree this equals the total edge length. With factorials in
/// place of `deg(v)-1` the identity only holds when no degree exceeds three.
pub fn total_length_pair_formula(tree: &WeightedTree) -> Result<BigRational> {
    let leaves = tree.leaves();
    if leaves.len() < 2 {
        return Err(Error::Precondition("pair formula needs at least two leaves".into()));
    }
    let nv = tree.n_vertices();
    let inv_branch: Vec<BigRational> = (0..nv)
        .map(|v| {
            let d = tree.degree(v).max(2) - 1;
            BigRational::new(BigInt::one(), BigInt::from(d))
        })
        .collect();
    let mut total = BigRational::zero();
    for (i, &a) in leaves.iter().enumerate() {
        let (parent, order) = tree.rooted_order(a);
        let mut dist = vec![Rational::zero(); nv];
        let mut h = vec![BigRational::one(); nv];
        for &v in order.iter().skip(1) {
            let (p, e) = parent[v].expect("non-root has a parent");
            dist[v] = dist[p] + tree.edges()[e].weight;
            h[v] = if p == a { BigRational::one() } else { &h[p] * &inv_branch[p] };
        }
        for &b in &leaves[i + 1..] {
            total += &h[b] * to_big(&dist[b]);
        }
    }
    Ok(total)
}

/// Multiset of distances over unordered leaf pairs.
pub fn pairwise_distance_multiset(tree: &WeightedTree) -> BTreeMap<Rational, u64> {
    let dm = distance_matrix(tree);
    let mut out = BTreeMap::new();
    for i in 0..dm.len() {
        for j in i + 1..dm.len() {
            *out.entry(dm.get(i, j)).or_insert(0) += 1;
        }
    }
    out
}

/// Multiset of Steiner lengths over unordered leaf triples.
pub fn triple_length_multiset(tree: &WeightedTree) -> BTreeMap<Rational, u64> {
    let dm = distance_matrix(tree);
    let n = dm.len();
    let two = Rational::from_integer(2);
    let mut out = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let w = (dm.get(i, j) + dm.get(j, k) + dm.get(i, k)) / two;
                *out.entry(w).or_insert(0) += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::{caterpillar, parse_tree, star};

    fn r(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn quartet() -> WeightedTree {
        parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap()
    }

    /// Independent path length: walk parent pointers by BFS over the raw edge list.
    fn bfs_distance(tree: &WeightedTree, x: VertexId, y: VertexId) -> Rational {
        let mut best: Vec<Option<Rational>> = vec![None; tree.n_vertices()];
        best[x] = Some(r(0));
        let mut queue = std::collections::VecDeque::from([x]);
        while let Some(u) = queue.pop_front() {
            for e in tree.edges() {
                if e.u == u || e.v == u {
                    let w = e.other(u);
                    if best[w].is_none() {
                        best[w] = Some(best[u].unwrap() + e.weight);
                        queue.push_back(w);
                    }
                }
            }
        }
        best[y].unwrap()
    }

    #[test]
    fn steiner_examples() {
        let s = star(&[r(1); 4]).unwrap();
        assert_eq!(steiner_length(&s, &["x1", "x2", "x3", "x4"]).unwrap(), r(4));
        assert_eq!(steiner_length(&s, &["x2"]).unwrap(), r(0));
        let t = caterpillar(&[2, 11, 12]).unwrap();
        assert_eq!(steiner_length(&t, &["p0_1", "p0_2"]).unwrap(), r(2));
        assert_eq!(steiner_length(&t, &["p1_1", "p1_2", "p1_3"]).unwrap(), r(3));
        assert!(matches!(steiner_length(&t, &["nope"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn distance_examples() {
        let q = quartet();
        assert_eq!(leaf_distance(&q, "a", "b").unwrap(), r(2));
        assert_eq!(leaf_distance(&q, "a", "c").unwrap(), r(3));
        assert_eq!(leaf_distance(&q, "a", "a").unwrap(), r(0));
        assert_eq!(
            leaf_distance(&q, "a", "d").unwrap(),
            bfs_distance(&q, q.vertex_of("a").unwrap(), q.vertex_of("d").unwrap())
        );
        let t = caterpillar(&[2, 11, 12]).unwrap();
        assert_eq!(leaf_distance(&t, "p0_1", "p2_5").unwrap(), r(4));
    }

    #[test]
    fn distance_matrix_matches_bfs_and_pair_steiner() {
        let t = parse_tree("((a:1/2,b:3):2,(c:1,(d:5/3,e:1):1/4):1,f:7);").unwrap();
        let dm = distance_matrix(&t);
        assert!(dm.satisfies_four_point());
        for (i, &x) in t.leaves().iter().enumerate() {
            for (j, &y) in t.leaves().iter().enumerate() {
                assert_eq!(dm.get(i, j), bfs_distance(&t, x, y));
                assert_eq!(dm.get(i, j), steiner_length_of(&t, &[x, y]));
            }
        }
    }

    #[test]
    fn pair_formula_examples() {
        let edge = parse_tree("(a:5)b;").unwrap();
        assert_eq!(total_length_pair_formula(&edge).unwrap(), to_big(&r(5)));
        let s = star(&[r(1); 3]).unwrap();
        assert_eq!(total_length_pair_formula(&s).unwrap(), to_big(&r(3)));
        let q = quartet();
        assert_eq!(total_length_pair_formula(&q).unwrap(), to_big(&r(5)));
        let w = parse_tree("((a:1/2,b:3,g:1):2,(c:1,(d:5/3,e:1):1/4):1,f:7);").unwrap();
        assert_eq!(total_length_pair_formula(&w).unwrap(), to_big(&w.total_length()));
        let s4 = star(&[r(1); 4]).unwrap();
        assert_eq!(total_length_pair_formula(&s4).unwrap(), to_big(&r(4)));
        let single = parse_tree("a;").unwrap();
        assert!(total_length_pair_formula(&single).is_err());
    }

    #[test]
    fn counterexample_multisets() {
        let a = caterpillar(&[2, 11, 12]).unwrap();
        let b = caterpillar(&[3, 14, 8]).unwrap();
        let pa = pairwise_distance_multiset(&a);
        assert_eq!(pa, pairwise_distance_multiset(&b));
        assert_eq!(pa, BTreeMap::from([(r(2), 122), (r(3), 154), (r(4), 24)]));
        let choose3 = |m: u64| m * (m.saturating_sub(1)) * (m.saturating_sub(2)) / 6;
        assert_eq!(triple_length_multiset(&a)[&r(3)], choose3(11) + choose3(12));
        assert_eq!(triple_length_multiset(&a)[&r(3)], 385);
        assert_eq!(triple_length_multiset(&b)[&r(3)], choose3(3) + choose3(14) + choose3(8));
        assert_eq!(triple_length_multiset(&b)[&r(3)], 421);
    }

    #[test]
    fn matrix_validation() {
        assert!(DistanceMatrix::new(vec!["a".into()], vec![vec![r(1)]]).is_err());
        let ok = DistanceMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![r(0), r(2)], vec![r(2), r(0)]],
        )
        .unwrap();
        assert!(ok.is_ultrametric());
        assert!(DistanceMatrix::new(
            vec!["a".into(), "b".into()],
            vec![vec![r(0), r(2)], vec![r(3), r(0)]],
        )
        .is_err());
    }
}

//! Edge-weighted trees with labelled leaves.

mod canon;
mod metrics;
mod newick;
mod props;
mod transform;

pub use canon::{canonical_code, is_isomorphic, CanonicalCode};
pub use metrics::{
    distance_matrix, leaf_distance, pairwise_distance_multiset, steiner_length,
    total_length_pair_formula, triple_length_multiset, DistanceMatrix,
};
pub use newick::{format_tree, parse_tree};
pub use props::{
    is_caterpillar_structural, is_combinatorial, is_general_position,
    is_general_position_capped, is_k_ary, is_k_valent, is_simple, is_ultrametric,
    DEFAULT_GENERAL_POSITION_EDGE_CAP,
};
pub use transform::{farris_transform, hat_weights, subtree_restriction};

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type VertexId = usize;

/// Optional distinguished vertex.
///
/// A marked tree carries a distinguished leaf; a rooted tree carries a
/// distinguished root vertex. Isomorphisms must map the mark to the mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Mark {
    #[default]
    None,
    Leaf(VertexId),
    Root(VertexId),
}

impl Mark {
    pub fn vertex(&self) -> Option<VertexId> {
        match *self {
            Mark::None => None,
            Mark::Leaf(v) | Mark::Root(v) => Some(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub weight: Rational,
}

impl Edge {
    pub fn other(&self, x: VertexId) -> VertexId {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// A finite tree with strictly positive exact edge weights.
///
/// Leaves are the vertices of degree at most one; each carries a distinct
/// label. Interior vertices are unlabelled. Values are immutable once built.
#[derive(Clone, Debug)]
pub struct WeightedTree {
    adj: Vec<Vec<(VertexId, usize)>>,
    edges: Vec<Edge>,
    labels: Vec<Option<String>>,
    leaves: Vec<VertexId>,
    label_index: BTreeMap<String, VertexId>,
    mark: Mark,
}

impl WeightedTree {
    /// Builds and validates a tree from raw parts.
    pub fn from_parts(
        labels: Vec<Option<String>>,
        edges: Vec<Edge>,
        mark: Mark,
    ) -> Result<Self> {
        let nv = labels.len();
        if nv == 0 {
            return Err(Error::InvalidTree("tree has no vertices".into()));
        }
        if edges.len() + 1 != nv {
            return Err(Error::InvalidTree(format!(
                "{} vertices need {} edges, found {}",
                nv,
                nv - 1,
                edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); nv];
        for (i, e) in edges.iter().enumerate() {
            if e.u >= nv || e.v >= nv || e.u == e.v {
                return Err(Error::InvalidTree(format!("bad edge {}-{}", e.u, e.v)));
            }
            if e.weight <= Rational::zero() {
                return Err(Error::InvalidTree(format!(
                    "edge {}-{} has non-positive weight {}",
                    e.u, e.v, e.weight
                )));
            }
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        let mut seen = vec![false; nv];
        let mut stack = vec![0];
        seen[0] = true;
        let mut reached = 1;
        while let Some(x) = stack.pop() {
            for &(y, _) in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    reached += 1;
                    stack.push(y);
                }
            }
        }
        if reached != nv {
            return Err(Error::InvalidTree("graph is not connected".into()));
        }
        let mut leaves = Vec::new();
        let mut label_index = BTreeMap::new();
        for v in 0..nv {
            let is_leaf = adj[v].len() <= 1;
            match (&labels[v], is_leaf) {
                (Some(l), true) => {
                    if l.is_empty() {
                        return Err(Error::InvalidTree(format!("leaf {v} has an empty label")));
                    }
                    if label_index.insert(l.clone(), v).is_some() {
                        return Err(Error::InvalidTree(format!("duplicate leaf label `{l}`")));
                    }
                    leaves.push(v);
                }
                (None, true) => {
                    return Err(Error::InvalidTree(format!("leaf vertex {v} is unlabelled")))
                }
                (Some(l), false) => {
                    return Err(Error::InvalidTree(format!(
                        "interior vertex {v} carries label `{l}`"
                    )))
                }
                (None, false) => {}
            }
        }
        match mark {
            Mark::None => {}
            Mark::Leaf(v) => {
                if v >= nv || adj[v].len() > 1 {
                    return Err(Error::InvalidTree(format!("marked vertex {v} is not a leaf")));
                }
            }
            Mark::Root(v) => {
                if v >= nv {
                    return Err(Error::InvalidTree(format!("root vertex {v} does not exist")));
                }
            }
        }
        Ok(WeightedTree {
            adj,
            edges,
            labels,
            leaves,
            label_index,
            mark,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.leaves.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` as `(vertex, edge index)` pairs.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.adj[v].len()
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels[v].as_deref()
    }

    pub fn labels(&self) -> &[Option<String>] {
        &self.labels
    }

    /// Leaf vertices in increasing vertex-id order.
    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.adj[v].len() <= 1
    }

    /// Leaf labels in the same order as [`WeightedTree::leaves`].
    pub fn leaf_labels(&self) -> Vec<&str> {
        self.leaves
            .iter()
            .map(|&v| self.labels[v].as_deref().unwrap_or_default())
            .collect()
    }

    pub fn vertex_of(&self, label: &str) -> Result<VertexId> {
        self.label_index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn mark(&self) -> Mark {
        self.mark
    }

    /// Same tree with a different mark.
    pub fn with_mark(&self, mark: Mark) -> Result<Self> {
        Self::from_parts(self.labels.clone(), self.edges.clone(), mark)
    }

    /// Same tree marked at the leaf carrying `label`.
    pub fn marked_at(&self, label: &str) -> Result<Self> {
        let v = self.vertex_of(label)?;
        self.with_mark(Mark::Leaf(v))
    }

    pub fn unmarked(&self) -> Self {
        let mut t = self.clone();
        t.mark = Mark::None;
        t
    }

    pub fn total_length(&self) -> Rational {
        self.edges.iter().map(|e| e.weight).sum()
    }

    /// Same tree with every edge weight replaced by `f(edge)`.
    pub fn reweighted(&self, mut f: impl FnMut(&Edge) -> Rational) -> Result<Self> {
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: e.u,
                v: e.v,
                weight: f(e),
            })
            .collect();
        Self::from_parts(self.labels.clone(), edges, self.mark)
    }

    /// Same tree with all weights set to one.
    pub fn combinatorial(&self) -> Self {
        self.reweighted(|_| Rational::one())
            .expect("unit weights keep a valid tree valid")
    }

    /// Renumbers vertices: vertex `v` becomes `perm[v]`.
    pub fn permute_vertices(&self, perm: &[VertexId]) -> Result<Self> {
        let nv = self.n_vertices();
        if perm.len() != nv {
            return Err(Error::Precondition("permutation length mismatch".into()));
        }
        let mut labels = vec![None; nv];
        for v in 0..nv {
            labels[perm[v]] = self.labels[v].clone();
        }
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                u: perm[e.u],
                v: perm[e.v],
                weight: e.weight,
            })
            .collect();
        let mark = match self.mark {
            Mark::None => Mark::None,
            Mark::Leaf(v) => Mark::Leaf(perm[v]),
            Mark::Root(v) => Mark::Root(perm[v]),
        };
        Self::from_parts(labels, edges, mark)
    }

    /// Replaces leaf labels through `f`.
    pub fn relabel_leaves(&self, mut f: impl FnMut(&str) -> String) -> Result<Self> {
        let labels = self
            .labels
            .iter()
            .map(|l| l.as_deref().map(&mut f))
            .collect();
        Self::from_parts(labels, self.edges.clone(), self.mark)
    }

    /// Parent pointers and a preorder for the tree hung from `root`.
    ///
    /// `parent[root]` is `None`; for other vertices it holds the parent and the
    /// connecting edge index.
    pub fn rooted_order(&self, root: VertexId) -> (Vec<Option<(VertexId, usize)>>, Vec<VertexId>) {
        let nv = self.n_vertices();
        let mut parent = vec![None; nv];
        let mut order = Vec::with_capacity(nv);
        let mut visited = vec![false; nv];
        let mut stack = vec![root];
        visited[root] = true;
        while let Some(x) = stack.pop() {
            order.push(x);
            for &(y, e) in self.adj[x].iter().rev() {
                if !visited[y] {
                    visited[y] = true;
                    parent[y] = Some((x, e));
                    stack.push(y);
                }
            }
        }
        (parent, order)
    }

    /// Weighted distances from `source` to every vertex.
    pub fn distances_from(&self, source: VertexId) -> Vec<Rational> {
        let (parent, order) = self.rooted_order(source);
        let mut dist = vec![Rational::zero(); self.n_vertices()];
        for &v in order.iter().skip(1) {
            let (p, e) = parent[v].expect("non-root has a parent");
            dist[v] = dist[p] + self.edges[e].weight;
        }
        dist
    }

    /// Hop distances (ignoring weights) from `source`.
    pub fn hops_from(&self, source: VertexId) -> Vec<usize> {
        let (parent, order) = self.rooted_order(source);
        let mut hops = vec![0; self.n_vertices()];
        for &v in order.iter().skip(1) {
            hops[v] = hops[parent[v].expect("non-root has a parent").0] + 1;
        }
        hops
    }

    /// The one or two vertices of minimum hop eccentricity.
    pub fn centers(&self) -> Vec<VertexId> {
        let nv = self.n_vertices();
        let ecc: Vec<usize> = (0..nv)
            .map(|v| self.hops_from(v).into_iter().max().unwrap_or(0))
            .collect();
        let best = *ecc.iter().min().expect("tree is non-empty");
        (0..nv).filter(|&v| ecc[v] == best).collect()
    }
}

/// Incremental construction helper for [`WeightedTree`].
#[derive(Clone, Debug, Default)]
pub struct TreeBuilder {
    labels: Vec<Option<String>>,
    edges: Vec<Edge>,
    mark: Mark,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.labels.push(None);
        self.labels.len() - 1
    }

    pub fn add_leaf(&mut self, label: impl Into<String>) -> VertexId {
        self.labels.push(Some(label.into()));
        self.labels.len() - 1
    }

    pub fn set_label(&mut self, v: VertexId, label: Option<String>) {
        self.labels[v] = label;
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, weight: Rational) -> &mut Self {
        self.edges.push(Edge { u, v, weight });
        self
    }

    /// Adds a new leaf hanging from `parent`.
    pub fn add_child_leaf(
        &mut self,
        parent: VertexId,
        label: impl Into<String>,
        weight: Rational,
    ) -> VertexId {
        let v = self.add_leaf(label);
        self.add_edge(parent, v, weight);
        v
    }

    pub fn mark(&mut self, mark: Mark) -> &mut Self {
        self.mark = mark;
        self
    }

    pub fn n_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn build(self) -> Result<WeightedTree> {
        WeightedTree::from_parts(self.labels, self.edges, self.mark)
    }

    /// Labels every unlabelled degree-≤1 vertex as `{prefix}{i}` (counting
    /// from one in vertex order) before building.
    pub fn build_auto_labelled(mut self, prefix: &str) -> Result<WeightedTree> {
        let mut degree = vec![0usize; self.labels.len()];
        for e in &self.edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut next = 1;
        for v in 0..self.labels.len() {
            if degree[v] <= 1 && self.labels[v].is_none() {
                self.labels[v] = Some(format!("{prefix}{next}"));
                next += 1;
            }
        }
        self.build()
    }
}

/// Star with the given pendant weights and leaves `x1..xn`.
pub fn star(weights: &[Rational]) -> Result<WeightedTree> {
    let mut b = TreeBuilder::new();
    let c = b.add_vertex();
    for (i, w) in weights.iter().enumerate() {
        b.add_child_leaf(c, format!("x{}", i + 1), *w);
    }
    b.build()
}

/// Combinatorial caterpillar for a composition `(n_0, ..., n_l)`.
///
/// Leaves attached to path vertex `r` are labelled `p{r}_{j}`.
pub fn caterpillar(composition: &[usize]) -> Result<WeightedTree> {
    if composition.is_empty()
        || composition[0] == 0
        || *composition.last().expect("non-empty") == 0
    {
        return Err(Error::Precondition(
            "caterpillar composition needs non-zero end entries".into(),
        ));
    }
    if composition.len() == 1 && composition[0] < 2 {
        return Err(Error::Precondition("a one-vertex spine needs at least two leaves".into()));
    }
    let one = Rational::one();
    let mut b = TreeBuilder::new();
    let spine: Vec<VertexId> = composition.iter().map(|_| b.add_vertex()).collect();
    for w in spine.windows(2) {
        b.add_edge(w[0], w[1], one);
    }
    for (r, &count) in composition.iter().enumerate() {
        for j in 1..=count {
            b.add_child_leaf(spine[r], format!("p{r}_{j}"), one);
        }
    }
    b.build()
}

use std::fmt;

use super::{Mark, VertexId, WeightedTree};

/// Byte string that identifies a tree up to isomorphism.
///
/// Leaf labels are ignored; marks and roots are respected. Codes of trees of
/// different mark kinds never coincide.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&String::from_utf8_lossy(&self.0))
    }
}

/// Child-sorted encoding of the subtree hanging below `v`.
fn encode_rooted(tree: &WeightedTree, root: VertexId) -> String {
    let (parent, order) = tree.rooted_order(root);
    let mut enc: Vec<String> = vec![String::new(); tree.n_vertices()];
    for &v in order.iter().rev() {
        let mut parts: Vec<String> = tree
            .neighbors(v)
            .iter()
            .filter(|&&(c, _)| parent[v].is_none_or(|(p, _)| p != c))
            .map(|&(c, e)| format!("{}:{}", tree.edges()[e].weight, std::mem::take(&mut enc[c])))
            .collect();
        parts.sort_unstable();
        enc[v] = format!("({})", parts.join(","));
    }
    std::mem::take(&mut enc[root])
}

/// Canonical code of a tree.
///
/// Unmarked trees are encoded from each of their (one or two) hop centers and
/// the smaller string wins; the center is preserved by every isomorphism, so
/// this is as discriminating as minimising over all rootings.
pub fn canonical_code(tree: &WeightedTree) -> CanonicalCode {
    let (tag, body) = match tree.mark() {
        Mark::Leaf(v) => ('M', encode_rooted(tree, v)),
        Mark::Root(v) => ('R', encode_rooted(tree, v)),
        Mark::None => (
            'U',
            tree.centers()
                .into_iter()
                .map(|c| encode_rooted(tree, c))
                .min()
                .expect("a tree has a center"),
        ),
    };
    let mut bytes = Vec::with_capacity(body.len() + 1);
    bytes.push(tag as u8);
    bytes.extend_from_slice(body.as_bytes());
    CanonicalCode(bytes)
}

pub fn is_isomorphic(a: &WeightedTree, b: &WeightedTree) -> bool {
    a.n_vertices() == b.n_vertices()
        && a.n_leaves() == b.n_leaves()
        && canonical_code(a) == canonical_code(b)
}

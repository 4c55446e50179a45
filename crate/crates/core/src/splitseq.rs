//! Down-split and up-split sequences.
//!
//! A marked `(k+1)`-valent combinatorial tree `(T, v)` hangs from its mark:
//! `v` is joined to a vertex `o` whose `k` further branches are themselves
//! marked trees (marked at `o`). Listing leaves branch by branch yields a
//! *down-split* sequence `(s_2, ..., s_n)`. A rooted `k`-ary tree whose first
//! branch is listed first as a rooted tree and whose remaining `k - 1`
//! branches follow as marked trees yields an *up-split* sequence
//! `(s_1 = 0, s_2, ..., s_n)`.
//!
//! Block boundaries are located with the deficiency of a prefix,
//! `D(m) = (k-1) s_m - k m + k + 1`, which counts the missing degree (relative
//! to `k + 1`) summed over the interior vertices of the spanned subtree:
//!
//! * down-split, base `(1)`: with `m_0 = 1` and `s_1 := 1`,
//!   `m_i = min { m_{i-1} < m < n : D(m) = k - i }` for `i = 1..k-1`, `m_k = n`;
//!   block `i` is `(s_{m_{i-1}+t-1} - s_{m_{i-1}})_{t = 2..m_i - m_{i-1} + 1}`
//!   and must be down-split;
//! * up-split, base `(0)`: `m_1 = max { 1 <= m < n : D(m) = 1 }` and
//!   `m_j = min { m_{j-1} < m < n : D(m) = k + 1 - j }` for `j = 2..k-1`;
//!   `(s_1, ..., s_{m_1})` must be up-split, block 2 is offset by
//!   `s_{m_1} + 1` and later blocks by `s_{m_{j-1}}`; these are down-split.
//!
//! For `k = 2` these are the usual conditions `s_m = 2m - 2` with an infimum
//! (down) or supremum (up), and the orders below reduce to the usual `≺`/`≪`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::lengthseq::LengthDistribution;
use crate::rational::Rational;
use crate::tree::{
    is_combinatorial, is_k_ary, is_k_valent, Mark, TreeBuilder, VertexId, WeightedTree,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SplitKind {
    Down,
    Up,
}

/// Marked tree decoded from a down-split sequence: a leaf, or a vertex with
/// `k` marked branches in sequence order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Planted {
    Leaf,
    Node(Vec<Planted>),
}

/// Rooted tree decoded from an up-split sequence: a leaf, or a root whose
/// first branch is rooted and whose remaining `k - 1` branches are marked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rooted {
    Leaf,
    Node(Box<Rooted>, Vec<Planted>),
}

impl Planted {
    /// Leaf count including the mark.
    pub fn size(&self) -> usize {
        match self {
            Planted::Leaf => 2,
            Planted::Node(children) => 1 + children.iter().map(|c| c.size() - 1).sum::<usize>(),
        }
    }

    /// The down-split sequence listing leaves branch by branch.
    pub fn sequence(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.size() - 1);
        self.write_sequence(&mut out, 0);
        out
    }

    fn write_sequence(&self, out: &mut Vec<i64>, base: i64) {
        match self {
            Planted::Leaf => out.push(base + 1),
            Planted::Node(children) => {
                let mut offset = base + 1;
                for c in children {
                    c.write_sequence(out, offset);
                    offset = *out.last().expect("blocks are non-empty");
                }
            }
        }
    }
}

impl Rooted {
    pub fn size(&self) -> usize {
        match self {
            Rooted::Leaf => 1,
            Rooted::Node(first, rest) => {
                first.size() + rest.iter().map(|c| c.size() - 1).sum::<usize>()
            }
        }
    }

    /// The up-split sequence, including the leading zero.
    pub fn sequence(&self) -> Vec<i64> {
        match self {
            Rooted::Leaf => vec![0],
            Rooted::Node(first, rest) => {
                let mut out = first.sequence();
                let mut offset = out.last().expect("non-empty") + 1;
                for c in rest {
                    c.write_sequence(&mut out, offset);
                    offset = *out.last().expect("blocks are non-empty");
                }
                out
            }
        }
    }
}

/// Order on marked structures of equal size: branch sizes (equivalently,
/// the split-index vector) first, then the branches in turn.
pub fn cmp_planted(a: &Planted, b: &Planted) -> Ordering {
    match (a, b) {
        (Planted::Leaf, Planted::Leaf) => Ordering::Equal,
        (Planted::Leaf, Planted::Node(_)) => Ordering::Less,
        (Planted::Node(_), Planted::Leaf) => Ordering::Greater,
        (Planted::Node(x), Planted::Node(y)) => {
            let sx: Vec<usize> = x.iter().map(Planted::size).collect();
            let sy: Vec<usize> = y.iter().map(Planted::size).collect();
            sx.cmp(&sy).then_with(|| {
                x.iter()
                    .zip(y)
                    .map(|(p, q)| cmp_planted(p, q))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            })
        }
    }
}

/// Order on rooted structures of equal size: larger first branch first,
/// then the remaining branch sizes ascending, then the first branch, then
/// the remaining branches.
pub fn cmp_rooted(a: &Rooted, b: &Rooted) -> Ordering {
    match (a, b) {
        (Rooted::Leaf, Rooted::Leaf) => Ordering::Equal,
        (Rooted::Leaf, Rooted::Node(..)) => Ordering::Less,
        (Rooted::Node(..), Rooted::Leaf) => Ordering::Greater,
        (Rooted::Node(fa, ra), Rooted::Node(fb, rb)) => fb
            .size()
            .cmp(&fa.size())
            .then_with(|| {
                let sa: Vec<usize> = ra.iter().map(Planted::size).collect();
                let sb: Vec<usize> = rb.iter().map(Planted::size).collect();
                sa.cmp(&sb)
            })
            .then_with(|| cmp_rooted(fa, fb))
            .then_with(|| {
                ra.iter()
                    .zip(rb)
                    .map(|(p, q)| cmp_planted(p, q))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
    }
}

fn deficiency(k: usize, m: usize, s_m: i64) -> i64 {
    let k = k as i64;
    let m = m as i64;
    (k - 1) * s_m - k * m + k + 1
}

fn split_err(index: usize, msg: impl Into<String>) -> Error {
    Error::InvalidSplit {
        index,
        msg: msg.into(),
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Precondition(format!("branching parameter k = {k} must be >= 2")));
    }
    Ok(())
}

/// Decodes a down-split sequence; `first` is the sequence index of `vals[0]`
/// inside the outermost sequence (used for error positions).
fn decode_down(vals: &[i64], k: usize, first: usize) -> Result<Planted> {
    let n = vals.len() + 1;
    if vals.is_empty() {
        return Err(split_err(first, "empty sequence"));
    }
    if n == 2 {
        return if vals[0] == 1 {
            Ok(Planted::Leaf)
        } else {
            Err(split_err(first, format!("base value must be 1, found {}", vals[0])))
        };
    }
    let s = |m: usize| if m == 1 { 1 } else { vals[m - 2] };
    let mut bounds = vec![1usize];
    for i in 1..k {
        let prev = *bounds.last().expect("non-empty");
        let target = (k - i) as i64;
        let m = (prev + 1..n)
            .find(|&m| deficiency(k, m, s(m)) == target)
            .ok_or_else(|| {
                split_err(first, format!("no split point for block {i} after index {prev}"))
            })?;
        bounds.push(m);
    }
    bounds.push(n);
    let mut children = Vec::with_capacity(k);
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let offset = s(lo);
        let block: Vec<i64> = (lo + 1..=hi).map(|m| s(m) - offset).collect();
        children.push(decode_down(&block, k, first + lo - 1)?);
    }
    Ok(Planted::Node(children))
}

fn decode_up(vals: &[i64], k: usize, first: usize) -> Result<Rooted> {
    let n = vals.len();
    if n == 0 {
        return Err(split_err(first, "empty sequence"));
    }
    if vals[0] != 0 {
        return Err(split_err(first, "up-split sequences start with 0"));
    }
    if n == 1 {
        return Ok(Rooted::Leaf);
    }
    let s = |m: usize| vals[m - 1];
    let m1 = (1..n)
        .rev()
        .find(|&m| deficiency(k, m, s(m)) == 1)
        .ok_or_else(|| split_err(first, "no rooted prefix"))?;
    let mut bounds = vec![m1];
    for j in 2..k {
        let prev = *bounds.last().expect("non-empty");
        let target = (k + 1 - j) as i64;
        let m = (prev + 1..n)
            .find(|&m| deficiency(k, m, s(m)) == target)
            .ok_or_else(|| {
                split_err(first, format!("no split point for block {j} after index {prev}"))
            })?;
        bounds.push(m);
    }
    bounds.push(n);
    let head = decode_up(&vals[..m1], k, first)?;
    let mut rest = Vec::with_capacity(k - 1);
    for (j, w) in bounds.windows(2).enumerate() {
        let (lo, hi) = (w[0], w[1]);
        let offset = if j == 0 { s(lo) + 1 } else { s(lo) };
        let block: Vec<i64> = (lo + 1..=hi).map(|m| s(m) - offset).collect();
        rest.push(decode_down(&block, k, first + lo)?);
    }
    Ok(Rooted::Node(Box::new(head), rest))
}

/// A validated split sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitSequence {
    kind: SplitKind,
    k: usize,
    values: Vec<i64>,
    split_indices: Vec<usize>,
}

impl SplitSequence {
    /// Validates a down-split sequence `(s_2, ..., s_n)`.
    pub fn down(values: Vec<i64>, k: usize) -> Result<Self> {
        check_k(k)?;
        let p = decode_down(&values, k, 2)?;
        Ok(Self::from_planted_parts(values, k, &p))
    }

    /// Validates an up-split sequence `(s_1 = 0, s_2, ..., s_n)`.
    pub fn up(values: Vec<i64>, k: usize) -> Result<Self> {
        check_k(k)?;
        let r = decode_up(&values, k, 1)?;
        Ok(Self::from_rooted_parts(values, k, &r))
    }

    fn from_planted_parts(values: Vec<i64>, k: usize, p: &Planted) -> Self {
        let split_indices = match p {
            Planted::Leaf => Vec::new(),
            Planted::Node(children) => {
                let mut acc = 1;
                children[..children.len() - 1]
                    .iter()
                    .map(|c| {
                        acc += c.size() - 1;
                        acc
                    })
                    .collect()
            }
        };
        SplitSequence {
            kind: SplitKind::Down,
            k,
            values,
            split_indices,
        }
    }

    fn from_rooted_parts(values: Vec<i64>, k: usize, r: &Rooted) -> Self {
        let split_indices = match r {
            Rooted::Leaf => Vec::new(),
            Rooted::Node(first, rest) => {
                let mut acc = first.size();
                let mut out = vec![acc];
                for c in &rest[..rest.len() - 1] {
                    acc += c.size() - 1;
                    out.push(acc);
                }
                out
            }
        };
        SplitSequence {
            kind: SplitKind::Up,
            k,
            values,
            split_indices,
        }
    }

    pub fn from_planted(p: &Planted, k: usize) -> Self {
        Self::from_planted_parts(p.sequence(), k, p)
    }

    pub fn from_rooted(r: &Rooted, k: usize) -> Self {
        Self::from_rooted_parts(r.sequence(), k, r)
    }

    pub fn kind(&self) -> SplitKind {
        self.kind
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Number of leaves `n` of the encoded tree.
    pub fn n(&self) -> usize {
        match self.kind {
            SplitKind::Down => self.values.len() + 1,
            SplitKind::Up => self.values.len(),
        }
    }

    /// All `k - 1` split indices; empty for the base sequence.
    pub fn split_indices(&self) -> &[usize] {
        &self.split_indices
    }

    /// The first split index (`k_s` when `k = 2`).
    pub fn split_index(&self) -> Option<usize> {
        self.split_indices.first().copied()
    }

    pub fn planted(&self) -> Result<Planted> {
        match self.kind {
            SplitKind::Down => decode_down(&self.values, self.k, 2),
            SplitKind::Up => Err(Error::Precondition("not a down-split sequence".into())),
        }
    }

    pub fn rooted(&self) -> Result<Rooted> {
        match self.kind {
            SplitKind::Up => decode_up(&self.values, self.k, 1),
            SplitKind::Down => Err(Error::Precondition("not an up-split sequence".into())),
        }
    }

    /// Decodes into the marked (down) or rooted (up) combinatorial tree.
    pub fn to_tree(&self) -> Result<WeightedTree> {
        match self.kind {
            SplitKind::Down => parse_down_split(&self.values, self.k),
            SplitKind::Up => parse_up_split(&self.values, self.k),
        }
    }
}

impl fmt::Display for SplitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.kind {
            SplitKind::Down => 'd',
            SplitKind::Up => 'u',
        };
        let body: Vec<String> = self.values.iter().map(i64::to_string).collect();
        write!(f, "{tag}:{} k={}", body.join(","), self.k)
    }
}

impl FromStr for SplitSequence {
    type Err = Error;

    /// Parses `d:2,4,5 k=2` or `u:0,2 k=2`; `k=2` is assumed when omitted.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (body, k) = match s.split_once(char::is_whitespace) {
            Some((body, rest)) => {
                let k = rest
                    .trim()
                    .strip_prefix("k=")
                    .and_then(|k| k.parse().ok())
                    .ok_or_else(|| Error::parse(body.len(), format!("bad suffix `{rest}`")))?;
                (body, k)
            }
            None => (s, 2),
        };
        let (kind, list) = if let Some(list) = body.strip_prefix("d:") {
            (SplitKind::Down, list)
        } else if let Some(list) = body.strip_prefix("u:") {
            (SplitKind::Up, list)
        } else {
            return Err(Error::parse(0, "expected `d:` or `u:` prefix"));
        };
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::parse(2, format!("bad integer `{v}`")))
            })
            .collect::<Result<Vec<i64>>>()?;
        match kind {
            SplitKind::Down => SplitSequence::down(values, k),
            SplitKind::Up => SplitSequence::up(values, k),
        }
    }
}

pub fn is_down_split(values: &[i64], k: usize) -> bool {
    k >= 2 && decode_down(values, k, 2).is_ok()
}

pub fn is_up_split(values: &[i64], k: usize) -> bool {
    k >= 2 && decode_up(values, k, 1).is_ok()
}

fn same_shape(s: &[i64], r: &[i64]) -> Result<()> {
    if s.len() != r.len() {
        return Err(Error::Precondition(format!(
            "cannot compare split sequences of lengths {} and {}",
            s.len(),
            r.len()
        )));
    }
    Ok(())
}

/// `≺` on down-split sequences of equal length.
pub fn compare_down(s: &[i64], r: &[i64], k: usize) -> Result<Ordering> {
    check_k(k)?;
    same_shape(s, r)?;
    Ok(cmp_planted(&decode_down(s, k, 2)?, &decode_down(r, k, 2)?))
}

/// `≪` on up-split sequences of equal length.
pub fn compare_up(s: &[i64], r: &[i64], k: usize) -> Result<Ordering> {
    check_k(k)?;
    same_shape(s, r)?;
    Ok(cmp_rooted(&decode_up(s, k, 1)?, &decode_up(r, k, 1)?))
}

struct Labeller {
    b: TreeBuilder,
    next: usize,
}

impl Labeller {
    fn leaf(&mut self) -> VertexId {
        self.next += 1;
        self.b.add_leaf(format!("y{}", self.next))
    }

    fn planted(&mut self, p: &Planted, attach: VertexId) {
        let one = Rational::from_integer(1);
        match p {
            Planted::Leaf => {
                let l = self.leaf();
                self.b.add_edge(attach, l, one);
            }
            Planted::Node(children) => {
                let x = self.b.add_vertex();
                self.b.add_edge(attach, x, one);
                for c in children {
                    self.planted(c, x);
                }
            }
        }
    }

    fn rooted(&mut self, r: &Rooted) -> VertexId {
        let one = Rational::from_integer(1);
        match r {
            Rooted::Leaf => self.leaf(),
            Rooted::Node(first, rest) => {
                let o = self.b.add_vertex();
                let c = self.rooted(first);
                self.b.add_edge(o, c, one);
                for p in rest {
                    self.planted(p, o);
                }
                o
            }
        }
    }
}

/// Builds the marked tree of a planted structure; leaves are `y1` (the mark)
/// through `yn` in listing order.
pub fn planted_to_tree(p: &Planted) -> Result<WeightedTree> {
    let mut l = Labeller {
        b: TreeBuilder::new(),
        next: 0,
    };
    let v = l.leaf();
    l.planted(p, v);
    l.b.mark(Mark::Leaf(v));
    l.b.build()
}

pub fn rooted_to_tree(r: &Rooted) -> Result<WeightedTree> {
    let mut l = Labeller {
        b: TreeBuilder::new(),
        next: 0,
    };
    let o = l.rooted(r);
    l.b.mark(Mark::Root(o));
    l.b.build()
}

/// Marked `(k+1)`-valent combinatorial tree encoded by a down-split sequence.
/// Leaves are labelled `y1..yn` so that `W({y1..yj}) = s_j`.
pub fn parse_down_split(values: &[i64], k: usize) -> Result<WeightedTree> {
    check_k(k)?;
    planted_to_tree(&decode_down(values, k, 2)?)
}

/// Rooted `k`-ary combinatorial tree encoded by an up-split sequence.
pub fn parse_up_split(values: &[i64], k: usize) -> Result<WeightedTree> {
    check_k(k)?;
    rooted_to_tree(&decode_up(values, k, 1)?)
}

fn children_of(tree: &WeightedTree, x: VertexId, parent: VertexId) -> Vec<VertexId> {
    tree.neighbors(x)
        .iter()
        .map(|&(c, _)| c)
        .filter(|&c| c != parent)
        .collect()
}

/// Minimal marked structure of the branch entered through `x` from `parent`.
fn min_planted(tree: &WeightedTree, x: VertexId, parent: VertexId) -> Planted {
    if tree.is_leaf(x) {
        return Planted::Leaf;
    }
    let mut children: Vec<Planted> = children_of(tree, x, parent)
        .into_iter()
        .map(|c| min_planted(tree, c, x))
        .collect();
    children.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| cmp_planted(a, b)));
    Planted::Node(children)
}

fn min_rooted(tree: &WeightedTree, x: VertexId, parent: Option<VertexId>) -> Rooted {
    let kids: Vec<VertexId> = tree
        .neighbors(x)
        .iter()
        .map(|&(c, _)| c)
        .filter(|&c| Some(c) != parent)
        .collect();
    if kids.is_empty() {
        return Rooted::Leaf;
    }
    let heads: Vec<Rooted> = kids.iter().map(|&c| min_rooted(tree, c, Some(x))).collect();
    let best = (0..kids.len())
        .min_by(|&i, &j| {
            heads[j]
                .size()
                .cmp(&heads[i].size())
                .then_with(|| cmp_rooted(&heads[i], &heads[j]))
        })
        .expect("interior vertex has children");
    let mut rest: Vec<Planted> = kids
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != best)
        .map(|(_, &c)| min_planted(tree, c, x))
        .collect();
    rest.sort_by(|a, b| a.size().cmp(&b.size()).then_with(|| cmp_planted(a, b)));
    let head = heads.into_iter().nth(best).expect("index in range");
    Rooted::Node(Box::new(head), rest)
}

/// `≺`-minimal down-split sequence of a marked `(k+1)`-valent combinatorial
/// tree, computed from the tree's structure.
pub fn min_down_split(tree: &WeightedTree, k: usize) -> Result<SplitSequence> {
    check_k(k)?;
    let Mark::Leaf(v) = tree.mark() else {
        return Err(Error::class("min-down-split", "tree has no marked leaf"));
    };
    if !is_k_valent(tree, k) || !is_combinatorial(tree) {
        return Err(Error::class(
            "min-down-split",
            format!("tree is not a {}-valent combinatorial tree", k + 1),
        ));
    }
    let (o, _) = tree.neighbors(v)[0];
    Ok(SplitSequence::from_planted(&min_planted(tree, o, v), k))
}

/// `≪`-minimal up-split sequence of a rooted `k`-ary combinatorial tree.
pub fn min_up_split(tree: &WeightedTree, k: usize) -> Result<SplitSequence> {
    check_k(k)?;
    let Mark::Root(root) = tree.mark() else {
        return Err(Error::class("min-up-split", "tree has no root"));
    };
    if !is_k_ary(tree, k) || !is_combinatorial(tree) {
        return Err(Error::class(
            "min-up-split",
            format!("tree is not a rooted {k}-ary combinatorial tree"),
        ));
    }
    Ok(SplitSequence::from_rooted(&min_rooted(tree, root, None), k))
}

/// True when the Steiner subtree of `labels` (degree-two vertices kept) has
/// `k/(k-1) (|labels| - 1)` edges, i.e. is a rooted `k`-ary tree.
pub fn subtree_size_test(tree: &WeightedTree, labels: &[&str], k: usize) -> Result<bool> {
    check_k(k)?;
    if !(is_k_valent(tree, k) || is_k_ary(tree, k)) {
        return Err(Error::class(
            "subtree-size",
            format!("tree is neither {}-valent nor rooted {k}-ary", k + 1),
        ));
    }
    let set: Vec<VertexId> = labels.iter().map(|l| tree.vertex_of(l)).collect::<Result<_>>()?;
    let Some(&start) = set.first() else {
        return Err(Error::Precondition("empty leaf set".into()));
    };
    let mut inside = vec![false; tree.n_vertices()];
    for &v in &set {
        inside[v] = true;
    }
    let (parent, order) = tree.rooted_order(start);
    let mut edges = 0usize;
    for &v in order.iter().rev() {
        if let Some((p, _)) = parent[v] {
            if inside[v] {
                edges += 1;
                inside[p] = true;
            }
        }
    }
    Ok((k - 1) * edges == k * (set.len() - 1))
}

fn integer_sequence(seq: &[Rational]) -> Option<Vec<i64>> {
    seq.iter()
        .map(|r| r.is_integer().then(|| r.to_integer()).and_then(|x| x.to_i64()))
        .collect()
}

/// `≺`-minimal down-split sequence in the support of `dist`.
pub fn min_down_split_in_support(dist: &LengthDistribution, k: usize) -> Option<SplitSequence> {
    let mut best: Option<Planted> = None;
    for (seq, _) in dist.iter() {
        let Some(vals) = integer_sequence(&seq) else {
            continue;
        };
        if let Ok(p) = decode_down(&vals, k, 2) {
            if best.as_ref().is_none_or(|b| cmp_planted(&p, b).is_lt()) {
                best = Some(p);
            }
        }
    }
    best.map(|p| SplitSequence::from_planted(&p, k))
}

/// `≪`-minimal up-split sequence among `(0, W_2, ..., W_n)` in the support.
pub fn min_up_split_in_support(dist: &LengthDistribution, k: usize) -> Option<SplitSequence> {
    let mut best: Option<Rooted> = None;
    for (seq, _) in dist.iter() {
        let Some(mut vals) = integer_sequence(&seq) else {
            continue;
        };
        vals.insert(0, 0);
        if let Ok(r) = decode_up(&vals, k, 1) {
            if best.as_ref().is_none_or(|b| cmp_rooted(&r, b).is_lt()) {
                best = Some(r);
            }
        }
    }
    best.map(|r| SplitSequence::from_rooted(&r, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lengthseq::{exact_distribution, marked_distribution};
    use crate::tree::{is_isomorphic, parse_tree, steiner_length};

    fn down(v: &[i64]) -> SplitSequence {
        SplitSequence::down(v.to_vec(), 2).unwrap()
    }

    #[test]
    fn base_cases_and_small_examples() {
        assert!(is_down_split(&[1], 2));
        assert!(down(&[1]).split_index().is_none());
        assert_eq!(down(&[2, 3]).split_index(), Some(2));
        assert_eq!(down(&[2, 4, 5]).split_index(), Some(2));
        assert!(!is_down_split(&[2, 4, 6], 2));
        assert!(is_down_split(&[3, 4, 5], 2));
        assert!(!is_down_split(&[2, 3, 5], 2));
        assert!(is_up_split(&[0], 2));
        let u = SplitSequence::up(vec![0, 2], 2).unwrap();
        assert_eq!(u.split_index(), Some(1));
        assert!(!is_up_split(&[1, 2], 2));
        assert!(!is_up_split(&[0, 3], 2));
    }

    #[test]
    fn endpoints_follow_the_size_lemmas() {
        for n in 2..=7usize {
            for s in all_down(n, 2) {
                assert_eq!(*s.last().unwrap(), 2 * n as i64 - 3);
            }
        }
        for n in 1..=7usize {
            for s in all_up(n, 2) {
                assert_eq!(*s.last().unwrap(), 2 * n as i64 - 2);
            }
        }
        for n in (2..=9usize).step_by(2) {
            for s in all_down(n, 3) {
                assert_eq!(*s.last().unwrap(), (3 * n as i64 - 4) / 2);
            }
        }
    }

    /// Every down-split sequence of length `n - 1`, by brute force over
    /// increasing sequences with the right endpoint.
    fn all_down(n: usize, k: usize) -> Vec<Vec<i64>> {
        let end = (k as i64 * n as i64 - k as i64 - 1) / (k as i64 - 1);
        let mut out = Vec::new();
        let mut cur = Vec::new();
        increasing(&mut cur, n - 1, 1, end, &mut |s| {
            if is_down_split(s, k) {
                out.push(s.to_vec());
            }
        });
        out
    }

    fn all_up(n: usize, k: usize) -> Vec<Vec<i64>> {
        let end = (k * (n - 1) / (k - 1)) as i64;
        let mut out = Vec::new();
        let mut cur = vec![0];
        increasing(&mut cur, n, 1, end, &mut |s| {
            if is_up_split(s, k) {
                out.push(s.to_vec());
            }
        });
        out
    }

    fn increasing(cur: &mut Vec<i64>, len: usize, lo: i64, end: i64, f: &mut impl FnMut(&[i64])) {
        if cur.len() == len {
            if cur.last() == Some(&end) || (len == 1 && end == 0) {
                f(cur);
            }
            return;
        }
        for x in lo..=end {
            cur.push(x);
            increasing(cur, len, x + 1, end, f);
            cur.pop();
        }
    }

    #[test]
    fn orders_are_strict_total_orders() {
        for k in [2usize, 3] {
            for n in 2..=7usize {
                let seqs = all_down(n, k);
                check_order(&seqs, |a, b| compare_down(a, b, k).unwrap());
            }
            for n in 1..=7usize {
                let seqs = all_up(n, k);
                check_order(&seqs, |a, b| compare_up(a, b, k).unwrap());
            }
        }
        assert_eq!(compare_down(&[1], &[1], 2).unwrap(), Ordering::Equal);
        assert!(compare_down(&[1], &[2, 3], 2).is_err());
    }

    fn check_order(seqs: &[Vec<i64>], cmp: impl Fn(&[i64], &[i64]) -> Ordering) {
        for a in seqs {
            assert_eq!(cmp(a, a), Ordering::Equal);
            for b in seqs {
                let ab = cmp(a, b);
                assert_eq!(ab, cmp(b, a).reverse());
                if a != b {
                    assert_ne!(ab, Ordering::Equal, "{a:?} vs {b:?}");
                }
                for c in seqs {
                    if ab.is_lt() && cmp(b, c).is_lt() {
                        assert!(cmp(a, c).is_lt());
                    }
                }
            }
        }
    }

    #[test]
    fn split_index_ordering_examples() {
        // k_s = 2 precedes k_s = 3 at equal length.
        let a = [2, 4, 6, 7];
        let b = [3, 4, 6, 7];
        assert!(is_down_split(&a, 2) && is_down_split(&b, 2));
        assert_eq!(down(&a).split_index(), Some(2));
        assert_eq!(down(&b).split_index(), Some(3));
        assert_eq!(compare_down(&a, &b, 2).unwrap(), Ordering::Less);
    }

    #[test]
    fn parse_examples() {
        let edge = parse_down_split(&[1], 2).unwrap();
        assert_eq!(edge.n_vertices(), 2);
        let star = parse_down_split(&[2, 3], 2).unwrap();
        assert_eq!(star.n_leaves(), 3);
        assert!(is_k_valent(&star, 2));
        let q = parse_down_split(&[2, 4, 5], 2).unwrap();
        let expected = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap().marked_at("c").unwrap();
        assert!(is_isomorphic(&q, &expected));
        for (j, want) in [(2, 2), (3, 4), (4, 5)] {
            let ks: Vec<String> = (1..=j).map(|i| format!("y{i}")).collect();
            let ks: Vec<&str> = ks.iter().map(String::as_str).collect();
            assert_eq!(steiner_length(&q, &ks).unwrap(), Rational::from_integer(want));
        }
        let leaf = parse_up_split(&[0], 2).unwrap();
        assert_eq!(leaf.n_vertices(), 1);
        let cherry = parse_up_split(&[0, 2], 2).unwrap();
        assert_eq!(cherry.n_leaves(), 2);
        assert!(is_k_ary(&cherry, 2));
        assert!(matches!(parse_down_split(&[2, 4, 6], 2), Err(Error::InvalidSplit { .. })));
    }

    #[test]
    fn up_split_trees_have_two_n_minus_two_edges() {
        for n in 1..=7usize {
            for s in all_up(n, 2) {
                let t = parse_up_split(&s, 2).unwrap();
                assert_eq!(t.edges().len(), 2 * n - 2);
                assert!(is_k_ary(&t, 2));
            }
        }
    }

    #[test]
    fn min_split_examples() {
        let star = parse_tree("(a:1,b:1,c:1);").unwrap().marked_at("a").unwrap();
        assert_eq!(min_down_split(&star, 2).unwrap().values(), &[2, 3]);
        let q = parse_tree("((a:1,b:1):1,c:1,d:1);").unwrap().marked_at("a").unwrap();
        assert_eq!(min_down_split(&q, 2).unwrap().values(), &[2, 4, 5]);
        let cherry = parse_tree("(a:1,b:1);@root").unwrap();
        assert_eq!(min_up_split(&cherry, 2).unwrap().values(), &[0, 2]);
        assert!(min_down_split(&q.unmarked(), 2).is_err());
        assert!(min_up_split(&q, 2).is_err());
    }

    /// Oracle: minimum over the filtered support of the marked law.
    fn support_min_down(tree: &WeightedTree, k: usize) -> Vec<i64> {
        let Mark::Leaf(v) = tree.mark() else { panic!() };
        let d = marked_distribution(tree, tree.label(v).unwrap()).unwrap();
        let mut seqs: Vec<Vec<i64>> = d
            .iter()
            .map(|(s, _)| s.iter().map(|r| r.to_integer()).collect::<Vec<i64>>())
            .filter(|s| is_down_split(s, k))
            .collect();
        seqs.sort_by(|a, b| compare_down(a, b, k).unwrap());
        seqs.remove(0)
    }

    fn support_min_up(tree: &WeightedTree, k: usize) -> Vec<i64> {
        let d = exact_distribution(tree).unwrap();
        let mut seqs: Vec<Vec<i64>> = d
            .iter()
            .map(|(s, _)| {
                std::iter::once(0)
                    .chain(s.iter().map(|r| r.to_integer()))
                    .collect::<Vec<i64>>()
            })
            .filter(|s| is_up_split(s, k))
            .collect();
        seqs.sort_by(|a, b| compare_up(a, b, k).unwrap());
        seqs.remove(0)
    }

    #[test]
    fn structural_minimum_matches_support_filtering() {
        for k in [2usize, 3] {
            let max_n = if k == 2 { 8 } else { 9 };
            for n in 2..=max_n {
                for s in all_down(n, k) {
                    let t = parse_down_split(&s, k).unwrap();
                    assert_eq!(
                        min_down_split(&t, k).unwrap().values(),
                        support_min_down(&t, k).as_slice(),
                        "k={k} down {s:?}"
                    );
                }
            }
            for n in 2..=7 {
                for s in all_up(n, k) {
                    let t = parse_up_split(&s, k).unwrap();
                    assert_eq!(
                        min_up_split(&t, k).unwrap().values(),
                        support_min_up(&t, k).as_slice(),
                        "k={k} up {s:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn text_form_round_trips() {
        let s: SplitSequence = "d:2,4,5 k=2".parse().unwrap();
        assert_eq!(s.kind(), SplitKind::Down);
        assert_eq!(s.to_string(), "d:2,4,5 k=2");
        let u: SplitSequence = "u:0,2".parse().unwrap();
        assert_eq!(u.to_string(), "u:0,2 k=2");
        assert!("x:1 k=2".parse::<SplitSequence>().is_err());
        assert!("d:2,4,6 k=2".parse::<SplitSequence>().is_err());
        assert!("d:1 k=two".parse::<SplitSequence>().is_err());
    }
}

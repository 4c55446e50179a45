//! Enumeration and seeded random generation of trees from each class, and
//! exhaustive injectivity checks of `tree -> length-sequence law`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lengthseq::{exact_distribution, LengthDistribution, LengthSequence, DEFAULT_MAX_LEAVES};
use crate::rational::Rational;
use crate::reconstruct::TreeClass;
use crate::tree::{
    canonical_code, caterpillar, format_tree, is_isomorphic, is_simple, pairwise_distance_multiset,
    parse_tree, star, CanonicalCode, Edge, Mark, TreeBuilder, WeightedTree,
};

/// Largest leaf count accepted by [`enumerate_class`].
pub const MAX_ENUMERATION_LEAVES: usize = 12;

/// Largest edge count for which [`WeightScheme::GeneralPosition`] weights
/// (and all their subset sums) stay within 64-bit rationals.
pub const MAX_GENERAL_POSITION_EDGES: usize = 48;

/// Pairwise non-isomorphic representatives of a class at a fixed size,
/// sorted by canonical code.
#[derive(Clone, Debug)]
pub struct ClassEnumeration {
    pub class: TreeClass,
    pub n: usize,
    pub items: Vec<WeightedTree>,
}

/// Unweighted tree under construction.
#[derive(Clone)]
struct Shape {
    n_vertices: usize,
    edges: Vec<(usize, usize)>,
    root: Option<usize>,
}

impl Shape {
    fn edge() -> Self {
        Shape {
            n_vertices: 2,
            edges: vec![(0, 1)],
            root: None,
        }
    }

    fn single_root() -> Self {
        Shape {
            n_vertices: 1,
            edges: Vec::new(),
            root: Some(0),
        }
    }

    fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_vertices];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    fn leaves(&self) -> Vec<usize> {
        let d = self.degrees();
        (0..self.n_vertices)
            .filter(|&v| d[v] <= 1 && Some(v) != self.root.filter(|_| self.n_vertices > 1))
            .collect()
    }

    fn internal(&self) -> Vec<usize> {
        let d = self.degrees();
        (0..self.n_vertices)
            .filter(|&v| d[v] > 1 || (Some(v) == self.root && self.n_vertices > 1))
            .collect()
    }

    /// Hangs `k` new leaves from vertex `v`.
    fn sprout(&self, v: usize, k: usize) -> Self {
        let mut s = self.clone();
        for _ in 0..k {
            s.edges.push((v, s.n_vertices));
            s.n_vertices += 1;
        }
        s
    }

    /// Subdivides edge `e` and hangs a new leaf from the new vertex.
    fn subdivide(&self, e: usize) -> Self {
        let mut s = self.clone();
        let (u, v) = s.edges[e];
        let mid = s.n_vertices;
        s.edges[e] = (u, mid);
        s.edges.push((mid, v));
        s.edges.push((mid, mid + 1));
        s.n_vertices += 2;
        s
    }

    fn to_tree(&self, weight: impl Fn(usize) -> Rational) -> Result<WeightedTree> {
        let mut b = TreeBuilder::new();
        for _ in 0..self.n_vertices {
            b.add_vertex();
        }
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            b.add_edge(u, v, weight(i));
        }
        if let Some(r) = self.root {
            b.mark(Mark::Root(r));
        }
        b.build_auto_labelled("x")
    }
}

fn unit(_: usize) -> Rational {
    Rational::from_integer(1)
}

fn dedup(shapes: Vec<Shape>) -> Result<Vec<Shape>> {
    let keyed: Vec<(CanonicalCode, Shape)> = shapes
        .into_par_iter()
        .map(|s| Ok((canonical_code(&s.to_tree(unit)?), s)))
        .collect::<Result<_>>()?;
    let unique: BTreeMap<CanonicalCode, Shape> = keyed.into_iter().collect();
    Ok(unique.into_values().collect())
}

fn grow(start: Shape, steps: usize, children: impl Fn(&Shape) -> Vec<Shape> + Sync) -> Result<Vec<Shape>> {
    let mut level = vec![start];
    for _ in 0..steps {
        let next: Vec<Shape> = level.par_iter().flat_map_iter(&children).collect();
        level = dedup(next)?;
    }
    Ok(level)
}

fn check_valent_size(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    if n < 2 || !(n - 2).is_multiple_of(k - 1) {
        return Err(Error::Precondition(format!(
            "no {}-valent tree has {n} leaves",
            k + 1
        )));
    }
    Ok(())
}

fn check_ary_size(n: usize, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    if n < 1 || !(n - 1).is_multiple_of(k - 1) {
        return Err(Error::Precondition(format!("no rooted {k}-ary tree has {n} leaves")));
    }
    Ok(())
}

/// All compositions `(n_0, ..., n_ell)` with `n` leaves and `ell <= max_ell`,
/// one per reversal class (the lexicographically smaller orientation).
pub fn caterpillar_compositions(n: usize, max_ell: usize) -> Vec<Vec<usize>> {
    fn fill(c: &mut Vec<usize>, i: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if i + 1 == c.len() {
            c[i] = left;
            let rev: Vec<usize> = c.iter().rev().copied().collect();
            if c[0] > 0 && left > 0 && *c <= rev {
                out.push(c.clone());
            }
            return;
        }
        for x in 0..=left {
            c[i] = x;
            fill(c, i + 1, left - x, out);
        }
    }
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    out.push(vec![n]);
    for ell in 1..=max_ell {
        let mut c = vec![0; ell + 1];
        fill(&mut c, 0, n, &mut out);
    }
    out
}

/// Every isomorphism type of `class` with `n` leaves.
///
/// Supported classes: `KValent(k)`, `KAry(k)`, `Caterpillar` (spines of up
/// to `n` edges), `Star` and `CombinatorialHat` (all simple combinatorial
/// trees). Trees are unit-weighted with leaves `x1..xn`.
pub fn enumerate_class(class: TreeClass, n: usize) -> Result<ClassEnumeration> {
    if n > MAX_ENUMERATION_LEAVES {
        return Err(Error::Infeasible(format!(
            "enumeration is capped at {MAX_ENUMERATION_LEAVES} leaves, asked for {n}"
        )));
    }
    let shapes = match class {
        TreeClass::KValent(k) => {
            check_valent_size(n, k)?;
            if n == 2 {
                vec![Shape::edge()]
            } else {
                let first = Shape::single_root().sprout(0, k + 1);
                let first = Shape { root: None, ..first };
                grow(first, (n - k - 1) / (k - 1), |s| {
                    s.leaves().into_iter().map(|v| s.sprout(v, k)).collect()
                })?
            }
        }
        TreeClass::KAry(k) => {
            check_ary_size(n, k)?;
            grow(Shape::single_root(), (n - 1) / (k - 1), |s| {
                let leaves = if s.n_vertices == 1 { vec![0] } else { s.leaves() };
                leaves.into_iter().map(|v| s.sprout(v, k)).collect()
            })?
        }
        TreeClass::CombinatorialHat => {
            if n < 2 {
                return Err(Error::Precondition("trees need at least two leaves".into()));
            }
            grow(Shape::edge(), n - 2, |s| {
                let mut out: Vec<Shape> = s.internal().into_iter().map(|v| s.sprout(v, 1)).collect();
                out.extend((0..s.edges.len()).map(|e| s.subdivide(e)));
                out
            })?
        }
        TreeClass::Star => {
            if n < 3 {
                return Err(Error::Precondition("a star needs at least three leaves".into()));
            }
            vec![Shape::single_root().sprout(0, n)]
                .into_iter()
                .map(|s| Shape { root: None, ..s })
                .collect()
        }
        TreeClass::Caterpillar => {
            let mut items: Vec<WeightedTree> = caterpillar_compositions(n, n)
                .iter()
                .map(|c| caterpillar(c))
                .collect::<Result<_>>()?;
            items.sort_by_cached_key(canonical_code);
            return Ok(ClassEnumeration { class, n, items });
        }
        other => {
            return Err(Error::Precondition(format!(
                "class {other} is not enumerable (weights are continuous)"
            )))
        }
    };
    let items = shapes
        .iter()
        .map(|s| s.to_tree(unit))
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassEnumeration { class, n, items })
}

/// Edge weights assigned by [`random_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightScheme {
    Unit,
    /// Distinct powers of two times one random rational factor.
    GeneralPosition,
    /// Random binary merges at rational heights; only for the ultrametric class.
    Ultrametric,
    RandomRational,
}

impl FromStr for WeightScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "unit" => WeightScheme::Unit,
            "general_position" | "gp" => WeightScheme::GeneralPosition,
            "ultrametric" => WeightScheme::Ultrametric,
            "random_rational" | "rational" => WeightScheme::RandomRational,
            _ => return Err(Error::parse(0, format!("unknown weight scheme `{s}`"))),
        })
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightScheme::Unit => "unit",
            WeightScheme::GeneralPosition => "general_position",
            WeightScheme::Ultrametric => "ultrametric",
            WeightScheme::RandomRational => "random_rational",
        })
    }
}

fn random_simple_shape(n: usize, rng: &mut SplitMix64) -> Shape {
    let mut s = Shape::edge();
    for _ in 2..n {
        let internal = s.internal();
        let pick = rng.random_range(0..internal.len() + s.edges.len());
        s = if pick < internal.len() {
            s.sprout(internal[pick], 1)
        } else {
            s.subdivide(pick - internal.len())
        };
    }
    s
}

fn random_composition(n: usize, rng: &mut SplitMix64) -> Vec<usize> {
    let ell = rng.random_range(0..n);
    if ell == 0 {
        return vec![n];
    }
    let mut c = vec![0; ell + 1];
    c[0] = 1;
    c[ell] = 1;
    for _ in 2..n {
        c[rng.random_range(0..=ell)] += 1;
    }
    c
}

fn random_ultrametric(n: usize, rng: &mut SplitMix64) -> Result<WeightedTree> {
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut height: Vec<Rational> = vec![Rational::from_integer(0); n];
    let mut clusters: Vec<usize> = (0..n).collect();
    let mut last: Option<usize> = None;
    let mut h = Rational::from_integer(0);
    while clusters.len() > 1 {
        clusters.shuffle(rng);
        let a = clusters.pop().expect("two clusters");
        let b = clusters.pop().expect("two clusters");
        let joins_last = last.filter(|&l| l == a || l == b);
        if let (Some(l), true) = (joins_last, rng.random_range(0..4) == 0) {
            let other = if l == a { b } else { a };
            parent[other] = Some(l);
            clusters.push(l);
            continue;
        }
        h += Rational::new(rng.random_range(1..=4), rng.random_range(1..=2));
        let v = parent.len();
        parent.push(None);
        height.push(h);
        parent[a] = Some(v);
        parent[b] = Some(v);
        clusters.push(v);
        last = Some(v);
    }
    let root = clusters[0];
    let nv = parent.len();
    let mut kids = vec![Vec::new(); nv];
    for v in 0..nv {
        if let Some(p) = parent[v] {
            kids[p].push(v);
        }
    }
    let skip = (kids[root].len() == 2).then_some(root);
    let mut id = vec![usize::MAX; nv];
    let mut labels = Vec::new();
    for v in (0..nv).filter(|&v| Some(v) != skip) {
        id[v] = labels.len();
        labels.push((v < n).then(|| format!("x{}", v + 1)));
    }
    let mut edges = Vec::new();
    for v in 0..nv {
        match parent[v] {
            Some(p) if Some(p) != skip => edges.push(Edge {
                u: id[p],
                v: id[v],
                weight: height[p] - height[v],
            }),
            _ => {}
        }
    }
    if skip.is_some() {
        let (a, b) = (kids[root][0], kids[root][1]);
        edges.push(Edge {
            u: id[a],
            v: id[b],
            weight: height[root] - height[a] + height[root] - height[b],
        });
    }
    WeightedTree::from_parts(labels, edges, Mark::None)
}

/// Deterministic random tree of `class` with `n` leaves.
///
/// The generator is SplitMix64 seeded with `seed`, so a seed reproduces the
/// same tree bit for bit. `Ultrametric` weights go with the ultrametric
/// class only; `GeneralPosition` weights need a simple shape.
pub fn random_tree(
    class: TreeClass,
    n: usize,
    seed: u64,
    scheme: WeightScheme,
) -> Result<WeightedTree> {
    let mut rng = SplitMix64::seed_from_u64(seed);
    let incompatible = || {
        Error::Precondition(format!("weight scheme {scheme} does not apply to class {class}"))
    };
    if (class == TreeClass::Ultrametric) != (scheme == WeightScheme::Ultrametric) {
        return Err(incompatible());
    }
    if n < 2 && !matches!(class, TreeClass::KAry(_)) {
        return Err(Error::Precondition("trees need at least two leaves".into()));
    }
    let shape = match class {
        TreeClass::Ultrametric => return random_ultrametric(n, &mut rng),
        TreeClass::Star => {
            if n < 3 {
                return Err(Error::Precondition("a star needs at least three leaves".into()));
            }
            Shape { root: None, ..Shape::single_root().sprout(0, n) }
        }
        TreeClass::SmallN => {
            if n > 4 {
                return Err(Error::Precondition("small-n trees have at most four leaves".into()));
            }
            random_simple_shape(n, &mut rng)
        }
        TreeClass::GeneralPosition | TreeClass::CombinatorialHat => random_simple_shape(n, &mut rng),
        TreeClass::Caterpillar => {
            let c = random_composition(n, &mut rng);
            let t = caterpillar(&c)?;
            let edges = t.edges().iter().map(|e| (e.u, e.v)).collect();
            let s = Shape { n_vertices: t.n_vertices(), edges, root: None };
            if scheme == WeightScheme::Unit {
                return Ok(t);
            }
            s
        }
        TreeClass::KValent(k) => {
            check_valent_size(n, k)?;
            if n == 2 {
                Shape::edge()
            } else {
                let mut s = Shape { root: None, ..Shape::single_root().sprout(0, k + 1) };
                for _ in 0..(n - k - 1) / (k - 1) {
                    let leaves = s.leaves();
                    s = s.sprout(leaves[rng.random_range(0..leaves.len())], k);
                }
                s
            }
        }
        TreeClass::KAry(k) => {
            check_ary_size(n, k)?;
            let mut s = Shape::single_root();
            for _ in 0..(n - 1) / (k - 1) {
                let leaves = if s.n_vertices == 1 { vec![0] } else { s.leaves() };
                s = s.sprout(leaves[rng.random_range(0..leaves.len())], k);
            }
            s
        }
    };
    let m = shape.edges.len();
    let weights: Vec<Rational> = match scheme {
        WeightScheme::Unit => vec![Rational::from_integer(1); m],
        WeightScheme::RandomRational => (0..m)
            .map(|_| Rational::new(rng.random_range(1..=12), rng.random_range(1..=4)))
            .collect(),
        WeightScheme::GeneralPosition => {
            let probe = shape.to_tree(unit)?;
            if !is_simple(&probe.unmarked()) || probe.mark() != Mark::None {
                return Err(incompatible());
            }
            if m > MAX_GENERAL_POSITION_EDGES {
                return Err(Error::Infeasible(format!(
                    "general-position weights for {m} edges overflow 64-bit rationals (cap {MAX_GENERAL_POSITION_EDGES})"
                )));
            }
            let mut exps: Vec<u32> = (0..m as u32).collect();
            exps.shuffle(&mut rng);
            let factor = Rational::new(rng.random_range(1..=5), rng.random_range(1..=3));
            exps.into_iter()
                .map(|e| Rational::from_integer(1i64 << e) * factor)
                .collect()
        }
        WeightScheme::Ultrametric => unreachable!("handled above"),
    };
    shape.to_tree(|i| weights[i])
}

/// Outcome of an exhaustive injectivity check.
#[derive(Clone, Debug)]
pub struct InjectivityReport {
    pub label: String,
    pub types: usize,
    pub distinct_laws: usize,
    /// Groups of non-isomorphic trees sharing one law, as canonical codes.
    pub collisions: Vec<Vec<CanonicalCode>>,
}

impl InjectivityReport {
    pub fn injective(&self) -> bool {
        self.collisions.is_empty()
    }
}

impl fmt::Display for InjectivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} types, {} distinct laws, injective={}",
            self.label,
            self.types,
            self.distinct_laws,
            self.injective()
        )?;
        for group in &self.collisions {
            let codes: Vec<String> = group.iter().map(|c| c.to_string()).collect();
            writeln!(f, "  collision: {}", codes.join(" | "))?;
        }
        Ok(())
    }
}

type LawKey = (usize, u128, Vec<(LengthSequence, u128)>);

fn law_key(d: &LengthDistribution) -> LawKey {
    (d.n(), d.total(), d.iter().collect())
}

/// Compares the length-sequence laws of `trees` (pairwise non-isomorphic).
pub fn injectivity_over(label: impl Into<String>, trees: &[WeightedTree]) -> Result<InjectivityReport> {
    if let Some(t) = trees.iter().find(|t| t.n_leaves() > DEFAULT_MAX_LEAVES) {
        return Err(Error::Infeasible(format!(
            "injectivity check enumerates laws, capped at {DEFAULT_MAX_LEAVES} leaves; got {}",
            t.n_leaves()
        )));
    }
    let keyed: Vec<(LawKey, CanonicalCode)> = trees
        .par_iter()
        .map(|t| Ok((law_key(&exact_distribution(t)?), canonical_code(t))))
        .collect::<Result<_>>()?;
    let mut groups: BTreeMap<LawKey, Vec<CanonicalCode>> = BTreeMap::new();
    for (k, c) in keyed {
        groups.entry(k).or_default().push(c);
    }
    Ok(InjectivityReport {
        label: label.into(),
        types: trees.len(),
        distinct_laws: groups.len(),
        collisions: groups.into_values().filter(|g| g.len() > 1).collect(),
    })
}

/// Exhaustive injectivity check over one enumerable class.
pub fn injectivity_oracle(class: TreeClass, n: usize) -> Result<InjectivityReport> {
    let e = enumerate_class(class, n)?;
    let trees: Vec<WeightedTree> = e.items.into_iter().filter(|t| t.n_leaves() >= 2).collect();
    injectivity_over(format!("{class} n={n}"), &trees)
}

/// Caterpillars of every size with `n + ell <= max_sum`, checked together.
pub fn caterpillar_injectivity(max_sum: usize) -> Result<InjectivityReport> {
    let mut trees = Vec::new();
    for n in 2..=max_sum {
        for c in caterpillar_compositions(n, max_sum - n) {
            trees.push(caterpillar(&c)?);
        }
    }
    injectivity_over(format!("caterpillar n+ell<={max_sum}"), &trees)
}

/// A documented pair of non-isomorphic trees that a statistic fails to
/// separate.
#[derive(Clone, Debug)]
pub struct Witness {
    pub name: &'static str,
    pub left: WeightedTree,
    pub right: WeightedTree,
    /// True when the statistic agrees on both trees although they are not
    /// isomorphic.
    pub confirmed: bool,
}

/// Known collisions: subdividing an edge leaves the length-sequence law
/// unchanged, and two caterpillars share their multiset of leaf-to-leaf
/// distances.
pub fn non_injectivity_witnesses() -> Result<Vec<Witness>> {
    let left = parse_tree("(a:2,b:1,c:1);")?;
    let right = parse_tree("((a:1):1,b:1,c:1);")?;
    let confirmed = !is_isomorphic(&left, &right)
        && exact_distribution(&left)?.same_law(&exact_distribution(&right)?);
    let subdivision = Witness {
        name: "subdivided-edge",
        left,
        right,
        confirmed,
    };
    let left = caterpillar(&[2, 11, 12])?;
    let right = caterpillar(&[3, 14, 8])?;
    let confirmed = !is_isomorphic(&left, &right)
        && pairwise_distance_multiset(&left) == pairwise_distance_multiset(&right);
    let pairs = Witness {
        name: "pair-distance-multiset",
        left,
        right,
        confirmed,
    };
    Ok(vec![subdivision, pairs])
}

/// Writes one tree per line in the tree text format.
pub fn write_corpus<W: Write>(out: &mut W, trees: &[WeightedTree]) -> io::Result<()> {
    for t in trees {
        writeln!(out, "{}", format_tree(t))?;
    }
    Ok(())
}

/// Reads a corpus written by [`write_corpus`]; blank lines are skipped.
pub fn read_corpus<R: BufRead>(input: R) -> Result<Vec<WeightedTree>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line.map_err(|e| Error::parse(0, format!("read failure: {e}")))?;
        if !line.trim().is_empty() {
            out.push(parse_tree(line.trim())?);
        }
    }
    Ok(out)
}

/// Star with unit weights; convenience for oracles.
pub fn unit_star(n: usize) -> Result<WeightedTree> {
    star(&vec![Rational::from_integer(1); n])
}

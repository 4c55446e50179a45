//! Newick-style text format.
//!
//! ```text
//! tree    := node ';' trailer?
//! node    := '(' branch (',' branch)* ')' label? | label
//! branch  := node (':' length)?
//! trailer := '@mark=' label | '@root'
//! ```
//!
//! Lengths are integers, decimals or `p/q` rationals; a missing length means
//! one. The outermost node is written first. A labelled outermost node with
//! children is a leaf whose single neighbour is given in parentheses, e.g.
//! `((b:1,c:1):1)a;@mark=a`.

use num_traits::One;

use super::{Edge, Mark, VertexId, WeightedTree};
use crate::error::{Error, Result};
use crate::rational::{parse_rational, Rational};

const RESERVED: &[char] = &['(', ')', ',', ':', ';', '@'];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    labels: Vec<Option<String>>,
    edges: Vec<Edge>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn token(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_whitespace() || RESERVED.contains(&c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn node(&mut self) -> Result<VertexId> {
        let v = self.labels.len();
        self.labels.push(None);
        if self.eat('(') {
            loop {
                let child = self.node()?;
                let weight = if self.eat(':') {
                    let at = self.pos;
                    let tok = self.token();
                    parse_rational(tok).map_err(|_| {
                        Error::parse(at, format!("invalid edge length `{tok}`"))
                    })?
                } else {
                    Rational::one()
                };
                self.edges.push(Edge { u: v, v: child, weight });
                if self.eat(',') {
                    continue;
                }
                if self.eat(')') {
                    break;
                }
                return Err(Error::parse(self.pos, "expected `,` or `)`"));
            }
        }
        let label = self.token();
        if !label.is_empty() {
            self.labels[v] = Some(label.to_string());
        }
        Ok(v)
    }
}

/// Parses the tree text format.
pub fn parse_tree(text: &str) -> Result<WeightedTree> {
    let mut p = Parser {
        src: text,
        pos: 0,
        labels: Vec::new(),
        edges: Vec::new(),
    };
    let top = p.node()?;
    if !p.eat(';') {
        return Err(Error::parse(p.pos, "expected `;`"));
    }
    p.skip_ws();
    let rest = &text[p.pos..];
    let mark = if rest.is_empty() {
        Mark::None
    } else if rest == "@root" {
        Mark::Root(top)
    } else if let Some(label) = rest.strip_prefix("@mark=") {
        let v = p
            .labels
            .iter()
            .position(|l| l.as_deref() == Some(label))
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        Mark::Leaf(v)
    } else {
        return Err(Error::parse(p.pos, format!("unexpected trailer `{rest}`")));
    };
    WeightedTree::from_parts(p.labels, p.edges, mark).map_err(|e| match e {
        Error::InvalidTree(msg) => Error::parse(0, msg),
        other => other,
    })
}

fn write_node(tree: &WeightedTree, v: VertexId, parent: Option<VertexId>, out: &mut String) {
    let children: Vec<(VertexId, usize)> = tree
        .neighbors(v)
        .iter()
        .copied()
        .filter(|&(c, _)| Some(c) != parent)
        .collect();
    if !children.is_empty() {
        out.push('(');
        for (i, &(c, e)) in children.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            write_node(tree, c, Some(v), out);
            out.push(':');
            out.push_str(&tree.edges()[e].weight.to_string());
        }
        out.push(')');
    }
    if let Some(l) = tree.label(v) {
        out.push_str(l);
    }
}

/// Serialises a tree; the mark or root vertex (else vertex 0) is written
/// outermost. Parsing the output reproduces the text exactly.
pub fn format_tree(tree: &WeightedTree) -> String {
    let top = tree.mark().vertex().unwrap_or(0);
    let mut out = String::new();
    write_node(tree, top, None, &mut out);
    out.push(';');
    match tree.mark() {
        Mark::None => {}
        Mark::Root(_) => out.push_str("@root"),
        Mark::Leaf(v) => {
            out.push_str("@mark=");
            out.push_str(tree.label(v).unwrap_or_default());
        }
    }
    out
}
